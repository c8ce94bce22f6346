class ToolkitError(Exception):
    """Erro base de todas as operações do toolkit."""


class SizeError(ToolkitError, ValueError):
    """Limite do crivo nulo ou acima do teto configurado."""


class RangeError(ToolkitError, ValueError):
    """Argumento fora do domínio da função aritmética ou da tabela."""


class NormalizationError(ToolkitError, ValueError):
    """Resíduo fora de 0 <= a < q."""


class ShapeError(ToolkitError, ValueError):
    """Séries de coeficientes com limites diferentes."""


class UsageError(ToolkitError, ValueError):
    """Parâmetros de uso inválidos (grades, flags, combinações)."""


class DomainError(ToolkitError, ValueError):
    """Ponto s fora da região de validade do método de avaliação."""


class PoleError(DomainError):
    """Avaliação exatamente no polo s = 1."""


class UnsupportedOrderError(ToolkitError, ValueError):
    """Ordem de constante de Stieltjes acima do máximo suportado."""
