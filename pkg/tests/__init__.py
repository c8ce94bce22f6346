# Empty file to make this a Python package
