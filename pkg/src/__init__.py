"""
Circulant and block-circulant spectral toolkit for the nonnegative inverse eigenvalue problem.
"""
__version__ = "1.0.0"
