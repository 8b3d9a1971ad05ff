"""Factorization of CM values of weight one regularized Petersson products for Q(sqrt(-D))."""

__version__ = "0.1.0"
