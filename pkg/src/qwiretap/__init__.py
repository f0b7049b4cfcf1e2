"""Numerical toolkit for classical-quantum wiretap channels."""

from . import channels, codes, errors, exponents, gf, hermitian, inequalities, optimize, quantities

__version__ = "0.1.0"
