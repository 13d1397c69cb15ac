"""Weierstrass-type synthesis of H1/H2 surfaces and their minimal / Laguerre minimal companions."""

__version__ = "0.1.0"
