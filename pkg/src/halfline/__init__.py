"""Spectral analysis of Bessel operators on the half-line."""

__version__ = "0.1.0"
