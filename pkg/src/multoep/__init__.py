"""Multiplicative functions, Toeplitz structure and pretentious distances."""

__version__ = "0.1.0"
