"""Exact and numeric calculus for conformally covariant operators on the round sphere."""

__version__ = "0.1.0"
