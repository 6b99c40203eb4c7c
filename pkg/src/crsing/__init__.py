"""Exact symbolic tools for CR singularities of real submanifolds of C^n."""

from .algebra import GQ, INFINITE, Polynomial, Ring, parse

__all__ = ["GQ", "INFINITE", "Polynomial", "Ring", "parse"]
__version__ = "0.1.0"
