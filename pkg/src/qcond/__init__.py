"""Numerical toolkit for quantum conditioning and auxiliary-register problems."""
from .kernels import BACKEND

__all__ = ["BACKEND"]
__version__ = "0.1.0"
