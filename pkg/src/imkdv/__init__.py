"""Pseudo-spectral mKdV / coupled-mKdV simulator with I-method machinery."""

__version__ = "0.1.0"

from .kernels import backend_name

__all__ = ["backend_name", "__version__"]
