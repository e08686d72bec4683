"""Kernel backend selection: compiled extension if built, else pure Python."""
try:
    from . import _kernels as kernels
except ImportError:  # extension not built
    from . import _kernels_py as kernels

BACKEND = kernels.BACKEND
