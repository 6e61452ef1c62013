"""Structured-gradient optimizers (ASGO family), matrix-function kernels and a
verification harness for their convergence bounds."""
from asgo._backend import name as backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
