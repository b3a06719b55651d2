"""Numerical tools for trigonometric approximation in weighted Orlicz spaces."""
from .youngfn import YoungFunction
from .periodic import Grid, PeriodicFunction, TrigPolynomial
from .weights import Weight
from .norms import OrliczContext, luxemburg_norm, orlicz_norm

__version__ = "0.1.0"
__all__ = ["YoungFunction", "Grid", "PeriodicFunction", "TrigPolynomial", "Weight",
           "OrliczContext", "luxemburg_norm", "orlicz_norm"]
