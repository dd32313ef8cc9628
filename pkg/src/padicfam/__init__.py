"""Exact and p-adic computations for rank-bounded points in families of curves.

Modules: ``exactnum`` (rationals, enclosures), ``liedims`` (graded Lie
algebra dimensions), ``filtered`` (filtered graded shapes), ``bounds``
(non-density thresholds), ``padic`` (scalars and truncated series),
``transport`` (unipotent parallel transport), ``axschanuel`` (the
first-integral procedure) and ``cli``.
"""

from .exactnum import BoundValue, DomainError, PrecisionError

__version__ = "0.1.0"

__all__ = ["BoundValue", "DomainError", "PrecisionError", "__version__"]
