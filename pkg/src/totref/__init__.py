"""Totally reflexive modules over artinian and graded quotient rings: Gröbner bases,
minimal resolutions, Ext and Poincaré series checks, and module family constructions."""

from .kernel import Field, PolyRing, Polynomial
from .groebner import Ideal, PolyMatrix
from .quotient import QuotientRing
from .fpmodule import FPModule
from .dsl import parse_script
from .runner import run_tasks

__version__ = "0.1.0"

__all__ = ["Field", "PolyRing", "Polynomial", "Ideal", "PolyMatrix", "QuotientRing", "FPModule",
           "parse_script", "run_tasks", "__version__"]
