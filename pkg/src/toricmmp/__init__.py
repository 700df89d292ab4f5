"""Exact minimal-model-program and adjoint-algebra computations on toric pairs."""

from .errors import InputError, ToricMMPError
from .fan import Fan, TorusDivisor, divisor
from .kernel import QuadReal
from .pairs import ToricPair

__all__ = ["Fan", "InputError", "QuadReal", "ToricMMPError", "ToricPair", "TorusDivisor", "divisor"]
__version__ = "0.1.0"
