"""Finite structures and the pure set."""

from .finite import FiniteBackend, FiniteStructure
from .pureset import PureSetBackend, morley_rank, pure_euler

__all__ = ["FiniteBackend", "FiniteStructure", "PureSetBackend", "morley_rank", "pure_euler"]
