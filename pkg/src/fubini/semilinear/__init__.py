"""Semilinear sets over an ordered Q-vector space."""

from .backend import SemilinearBackend
from .cad import CellDecomposition, cad_qe, decompose
from .qe import qe
from .sampling import SampleReport, sample_equiv

__all__ = ["CellDecomposition", "SampleReport", "SemilinearBackend", "cad_qe", "decompose", "qe",
           "sample_equiv"]
