"""Fubini measures on definable sets.

Base measures (Euler characteristic, dimension, counting, Morley rank) on
semilinear, pure-set and finite backends, the extension of a measure to sets
presented by r-step fiberings, and audits of the measure laws.
"""

from .semiring import INT, TROP, COUNT, SemiringId, SemiringValue, make, one, zero

__version__ = "0.1.0"

__all__ = ["COUNT", "INT", "TROP", "SemiringId", "SemiringValue", "make", "one", "zero",
           "__version__"]
