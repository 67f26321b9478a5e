from .parser import parse
from .printer import pretty, pretty_term
from .sets import DefinableMap, DefinableSet, ParamFamily, product, section
from .signature import (FINITE, ORDERED_QVS, PURE_SET, Signature, finite_signature,
                        pure_set_signature, qvs_signature)
from .syntax import substitute

__all__ = [
    "parse", "pretty", "pretty_term", "substitute", "DefinableMap", "DefinableSet",
    "ParamFamily", "product", "section", "Signature", "FINITE", "ORDERED_QVS", "PURE_SET",
    "finite_signature", "pure_set_signature", "qvs_signature",
]
