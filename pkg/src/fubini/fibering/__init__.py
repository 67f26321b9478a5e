"""r-step fiberings: the record, validation, restriction and combination."""

from .ops import ValidationResult, combine, empty_fibering, n_ary_combine, restrict, validate
from .record import Fibering, dom_len, graph_arity, param_len

__all__ = ["Fibering", "ValidationResult", "combine", "dom_len", "empty_fibering", "graph_arity",
           "n_ary_combine", "param_len", "restrict", "validate"]
