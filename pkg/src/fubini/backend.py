"""Operations every backend provides, and the checks built on top of them."""

from __future__ import annotations

from .errors import ImageEscapesCodomain, NotFunctional, NotInBase, NotTotal
from .logic.parser import parse
from .logic.sets import DefinableMap, DefinableSet
from .logic.syntax import Rel, Var, conj, exists, neg, shift, vars_


class Backend:
    """Abstract backend over one signature.

    Subclasses implement ``qe``, ``find_point``, ``measure`` and
    ``param_classes``; the rest is derived.
    """

    name = "abstract"
    symbolic = True
    kinds: dict = {}

    def __init__(self, sig):
        self.sig = sig

    # -- to be provided
    def qe(self, phi):
        raise NotImplementedError

    def find_point(self, phi, arity: int):
        """Some tuple in ``{x : phi}``, or None when empty."""
        raise NotImplementedError

    def measure(self, kind: str, phi, arity: int):
        raise NotImplementedError

    def param_classes(self, phi, k: int, m: int, kind: str):
        """``[(class formula over x1..xk, value)]`` for the sections of ``phi``."""
        raise NotImplementedError

    def fmt_point(self, point) -> list:
        return [str(v) for v in point]

    # -- derived
    def semiring(self, kind: str):
        return self.kinds[kind]

    def parse(self, text: str):
        return parse(text, self.sig)

    def definable(self, text_or_phi, arity: int, in_base: bool = False) -> DefinableSet:
        phi = self.parse(text_or_phi) if isinstance(text_or_phi, str) else text_or_phi
        X = DefinableSet(self.sig, arity, phi)
        if in_base:
            self.check_in_base(X)
            X = DefinableSet(self.sig, arity, phi, True)
        return X

    def is_empty(self, phi, arity: int) -> bool:
        return self.find_point(phi, arity) is None

    def base_atom(self, i: int):
        return Rel(self.sig.base_pred, (Var(f"x{i}"),))

    def outside_base(self, phi, arity: int):
        return conj(phi, neg(conj(*[self.base_atom(i) for i in range(1, arity + 1)])))

    def check_in_base(self, X: DefinableSet) -> None:
        w = self.find_point(self.outside_base(X.phi, X.arity), X.arity)
        if w is not None:
            raise NotInBase(f"point outside C^{X.arity}", self.fmt_point(w))

    def subset_witness(self, phi, psi, arity: int):
        """A point of ``phi`` missing from ``psi``, or None."""
        return self.find_point(conj(phi, neg(psi)), arity)

    def equivalent(self, phi, psi, arity: int) -> bool:
        return self.subset_witness(phi, psi, arity) is None and self.subset_witness(psi, phi, arity) is None

    def validate_map(self, f: DefinableMap) -> None:
        """Raise on a non-functional, non-total or codomain-escaping graph."""
        m, n = f.dom_arity, f.cod_arity
        G = f.graph.phi
        G2 = f.graph.at(vars_(1, m) + vars_(m + n + 1, n))
        diff = neg(conj(*[_eq(m + i, m + n + i) for i in range(1, n + 1)]))
        w = self.find_point(conj(G, G2, diff), m + 2 * n)
        if w is not None:
            raise NotFunctional("two outputs for one input",
                                {"x": self.fmt_point(w[:m]), "y": self.fmt_point(w[m:m + n]),
                                 "y'": self.fmt_point(w[m + n:])})
        if f.dom is not None:
            outs = [f"_t{j}" for j in range(n)]
            has = exists(outs, f.graph.at(vars_(1, m) + [Var(v) for v in outs]))
            w = self.find_point(conj(f.dom.phi, neg(has)), m)
            if w is not None:
                raise NotTotal("domain point without output", self.fmt_point(w))
        if f.cod is not None:
            w = self.find_point(conj(G, neg(shift(f.cod.phi, m))), m + n)
            if w is not None:
                raise ImageEscapesCodomain("output outside codomain",
                                           {"x": self.fmt_point(w[:m]), "y": self.fmt_point(w[m:])})


def _eq(i: int, j: int):
    from .logic.syntax import Eq
    return Eq(Var(f"x{i}"), Var(f"x{j}"))
