"""Definable sets, maps and parametrized families as formula records."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ArityMismatch, SortError
from .printer import pretty
from .signature import Signature
from .syntax import (Formula, apply, conj, exists, free_vars, position, shift,
                     vars_)


def _check_positional(phi, arity: int) -> None:
    for name in free_vars(phi):
        i = position(name)
        if i is None or i > arity:
            raise SortError(f"free variable {name!r} outside x1..x{arity}")


@dataclass(frozen=True)
class DefinableSet:
    """``{(x1..xm) : phi}`` as a subset of ``M^m``.

    ``in_base`` records that the set was verified to lie in ``C^m``; use
    ``Backend.definable(..., in_base=True)`` to get that check.
    """

    sig: Signature
    arity: int
    phi: Formula
    in_base: bool = False

    def __post_init__(self):
        if self.arity < 0:
            raise ArityMismatch("negative arity")
        _check_positional(self.phi, self.arity)

    def __str__(self):
        return f"{{x1..x{self.arity} : {pretty(self.phi)}}}"

    def at(self, args) -> Formula:
        """The defining formula with ``args`` plugged in for x1..xm."""
        return apply(self.phi, args)

    def with_phi(self, phi) -> "DefinableSet":
        return DefinableSet(self.sig, self.arity, phi)


@dataclass(frozen=True)
class DefinableMap:
    """A map given by its graph ``G ⊆ M^(m+n)``.

    ``dom`` is optional; when present, totality on it is part of validation.
    """

    graph: DefinableSet
    dom_arity: int
    cod_arity: int
    cod: DefinableSet | None = None
    dom: DefinableSet | None = None

    def __post_init__(self):
        if self.graph.arity != self.dom_arity + self.cod_arity:
            raise ArityMismatch("graph arity must equal dom_arity + cod_arity")
        if self.cod is not None and self.cod.arity != self.cod_arity:
            raise ArityMismatch("codomain arity mismatch")
        if self.dom is not None and self.dom.arity != self.dom_arity:
            raise ArityMismatch("domain arity mismatch")

    @property
    def sig(self) -> Signature:
        return self.graph.sig

    def domain(self) -> DefinableSet:
        """Projection of the graph to its first ``dom_arity`` coordinates."""
        m, n = self.dom_arity, self.cod_arity
        names = [f"_o{j}" for j in range(n)]
        from .syntax import Var

        body = self.graph.at(vars_(1, m) + [Var(v) for v in names])
        return DefinableSet(self.sig, m, exists(names, body))

    def image(self, of: DefinableSet | None = None) -> DefinableSet:
        m, n = self.dom_arity, self.cod_arity
        names = [f"_i{j}" for j in range(m)]
        from .syntax import Var

        src = [Var(v) for v in names]
        body = self.graph.at(src + vars_(1, n))
        if of is not None:
            body = conj(of.at(src), body)
        return DefinableSet(self.sig, n, exists(names, body))

    def fiber_family(self) -> "ParamFamily":
        """``{(y, x) : f(x) = y}`` as a family over the codomain."""
        m, n = self.dom_arity, self.cod_arity
        phi = self.graph.at(vars_(n + 1, m) + vars_(1, n))
        return ParamFamily(DefinableSet(self.sig, n + m, phi), n)


@dataclass(frozen=True)
class ParamFamily:
    """``S ⊆ M^k × M^m`` read as the family of sections ``S(p)``."""

    S: DefinableSet
    param_arity: int

    def __post_init__(self):
        if not 0 <= self.param_arity <= self.S.arity:
            raise ArityMismatch("parameter arity exceeds family arity")

    @property
    def fiber_arity(self) -> int:
        return self.S.arity - self.param_arity


def section(F: ParamFamily, p) -> DefinableSet:
    """``S(p) = {q : (p, q) ∈ S}`` with ``p`` substituted as constants."""
    p = tuple(p)
    if len(p) != F.param_arity:
        raise ArityMismatch(f"parameter tuple has {len(p)} entries, family expects {F.param_arity}")
    m = F.fiber_arity
    phi = apply(F.S.phi, list(p) + vars_(1, m))
    return DefinableSet(F.S.sig, m, phi)


def product(X: DefinableSet, Y: DefinableSet) -> DefinableSet:
    return DefinableSet(X.sig, X.arity + Y.arity, conj(X.phi, shift(Y.phi, X.arity)))
