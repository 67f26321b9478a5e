"""Cylindrical cell decomposition for linear formulas.

Projection keeps every form free of the eliminated variable and adds the
pairwise differences of the section terms ``v = t_i``.  With linear forms the
leading coefficients are constants, so this closure makes the order of the
section terms invariant over every cell below, which is all lifting needs.

Variables are processed in a fixed order (``x1..xn`` by default); the
"reversed" ordering is the second documented ordering used for invariance
checks.  Sample points are rational: midpoints between consecutive sections,
``lo - 1`` / ``hi + 1`` on unbounded sectors, ``0`` when a stack has no
sections.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from ..logic.syntax import (TOP, And, Bot, Eq, Exists, Forall, Lt, Not, Or, Rel, Top, Var,
                            conj, disj, free_vars, lin, substitute)
from .linear import eval_nnf, to_nnf


# --------------------------------------------------------------- linear forms


def _norm(coeffs: dict, const, rank: dict):
    """Scale so the highest variable has coefficient 1; None if constant."""
    items = [(v, Fraction(c)) for v, c in coeffs.items() if c != 0]
    if not items:
        return None
    top = max(items, key=lambda t: rank[t[0]])
    c = top[1]
    items = tuple(sorted(((v, d / c) for v, d in items), key=lambda t: rank[t[0]]))
    return (items, Fraction(const) / c)


def _level(form, rank) -> int:
    return rank[form[0][-1][0]]


def _section_term(form):
    """``v + rest = 0`` solved as ``v = term``; term is (coeffs, const)."""
    items, const = form
    return (tuple((v, -c) for v, c in items[:-1]), -const)


def _eval_term(term, env) -> Fraction:
    coeffs, const = term
    s = const
    for v, c in coeffs:
        s += c * env[v]
    return s


def _term_ast(term):
    return lin(dict(term[0]), term[1])


# ----------------------------------------------------------------- the tree


@dataclass
class Node:
    """A cell of the cylindrical tree; the root is the unique cell of M^0."""

    level: int
    pattern: tuple
    sample: tuple
    dim: int
    children: list = field(default_factory=list)


@dataclass(frozen=True)
class Cell:
    pattern: tuple
    sample: tuple
    dim: int

    def to_json(self, order) -> dict:
        coords = []
        for v, p in zip(order, self.pattern):
            if p[0] == "section":
                coords.append({"var": v, "kind": "section", "term": _fmt(p[1])})
            else:
                coords.append({"var": v, "kind": "interval",
                               "lo": None if p[1] is None else _fmt(p[1]),
                               "hi": None if p[2] is None else _fmt(p[2])})
        return {"dim": self.dim, "coords": coords, "sample": [str(s) for s in self.sample]}


def _fmt(term) -> str:
    from ..logic.printer import pretty_term
    return pretty_term(_term_ast(term))


@dataclass(frozen=True)
class CellDecomposition:
    arity: int
    order: tuple
    cells: tuple

    def to_json(self) -> dict:
        return {"arity": self.arity, "order": list(self.order),
                "cells": [c.to_json(self.order) for c in self.cells]}


def _atoms(node, out):
    if node is True or node is False:
        return
    if node[0] == "atom":
        out.add(node[1])
    else:
        for n in node[1]:
            _atoms(n, out)


def build_tree(nnf_nodes, order) -> Node:
    """Full cylindrical tree over ``order`` adapted to the atoms of ``nnf_nodes``."""
    rank = {v: i for i, v in enumerate(order)}
    atoms = set()
    for n in nnf_nodes:
        _atoms(n, atoms)
    by_level = [set() for _ in order]
    for _, coeffs, const in atoms:
        f = _norm(dict(coeffs), const, rank)
        if f is not None:
            by_level[_level(f, rank)].add(f)
    terms_by_level = []
    for k in range(len(order) - 1, -1, -1):
        terms = sorted({_section_term(f) for f in by_level[k]}, key=repr)
        terms_by_level.append(terms)
        for (ac, ak), (bc, bk) in combinations(terms, 2):
            d = dict(ac)
            for v, c in bc:
                d[v] = d.get(v, 0) - c
            f = _norm(d, ak - bk, rank)
            if f is not None:
                by_level[_level(f, rank)].add(f)
    terms_by_level.reverse()
    root = Node(0, (), (), 0)
    _lift(root, order, terms_by_level, {})
    return root


def _lift(node: Node, order, terms_by_level, env):
    k = node.level
    if k == len(order):
        return
    v = order[k]
    vals = {}
    for t in terms_by_level[k]:
        x = _eval_term(t, env)
        if x not in vals or repr(t) < repr(vals[x]):
            vals[x] = t
    roots = sorted(vals)
    pieces = []
    if not roots:
        pieces.append((("sector", None, None), Fraction(0), 1))
    else:
        pieces.append((("sector", None, vals[roots[0]]), roots[0] - 1, 1))
        for i, r in enumerate(roots):
            pieces.append((("section", vals[r]), r, 0))
            if i + 1 < len(roots):
                pieces.append((("sector", vals[r], vals[roots[i + 1]]), (r + roots[i + 1]) / 2, 1))
        pieces.append((("sector", vals[roots[-1]], None), roots[-1] + 1, 1))
    for pat, s, d in pieces:
        child = Node(k + 1, node.pattern + (pat,), node.sample + (s,), node.dim + d)
        env[v] = s
        _lift(child, order, terms_by_level, env)
        node.children.append(child)
    env.pop(v, None)


def leaves(node: Node, depth: int):
    if node.level == depth:
        yield node
        return
    for c in node.children:
        yield from leaves(c, depth)


def cell_formula(pattern, order):
    parts = []
    for v, p in zip(order, pattern):
        x = Var(v)
        if p[0] == "section":
            parts.append(Eq(x, _term_ast(p[1])))
        else:
            if p[1] is not None:
                parts.append(Lt(_term_ast(p[1]), x))
            if p[2] is not None:
                parts.append(Lt(x, _term_ast(p[2])))
    return conj(*parts)


# ------------------------------------------------------------ public entries


def default_order(arity: int, reverse: bool = False) -> tuple:
    order = tuple(f"x{i}" for i in range(1, arity + 1))
    return order[::-1] if reverse else order


def decompose(phi, arity: int, base=None, order=None) -> CellDecomposition:
    """Cells of the solution set of quantifier-free ``phi`` in M^arity."""
    order = tuple(order or default_order(arity))
    node = to_nnf(phi, True, base)
    root = build_tree([node], order)
    cells = []
    for leaf in leaves(root, len(order)):
        if eval_nnf(node, dict(zip(order, leaf.sample))):
            cells.append(Cell(leaf.pattern, leaf.sample, leaf.dim))
    return CellDecomposition(arity, order, tuple(cells))


def param_classes(phi, k: int, m: int, base=None, kind: str = "euler", order=None):
    """Partition of M^k by the measure of the section over each point.

    Returns ``[(formula over order[:k], value)]`` where value is an int for
    ``euler`` and an int or None (empty) for ``dim``.
    """
    order = tuple(order or default_order(k + m))
    node = to_nnf(phi, True, base)
    root = build_tree([node], order)

    def value(d):
        vals = [leaf.dim - d.dim for leaf in leaves(d, k + m)
                if eval_nnf(node, dict(zip(order, leaf.sample)))]
        if kind == "euler":
            return sum((-1) ** x for x in vals)
        return max(vals) if vals else None

    return regions(root, k, order, value)


def regions(root: Node, k: int, order, label) -> list:
    """``[(formula, label)]`` for the unions of level-``k`` cells sharing a label.

    Uniform subtrees collapse to their parent's constraints and runs of
    adjacent siblings with the same description become a single interval.
    """
    below: dict = {}

    def collect(n):
        if n.level == k:
            s = frozenset([label(n)])
        else:
            s = frozenset().union(*(collect(c) for c in n.children))
        below[id(n)] = s
        return s

    def build(n, target):
        s = below[id(n)]
        if target not in s:
            return False
        if len(s) == 1:
            return True
        x = Var(order[n.level])
        parts, run = [], []

        def flush():
            if run:
                span = _span(x, run[0][0].pattern[-1], run[-1][0].pattern[-1])
                body = run[0][1]
                parts.append(span if body is True else conj(span, body))
                run.clear()

        for c in n.children:
            r = build(c, target)
            if run and r != run[-1][1]:
                flush()
            if r is not False:
                run.append((c, r))
        flush()
        return disj(*parts)

    collect(root)
    out = []
    for v in below[id(root)]:
        r = build(root, v)
        out.append((TOP if r is True else r, v))
    return out


def _span(x, first, last):
    """Constraint on ``x`` covering the pieces ``first`` through ``last`` of one stack."""
    if first[0] == "section" and first == last:
        return Eq(x, _term_ast(first[1]))
    parts = []
    if first[0] == "section":
        parts.append(Not(Lt(x, _term_ast(first[1]))))
    elif first[1] is not None:
        parts.append(Lt(_term_ast(first[1]), x))
    if last[0] == "section":
        parts.append(Not(Lt(_term_ast(last[1]), x)))
    elif last[2] is not None:
        parts.append(Lt(x, _term_ast(last[2])))
    return conj(*parts)


# ---------------------------------------------------------------- CAD-QE


def prenex(phi):
    """``(prefix, matrix)`` with bound variables renamed apart."""
    counter = [0]
    used = set(free_vars(phi))

    def fresh():
        counter[0] += 1
        name = f"_q{counter[0]}"
        while name in used:
            counter[0] += 1
            name = f"_q{counter[0]}"
        used.add(name)
        return name

    def go(f):
        if isinstance(f, (Top, Bot, Eq, Lt, Rel)):
            return [], f
        if isinstance(f, Not):
            pre, m = go(f.arg)
            return [("A" if q == "E" else "E", v) for q, v in pre], Not(m)
        if isinstance(f, (And, Or)):
            pre, ms = [], []
            for a in f.args:
                p, m = go(a)
                pre += p
                ms.append(m)
            return pre, (conj(*ms) if isinstance(f, And) else disj(*ms))
        if isinstance(f, (Exists, Forall)):
            nv = fresh()
            body = substitute(f.body, {f.var: Var(nv)})
            pre, m = go(body)
            return [("E" if isinstance(f, Exists) else "A", nv)] + pre, m
        raise TypeError(f"unsupported node {f!r}")

    return go(phi)


def cad_qe(phi, free_order, base=None):
    """Quantifier-free equivalent via cell truth aggregation."""
    prefix, matrix = prenex(phi)
    order = tuple(free_order) + tuple(v for _, v in prefix)
    node = to_nnf(matrix, True, base)
    root = build_tree([node], order)
    k = len(free_order)
    quant = [q for q, _ in prefix]

    def truth(n: Node) -> bool:
        if n.level == len(order):
            return eval_nnf(node, dict(zip(order, n.sample)))
        vals = (truth(c) for c in n.children)
        return any(vals) if quant[n.level - k] == "E" else all(vals)

    for r, v in regions(root, k, order, truth):
        if v:
            return r
    return disj()
