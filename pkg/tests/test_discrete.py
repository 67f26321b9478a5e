from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fubini.discrete import FiniteBackend, FiniteStructure, PureSetBackend
from fubini.discrete.pureset import free_coordinate_rank, morley_rank, to_nnf
from fubini.logic import ParamFamily, section
from fubini.logic.syntax import BOT, TOP
from fubini.semiring import COUNT, INT, TROP, make, zero


def structure(universe, base=None, rels=None):
    return FiniteStructure.from_json({"universe": universe, "base": base or universe,
                                      "c0": universe[0], "c1": universe[1],
                                      "relations": rels or {}})


TWO = FiniteBackend(structure([0, 1]))
THREE = FiniteBackend(structure(["a", "b", "c"], rels={"R": [["a", "b"], ["b", "c"]]}))
PS = PureSetBackend()


def test_enumerate():
    assert TWO.enumerate(TOP, 1) == [(0,), (1,)]
    assert TWO.enumerate(TWO.parse("x1 = c0"), 1) == [(0,)]
    assert TWO.enumerate(BOT, 1) == []


@pytest.mark.parametrize("text, arity, want", [
    ("false", 1, 0), ("x1 = c0", 1, 1), ("true", 2, 9), ("R(x1, x2)", 2, 2),
    ("E y (R(x1, y))", 1, 2), ("A y (!R(y, x1))", 1, 1), ("{(a), (c)}(x1)", 1, 2),
])
def test_counting(text, arity, want):
    assert THREE.measure("count", THREE.parse(text), arity) == make(COUNT, want)


def test_base_predicate():
    b = FiniteBackend(structure([0, 1, 2, 3], base=[0, 1, 2]))
    assert b.measure("count", b.base_atom(1), 1) == make(COUNT, 3)
    assert b.measure("count", b.outside_base(TOP, 1), 1) == make(COUNT, 1)


@pytest.mark.parametrize("data, msg", [
    ({"universe": [0, 0, 1], "base": [0, 1], "c0": 0, "c1": 1}, "repeated"),
    ({"universe": [0, 1], "base": [0, 2], "c0": 0, "c1": 1}, "subset"),
    ({"universe": [0, 1], "base": [0, 1], "c0": 0, "c1": 0}, "distinct"),
    ({"universe": [0, 1], "base": [0], "c0": 0, "c1": 1}, "two elements"),
    ({"universe": [0, 1], "base": [0, 1], "c0": 0, "c1": 1, "relations": {"R": [[0, 5]]}}, "outside"),
])
def test_structure_validation(data, msg):
    with pytest.raises(ValueError, match=msg):
        FiniteStructure.from_json(data)


def test_structure_json_round_trip():
    S = THREE.S
    assert FiniteStructure.from_json(S.to_json()) == FiniteStructure.from_json(S.to_json(), "finite")


def test_finite_sections():
    fam = ParamFamily(THREE.definable("x1 = x2", 2), 1)
    assert THREE.enumerate(section(fam, ["a"]).phi, 1) == [("a",)]
    full = ParamFamily(THREE.definable("true", 2), 1)
    assert len(THREE.enumerate(section(full, ["b"]).phi, 1)) == 3
    empty = ParamFamily(THREE.definable("false", 2), 1)
    assert THREE.enumerate(section(empty, ["c"]).phi, 1) == []


def test_finite_param_classes_by_section_size():
    # section sizes: a -> {b} (1), b -> {c} (1), c -> {} (0); plus the diagonal
    phi = THREE.parse("R(x1, x2) | (x1 = c0 & x2 = c0)")
    classes = THREE.param_classes(phi, 1, 1)
    got = {v.payload: sorted(THREE.enumerate(cls, 1)) for cls, v in classes}
    assert got == {0: [("c",)], 1: [("b",)], 2: [("a",)]}


# ---------------------------------------------------------------- pure set


@pytest.mark.parametrize("text, arity, rank, euler", [
    ("x1 = c0", 1, 0, 1),
    ("true", 1, 1, 1),
    ("true", 2, 2, 1),
    ("x1 != c0", 1, 1, 0),
    ("x1 != c0 & x1 != c1", 1, 1, -1),
    ("x1 != x2", 2, 2, 0),
    ("false", 2, "neg_inf", 0),
    ("E y (y != x1 & y != c0)", 1, 1, 1),
])
def test_pure_set_measures(text, arity, rank, euler):
    phi = PS.parse(text)
    assert PS.measure("morley", phi, arity) == make(TROP, rank)
    assert PS.measure("pure_euler", phi, arity) == make(INT, euler)


def test_pure_set_qe():
    assert PS.equivalent(PS.qe(PS.parse("E y (y != x1)")), TOP, 1)
    assert PS.equivalent(PS.qe(PS.parse("A y (y = x1)")), BOT, 1)


def test_pure_set_param_classes():
    # sections of x1 != x2 over p: everything except p, so Morley rank 1 everywhere
    classes = PS.param_classes(PS.parse("x1 != x2"), 1, 1, "morley")
    assert [v for _, v in classes] == [make(TROP, 1)]
    classes = PS.param_classes(PS.parse("x1 = c0 & x2 = x1"), 1, 1, "morley")
    assert sorted(v.payload if v != zero(TROP) else -1 for _, v in classes) == [-1, 0]


# pure-set formulas in the constants c0, c1 and up to two free variables
pure_atoms = st.sampled_from(["x1 = c0", "x1 = c1", "x2 = c0", "x2 = c1", "x1 = x2",
                              "E y (y != x1 & y != x2 & y != c0)"])
pure_texts = st.recursive(pure_atoms, lambda sub: st.one_of(
    st.tuples(sub, sub).map(lambda p: f"({p[0]}) & ({p[1]})"),
    st.tuples(sub, sub).map(lambda p: f"({p[0]}) | ({p[1]})"),
    sub.map(lambda p: f"!({p})")), max_leaves=5)

SIZES = (6, 7, 8)
FINITE = [FiniteBackend(structure([f"e{i}" for i in range(n)])) for n in SIZES]


def _lagrange(xs, ys, at):
    total = Fraction(0)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        term = Fraction(yi)
        for j, xj in enumerate(xs):
            if j != i:
                term *= Fraction(at - xj, xi - xj)
        total += term
    return total


@settings(max_examples=120, deadline=None)
@given(pure_texts)
def test_pure_set_against_finite_models(text):
    counts = [b.measure("count", b.parse(text), 2).payload for b in FINITE]
    # counts grow like a polynomial of degree <= 2 in |M|; read off degree and value at |M| = 1
    d1 = [b - a for a, b in zip(counts, counts[1:])]
    degree = None if not any(counts) else (0 if not any(d1) else (1 if d1[0] == d1[1] else 2))
    phi = PS.parse(text)
    want_rank = zero(TROP) if degree is None else make(TROP, degree)
    assert PS.measure("morley", phi, 2) == want_rank
    assert PS.measure("pure_euler", phi, 2) == make(INT, int(_lagrange(SIZES, counts, 1)))


@settings(max_examples=120, deadline=None)
@given(pure_texts)
def test_morley_rank_matches_free_coordinate_count(text):
    n = to_nnf(PS.parse(text), True)
    assert morley_rank(n, 2) == free_coordinate_rank(n, 2)


@pytest.mark.parametrize("text, arity", [("x1 != x2", 2), ("x1 = c0 | x2 = c1", 2), ("E y (y != x1)", 1)])
def test_caching_does_not_change_measures(text, arity):
    from fubini import memo
    phi = PS.parse(text)
    memo.clear()
    cached = [PS.measure(k, phi, arity) for k in ("morley", "pure_euler")] + [THREE.measure("count", THREE.parse(text), arity)]
    with memo.disabled():
        plain = [PS.measure(k, phi, arity) for k in ("morley", "pure_euler")] + [THREE.measure("count", THREE.parse(text), arity)]
    assert cached == plain
