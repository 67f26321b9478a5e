import random

import pytest
from hypothesis import given, settings, strategies as st

from fubini.discrete import FiniteBackend, FiniteStructure, PureSetBackend
from fubini.engine import (MeasureAssignment, base_measure, check_composition, check_fubini,
                           check_fubini_map, check_uniqueness, check_witness_independence,
                           corrupted, extend, finite_corpus, generate_corpus, level_sets, mu_f,
                           pair_measure, param_level_sets, projection_value, squaring_instances)
from fubini.engine.corpus import compose, random_fibering_tree, random_map, random_structure
from fubini.errors import (CodomainNotMeasurable, FiberNotMeasurable, InvalidFibering, NotInBase,
                           TooManyValues)
from fubini.fibering import Fibering, combine, restrict
from fubini.fibering import concrete as K
from fubini.logic import DefinableMap, DefinableSet
from fubini.logic.syntax import (And, Const, Eq, Exists, Forall, Not, Or, Rel, Tab)
from fubini.semilinear import SemilinearBackend
from fubini.semiring import COUNT, INT, TROP, MismatchedSemiring, make, one, pair_id, zero

SL = SemilinearBackend()
EULER, DIM = MeasureAssignment(SL, "euler"), MeasureAssignment(SL, "dim")
PAIR = pair_measure(EULER, DIM)
EULER_DIM = pair_id(INT, TROP)

S4 = FiniteStructure.from_json({"universe": [0, 1, 2, 3], "base": [0, 1, 2, 3], "c0": 0, "c1": 1,
                                "relations": {"E": [[0, 1], [1, 0], [2, 3]]}})
B4 = FiniteBackend(S4)
COUNTING = MeasureAssignment(B4, "count")

TRANSSERIES = {"r": 1, "m": 2, "m_list": [1], "n_list": [1, 2],
               "base": "(x1 != 0 & x2 != 0) | x1 = 0",
               "maps": ["x3 = x1 & ((x1 != 0 & x2 != 0) | x1 = 0)",
                        "x2 = x1 & ((x2 != 0 & x3 != 0) | x2 = 0) & x5 = x3 & x6 = x4"]}


def dset(b, text, arity):
    return b.definable(text, arity)


def dmap(b, text, m, n):
    return DefinableMap(b.definable(text, m + n), m, n)


# ------------------------------------------------------------- base measure


def test_base_measure_examples():
    assert base_measure(dset(SL, "false", 1), EULER) == zero(INT)
    assert base_measure(dset(SL, "x1 = c0", 1), DIM) == one(TROP)
    assert base_measure(dset(SL, "c0 < x1 & x1 < c1", 1), PAIR) == make(EULER_DIM, [-1, 1])


def test_pair_measure_examples():
    assert PAIR.measure(SL.parse("false"), 1) == make(EULER_DIM, [0, "neg_inf"])
    assert PAIR.measure(SL.parse("x1 = c0"), 1) == make(EULER_DIM, [1, 0])
    square = SL.parse("c0 < x1 & x1 < c1 & c0 < x2 & x2 < c1")
    assert PAIR.measure(square, 2) == make(EULER_DIM, [1, 2])


def test_base_measure_outside_base():
    b = SemilinearBackend(base="c0 < x1")
    with pytest.raises(NotInBase):
        base_measure(dset(b, "x1 < c1", 1), MeasureAssignment(b, "euler"))


# --------------------------------------------------------------- level sets


def test_projection_of_lower_triangle():
    rep = level_sets(dmap(SL, "x2 < x1 & x3 = x1", 2, 1), EULER)
    assert [(a, v) for a, _, v in rep.classes] == [(make(INT, -1), make(INT, -1))]
    (_, Y, _), = rep.classes
    assert SL.equivalent(Y.phi, SL.parse("true"), 1)


@pytest.mark.parametrize("mu", [EULER, DIM, PAIR], ids=lambda m: m.name)
def test_identity_map_has_one_class(mu):
    rep = level_sets(dmap(SL, "x2 = x1 & c0 < x1", 1, 1), mu)
    (a, Y, v), = rep.classes
    assert a == one(mu.semiring)
    assert SL.equivalent(Y.phi, SL.parse("c0 < x1"), 1)


def test_finite_fiber_sizes_two_and_three():
    S = FiniteStructure.from_json({"universe": list(range(5)), "base": list(range(5)),
                                   "c0": 0, "c1": 1})
    b = FiniteBackend(S)
    # 0, 1 -> 0 and 2, 3, 4 -> 1
    f = dmap(b, "(x2 = c0 & (x1 = 0 | x1 = 1)) | (x2 = c1 & (x1 = 2 | x1 = 3 | x1 = 4))", 1, 1)
    rep = level_sets(f, MeasureAssignment(b, "count"))
    got = [(a.payload, b.enumerate(Y.phi, 1)) for a, Y, _ in rep.classes]
    assert got == [(2, [(0,)]), (3, [(1,)])]
    assert rep.total == make(COUNT, 5)


def test_level_bound(monkeypatch):
    S = FiniteStructure.from_json({"universe": list(range(4)), "base": list(range(4)),
                                   "c0": 0, "c1": 1})
    b = FiniteBackend(S)
    f = dmap(b, "x2 = c0 & x1 = 0 | x2 = c1 & (x1 = 1 | x1 = 2)", 1, 1)
    monkeypatch.setenv("FUBINI_MAX_LEVELS", "1")
    with pytest.raises(TooManyValues):
        level_sets(f, MeasureAssignment(b, "count"))


def test_level_sets_refuse_points_outside_the_base():
    b = SemilinearBackend(base="c0 < x1")
    mu = MeasureAssignment(b, "euler")
    with pytest.raises(FiberNotMeasurable):
        level_sets(dmap(b, "x2 = x1", 1, 1), mu)
    with pytest.raises(CodomainNotMeasurable):
        level_sets(dmap(b, "x2 = 0 - x1 & c0 < x1", 1, 1), mu)


def test_param_level_sets():
    (P, a), = param_level_sets(dset(SL, "false", 2), 1, EULER)
    assert a == zero(INT) and SL.equivalent(P.phi, SL.parse("true"), 1)
    classes = param_level_sets(dset(SL, "c0 < x1 & c0 < x2 & x2 < x1", 2), 1, EULER)
    got = {a.payload: P.phi for P, a in classes}
    assert set(got) == {-1, 0}
    assert SL.equivalent(got[-1], SL.parse("c0 < x1"), 1)
    assert SL.equivalent(got[0], SL.parse("x1 <= c0"), 1)


def test_finite_param_level_sets():
    S = FiniteStructure.from_json({"universe": [0, 1, 2], "base": [0, 1, 2], "c0": 0, "c1": 1})
    b = FiniteBackend(S)
    # section of x2 < x1 over p has p points
    phi = "{(1, 0), (2, 0), (2, 1)}(x1, x2)"
    classes = param_level_sets(dset(b, phi, 2), 1, MeasureAssignment(b, "count"))
    assert [(a.payload, b.enumerate(P.phi, 1)) for P, a in classes] == \
        [(0, [(0,)]), (1, [(1,)]), (2, [(2,)])]


def test_mu_f():
    # constant fibers: every fiber of the projection of the open square has E = -1
    square = dset(SL, "c0 < x1 & x1 < c1 & c0 < x2 & x2 < c1", 2)
    proj = dmap(SL, "x3 = x1", 2, 1)
    assert mu_f(square, proj, EULER) == make(INT, -1) * EULER.measure(SL.parse("c0 < x1 & x1 < c1"), 1)
    # identity map gives mu(Y)
    Y = dset(SL, "x1 != c0", 1)
    assert mu_f(Y, dmap(SL, "x2 = x1", 1, 1), EULER) == make(INT, -2)
    # two-point fibers over three points
    S = FiniteStructure.from_json({"universe": list(range(6)), "base": list(range(6)),
                                   "c0": 0, "c1": 1})
    b = FiniteBackend(S)
    X = dset(b, "true", 1)
    f = dmap(b, "{(0, 0), (1, 0), (2, 1), (3, 1), (4, 2), (5, 2)}(x1, x2)", 1, 1)
    assert mu_f(X, f, MeasureAssignment(b, "count")) == make(COUNT, 6)


# ------------------------------------------------------------------ extend


def test_transseries_values():
    F = Fibering.from_json(TRANSSERIES, SL)
    X = dset(SL, TRANSSERIES["base"], 2)
    assert extend(X, F, EULER).value == make(INT, 3)
    assert extend(X, F, DIM).value == make(TROP, 2)
    assert extend(X, F, PAIR).value == make(EULER_DIM, [3, 2])


def test_extend_r0_identity_is_base_measure():
    for text in ("c0 < x1", "x1 = c0 | x1 = c1", "false"):
        Y = dset(SL, text, 1)
        F = Fibering.from_json({"r": 0, "m": 1, "m_list": [], "n_list": [1], "base": text,
                                "maps": [f"x2 = x1 & ({text})"]}, SL)
        for mu in (EULER, DIM):
            assert extend(Y, F, mu).value == base_measure(Y, mu)


def test_extend_checks_the_set():
    F = Fibering.from_json(TRANSSERIES, SL)
    with pytest.raises(InvalidFibering):
        extend(dset(SL, "true", 2), F, EULER)


@pytest.mark.parametrize("seed", range(30))
def test_finite_extend_is_cardinality(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 5)
    T = random_fibering_tree(S, rng, 1 + seed % 3, 1 + seed % 2)
    if T is None:
        pytest.skip("no tree")
    b = FiniteBackend(S)
    F = K.to_fibering(T, b)
    assert extend(F.base, F, MeasureAssignment(b, "count")).value == make(COUNT, len(T.base))


def test_report_json():
    F = Fibering.from_json(TRANSSERIES, SL)
    rep = extend(None, F, EULER).to_json()
    assert rep["value"] == 3 and rep["semiring"] == "INT" and rep["grade"] == "exact"
    assert sum(lv["a"] * lv["mu"] for lv in rep["levels"]) == 3


# ------------------------------------------------------------------ audits


def test_counting_passes_every_law_exhaustively():
    corpus = finite_corpus(B4)
    assert corpus["exhaustive"]
    rep = check_fubini(COUNTING, corpus)
    assert rep.ok, rep.to_json()
    assert all(r.checked > 0 for r in rep.results)


def test_corrupted_singleton_value_fails_normalization():
    def two_for_points(mu, phi, arity, v):
        return make(COUNT, 2) if v == make(COUNT, 1) else v
    bad = corrupted(COUNTING, two_for_points)
    rep = check_fubini(bad, finite_corpus(B4))
    norm = rep.get("normalization")
    assert not norm.ok and norm.counterexample
    assert not rep.ok


def test_corrupted_additivity_is_caught():
    def off_by_one(mu, phi, arity, v):
        return make(COUNT, v.payload + 1) if v.payload >= 3 else v
    rep = check_fubini(corrupted(COUNTING, off_by_one), finite_corpus(B4))
    assert not rep.get("additivity").ok


@pytest.mark.parametrize("mu", [EULER, DIM, MeasureAssignment(PureSetBackend(), "morley"),
                                MeasureAssignment(PureSetBackend(), "pure_euler")],
                         ids=lambda m: m.name)
def test_symbolic_measures_pass(mu):
    rep = check_fubini(mu, generate_corpus(mu, seed=3, sets=6, maps=4))
    assert rep.ok, rep.to_json()


def test_squaring_profile_on_the_pure_set():
    mu = MeasureAssignment(PureSetBackend(), "pure_euler")
    results = {r.name: r for r in squaring_instances(mu)}
    assert results["squaring profile"].ok
    assert results["cubing profile"].ok
    assert results["no measure in positive characteristic"].ok
    assert mu.measure(PureSetBackend().base_atom(1), 1) == one(INT)


def test_semilinear_euler_fails_the_squaring_profile():
    # on an ordered line E(k) = -1: {0} counts 1 and the rest -2, and 1 + 2*(-2) != -1
    r = {x.name: x for x in squaring_instances(EULER)}["squaring profile"]
    assert not r.ok


def test_fubini_maps():
    assert check_fubini_map(dmap(SL, "x2 = x1", 1, 1), EULER, seed=0, samples=6).ok
    f = dmap(B4, "{(0, 0), (1, 0), (2, 1), (3, 2)}(x1, x2)", 1, 1)
    assert check_fubini_map(f, COUNTING).ok
    # projection with fibers of sizes 1 and 2, restricted to the class of size 2
    X = B4.tab([(0,), (1,)], 1)
    assert check_fubini_map(f, COUNTING, restrictions=[X]).ok


def test_corrupted_measure_breaks_a_fubini_map():
    # two-point sets get 3: fibers of the map below all measure 3, the image {0, 1}
    # measures 3 as well, and 3 * 3 differs from the 4 points of the domain
    def bump(mu, phi, arity, v):
        return make(COUNT, 3) if v == make(COUNT, 2) else v
    f = dmap(B4, "{(0, 0), (1, 0), (2, 1), (3, 1)}(x1, x2)", 1, 1)
    assert check_fubini_map(f, COUNTING).ok
    r = check_fubini_map(f, corrupted(COUNTING, bump))
    assert not r.ok and r.counterexample


@pytest.mark.parametrize("seed", range(6))
def test_composition_of_fubini_maps(seed):
    rng = random.Random(seed)
    f, g = random_map(B4, 1, 1, rng), random_map(B4, 1, 1, rng)
    assert check_fubini_map(f, COUNTING).ok and check_fubini_map(g, COUNTING).ok
    assert check_fubini_map(compose(f, g), COUNTING).ok
    assert check_composition(f, g, COUNTING).ok


def test_witness_independence():
    F = Fibering.from_json(TRANSSERIES, SL)
    assert check_witness_independence(None, F, F, EULER).ok
    # a second fibering of the same set: project to x2 instead of x1
    G = Fibering.from_json({"r": 1, "m": 2, "m_list": [1], "n_list": [1, 2],
                            "base": TRANSSERIES["base"],
                            "maps": ["x3 = x2 & ((x1 != 0 & x2 != 0) | x1 = 0)",
                                     "x3 = x1 & ((x2 != 0 & x3 != 0) | x2 = 0) & x5 = x2 & x6 = x4"]},
                           SL)
    X = dset(SL, TRANSSERIES["base"], 2)
    for mu in (EULER, DIM):
        assert check_witness_independence(X, F, G, mu).ok


@pytest.mark.parametrize("seed", range(10))
def test_restrict_then_recombine_keeps_the_value(seed):
    rng = random.Random(seed)
    S = random_structure(rng, 5)
    T = random_fibering_tree(S, rng, seed % 3, 1)
    if T is None:
        pytest.skip("no tree")
    b = FiniteBackend(S)
    F = K.to_fibering(T, b)
    pts = sorted(T.base, key=repr)
    part = b.tab(pts[: len(pts) // 2], 1)
    rest = b.tab(pts[len(pts) // 2:], 1)
    H = combine(restrict(F, DefinableSet(b.sig, 1, part), b),
                restrict(F, DefinableSet(b.sig, 1, rest), b), b)
    assert check_witness_independence(F.base, F, H, MeasureAssignment(b, "count")).ok


def test_two_different_finite_fiberings():
    F = Fibering.from_json({"r": 0, "m": 1, "m_list": [], "n_list": [1], "base": "true",
                            "maps": ["x2 = x1"]}, B4)
    G = Fibering.from_json({"r": 0, "m": 1, "m_list": [], "n_list": [2], "base": "true",
                            "maps": ["x2 = c0 & x3 = x1"]}, B4)
    assert check_witness_independence(None, F, G, COUNTING).ok


# -------------------------------------------------------------- uniqueness


def test_uniqueness_same_measure():
    assert check_uniqueness(EULER, EULER, max_arity=2, samples=6).ok


def test_uniqueness_rejects_mixed_semirings():
    with pytest.raises(MismatchedSemiring):
        check_uniqueness(EULER, DIM)


def _rename(phi, sigma):
    """``phi`` with every element moved along ``sigma``."""
    t = lambda x: Const(sigma[x.value]) if isinstance(x, Const) else x
    if isinstance(phi, Eq):
        return Eq(t(phi.left), t(phi.right))
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(map(t, phi.args)))
    if isinstance(phi, Tab):
        return Tab(frozenset(tuple(sigma[e] for e in row) for row in phi.rows), tuple(map(t, phi.args)))
    if isinstance(phi, Not):
        return Not(_rename(phi.arg, sigma))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(_rename(a, sigma) for a in phi.args))
    if isinstance(phi, (Exists, Forall)):
        return type(phi)(phi.var, _rename(phi.body, sigma))
    return phi


def test_uniqueness_on_isomorphic_structures():
    # relabel S4 by i -> "e{3-i}" and pull the counting measure of the copy back to S4
    sigma = {i: f"e{3 - i}" for i in range(4)}
    copy = FiniteStructure.from_json({
        "universe": [sigma[i] for i in range(4)], "base": [sigma[i] for i in range(4)],
        "c0": sigma[0], "c1": sigma[1],
        "relations": {"E": [[sigma[a], sigma[b]] for a, b in [[0, 1], [1, 0], [2, 3]]]}})
    other = FiniteBackend(copy)

    def through_copy(mu, phi, arity, v):
        return make(COUNT, len(other.enumerate(_rename(phi, sigma), arity)))
    pulled = corrupted(COUNTING, through_copy, "counting on the copy")
    corpus = {}
    for X in finite_corpus(B4)["sets"]:
        corpus.setdefault(X.arity, []).append(X)
    assert check_uniqueness(COUNTING, pulled, max_arity=2, corpus=corpus).ok


def test_uniqueness_detects_a_change():
    def shift_lines(mu, phi, arity, v):
        return make(INT, v.payload + 1) if arity == 2 else v
    r = check_uniqueness(EULER, corrupted(EULER, shift_lines), max_arity=2, samples=4)
    assert not r.ok


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_projection_recursion_recovers_the_measure(seed):
    from fubini.engine.corpus import random_formula
    rng = random.Random(seed)
    phi = random_formula(SL, 2, rng, 3)
    for mu in (EULER, DIM):
        assert projection_value(mu, phi, 2) == mu.measure(phi, 2)
