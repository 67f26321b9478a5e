import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fubini.engine.corpus import random_formula, random_linear_bijection, random_quantified
from fubini.errors import Counterexample
from fubini.logic.syntax import BOT, TOP, Const, Eq, Lt, Var, apply, conj, disj, neg
from fubini.semilinear import SemilinearBackend, cad_qe, qe, sample_equiv
from fubini.semiring import INT, TROP, make, zero

B = SemilinearBackend()


def P(text):
    return B.parse(text)


@pytest.mark.parametrize("text, want", [
    ("E y (x1 < y & y < c1)", "x1 < c1"),
    ("E y (y = y)", "true"),
    ("E y (x1 < y & y < x1)", "false"),
    ("A y (y < x1 | x2 < y)", "x2 < x1"),
    ("E y (x1 < y & y < x2 & 2*y = x3)", "2*x1 < x3 & x3 < 2*x2"),
])
def test_qe_examples(text, want):
    out = B.qe(P(text))
    assert B.equivalent(out, P(want), 3)
    sample_equiv(P(text), out, 2000, seed=1)


def test_qe_trivial_shapes():
    assert B.qe(P("E y (y = y)")) == TOP
    assert B.qe(P("E y (x1 < y & y < x1)")) == BOT


def test_decompose_interval():
    d = B.decompose(P("c0 < x1 & x1 < c1"), 1)
    assert [c.dim for c in d.cells] == [1]
    (cell,) = d.to_json()["cells"]
    assert cell["coords"] == [{"var": "x1", "kind": "interval", "lo": "0", "hi": "1"}]


def test_decompose_point_and_interval():
    d = B.decompose(P("x1 = c0 | (c0 < x1 & x1 < c1)"), 1)
    assert sorted(c.dim for c in d.cells) == [0, 1]


def test_decompose_empty():
    assert len(B.decompose(BOT, 2).cells) == 0


@pytest.mark.parametrize("text, arity, dim, euler", [
    ("false", 1, "neg_inf", 0),
    ("x1 = c0", 1, 0, 1),
    ("c0 < x1 & x1 < c1 & c0 < x2 & x2 < c1", 2, 2, 1),
    ("c0 < x1 & x1 < c1", 1, 1, -1),
    ("x1 != c0", 1, 1, -2),
    ("true", 2, 2, 1),
    ("x1 = x2", 2, 1, -1),
    ("c0 <= x1 & x1 <= c1", 1, 1, 1),
])
def test_dim_and_euler(text, arity, dim, euler):
    assert B.measure("dim", P(text), arity) == make(TROP, dim)
    assert B.measure("euler", P(text), arity) == make(INT, euler)


def test_sample_equiv_examples():
    rep = sample_equiv(B.qe(P("E y (x1 < y & y < c1)")), P("x1 < c1"), 10_000, seed=0)
    assert rep.trials == 10_000
    with pytest.raises(Counterexample) as e:
        sample_equiv(P("x1 < c1"), P("x1 < c0"), 1, seed=0)
    assert e.value.witness == {"x1": "1/2"}
    assert sample_equiv(TOP, TOP, 5, seed=0).trials == 1


def test_sample_equiv_requires_seed():
    with pytest.raises(ValueError):
        sample_equiv(TOP, TOP, 5, seed=None)


def test_restricted_base():
    b = SemilinearBackend(base="c0 < x1")
    assert b.measure("euler", b.base_atom(1), 1) == make(INT, -1)
    # the quantifier ranges over M, not over C
    assert b.equivalent(b.qe(b.parse("E y (y < x1)")), TOP, 1)


def test_find_point_and_empty():
    w = B.find_point(P("x1 < x2 & x2 < c0"), 2)
    assert w is not None and w[0] < w[1] < 0
    assert B.is_empty(P("x1 < x1"), 1)


# ------------------------------------------------------- independent oracles


def line_oracle(phi):
    """E and dim of a subset of Q by probing the critical points and the gaps between them."""
    crit = sorted({Fraction(a.right.value) for a in _atoms(phi) if isinstance(a.right, Const)}
                  | {Fraction(a.left.value) for a in _atoms(phi) if isinstance(a.left, Const)})
    probes = [(p, 0) for p in crit]
    if not crit:
        probes.append((Fraction(0), 1))
    else:
        probes += [(crit[0] - 1, 1), (crit[-1] + 1, 1)]
        probes += [((a + b) / 2, 1) for a, b in zip(crit, crit[1:])]
    e, dim = 0, None
    for p, d in probes:
        if B.holds(phi, (p,)):
            e += (-1) ** d
            dim = d if dim is None else max(dim, d)
    return e, dim


def _atoms(phi):
    from fubini.logic.syntax import atoms
    return atoms(phi)


consts = st.integers(-3, 3).map(lambda n: Const(Fraction(n)))
line_atoms = st.builds(lambda op, c, flip: op(c, Var("x1")) if flip else op(Var("x1"), c),
                       st.sampled_from([Eq, Lt]), consts, st.booleans())
line_formulas = st.recursive(line_atoms, lambda sub: st.one_of(
    st.lists(sub, min_size=2, max_size=3).map(lambda xs: conj(*xs)),
    st.lists(sub, min_size=2, max_size=3).map(lambda xs: disj(*xs)),
    sub.map(neg)), max_leaves=6)


@settings(max_examples=150, deadline=None)
@given(line_formulas)
def test_line_matches_interval_oracle(phi):
    e, dim = line_oracle(phi)
    assert B.measure("euler", phi, 1) == make(INT, e)
    assert B.measure("dim", phi, 1) == (zero(TROP) if dim is None else make(TROP, dim))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_qe_sound_on_random_quantified(seed):
    rng = random.Random(seed)
    phi, _ = random_quantified(B, rng, nvars=3, blocks=2, size=3)
    sample_equiv(phi, B.qe(phi), 500, seed=seed)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_two_eliminators_agree(seed):
    rng = random.Random(seed)
    phi, k = random_quantified(B, rng, nvars=3, blocks=2, size=3)
    order = [f"x{i}" for i in range(1, k + 1)]
    assert B.equivalent(B.qe(phi), cad_qe(phi, order), 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_cell_orderings_agree(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    phi = random_formula(B, n, rng, size=4)
    cells = [B.decompose(phi, n, reverse=r).cells for r in (False, True)]
    e1, e2 = (sum((-1) ** c.dim for c in cs) for cs in cells)
    assert e1 == e2 == B.measure("euler", phi, n).payload
    assert max((c.dim for c in cells[0]), default=-1) == max((c.dim for c in cells[1]), default=-1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_invariant_under_linear_bijections(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 2)
    phi = random_formula(B, n, rng, size=3)
    image = apply(phi, random_linear_bijection(rng, n))
    for kind in ("euler", "dim"):
        assert B.measure(kind, image, n) == B.measure(kind, phi, n)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_product_law(seed):
    from fubini.logic.syntax import shift
    rng = random.Random(seed)
    X, Y = random_formula(B, 1, rng, 3), random_formula(B, 1, rng, 3)
    XY = conj(X, shift(Y, 1))
    for kind in ("euler", "dim"):
        assert B.measure(kind, XY, 2) == B.measure(kind, X, 1) * B.measure(kind, Y, 1)


def test_module_level_qe_reads_the_base_predicate():
    b = SemilinearBackend(base="c0 < x1")
    out = qe(b.parse("E y (y < x1 & C(y))"), base=b.base)
    assert b.equivalent(out, b.parse("c0 < x1"), 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_caching_does_not_change_measures(seed):
    from fubini import memo
    rng = random.Random(seed)
    psi, n = random_quantified(B, rng, nvars=3)
    phi = random_formula(B, n, rng, size=3)
    memo.clear()
    cached = [B.measure(k, f, n) for k in ("euler", "dim") for f in (phi, psi)]
    with memo.disabled():
        assert not memo.enabled()
        plain = [B.measure(k, f, n) for k in ("euler", "dim") for f in (phi, psi)]
    assert memo.enabled()
    assert cached == plain
