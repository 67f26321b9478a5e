from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fubini.discrete import FiniteBackend, FiniteStructure, PureSetBackend
from fubini.errors import ArityMismatch, FormulaSyntaxError, NotFunctional, SortError
from fubini.logic import (DefinableMap, DefinableSet, ParamFamily, parse, pretty, product,
                          pure_set_signature, qvs_signature, section, substitute)
from fubini.logic.syntax import (BOT, TOP, And, Const, Eq, Exists, Lt, Not, Var, conj, disj,
                                 exists, forall, free_vars, lin, neg)
from fubini.semilinear import SemilinearBackend

QVS = qvs_signature()


def test_parse_conjunction():
    phi = parse("0 < x & x < 1", QVS)
    assert isinstance(phi, And) and len(phi.args) == 2
    assert all(isinstance(a, Lt) for a in phi.args)
    assert free_vars(phi) == {"x"}


def test_parse_existential():
    phi = parse("E y (x < y)", QVS)
    assert isinstance(phi, Exists)
    assert isinstance(phi.body, Lt)
    assert free_vars(phi) == {"x"}


def test_syntax_error_offset():
    with pytest.raises(FormulaSyntaxError) as e:
        parse("x < y & y <", QVS)
    assert e.value.offset == 10


@pytest.mark.parametrize("text", ["x <", "(x < y", "x < y)", "E (x < y)", "x $ y", ""])
def test_malformed_input(text):
    with pytest.raises(FormulaSyntaxError):
        parse(text, QVS)


def test_sugar():
    assert parse("x > y", QVS) == parse("y < x", QVS)
    assert parse("x >= y", QVS) == parse("y < x | x = y", QVS)
    assert parse("x != y", QVS) == Not(Eq(Var("x"), Var("y")))
    assert parse("x <= y", QVS) == parse("x < y | x = y", QVS)


def test_constants_and_linear_terms():
    phi = parse("2*x - 1/2 < c1", QVS)
    assert isinstance(phi, Lt)
    assert phi.right == Const(Fraction(1))
    assert phi.left == lin({"x": 2}, Fraction(-1, 2))


def test_linear_terms_refused_outside_qvs():
    with pytest.raises((FormulaSyntaxError, SortError)):
        parse("x + y = z", pure_set_signature())


def test_substitute_constant():
    phi = substitute(parse("x < y", QVS), {"y": Var("c1")})
    assert pretty(phi) == "x < c1"


def test_substitute_avoids_capture():
    phi = substitute(parse("E y (x < y)", QVS), {"x": Var("y")})
    assert isinstance(phi, Exists)
    assert phi.var != "y"
    assert phi.body == Lt(Var("y"), Var(phi.var))


def test_substitute_identity_on_top():
    assert substitute(TOP, {"x": Var("t")}) == TOP


def test_smart_constructors_fold_constants():
    a = parse("x < y", QVS)
    assert conj(a, TOP) == a
    assert conj(a, BOT) == BOT
    assert disj(a, TOP) == TOP
    assert neg(neg(a)) == a


# ----------------------------------------------------------- round trip

names = st.sampled_from(["x1", "x2", "x3", "y"])
terms = st.one_of(names.map(Var), st.sampled_from([Const(Fraction(0)), Const(Fraction(1)),
                                                   Const(Fraction(-3, 2))]))
atoms = st.builds(lambda op, a, b: op(a, b), st.sampled_from([Eq, Lt]), terms, terms)


def formulas():
    return st.recursive(
        atoms,
        lambda sub: st.one_of(
            st.lists(sub, min_size=2, max_size=3).map(lambda xs: conj(*xs)),
            st.lists(sub, min_size=2, max_size=3).map(lambda xs: disj(*xs)),
            sub.map(neg),
            st.tuples(names, sub).map(lambda p: exists([p[0]], p[1])),
            st.tuples(names, sub).map(lambda p: forall([p[0]], p[1])),
        ),
        max_leaves=8,
    )


@settings(max_examples=200)
@given(formulas())
def test_pretty_parse_round_trip(phi):
    assert parse(pretty(phi), QVS) == phi


# -------------------------------------------------------------- sets, maps

def test_definable_set_checks_positions():
    DefinableSet(QVS, 2, parse("x1 < x2", QVS))
    with pytest.raises(SortError):
        DefinableSet(QVS, 1, parse("x1 < x2", QVS))
    with pytest.raises(SortError):
        DefinableSet(QVS, 2, parse("x1 < y", QVS))


def test_sections():
    b = SemilinearBackend()
    fam = ParamFamily(b.definable("x1 = x2", 2), 1)
    assert b.equivalent(section(fam, [Const(Fraction(0))]).phi, b.parse("x1 = c0"), 1)
    full = ParamFamily(b.definable("true", 2), 1)
    assert b.equivalent(section(full, [Const(Fraction(1))]).phi, TOP, 1)
    empty = ParamFamily(b.definable("false", 2), 1)
    assert b.is_empty(section(empty, [Const(Fraction(5))]).phi, 1)
    with pytest.raises(ArityMismatch):
        section(fam, [])


def test_product_shifts_second_factor():
    b = SemilinearBackend()
    X = product(b.definable("0 < x1", 1), b.definable("x1 < 0", 1))
    assert X.arity == 2
    assert b.equivalent(X.phi, b.parse("0 < x1 & x2 < 0"), 2)


def graph(b, text):
    return DefinableMap(b.definable(text, 2), 1, 1)


@pytest.mark.parametrize("backend", [SemilinearBackend(), PureSetBackend()], ids=["qvs", "pure"])
def test_validate_map(backend):
    backend.validate_map(graph(backend, "x2 = x1"))
    with pytest.raises(NotFunctional):
        backend.validate_map(graph(backend, "x1 != x2"))
    with pytest.raises(NotFunctional) as e:
        backend.validate_map(graph(backend, "(x1 = c0 & x2 = c0) | (x1 = c0 & x2 = c1)"))
    assert e.value.witness["x"] == [backend.fmt_point((backend.sig.const_map["c0"],))[0]]


def test_validate_map_order():
    b = SemilinearBackend()
    with pytest.raises(NotFunctional):
        b.validate_map(graph(b, "x1 < x2"))


def test_validate_map_finite():
    S = FiniteStructure.from_json({"universe": [0, 1, 2], "base": [0, 1], "c0": 0, "c1": 1})
    b = FiniteBackend(S)
    b.validate_map(graph(b, "x2 = x1"))
    with pytest.raises(NotFunctional) as e:
        b.validate_map(graph(b, "(x1 = c0 & x2 = c0) | (x1 = c0 & x2 = c1)"))
    assert e.value.witness["x"] == [0]
