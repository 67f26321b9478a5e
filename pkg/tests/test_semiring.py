import pytest
from hypothesis import given, strategies as st

from fubini.semiring import (COUNT, INT, NEG_INF, TROP, MismatchedSemiring, SemiringId,
                             SemiringValue, add, from_nat, json_payload, make, mul, one,
                             pair_id, scale, total, zero)

PAIR = pair_id(INT, TROP)


def values(sid):
    if sid == INT:
        return st.integers(-50, 50).map(lambda n: make(INT, n))
    if sid == COUNT:
        return st.integers(0, 50).map(lambda n: make(COUNT, n))
    if sid == TROP:
        return st.one_of(st.just(zero(TROP)), st.integers(0, 50).map(lambda n: make(TROP, n)))
    return st.tuples(values(sid.left), values(sid.right)).map(lambda p: SemiringValue(sid, p))


ALL = [INT, COUNT, TROP, PAIR]


@pytest.mark.parametrize("sid, x, y, s, p", [
    (INT, 2, 3, 5, 6),
    (TROP, 2, 3, 3, 5),
    (TROP, "neg_inf", 5, 5, "neg_inf"),
    (TROP, "neg_inf", 7, 7, "neg_inf"),
    (COUNT, 4, 0, 4, 0),
])
def test_add_mul_table(sid, x, y, s, p):
    a, b = make(sid, x), make(sid, y)
    assert add(a, b) == make(sid, s)
    assert mul(a, b) == make(sid, p)


@pytest.mark.parametrize("d, sid, want", [(0, INT, 0), (3, INT, 3), (3, TROP, 0), (0, TROP, "neg_inf"),
                                          (5, COUNT, 5)])
def test_from_nat(d, sid, want):
    assert from_nat(d, sid) == make(sid, want)


def test_from_nat_pair_is_componentwise():
    assert from_nat(2, PAIR) == make(PAIR, [2, 0])


def test_tropical_zero_is_not_an_integer():
    z = zero(TROP)
    assert z.payload is NEG_INF
    assert z != make(TROP, 0)
    assert json_payload(z) == "neg_inf"


def test_mixing_semirings_is_refused():
    with pytest.raises(MismatchedSemiring):
        make(INT, 1) + make(TROP, 1)
    with pytest.raises(MismatchedSemiring):
        make(INT, make(COUNT, 1))


@pytest.mark.parametrize("sid, bad", [(COUNT, -1), (TROP, -2), (INT, True), (INT, 1.5)])
def test_payload_validation(sid, bad):
    with pytest.raises(ValueError):
        make(sid, bad)


def test_id_roundtrip_and_json():
    for sid in ALL + [pair_id(PAIR, COUNT)]:
        assert SemiringId.parse(str(sid)) == sid
    v = make(PAIR, [-1, "neg_inf"])
    assert SemiringValue.from_json(v.to_json()) == v
    assert v.to_json() == {"semiring": "PAIR(INT,TROP)", "value": [-1, "neg_inf"]}


def test_sort_key_puts_neg_inf_first():
    vs = [make(TROP, 2), zero(TROP), make(TROP, 0)]
    assert sorted(vs, key=SemiringValue.sort_key) == [zero(TROP), make(TROP, 0), make(TROP, 2)]


@pytest.mark.parametrize("sid", ALL, ids=str)
@given(data=st.data())
def test_semiring_laws(sid, data):
    a, b, c = (data.draw(values(sid)) for _ in range(3))
    z, u = zero(sid), one(sid)
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + z == a
    assert a * u == a
    assert a * z == z


@pytest.mark.parametrize("sid", ALL, ids=str)
@given(d=st.integers(0, 20), e=st.integers(0, 20))
def test_from_nat_is_a_morphism(sid, d, e):
    assert from_nat(d + e, sid) == from_nat(d, sid) + from_nat(e, sid)
    assert from_nat(d * e, sid) == from_nat(d, sid) * from_nat(e, sid)


@given(d=st.integers(0, 10), a=values(INT))
def test_scale_is_repeated_addition(d, a):
    assert scale(d, a) == total([a] * d, INT)
