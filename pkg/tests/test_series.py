from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from katofan.series import IndeterminateOrder, TruncatedSeries

polys = st.dictionaries(st.integers(0, 8), st.integers(-3, 3).filter(bool), max_size=5)


def _exact_product(a, b):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def test_orders():
    assert TruncatedSeries({2: 1, 5: 3}).order() == 2
    assert TruncatedSeries.zero().order() is None
    assert TruncatedSeries({0: 1}, precision=4).order() == 0
    with pytest.raises(IndeterminateOrder):
        TruncatedSeries({}, precision=6).order()


def test_cancellation_is_reported_not_guessed():
    a = TruncatedSeries({1: 1, 2: 1}, precision=4)
    b = TruncatedSeries({1: 1, 2: 1}, precision=4)
    with pytest.raises(IndeterminateOrder):
        (a - b).order()


def test_inverse_of_one_minus_t():
    inv = TruncatedSeries({0: 1, 1: -1}).inverse(8)
    assert inv.coeffs == {e: Fraction(1) for e in range(8)}
    assert (inv * TruncatedSeries({0: 1, 1: -1})).agrees_with(TruncatedSeries.constant(1))


def test_json_round_trip():
    s = TruncatedSeries({0: Fraction(1, 3), 4: -2}, precision=9)
    assert TruncatedSeries.from_json(s.to_json()) == s


@given(polys, polys, st.integers(1, 12), st.integers(1, 12))
def test_truncated_product_agrees_with_exact_product(a, b, na, nb):
    ta, tb = TruncatedSeries(a, na), TruncatedSeries(b, nb)
    prod = ta * tb
    exact = _exact_product(a, b)
    assert prod.precision is not None
    for e in range(prod.precision):
        assert prod.coeffs.get(e, 0) == exact.get(e, 0)


@given(polys, st.integers(1, 12))
def test_certified_orders_are_true_orders(a, n):
    s = TruncatedSeries(a, n)
    try:
        o = s.order()
    except IndeterminateOrder:
        assert all(e >= n for e in a)
        return
    assert o == min(a)


@given(polys.filter(lambda p: p.get(0)), st.integers(1, 10))
def test_inverse_is_an_inverse(a, n):
    s = TruncatedSeries(a)
    assert (s * s.inverse(n)).agrees_with(TruncatedSeries.constant(1))
