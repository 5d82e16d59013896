"""
tests/test_extended_real.py — unit and property tests for extended-real arithmetic
"""
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from penalty_cert.errors import DomainError, IndeterminateSum
from penalty_cert.extended_real import NEG_INF, POS_INF, ZERO, ExtReal, xdot, xmul

finite_reals = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
ext_reals = st.one_of(st.just(POS_INF), st.just(NEG_INF), finite_reals.map(ExtReal.finite))


def test_infinity_times_zero_is_zero():
    """(±inf)·0 = 0 in both argument orders."""
    assert xmul(POS_INF, ZERO) == ZERO
    assert xmul(ZERO, NEG_INF) == ZERO
    assert xmul(NEG_INF, ExtReal.finite(-2.0)) == POS_INF
    assert xmul(ExtReal.finite(3.0), NEG_INF) == NEG_INF


def test_opposite_infinities_do_not_add():
    """+inf + -inf raises IndeterminateSum (an ArithmeticError)."""
    with pytest.raises(IndeterminateSum):
        POS_INF + NEG_INF
    with pytest.raises(ArithmeticError):
        NEG_INF + POS_INF


def test_finite_payload_must_be_finite():
    """Finite(nan) and Finite(inf) are rejected; from_float maps inf to the infinite tags."""
    with pytest.raises(DomainError):
        ExtReal.finite(math.nan)
    with pytest.raises(DomainError):
        ExtReal.finite(math.inf)
    with pytest.raises(DomainError):
        ExtReal.from_float(math.nan)
    assert ExtReal.from_float(-math.inf) is NEG_INF


def test_total_order_and_text():
    """NegInf < every finite < PosInf; str gives the report literals."""
    assert NEG_INF < ExtReal.finite(-1e300) < ExtReal.finite(1e300) < POS_INF
    assert [str(v) for v in (NEG_INF, ExtReal.finite(0.5), POS_INF)] == ["-inf", "0.5", "+inf"]
    assert ExtReal.parse("+inf") is POS_INF
    assert ExtReal.parse(" -2.5 ") == ExtReal.finite(-2.5)
    assert str(ExtReal.finite(-0.0)) == "0.0"


def test_xdot_zero_weight_kills_infinity():
    """A zero multiplier on a -inf component contributes nothing."""
    assert xdot([1.0, 0.0], [ExtReal.finite(2.0), NEG_INF]) == ExtReal.finite(2.0)
    assert xdot([1.0, 2.0], [POS_INF, ExtReal.finite(-5.0)]) == POS_INF


def test_xdot_rejects_bad_input():
    """Length mismatch and negative weights are ValueError; surviving ±inf is IndeterminateSum."""
    with pytest.raises(ValueError):
        xdot([1.0], [ZERO, ZERO])
    with pytest.raises(ValueError):
        xdot([-1.0], [ZERO])
    with pytest.raises(IndeterminateSum):
        xdot([1.0, 1.0], [POS_INF, NEG_INF])


@settings(max_examples=200, deadline=None)
@given(ext_reals, ext_reals)
def test_multiplication_commutes(a, b):
    """xmul is commutative."""
    assert xmul(a, b) == xmul(b, a)


@settings(max_examples=200, deadline=None)
@given(ext_reals, ext_reals, ext_reals)
def test_order_is_transitive(a, b, c):
    """a <= b and b <= c imply a <= c."""
    if a <= b and b <= c:
        assert a <= c


@settings(max_examples=200, deadline=None)
@given(ext_reals)
def test_negation_is_an_involution(a):
    """-(-a) == a and negation reverses order against zero."""
    assert -(-a) == a
    assert (a > ZERO) == (-a < ZERO)


@settings(max_examples=200, deadline=None)
@given(ext_reals, ext_reals)
def test_addition_commutes_when_defined(a, b):
    """a + b == b + a whenever the sum is defined."""
    if {a, b} == {POS_INF, NEG_INF}:
        return
    assert a + b == b + a


@settings(max_examples=200, deadline=None)
@given(st.lists(finite_reals, min_size=1, max_size=5))
def test_xdot_matches_float_sum_on_finite_input(values):
    """With finite components xdot is the ordinary weighted sum."""
    weights = [abs(v) for v in values]
    alpha = [ExtReal.finite(v) for v in values]
    expected = math.fsum(w * v for w, v in zip(weights, values))
    assert xdot(weights, alpha).value == pytest.approx(expected, rel=1e-9, abs=1e-6)
