import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from boxlab.constants import compute_constants

HALF = Fraction(1, 2)


def hand_table_k2_m2():
    """The k = 2, m = 2, eps = 1/2 recursion worked through by hand.

    Level 1 at arity a: M = a, eta = (1/4)^C(a,2).  With steps = m(m-1) = 2:
      M_2 = 2
      M_1 = M(2) + ceil(1 * 2 / (1/4)^1)  = 2 + 8 = 10
      M_0 = M(10) + ceil(10 / (1/4)^45)  = 10 + 10 * 4^45
    eta_0 = (1/4)^(m^2 M^2), then eta_1 = eta_0 (1/4)^C(10,2), eta_2 = eta_1 (1/4)^C(2,2).
    """
    M2 = 2
    M1 = 2 + 2 * 4
    M0 = 10 + 10 * 4**45
    N0 = 4 * M0**2
    return [M0, M1, M2], [N0, N0 + 45, N0 + 46]


def test_k1_values():
    for m in range(2, 7):
        t = compute_constants(3, HALF, 1, m)
        assert t.M == m
        assert t.eta_exponent == math.comb(m, 2)
        assert t.log2_eta == pytest.approx(math.comb(m, 2) * math.log2(0.25))
        assert t.log2_delta == 0
    t = compute_constants(2, HALF, 1, 2)
    assert Fraction(1, 4) ** t.eta_exponent == Fraction(1, 4)


def test_k2_m2_hand_oracle():
    t = compute_constants(2, HALF, 2, 2)
    Ms, Ns = hand_table_k2_m2()
    assert t.M_seq == Ms
    assert t.M_seq[0] == 12379400392853802748991242250
    assert t.eta_exponents == Ns
    assert t.M == Ms[0] and t.eta_exponent == Ns[-1]
    assert t.M_seq[t.steps] == 2
    # delta = min(m^-2 M^-3 eta_0, delta(M_h)) and the level-1 deltas are 1
    want = -2 - 3 * math.log2(Ms[0]) + Ns[0] * math.log2(0.25)
    assert t.log2_delta == pytest.approx(want, rel=1e-12)
    assert not t.astronomical


def test_astronomical_cases_bail_out():
    t = compute_constants(3, HALF, 2, 3)
    assert t.astronomical and t.M is None and t.M_seq[-1] == 3 and t.note
    t = compute_constants(3, HALF, 3, 2)
    assert t.astronomical and t.M_seq[-1] == 2


@pytest.mark.parametrize("args", [(1, HALF, 1, 2), (2, HALF, 1, 1), (2, HALF, 3, 2), (2, Fraction(0), 1, 2), (2, 1, 1, 2)])
def test_parameter_ranges(args):
    with pytest.raises(ValueError):
        compute_constants(*args)


def check_monotone(t):
    Ms = [M for M in t.M_seq if M is not None]
    assert all(a > b for a, b in zip(Ms, Ms[1:]))
    Ns = t.eta_exponents
    assert all(a <= b for a, b in zip(Ns, Ns[1:]))  # eta_h = (eps/2)^N_h is non-increasing
    if not t.astronomical:
        assert t.M >= t.m
        assert t.log2_delta is None or t.log2_delta <= 0


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.sampled_from([Fraction(1, 10), Fraction(1, 3), HALF, Fraction(9, 10)]),
       st.integers(1, 3), st.integers(2, 4))
def test_tables_are_monotone(r, eps, k, m):
    if k > r:
        k = r
    t = compute_constants(r, eps, k, m, max_bits=4096)
    check_monotone(t)


def test_small_eps_k2_m2():
    t = compute_constants(2, Fraction(1, 10), 2, 2)
    assert not t.astronomical
    # M_1 = 2 + ceil(2 * 20) = 42; log2(delta) leaves the float range but M stays exact
    assert t.M_seq[1:] == [42, 2]
    assert t.M_seq[0] == 42 + math.ceil(42 * 20**861)
    assert t.log2_delta is None and t.note
    check_monotone(t)
