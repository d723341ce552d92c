import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from parahoric.rootdata import RootDatum, gl_datum, gsp4_datum
from parahoric.slopes import (
    FactorizationError,
    TorusElement,
    greedy_factorization,
    h_crit,
    in_T_plus,
    in_T_plusplus,
    normalize_valuation,
    q_noncritical,
    step_element,
    verify_factorization,
)


def dominant_gl(n, rng, lo=0, hi=12):
    parts = sorted((rng.randint(lo, hi) for _ in range(n)), reverse=True)
    return tuple(parts)


def test_gl_step_bounds_are_successive_differences():
    """Catalog elements give h_crit = lam_i - lam_{i+1} + 1 on GL(n)."""
    rng = random.Random(7)
    for n in range(2, 7):
        d = gl_datum(n)
        for _ in range(20):
            lam = dominant_gl(n, rng)
            for i in range(n - 1):
                t = step_element(d, i, 5)
                assert h_crit(t, i, lam) == lam[i] - lam[i + 1] + 1


def test_gsp4_siegel_and_klingen_bounds():
    d = gsp4_datum()
    rng = random.Random(11)
    for _ in range(20):
        k2 = rng.randint(0, 9)
        k1 = k2 + rng.randint(0, 9)
        lam = (k1, k2, 0)
        siegel = greedy_factorization(d, {0}, 3)
        assert len(siegel.steps) == 1
        assert h_crit(siegel.steps[0].t, siegel.steps[0].simple_index, lam) == k2 + 1
        klingen = greedy_factorization(d, {1}, 3)
        assert len(klingen.steps) == 1
        assert h_crit(klingen.steps[0].t, klingen.steps[0].simple_index, lam) == k1 - k2 + 1


@given(st.tuples(*[st.integers(-4, 4)] * 3))
def test_membership_iff_pairing_signs(mu):
    """T^+ and T^{++}_Q membership match the raw pairing criteria."""
    d = gl_datum(3)
    t = TorusElement(d, mu, 2)
    plus = all(d.pairing(a, mu) <= 0 for a in d.simple_roots)
    assert in_T_plus(t) is plus
    if plus:
        for levi in (frozenset(), frozenset({0}), frozenset({1}), frozenset({0, 1})):
            strict = all(
                d.pairing(d.simple_roots[i], mu) < 0
                for i in range(2) if i not in levi
            )
            assert in_T_plusplus(t, levi) is strict
    else:
        with pytest.raises(FactorizationError):
            in_T_plusplus(t, frozenset())


def test_plus_monoid_closed_under_product():
    d = gl_datum(4)
    rng = random.Random(3)
    for _ in range(50):
        mu1 = tuple(-rng.randint(0, 3) * (i + 1) for i in range(4))
        mu2 = tuple(-rng.randint(0, 3) for _ in range(4))
        t1, t2 = TorusElement(d, mu1, 2), TorusElement(d, mu2, 2)
        if in_T_plus(t1) and in_T_plus(t2):
            assert in_T_plus(t1.times(t2))


def test_strictness_monotone_in_parabolic():
    """P contained in Q forces T^{++}_P contained in T^{++}_Q."""
    d = gl_datum(4)
    rng = random.Random(5)
    levis = [frozenset(), frozenset({0}), frozenset({2}), frozenset({0, 2}),
             frozenset({0, 1}), frozenset({0, 1, 2})]
    for _ in range(200):
        mu = tuple(sorted((rng.randint(-4, 0) for _ in range(4)), reverse=True))
        t = TorusElement(d, mu, 2)
        if not in_T_plus(t):
            continue
        for P in levis:
            for Q in levis:
                if P <= Q and in_T_plusplus(t, P):
                    assert in_T_plusplus(t, Q)


def test_greedy_factorization_verifies_all_orders():
    d = gl_datum(4)
    for order in ([0, 1, 2], [2, 1, 0], [1, 0, 2]):
        cd = greedy_factorization(d, frozenset(), 3, order=order)
        ok, msg = verify_factorization(cd)
        assert ok, msg
        assert [s.simple_index for s in cd.steps] == order
    with pytest.raises(FactorizationError):
        greedy_factorization(d, frozenset(), 3, order=[0, 1])


def test_generic_step_element_for_custom_datum():
    """Doubled root normalization: SL(2)-style datum doubles the bound."""
    d = RootDatum("custom-A1", 1, ((2,),), ((1,),))
    t = step_element(d, 0, 3)
    assert in_T_plus(t)
    assert t.root_valuation((2,)) < 0
    # h = -(k+1) v(alpha(t)) with v = -2 here
    assert h_crit(t, 0, (3,)) == 8
    cd = greedy_factorization(d, frozenset(), 3)
    ok, msg = verify_factorization(cd)
    assert ok, msg


def test_q_noncritical_gl3_borel():
    d = gl_datum(3)
    rep = q_noncritical(d, frozenset(), (2, 1, 0), [0, 0], 2)
    assert rep.passed
    assert [s.h_crit for s in rep.steps] == [2, 2]
    payload = rep.as_dict()
    assert payload["noncritical"] is True
    assert [s["strict"] for s in payload["steps"]] == [True, True]


def test_q_noncritical_boundary_is_strict():
    d = gl_datum(2)
    assert q_noncritical(d, frozenset(), (3, 0), [3], 2).passed
    assert not q_noncritical(d, frozenset(), (3, 0), [4], 2).passed
    assert q_noncritical(d, frozenset(), (3, 0), [Fraction(7, 2)], 2).passed


def test_q_noncritical_input_validation():
    d = gl_datum(3)
    with pytest.raises(ValueError):
        q_noncritical(d, frozenset(), (0, 1, 0), [0, 0], 2)  # not dominant
    with pytest.raises(ValueError):
        q_noncritical(d, frozenset(), (2, 1, 0), [0], 2)  # one valuation short


def test_normalize_valuation_shift():
    d = gl_datum(2)
    t = step_element(d, 0, 3)  # mu = (0, 1)
    # lambda(t) = p^{<lam, mu>}; raw valuation shifts down by that pairing
    assert normalize_valuation(t, (3, 0), 5) == 5 - 0
    assert normalize_valuation(t, (3, 2), 5) == 3
