from fractions import Fraction

import pytest

from parahoric.manin import (
    ManinSystem,
    P1List,
    UnsupportedLevel,
    lift_to_sl2,
    mat_det,
    mat_mul,
    unimodular_pieces,
)


def test_p1_size_multiplicative():
    # |P^1(Z/M)| = M prod (1 + 1/q) over primes q | M
    assert len(P1List(33)) == 48
    assert len(P1List(15)) == 24
    assert len(P1List(11)) == 12


def test_p1_normalization_is_orbit_invariant():
    p1 = P1List(33)
    for (u, v) in [(1, 5), (3, 7), (11, 3), (0, 1), (1, 0)]:
        i = p1.index(u, v)
        # scaling by a unit lands on the same representative
        for s in (2, 5, 7):
            assert p1.index(s * u % 33, s * v % 33) == i


def test_lift_to_sl2():
    for (u, v) in [(1, 5), (3, 7), (11, 3), (2, 3)]:
        m = lift_to_sl2(u, v, 33)
        assert mat_det(m) == 1
        assert (m[2] - u) % 33 == 0 and (m[3] - v) % 33 == 0


def test_manin_system_level_33():
    ms = ManinSystem(11, 3)
    assert ms.index == 48
    sp = ms.solved_presentation()
    assert len(sp.free_edges) == 8
    assert len(sp.steps) == 15
    # every coset resolves to a free edge through at most one transport
    seen = set()
    for x in range(ms.index):
        leader, kind, g = ms.value_resolution(x)
        seen.add(leader)
        if g is not None:
            assert ms.in_gamma0(g) or mat_det(g) == 1
    assert seen


def test_level_guards():
    with pytest.raises(ValueError):
        ManinSystem(11, 11)  # p | N
    with pytest.raises(ValueError):
        ManinSystem(11, 4)  # p not prime


def test_transport_is_gamma0_equivariant():
    ms = ManinSystem(11, 3)
    for g in ([1, 1, 0, 1], [1, 0, 33, 1], [7, 2, 66, 19]):
        x, m = ms.transport(tuple(g))
        assert ms.in_gamma0(m)


def test_unimodular_pieces_telescope():
    """Continued-fraction pieces chain from infinity to q with det 1."""
    from parahoric.manin import mobius
    for q in (Fraction(3, 7), Fraction(-5, 11), Fraction(22, 7)):
        pieces = unimodular_pieces(q)
        assert all(mat_det(m) == 1 for m in pieces)
        ends = [(mobius(m, Fraction(0)), mobius(m, None)) for m in pieces]
        for (_, b), (c, _) in zip(ends, ends[1:]):
            assert b == c
        assert ends[0][0] is None  # the cusp at infinity
        assert ends[-1][1] == q


def test_hecke_plan_terms_stay_in_sigma0():
    """Transported U_p terms keep the monoid shape the moment action needs."""
    ms = ManinSystem(11, 3)
    from parahoric.ocsymbols import up_deltas
    plan = ms.hecke_plan(up_deltas(3))
    assert len(plan) == ms.index
    for row in plan:
        assert row
        for (y, sgn, m) in row:
            assert 0 <= y < ms.index
            assert sgn in (1, -1)
            assert mat_det(m) == 3
            assert m[2] % 3 == 0 and m[0] % 3 != 0
