import random
from fractions import Fraction

import pytest

from parahoric.linalg import charpoly_berkowitz
from parahoric.ocsymbols import (
    DivergenceError,
    ModCache,
    auto_eigensymbol,
    build_tables_mod,
    charpoly_up,
    classical_space,
    family_charpoly,
    integer_eigenvalues,
    lift_symbol,
    oc_context,
    ordinary_eigensymbol,
    random_initial_lift_pair,
    up_deltas,
)


def test_classical_dimension_level_33():
    space = classical_space(11, 3, 0)
    assert space.dimension == 9


def test_classical_dimension_weight_two():
    # free-group Euler characteristic: (r - 1)(k + 1) + 1 - 1 with r = 9
    space = classical_space(11, 3, 2)
    assert space.dimension == 24


def test_hecke_t2_spectrum_level_33():
    space = classical_space(11, 3, 0)
    cp = charpoly_berkowitz(space.hecke_matrix(2))
    # (x + 2)^4 (x - 1)^2 (x - 3)^3: doubled 11a oldforms plus Eisenstein
    expected = [Fraction(1)]
    for root, mult in ((-2, 4), (1, 2), (3, 3)):
        for _ in range(mult):
            expected = [
                (expected[i] if i < len(expected) else Fraction(0))
                - root * (expected[i - 1] if i >= 1 else Fraction(0))
                for i in range(len(expected) + 1)
            ]
    # expected is descending-degree; cp is ascending
    assert cp == expected[::-1]
    assert sorted(integer_eigenvalues(space.hecke_matrix(2), 3)) == [-2, 1, 3]


def test_hecke_commutes_with_up():
    space = classical_space(11, 3, 0)
    T2 = space.hecke_matrix(2)
    U3 = space.up_matrix()
    lhs = [[sum(T2[i][s] * U3[s][j] for s in range(9)) for j in range(9)]
           for i in range(9)]
    rhs = [[sum(U3[i][s] * T2[s][j] for s in range(9)) for j in range(9)]
           for i in range(9)]
    assert lhs == rhs


def test_ordinary_eigensymbol_unit_root():
    space = classical_space(11, 3, 0)
    sym = ordinary_eigensymbol(space, 2, -2, B=20)
    assert sym.slope == 0
    assert (sym.alpha**2 + sym.alpha + 3) % 3**18 == 0
    assert sym.alpha % 3 != 0


def test_ordinary_eigensymbol_rejects_missing_block():
    space = classical_space(11, 3, 0)
    with pytest.raises(ValueError):
        ordinary_eigensymbol(space, 2, 7, B=12)


def test_auto_eigensymbol_is_deterministic():
    space = classical_space(11, 3, 0)
    a = auto_eigensymbol(space, B=16)
    b = auto_eigensymbol(space, B=16)
    assert a.alpha == b.alpha and a.table == b.table


def test_critical_stabilization_rejected_by_lift():
    space = classical_space(11, 3, 0)
    sym = auto_eigensymbol(space, B=40, slope=1)
    with pytest.raises(ValueError, match="noncritical-slope precondition"):
        lift_symbol(space, sym, 8)


def test_lift_small_precision():
    space = classical_space(11, 3, 0)
    sym = auto_eigensymbol(space, B=30)
    rep = lift_symbol(space, sym, 6)
    assert rep.converged
    assert rep.specialization_ok
    assert (rep.eigenvalue**2 + rep.eigenvalue + 3) % 3**rep.eigenvalue_precision == 0
    assert rep.moment_precision == [6, 5, 4, 3, 2, 1]


def test_lift_requires_working_precision():
    space = classical_space(11, 3, 0)
    sym = auto_eigensymbol(space, B=12)
    with pytest.raises(ValueError, match="too small"):
        lift_symbol(space, sym, 20)


def test_independent_initial_lifts_agree():
    space = classical_space(11, 3, 0)
    sym = auto_eigensymbol(space, B=30)
    agree, worst = random_initial_lift_pair(space, sym, 5, seed=123)
    assert agree
    assert worst > 0


def test_tail_consistency_identity_at_weight_zero():
    """At k = 0 the tail functional vanishes identically on free data."""
    ctx = oc_context(11, 3, 0, 5)
    mod = 3**12
    cache = ModCache(ctx, mod)
    rng = random.Random(5)
    free = {e: [rng.randrange(mod) for _ in range(5)] for e in ctx.sp.free_edges}
    tables = build_tables_mod(ctx, cache, free, 0, mod)
    assert len(tables) == ctx.ms.index


def test_tail_consistency_is_a_condition_at_higher_weight():
    """At k > 0 generic free data violates the tail functional: the sink
    collects a nonzero defect instead of tripping the exactness assert."""
    ctx = oc_context(11, 3, 2, 5)
    mod = 3**12
    cache = ModCache(ctx, mod)
    rng = random.Random(5)
    defects = []
    hit = 0
    for _ in range(4):
        free = {e: [rng.randrange(mod) for _ in range(5)] for e in ctx.sp.free_edges}
        sink: list = []
        build_tables_mod(ctx, cache, free, 0, mod, defect_out=sink)
        defects.append(sink[0] % mod)
        if sink[0] % mod:
            hit += 1
    assert hit >= 3


def test_charpoly_up_known_polygon():
    # the slope-1 vertex of this level sits at x = 9, so the window must
    # reach past it before the hull shows the segment
    data = charpoly_up(11, 3, 0, 8, xdeg=10)
    cert = dict()
    for s, m in data.certified_slopes():
        cert[s] = cert.get(s, 0) + m
    assert cert.get(Fraction(0), 0) == 6
    assert cert.get(Fraction(1), 0) >= 3
    # constant coefficient of det(1 - XU) is 1
    assert data.coefficients[0].valuation == 0
    rows = data.csv_rows()
    assert rows[0] == ["record", "index", "value", "precision", "certified"]


def test_charpoly_zero_slope_count_matches_classical_ordinary_rank():
    """Overconvergent slope-0 multiplicity equals the classical one: the
    ordinary part is already classical, so the two polygons agree there."""
    from parahoric.padics import newton_polygon_of_poly

    data = charpoly_up(11, 3, 0, 8, xdeg=8)
    cp = charpoly_berkowitz(classical_space(11, 3, 0).up_matrix())
    # root valuations of det(xI - U) on the classical space
    poly = newton_polygon_of_poly(cp, 3)
    classical_zero = sum(m for v, m in poly.root_valuations() if v == 0)
    cert_zero = sum(m for s, m in data.certified_slopes() if s == 0)
    assert cert_zero == classical_zero


def test_family_center_matches_single_weight():
    fam = family_charpoly(11, 3, 0, 6, T=2, xdeg=6)
    single = charpoly_up(11, 3, 0, 6, xdeg=6)
    ok, shared = fam.center_matches(single)
    assert ok
    assert all(s >= 3 for s in shared[1:])


def test_family_breakpoint_constancy_states():
    fam = family_charpoly(11, 3, 0, 8, T=3, xdeg=8)
    assert fam.breakpoint_constancy(0) == "constant"
    # the slope-1 window cannot be closed at this truncation: honest tri-state
    assert fam.breakpoint_constancy(1) == "inconclusive"


def test_family_csv_rows_carry_layers():
    fam = family_charpoly(11, 3, 0, 5, T=2, xdeg=4)
    rows = fam.csv_rows()
    idx = {r[1] for r in rows if r[0] == "coefficient"}
    assert "1.0" in idx and "1.1" in idx
    assert all(r[3] for r in rows if r[0] == "coefficient")
