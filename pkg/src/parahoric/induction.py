"""Theta operators on unipotent coordinates and parahoric BGG checks, GL(n).

Algebraic inductions are modelled through their restriction to the upper
unitriangular subgroup N: a weight-lambda induction from a parabolic Q sits
inside polynomials in the coordinates z_{ij} (i < j), and membership is
detected through the Levi factorization g = l(y) n(c).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from . import linalg
from .polynomials import Poly, monomials_up_to_degree
from .rootdata import RootDatum, gl_datum
from .slopes import TorusElement

Position = tuple[int, int]


def positions(n: int) -> list[Position]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def var_name(pos: Position, prefix: str = "z") -> str:
    return f"{prefix}{pos[0] + 1}{pos[1] + 1}"


@dataclass(frozen=True)
class NCoordinates:
    """Coordinates z_{ij} on the unipotent radical of the GL(n) Borel."""

    n: int

    @property
    def positions(self) -> list[Position]:
        return positions(self.n)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(var_name(p) for p in self.positions)

    def var(self, pos: Position) -> Poly:
        return Poly.var(self.variables, var_name(pos))

    def unitriangular(self, ring: Sequence[str], entries: dict[Position, Poly]) -> list[list[Poly]]:
        m = [[Poly.zero(ring) for _ in range(self.n)] for _ in range(self.n)]
        for i in range(self.n):
            m[i][i] = Poly.const(ring, 1)
        for pos, val in entries.items():
            m[pos[0]][pos[1]] = val
        return m

    def generic_matrix(self, ring: Sequence[str] | None = None) -> list[list[Poly]]:
        ring = self.variables if ring is None else ring
        return self.unitriangular(
            ring, {p: Poly.var(ring, var_name(p)) for p in self.positions}
        )

    def monomial_basis(self, d: int) -> list[tuple[int, ...]]:
        return monomials_up_to_degree(len(self.positions), d)


def left_translation_field(n: int) -> dict[int, list[tuple[Position, Poly]]]:
    """Derivations l(X_{alpha_i}) f = d/dt f(exp(-t X_{alpha_i}) z) at t = 0.

    Derived from the symbolic product (I - t E_{i,i+1}) Z; returns, per simple
    index i, the list of (position, coefficient) pairs of the vector field.
    """
    nc = NCoordinates(n)
    ring = nc.variables + ("t",)
    t = Poly.var(ring, "t")
    z = nc.generic_matrix(ring)
    out: dict[int, list[tuple[Position, Poly]]] = {}
    for i in range(n - 1):
        # M = (I - t E_{i,i+1}) Z; row i is the only one that moves
        coeffs: list[tuple[Position, Poly]] = []
        for b in range(i + 1, n):
            deriv = -t * z[i + 1][b]
            # d/dt at 0: extract the linear-in-t part as a z-polynomial
            lin: dict = {}
            for mono, c in deriv.coeffs.items():
                if mono[-1] == 1:
                    lin[mono[:-1]] = c
                elif mono[-1] > 1:
                    continue
            pol = Poly(nc.variables, lin)
            if not pol.is_zero():
                coeffs.append(((i, b), pol))
        out[i] = coeffs
    return out


def apply_field(n: int, i: int, f: Poly) -> Poly:
    field = left_translation_field(n)[i]
    nc = NCoordinates(n)
    out = Poly.zero(nc.variables)
    for pos, coeff in field:
        out = out + coeff * f.diff(var_name(pos))
    return out


def theta_exponent(lam: Sequence[int], i: int) -> int:
    """<lambda, alpha_i^vee> + 1 for GL(n) weights."""
    e = int(lam[i]) - int(lam[i + 1]) + 1
    if e < 1:
        raise ValueError("weight must be dominant in the i-th direction")
    return e


def theta_apply(n: int, i: int, lam: Sequence[int], f: Poly) -> Poly:
    """Theta_{alpha_i} = l(X_{alpha_i})^{<lambda,alpha_i^vee>+1}."""
    out = f
    for _ in range(theta_exponent(lam, i)):
        out = apply_field(n, i, out)
    return out


def coefficient_degree_bound(n: int, i: int) -> int:
    """Max total degree among the vector-field coefficients."""
    field = left_translation_field(n)[i]
    return max((c.total_degree() for _, c in field), default=0)


def truncation_threshold(n: int, i: int, lam: Sequence[int]) -> int:
    """Degree above which truncated kernels provably stabilize.

    The operator never raises total degree here, so any cap d gives the
    truncated kernel exactly; this bound also freezes the dimension count.
    """
    return theta_exponent(lam, i) + coefficient_degree_bound(n, i)


def theta_matrix(n: int, i: int, lam: Sequence[int], d: int) -> tuple[list[list[Fraction]], list]:
    """Matrix of Theta_{alpha_i} on the monomial basis of degree <= d."""
    nc = NCoordinates(n)
    basis = nc.monomial_basis(d)
    index = {m: k for k, m in enumerate(basis)}
    cols = []
    for m in basis:
        img = theta_apply(n, i, lam, Poly(nc.variables, {m: Fraction(1)}))
        col = [Fraction(0)] * len(basis)
        for mono, c in img.coeffs.items():
            if sum(mono) > d:
                raise AssertionError("internal error: theta raised total degree")
            col[index[mono]] = c
        cols.append(col)
    rows = [[cols[j][r] for j in range(len(basis))] for r in range(len(basis))]
    return rows, basis


# the star action of p-power torus points

def star_scale_factors(t: TorusElement, n: int) -> list[Fraction]:
    """Scale factor p^{-<beta, mu>} for each coordinate z_beta."""
    if t.datum.rank != n:
        raise ValueError("torus element rank mismatch")
    out = []
    for (a, b) in positions(n):
        e = -(t.mu[a] - t.mu[b])
        out.append(Fraction(t.p) ** e)
    return out


def star_action(t: TorusElement, f: Poly, integral_only: bool = True) -> Poly:
    """Substitute z_beta -> p^{-<beta,mu>} z_beta.

    For t in T^+ all the exponents are >= 0; integral_only enforces that.
    """
    n = t.datum.rank
    factors = star_scale_factors(t, n)
    if integral_only:
        for fac in factors:
            if fac.denominator != 1:
                raise ValueError("star action not integral: t is not in T^+")
    return f.monomial_scale(factors)


def intertwining_scalar(t: TorusElement, i: int, lam: Sequence[int]) -> Fraction:
    """alpha(t)^{-<lambda,alpha^vee>-1} for the transform law of theta."""
    alpha_val = t.root_valuation(t.datum.simple_roots[i])
    e = theta_exponent(lam, i)
    return Fraction(t.p) ** (-alpha_val * e)


def intertwining_check(t: TorusElement, i: int, lam: Sequence[int], f: Poly) -> bool:
    """Theta(t * f) == scalar * (t * Theta(f)), exactly."""
    n = t.datum.rank
    lhs = theta_apply(n, i, lam, star_action(t, f))
    rhs = star_action(t, theta_apply(n, i, lam, f), integral_only=False).scale(
        intertwining_scalar(t, i, lam)
    )
    return lhs == rhs


# Levi factorization and membership in parabolic inductions

def levi_blocks(n: int, levi: Iterable[int]) -> list[list[int]]:
    """Consecutive index blocks of the standard Levi for a simple subset."""
    s = set(levi)
    if not s <= set(range(n - 1)):
        raise ValueError("Levi subset out of range")
    blocks = [[0]]
    for i in range(1, n):
        if i - 1 in s:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return blocks


def split_positions(n: int, levi: Iterable[int]) -> tuple[list[Position], list[Position]]:
    """(Levi positions, non-Levi positions) among the upper coordinates."""
    blocks = levi_blocks(n, levi)
    where = {}
    for bi, blk in enumerate(blocks):
        for i in blk:
            where[i] = bi
    inside, outside = [], []
    for pos in positions(n):
        (inside if where[pos[0]] == where[pos[1]] else outside).append(pos)
    return inside, outside


def restrict_to_levi_product(n: int, levi: Iterable[int], f: Poly) -> Poly:
    """R_n(f): substitute z with the product l(y) n(c) and expand.

    y-variables sit at Levi positions, c-variables at the rest; the result
    lives in the ring [y..., c...].
    """
    inside, outside = split_positions(n, levi)
    ring = tuple(var_name(p, "y") for p in inside) + tuple(var_name(p, "c") for p in outside)
    nc = NCoordinates(n)
    ell = nc.unitriangular(ring, {p: Poly.var(ring, var_name(p, "y")) for p in inside})
    nmat = nc.unitriangular(ring, {p: Poly.var(ring, var_name(p, "c")) for p in outside})
    from .polynomials import poly_matrix_mul

    prod = poly_matrix_mul(ell, nmat)
    images = {var_name(p): prod[p[0]][p[1]] for p in positions(n)}
    return f.substitute(images)


def weyl_dimension(block_weights: Sequence[int]) -> int:
    """Weyl dimension formula for an irreducible GL(b) weight."""
    lam = list(block_weights)
    b = len(lam)
    num, den = 1, 1
    for i in range(b):
        for j in range(i + 1, b):
            num *= lam[i] - lam[j] + j - i
            den *= j - i
    d = Fraction(num, den)
    assert d.denominator == 1 and d > 0
    return int(d)


def levi_weyl_dimension(n: int, levi: Iterable[int], lam: Sequence[int]) -> int:
    dim = 1
    for blk in levi_blocks(n, levi):
        dim *= weyl_dimension([int(lam[i]) for i in blk])
    return dim


def _principal_minor(m: list[list[Fraction]], k: int) -> Fraction:
    sub = [row[:k] for row in m[:k]]
    red, pivots = linalg.rref([r[:] for r in sub])
    # determinant via elimination is overkill; use Berkowitz constant term
    cp = linalg.charpoly_berkowitz(sub)
    det = cp[0] * (-1) ** k
    return det


def _poly_principal_minor(m: list[list[Poly]], k: int) -> Poly:
    """Exact determinant of the leading k x k block, cofactor expansion."""
    ring = m[0][0].vars
    if k == 0:
        return Poly.const(ring, 1)
    if k == 1:
        return m[0][0]
    import itertools

    out = Poly.zero(ring)
    for perm in itertools.permutations(range(k)):
        sign = 1
        seen = [False] * k
        # compute permutation sign by cycle counting
        s = 0
        for start in range(k):
            if seen[start]:
                continue
            length = 0
            cur = start
            while not seen[cur]:
                seen[cur] = True
                cur = perm[cur]
                length += 1
            s += length - 1
        sign = -1 if s % 2 else 1
        term = Poly.const(ring, sign)
        for r in range(k):
            term = term * m[r][perm[r]]
        out = out + term
    return out


def levi_module_basis(
    n: int,
    levi: Iterable[int],
    lam: Sequence[int],
    rng: random.Random | None = None,
) -> tuple[list[Poly], list[tuple[int, ...]]]:
    """Basis of V^{L_Q}_lambda restricted to N cap L_Q, in the y-variables.

    Spanned by y -> phi(u(y) h) for the highest-weight minor product phi and
    random integral block matrices h, accumulated to the Weyl dimension.
    Returns (polynomials, y-monomial list used as coordinates).
    """
    rng = rng or random.Random(20250814)
    levi = frozenset(levi)
    blocks = levi_blocks(n, levi)
    for blk in blocks:
        w = [int(lam[i]) for i in blk]
        if any(w[t] < w[t + 1] for t in range(len(w) - 1)):
            raise ValueError("weight must be dominant for the Levi")
    inside, _ = split_positions(n, levi)
    yring = tuple(var_name(p, "y") for p in inside)
    target = levi_weyl_dimension(n, levi, lam)

    from .polynomials import poly_matrix_mul

    def sample() -> Poly:
        total = Poly.const(yring, 1)
        for blk in blocks:
            b = len(blk)
            w = [int(lam[i]) for i in blk]
            while True:
                h = [[Fraction(rng.randint(-3, 3)) for _ in range(b)] for _ in range(b)]
                hm = [[Poly.const(yring, h[r][c]) for c in range(b)] for r in range(b)]
                u = [[Poly.const(yring, 1 if r == c else 0) for c in range(b)] for r in range(b)]
                for (a, bb) in inside:
                    if a in blk and bb in blk:
                        u[blk.index(a)][blk.index(bb)] = Poly.var(yring, var_name((a, bb), "y"))
                g = poly_matrix_mul(u, hm)
                minors = [_poly_principal_minor(g, k) for k in range(1, b + 1)]
                # det(u(y) h) = det(h), a constant
                dval = minors[-1].coefficient((0,) * len(yring))
                if dval == 0 or any(mi.is_zero() for mi in minors):
                    continue
                piece = Poly.const(yring, Fraction(dval) ** int(w[-1]))
                for jj in range(b - 1):
                    for _ in range(w[jj] - w[jj + 1]):
                        piece = piece * minors[jj]
                total = total * piece
                break
        return total

    vectors: list[Poly] = []
    attempts = 0
    while True:
        attempts += 1
        if attempts > 40 + 6 * target:
            raise ArithmeticError("failed to reach the Weyl dimension; weight not Levi-dominant?")
        v = sample()
        cand = vectors + [v]
        cm = sorted(set().union(*[set(q.coeffs) for q in cand]) | {(0,) * len(yring)})
        mat = [[q.coefficient(m) for m in cm] for q in cand]
        if linalg.rank(mat) == len(cand):
            vectors = cand
        if len(vectors) == target:
            final_monos = sorted(set().union(*[set(q.coeffs) for q in vectors]) | {(0,) * len(yring)})
            return vectors, final_monos


def parahoric_truncation_basis(
    n: int,
    levi: Iterable[int],
    lam: Sequence[int],
    d: int,
    rng: random.Random | None = None,
) -> tuple[list[Poly], list[tuple[int, ...]]]:
    """Degree-<= d part of the parabolic induction model inside A = Q[z].

    f belongs iff in R_n(f) = sum_m q_m(c) y^m, every c-coefficient column of
    the y-expansion lies in the span of the Levi module. Returns a basis
    (as z-polynomials) and the z-monomial list used for coordinates.

    For the Borel (empty Levi subset) there is no condition: every f works.
    """
    levi = frozenset(levi)
    nc = NCoordinates(n)
    basis = nc.monomial_basis(d)
    zring = nc.variables
    if not levi:
        return [Poly(zring, {m: Fraction(1)}) for m in basis], basis

    vecs, _ = levi_module_basis(n, levi, lam, rng=rng)
    inside, outside = split_positions(n, levi)
    ny, ncv = len(inside), len(outside)

    restricted = []
    y_monos: set[tuple[int, ...]] = set()
    c_monos: set[tuple[int, ...]] = set()
    for m in basis:
        r = restrict_to_levi_product(n, levi, Poly(zring, {m: Fraction(1)}))
        table: dict[tuple[int, ...], dict[tuple[int, ...], Fraction]] = {}
        for mono, coef in r.coeffs.items():
            ym, cm = mono[:ny], mono[ny:]
            table.setdefault(cm, {})[ym] = coef
            y_monos.add(ym)
            c_monos.add(cm)
        restricted.append(table)
    for v in vecs:
        y_monos.update(v.coeffs)
    ylist = sorted(y_monos | {(0,) * ny})
    clist = sorted(c_monos)

    vrows = [[v.coefficient(m) for m in ylist] for v in vecs]
    perp = linalg.nullspace(vrows)  # y-vectors orthogonal to the module span

    constraints: list[list[Fraction]] = []
    for cm in clist:
        for k in perp:
            row = []
            for table in restricted:
                col = table.get(cm, {})
                row.append(sum(col.get(ym, Fraction(0)) * kv for ym, kv in zip(ylist, k)))
            constraints.append(row)
    if not constraints:
        kernel = [[Fraction(1) if i == j else Fraction(0) for j in range(len(basis))] for i in range(len(basis))]
    else:
        kernel = linalg.nullspace(constraints)
    polys = [
        Poly(zring, {m: c for m, c in zip(basis, vec) if c != 0}) for vec in kernel
    ]
    return polys, basis


def space_rows(polys: Sequence[Poly], basis: Sequence[tuple[int, ...]]) -> list[list[Fraction]]:
    return [[q.coefficient(m) for m in basis] for q in polys]


@dataclass(frozen=True)
class BGGReport:
    group: str
    simple_index: int
    weight: tuple[int, ...]
    degree_cap: int
    threshold: int
    dim_kernel: int
    dim_parabolic_model: int
    spaces_equal: bool

    def as_dict(self) -> dict:
        return {
            "group": self.group,
            "simple_index": self.simple_index,
            "weight": list(self.weight),
            "degree_cap": self.degree_cap,
            "threshold": self.threshold,
            "dim_kernel": self.dim_kernel,
            "dim_RQ": self.dim_parabolic_model,
            "pass": self.spaces_equal,
        }


def bgg_kernel(n: int, i: int, lam: Sequence[int], d: int, rng: random.Random | None = None) -> BGGReport:
    """Exactness check: ker(Theta_{alpha_i}) on degree <= d equals the
    parabolic model for the sub-minimal parabolic generated by alpha_i."""
    mat, basis = theta_matrix(n, i, lam, d)
    kernel = linalg.nullspace(mat)
    model, basis2 = parahoric_truncation_basis(n, frozenset({i}), lam, d, rng=rng)
    assert basis == basis2
    rows_model = space_rows(model, basis)
    equal = linalg.same_span(kernel, rows_model)
    return BGGReport(
        group=f"GL{n}",
        simple_index=i,
        weight=tuple(int(x) for x in lam),
        degree_cap=d,
        threshold=truncation_threshold(n, i, lam),
        dim_kernel=len(kernel),
        dim_parabolic_model=len(rows_model),
        spaces_equal=equal,
    )


def theta_preserves_parahoric(
    n: int,
    levi: Iterable[int],
    i: int,
    lam: Sequence[int],
    d: int,
    rng: random.Random | None = None,
) -> bool:
    """Does Theta_{alpha_i} send the Q-model at lambda into the Q-model at
    s_i * lambda? Requires alpha_i outside the Levi and a Levi-dominant
    image weight."""
    levi = frozenset(levi)
    if i in levi:
        raise ValueError("alpha_i must lie outside the Levi")
    datum = gl_datum(n)
    star = datum.weyl_star(lam, i)
    src, basis = parahoric_truncation_basis(n, levi, lam, d, rng=rng)
    dst, basis2 = parahoric_truncation_basis(n, levi, star, d, rng=rng)
    assert basis == basis2
    dst_rows = space_rows(dst, basis)
    for f in src:
        img = theta_apply(n, i, lam, f)
        vec = [img.coefficient(m) for m in basis]
        if not linalg.in_span(dst_rows, vec):
            return False
    return True
