"""Classical and overconvergent modular symbols for Gamma_0(Np).

A symbol assigns a distribution to every coset; relations from the Manin
presentation carry Gamma_0(M) twists. Overconvergent values keep mlen moments
with the filtration contract that moment j is meaningful mod p^(P-j). U_p
improves the filtration: its composite matrices satisfy v_p(E[j][i]) >= i,
which is asserted on every matrix built here.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import (
    charpoly_berkowitz,
    frac_mod,
    inv_mod,
    matmul_mod,
    nullspace,
    power_traces_mod,
    solve,
)
from .manin import IDENTITY, ManinSystem, Mat2, SolvedPresentation, mat_mul
from .distributions import (
    apply_moments,
    family_moment_matrix,
    moment_matrix,
    padic_val,
    solve_error_profile,
    tail_solve_matrix,
    _wseries_conv,
)

INF = 10**9


def up_deltas(p: int) -> list[Mat2]:
    return [(1, a, 0, p) for a in range(p)]


def hecke_deltas(ell: int) -> list[Mat2]:
    return [(1, a, 0, ell) for a in range(ell)] + [(ell, 0, 0, 1)]


IOTA: Mat2 = (-1, 0, 0, 1)


# ---------------------------------------------------------------------------
# classical symbols (finite-dimensional coefficients, exact rationals)


@dataclass
class ClassicalSpace:
    """Weight-k modular symbols with values in the dual of degree-k forms."""

    ms: ManinSystem
    k: int
    basis: list[list[tuple[Fraction, ...]]]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def _flatten(self, table: Sequence[Sequence[Fraction]]) -> list[Fraction]:
        out: list[Fraction] = []
        for row in table:
            out.extend(row)
        return out

    def apply_plan(
        self, plan: list[list[tuple[int, int, Mat2]]], table: Sequence[Sequence[Fraction]]
    ) -> list[list[Fraction]]:
        d = self.k + 1
        out = []
        for x in range(self.ms.index):
            acc = [Fraction(0)] * d
            for (y, sgn, m) in plan[x]:
                E = moment_matrix(m, self.k, d)
                img = apply_moments(E, table[y])
                acc = [a + sgn * b for a, b in zip(acc, img)]
            out.append(acc)
        return out

    def operator_matrix(self, deltas: Sequence[Mat2]) -> list[list[Fraction]]:
        """Matrix of the double-coset operator in the stored basis."""
        plan = self.ms.hecke_plan(list(deltas))
        n = self.dimension
        A = [self._flatten(b) for b in self.basis]
        Amat = [[A[j][i] for j in range(n)] for i in range(len(A[0]))]
        cols = []
        for b in self.basis:
            img = self.apply_plan(plan, b)
            flat = self._flatten(img)
            x = solve(Amat, flat)
            assert x is not None, "operator left the symbol space"
            cols.append(x)
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def hecke_matrix(self, ell: int) -> list[list[Fraction]]:
        return self.operator_matrix(hecke_deltas(ell))

    def up_matrix(self) -> list[list[Fraction]]:
        return self.operator_matrix(up_deltas(self.ms.p))

    def involution_matrix(self) -> list[list[Fraction]]:
        return self.operator_matrix([IOTA])


def classical_space(N: int, p: int, k: int) -> ClassicalSpace:
    """Kernel of the two- and three-term relations; works at any level."""
    ms = ManinSystem(N, p)
    d = k + 1
    n = ms.index * d
    rows: list[list[Fraction]] = []

    def add_block(row_block, coset, E, sign):
        for j in range(d):
            for i in range(d):
                if E[j][i] != 0:
                    row_block[j][coset * d + i] += sign * E[j][i]

    # S relations: v_x + v_{xS} | gamma^{-1} = 0
    for x in range(ms.index):
        gs = mat_mul(ms.lifts[x], (0, -1, 1, 0))
        y, gamma = ms.transport(gs)
        ginv = (gamma[3], -gamma[1], -gamma[2], gamma[0])
        E = moment_matrix(ginv, k, d)
        blk = [[Fraction(0)] * n for _ in range(d)]
        for j in range(d):
            blk[j][x * d + j] += 1
        add_block(blk, y, E, 1)
        rows.extend(blk)
    # triangle relations, including elliptic orbits
    seen: set[int] = set()
    U = mat_mul((0, -1, 1, 0), (1, 1, 0, 1))
    for x in range(ms.index):
        if x in seen:
            continue
        g = ms.lifts[x]
        blk = [[Fraction(0)] * n for _ in range(d)]
        orbit = []
        for t in range(3):
            gt = g if t == 0 else mat_mul(g, U if t == 1 else mat_mul(U, U))
            y, gamma = ms.transport(gt)
            orbit.append(y)
            ginv = (gamma[3], -gamma[1], -gamma[2], gamma[0])
            E = moment_matrix(ginv, k, d)
            add_block(blk, y, E, 1)
        seen.update(orbit)
        rows.extend(blk)
    basis_flat = nullspace(rows)
    basis = []
    for v in basis_flat:
        table = [tuple(v[x * d : (x + 1) * d]) for x in range(ms.index)]
        basis.append(table)
    return ClassicalSpace(ms=ms, k=k, basis=basis)


def integer_eigenvalues(mat: list[list[Fraction]], bound: int) -> list[int]:
    """Integer roots of the characteristic polynomial within [-bound, bound]."""
    cp = charpoly_berkowitz(mat)
    roots = []
    for a in range(-bound, bound + 1):
        val = Fraction(0)
        for c in reversed(cp):
            val = val * a + c
        if val == 0:
            roots.append(a)
    return roots


# ---------------------------------------------------------------------------
# eigensymbol extraction


@dataclass
class Eigensymbol:
    """p-stabilized eigensymbol with integer values mod p^B."""

    N: int
    p: int
    k: int
    B: int
    table: list[tuple[int, ...]]
    alpha: int
    trace: int          # alpha + beta of the stabilization polynomial
    norm: int           # alpha * beta = p^(k+1) * (leading unit)
    slope: int


def _kernel_of(mat: list[list[Fraction]], shift: Fraction) -> list[list[Fraction]]:
    n = len(mat)
    rows = [[mat[i][j] - (shift if i == j else 0) for j in range(n)] for i in range(n)]
    return nullspace(rows)


def _restrict(mat: list[list[Fraction]], sub: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(mat)
    m = len(sub)
    A = [[sub[j][i] for j in range(m)] for i in range(n)]
    cols = []
    for v in sub:
        img = [sum(mat[i][j] * v[j] for j in range(n)) for i in range(n)]
        x = solve(A, img)
        assert x is not None, "subspace is not stable"
        cols.append(x)
    return [[cols[j][i] for j in range(m)] for i in range(m)]


def ordinary_eigensymbol(
    space: ClassicalSpace, probe_ell: int, probe_a: int, B: int, slope: int = 0
) -> Eigensymbol:
    """Cut the newform block with one prime-to-level Hecke probe, split off the
    plus part, and return the slope-0 (or requested-slope) p-stabilization.
    """
    p = space.ms.p
    k = space.k
    Tl = space.hecke_matrix(probe_ell)
    W = _kernel_of(Tl, Fraction(probe_a))
    if not W:
        raise ValueError(f"no block with T_{probe_ell} eigenvalue {probe_a}")
    iota = space.involution_matrix()
    iota_W = _restrict(iota, W)
    plus = _kernel_of(iota_W, Fraction(1))
    Wplus = [
        [sum(c[j] * W[j][i] for j in range(len(W))) for i in range(space.dimension)]
        for c in plus
    ]
    UW = _restrict(space.up_matrix(), Wplus)
    if len(UW) != 2:
        raise ValueError(f"expected a two-dimensional stabilization block, got {len(UW)}")
    cp = charpoly_berkowitz(UW)  # x^2 - trace x + norm
    trace = -cp[1]
    norm = cp[0]
    assert trace.denominator == 1 and norm.denominator == 1
    trace, norm = int(trace), int(norm)
    if padic_val(norm, p) != k + 1:
        raise ValueError("stabilization norm is not p^(k+1) times a unit")
    # slope-0 root exists iff the trace is a unit
    mod = p**B
    if trace % p == 0:
        raise ValueError("no ordinary root: trace is divisible by p")
    # Hensel for x^2 - trace x + norm from the unit residue trace mod p
    r = trace % p
    for _ in range(B + 2):
        fr = (r * r - trace * r + norm) % mod
        dfr = (2 * r - trace) % mod
        r = (r - fr * inv_mod(dfr, mod)) % mod
    assert (r * r - trace * r + norm) % mod == 0
    if slope == 0:
        alpha = r
    elif slope == k + 1:
        alpha = (trace - r) % mod
    else:
        raise ValueError("stabilization roots have slope 0 or k + 1")
    # psi = (U - beta) w with beta = trace - alpha
    beta = (trace - alpha) % mod
    w = Wplus[0]
    den = 1
    for c in w:
        den = den * c.denominator // math.gcd(den, c.denominator)
    w_int = [int(c * den) for c in w]
    # work directly on symbol tables: psi_table = U(w) - beta*w
    plan_up = space.ms.hecke_plan(up_deltas(p))
    w_table = [
        [sum(Fraction(w_int[b]) * space.basis[b][x][j] for b in range(space.dimension))
         for j in range(k + 1)]
        for x in range(space.ms.index)
    ]
    Uw_table = space.apply_plan(plan_up, w_table)
    psi_frac = [
        [Uw_table[x][j] - beta * w_table[x][j] for j in range(k + 1)]
        for x in range(space.ms.index)
    ]
    scale = 1
    for row in psi_frac:
        for c in row:
            scale = scale * c.denominator // math.gcd(scale, c.denominator)
    assert scale % p != 0, "stabilization produced p in the denominator"
    psi_int = [[frac_mod(c * scale, mod) for c in row] for row in psi_frac]
    # normalize primitive: divide out common p-powers
    vmin = INF
    for row in psi_int:
        for c in row:
            if c:
                v = 0
                cc = c
                while cc % p == 0:
                    cc //= p
                    v += 1
                vmin = min(vmin, v)
    assert vmin < INF, "stabilized symbol vanished"
    if vmin:
        psi_int = [[(c // p**vmin) % (mod // p**vmin) for c in row] for row in psi_int]
        B = B - vmin
        mod = p**B
        psi_int = [[c % mod for c in row] for row in psi_int]
    table = [tuple(row) for row in psi_int]
    sym = Eigensymbol(
        N=space.ms.N, p=p, k=k, B=B, table=table,
        alpha=alpha % mod, trace=trace, norm=norm, slope=slope,
    )
    _assert_eigen(space, sym)
    return sym


def _assert_eigen(space: ClassicalSpace, sym: Eigensymbol) -> None:
    p, B = sym.p, sym.B
    mod = p**B
    plan = space.ms.hecke_plan(up_deltas(p))
    frac_table = [[Fraction(c) for c in row] for row in sym.table]
    img = space.apply_plan(plan, frac_table)
    for x in range(space.ms.index):
        for j in range(sym.k + 1):
            diff = (int(img[x][j]) - sym.alpha * sym.table[x][j]) % mod
            assert diff == 0, "stabilized symbol is not a U_p eigenvector mod p^B"


def auto_eigensymbol(
    space: ClassicalSpace, B: int, slope: int = 0, max_ell: int = 50
) -> Eigensymbol:
    """First rational eigensymbol found by probing T_ell for small ell.

    Probes primes ell coprime to Np in increasing order and, within each,
    integer eigenvalues by absolute value, so the choice is deterministic.
    Blocks whose plus part is not two-dimensional or whose stabilization
    norm is not p^(k+1) times a unit are skipped.
    """
    N, p, k = space.ms.N, space.ms.p, space.k
    for ell in range(2, max_ell + 1):
        if any(ell % q == 0 for q in range(2, ell)):
            continue
        if (N * p) % ell == 0:
            continue
        mat = space.hecke_matrix(ell)
        bound = ell ** (k + 1) + 1
        for a in sorted(integer_eigenvalues(mat, bound), key=lambda x: (abs(x), x)):
            try:
                return ordinary_eigensymbol(space, ell, a, B, slope=slope)
            except ValueError:
                continue
    raise ValueError(f"no rational eigensymbol of slope {slope} found below ell = {max_ell}")


# ---------------------------------------------------------------------------
# overconvergent engine


@dataclass
class OCContext:
    """Shared machinery for one (N, p, k, mlen) overconvergent model."""

    ms: ManinSystem
    sp: SolvedPresentation
    k: int
    mlen: int
    E_W: tuple[tuple[Fraction, ...], ...]
    solve_mat: list[list[Fraction]]
    D: int                      # p-denominator exponent of the tail solve
    S_sol: int                  # worst-case valuation deficit of solved values
    loss_profile: list[int]     # per-moment precision loss of the tail solve

    @property
    def p(self) -> int:
        return self.ms.p

    @property
    def n_model(self) -> int:
        return len(self.sp.free_edges) * self.mlen + 1


def oc_context(N: int, p: int, k: int, mlen: int) -> OCContext:
    ms = ManinSystem(N, p)
    sp = ms.solved_presentation()
    E_W = moment_matrix(sp.tail.W, k, mlen)
    solve_mat = tail_solve_matrix(E_W, mlen)
    D = 0
    for row in solve_mat:
        for c in row:
            v = padic_val(c, p)
            if v is not None and v < 0:
                D = max(D, -v)
    big = 10**6
    floors = solve_error_profile(E_W, p, [big - j for j in range(mlen)])
    S_sol = 0
    for j in range(mlen - 1):
        if floors[j] < big:
            S_sol = max(S_sol, (big - j) - floors[j])
    graded = solve_error_profile(E_W, p, [mlen - j for j in range(mlen)])
    loss = [max(0, (mlen - j) - graded[j]) if graded[j] < INF else 0 for j in range(mlen)]
    return OCContext(
        ms=ms, sp=sp, k=k, mlen=mlen, E_W=E_W, solve_mat=solve_mat,
        D=D, S_sol=S_sol, loss_profile=loss,
    )


def _up_matrix_mod(ctx: OCContext, m: Mat2, mod: int) -> list[list[int]]:
    """Moment matrix of a U_p plan composite, reduced mod p^K.

    Asserts the compactness bound v_p(E[j][i]) >= i: moments below the
    filtration floor cannot influence stored output digits.
    """
    p = ctx.p
    assert m[3] % p == 0 and m[2] % p == 0 and m[0] % p != 0
    E = moment_matrix(m, ctx.k, ctx.mlen, p)
    for j in range(ctx.mlen):
        for i in range(ctx.mlen):
            v = padic_val(E[j][i], p)
            assert v is None or v >= i, "U_p column divisibility failed"
    return [[frac_mod(E[j][i], mod) for i in range(ctx.mlen)] for j in range(ctx.mlen)]


def _gamma_matrix_mod(ctx: OCContext, m: Mat2, mod: int) -> list[list[int]]:
    E = moment_matrix(m, ctx.k, ctx.mlen, ctx.p)
    return [[frac_mod(E[j][i], mod) for i in range(ctx.mlen)] for j in range(ctx.mlen)]


class ModCache:
    def __init__(self, ctx: OCContext, mod: int):
        self.ctx = ctx
        self.mod = mod
        self._up: dict[Mat2, list[list[int]]] = {}
        self._gm: dict[Mat2, list[list[int]]] = {}

    def up(self, m: Mat2) -> list[list[int]]:
        if m not in self._up:
            self._up[m] = _up_matrix_mod(self.ctx, m, self.mod)
        return self._up[m]

    def gamma(self, m: Mat2) -> list[list[int]]:
        if m not in self._gm:
            self._gm[m] = _gamma_matrix_mod(self.ctx, m, self.mod)
        return self._gm[m]


def _matvec_mod(E: list[list[int]], v: Sequence[int], mod: int) -> list[int]:
    out = []
    for row in E:
        acc = 0
        for c, x in zip(row, v):
            if c and x:
                acc += c * x
        out.append(acc % mod)
    return out


def build_tables_mod(
    ctx: OCContext,
    cache: ModCache,
    free_values: dict[int, Sequence[int]],
    tail_top: int,
    mod: int,
    pinned_low: Sequence[int] | None = None,
    defect_out: list | None = None,
) -> list[list[int]]:
    """Value tables (scaled by p^D) from free data given in true (unscaled) units.

    free_values maps each free edge to its mlen moments; the derived leaders
    come from the elimination program, partners from the S twists, and the
    tail coset from the scaled difference-equation solve. pinned_low overwrites
    the first k+1 scaled moments of the tail value when given.

    At k = 0 the moment-0 row of every transport is trivial, so the tail
    consistency nu_0 = 0 holds identically and is asserted. At k > 0 it is a
    genuine linear condition on the free data (the free parameter count
    exceeds the symbol-space dimension by one); model columns that feed
    arbitrary deltas must pass defect_out to collect nu_0 instead.
    """
    p, mlen, D = ctx.p, ctx.mlen, ctx.D
    sD = p**D
    vals: dict[int, list[int]] = {}
    for e in ctx.sp.free_edges:
        mv = list(free_values[e])
        assert len(mv) == mlen
        vals[e] = [x * sD % mod for x in mv]
    for st in ctx.sp.steps:
        acc = [0] * mlen
        for (src, sgn, m) in st.terms:
            img = _matvec_mod(cache.gamma(m), vals[src], mod)
            if sgn == 1:
                acc = [(a + b) % mod for a, b in zip(acc, img)]
            else:
                acc = [(a - b) % mod for a, b in zip(acc, img)]
        vals[st.target] = acc
    # nu in true units (scaled values are p^D * true, so divide exactly),
    # then the difference-equation solve with the p^D-scaled solve matrix
    nu_scaled = _matvec_mod(cache.gamma(ctx.sp.tail.gamma_w_inv), vals[ctx.sp.tail.w_coset], mod)
    nu = []
    for x in nu_scaled:
        assert x % sD == 0, "scaled nu lost p^D divisibility"
        nu.append(x // sD)
    if defect_out is not None:
        defect_out.append(nu[0])
    else:
        assert nu[0] == 0, "tail consistency: nu_0 must vanish"
    v0 = [0] * mlen
    for j in range(mlen):
        acc = 0
        for l in range(1, mlen):
            c = ctx.solve_mat[j][l]
            if c and nu[l]:
                acc += frac_mod(c * sD, mod) * nu[l]
        v0[j] = acc % mod
    v0[mlen - 1] = (v0[mlen - 1] + tail_top * sD) % mod
    if pinned_low is not None:
        for j, x in enumerate(pinned_low):
            v0[j] = x * sD % mod
    vals[ctx.sp.tail.x0] = v0
    # partners
    tables: list[list[int]] = [None] * ctx.ms.index  # type: ignore[list-item]
    for x in range(ctx.ms.index):
        ld, sgn, tw = ctx.ms.value_resolution(x)
        if tw is None:
            tables[x] = vals[ld]
        else:
            img = _matvec_mod(cache.gamma(tw), vals[ld], mod)
            tables[x] = [(-c) % mod for c in img] if sgn == -1 else img
    return tables


def _clamp_pow(p: int, e: int, mod: int) -> int:
    v = p**e
    return v if v < mod else mod


def up_apply_mod(
    ctx: OCContext,
    cache: ModCache,
    plan: list[list[tuple[int, int, Mat2]]],
    tables: Sequence[Sequence[int]],
    mod: int,
) -> list[list[int]]:
    out = []
    for x in range(ctx.ms.index):
        acc = [0] * ctx.mlen
        for (y, sgn, m) in plan[x]:
            img = _matvec_mod(cache.up(m), tables[y], mod)
            if sgn == 1:
                acc = [(a + b) % mod for a, b in zip(acc, img)]
            else:
                acc = [(a - b) % mod for a, b in zip(acc, img)]
        out.append(acc)
    return out


def check_relations_mod(
    ctx: OCContext, cache: ModCache, tables: Sequence[Sequence[int]], mod: int
) -> int:
    """Minimum graded valuation v_p(residual_j) + j over all relations.

    Residual moment j only carries p^(K-j) digits of meaning, so the graded
    reading is the honest one; INF means every relation holds exactly mod K.
    """
    p, mlen = ctx.p, ctx.mlen
    worst = INF

    def vof(vec):
        w = INF
        for j, c in enumerate(vec):
            c %= mod
            if c:
                w = min(w, _vint(c, p) + j)
        return w

    for x in range(ctx.ms.index):
        gs = mat_mul(ctx.ms.lifts[x], (0, -1, 1, 0))
        y, gamma = ctx.ms.transport(gs)
        ginv = (gamma[3], -gamma[1], -gamma[2], gamma[0])
        img = _matvec_mod(cache.gamma(ginv), tables[y], mod)
        res = [(a + b) % mod for a, b in zip(tables[x], img)]
        worst = min(worst, vof(res))
    for tri in ctx.ms.triangles:
        acc = [0] * mlen
        for s in tri.slots:
            ginv = (s.gamma[3], -s.gamma[1], -s.gamma[2], s.gamma[0])
            img = _matvec_mod(cache.gamma(ginv), tables[s.coset], mod)
            acc = [(a + b) % mod for a, b in zip(acc, img)]
        worst = min(worst, vof(acc))
    return worst


# ---------------------------------------------------------------------------
# slope-0 lifting
#
# For j <= k the action matrix rows are polynomials of degree <= k, so the
# classical layer (moments 0..k) is closed under every transport: free higher
# moments and the moment-(k+1) tuning knob never disturb it. The only
# classical coordinate not copied from the eigensymbol is moment k of the
# tail coset, which the difference-equation solve produces; one free
# moment-(k+1) coordinate is tuned so it lands on the eigensymbol exactly.


def _vint(x: int, p: int) -> int:
    if x == 0:
        return INF
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass
class LiftReport:
    converged: bool
    iterations: int
    N: int
    p: int
    k: int
    M: int
    eigenvalue: int
    eigenvalue_precision: int
    specialization_ok: bool
    specialization_precision: int
    moment_precision: list[int]
    solve_loss_ledger: list[int]
    relation_valuation: int
    tables: list[list[int]] = field(repr=False)

    def as_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "N": self.N,
            "p": self.p,
            "k": self.k,
            "M": self.M,
            "eigenvalue": {
                "value": self.eigenvalue % self.p**self.eigenvalue_precision,
                "precision": self.eigenvalue_precision,
            },
            "specialization_check": self.specialization_ok,
            "specialization_precision": self.specialization_precision,
            "moment_precision": list(self.moment_precision),
            "solve_loss_ledger": list(self.solve_loss_ledger),
        }


class DivergenceError(RuntimeError):
    pass


def _tuned_initial_tables(
    ctx: OCContext,
    cache: ModCache,
    sym: Eigensymbol,
    mod: int,
    higher: dict[int, list[int]],
    top: int,
) -> list[list[int]]:
    """Relation-exact initial table whose classical layer equals sym exactly.

    higher supplies moments k+1..mlen-1 for each free edge; a single free
    moment-(k+1) coordinate is then adjusted so the solved tail moment k
    matches the eigensymbol.
    """
    p, k, D = ctx.p, sym.k, ctx.D
    sD = p**D
    free = ctx.sp.free_edges

    def assemble(tune: dict[int, int]) -> list[list[int]]:
        fv = {}
        for e in free:
            fv[e] = list(sym.table[e]) + list(higher[e])
            assert len(fv[e]) == ctx.mlen
        for e, t in tune.items():
            fv[e][k + 1] = (fv[e][k + 1] + t) % mod
        return build_tables_mod(ctx, cache, fv, top, mod)

    base = assemble({})
    x0 = ctx.sp.tail.x0
    target = sym.table[x0][k] * sD % mod
    delta = (target - base[x0][k]) % mod
    if delta:
        # best knob = smallest response valuation; the reachable deltas form
        # exactly that lattice (an honest lift with these classical moments
        # exists), so the divisibility assert below is a consistency check
        best_e, best_coef, best_v = None, None, INF
        for e in free:
            probe = assemble({e: 1})
            coef = (probe[x0][k] - base[x0][k]) % mod
            v = _vint(coef, p)
            if v < best_v:
                best_e, best_coef, best_v = e, coef, v
        vd = _vint(delta, p)
        assert vd >= best_v, "tuning target is outside the reachable lattice"
        t = (delta // p**best_v) * inv_mod(best_coef // p**best_v, mod) % mod
        base = assemble({best_e: t})
        assert (base[x0][k] - target) % (mod // p**D) == 0, "tuning failed to pin the tail moment"
    # classical layer must now match the eigensymbol on every coset, up to
    # the p^D head-room the solve arithmetic consumes
    for x in range(ctx.ms.index):
        for j in range(k + 1):
            assert (base[x][j] - sym.table[x][j] * sD) % (mod // p**D) == 0, (
                "classical layer mismatch"
            )
    return base


def lift_symbol(space: ClassicalSpace, sym: Eigensymbol, M: int) -> LiftReport:
    """Lift a slope-0 eigensymbol to an overconvergent U_p eigensymbol.

    Precondition (strict): v_p(alpha) < k + 1, checked before any work; the
    slope-1 evaluation at k = 0 is rejected here. Iteration is
    Phi <- alpha^{-1} (Phi | U_p) on p^D-scaled tables, with convergence
    declared when consecutive iterates agree at the graded moduli p^(M+D-j).
    """
    p, k = sym.p, sym.k
    v_alpha = _vint(sym.alpha, p)
    if not v_alpha < k + 1:
        raise ValueError(
            f"noncritical-slope precondition failed: v_p(a_p) = {v_alpha} >= k + 1 = {k + 1}"
        )
    if v_alpha != 0:
        raise ValueError("only the slope-0 iteration is implemented")
    ctx = oc_context(space.ms.N, p, k, M)
    D = ctx.D
    Kint = M + 2 * D + 4
    if sym.B < Kint + 2:
        raise ValueError(f"eigensymbol precision B={sym.B} too small for M={M}")
    mod = p**Kint
    sD = p**D
    cache = ModCache(ctx, mod)
    plan = ctx.ms.hecke_plan(up_deltas(p))
    ainv = inv_mod(sym.alpha % mod, mod)

    higher = {e: [0] * (M - k - 1) for e in ctx.sp.free_edges}
    tables = _tuned_initial_tables(ctx, cache, sym, mod, higher, 0)

    iterations = 0
    converged = False
    cap = 4 * M
    while iterations < cap:
        nxt = up_apply_mod(ctx, cache, plan, tables, mod)
        nxt = [[c * ainv % mod for c in row] for row in nxt]
        iterations += 1
        ok = True
        for x in range(ctx.ms.index):
            row_n, row_o = nxt[x], tables[x]
            for j in range(M):
                if (row_n[j] - row_o[j]) % p ** (M + D - j):
                    ok = False
                    break
            if not ok:
                break
        tables = nxt
        if ok:
            converged = True
            break
    if not converged:
        raise DivergenceError(f"no convergence after {cap} iterations")

    rel_val = check_relations_mod(ctx, cache, tables, p ** (M + D))
    assert rel_val >= M + D, "iterate lost the symbol relations"

    # eigenvalue certificate: eig - alpha_true is controlled by the convergence
    # modulus p^(M+D) and the measured moment-0 residual of U Phi - eig Phi
    best = next(x for x in range(ctx.ms.index) if _vint(tables[x][0], p) == D)
    img = up_apply_mod(ctx, cache, plan, tables, mod)
    a0 = tables[best][0] // sD
    b0 = img[best][0]
    assert b0 % sD == 0
    eig = (b0 // sD) * inv_mod(a0, mod) % mod
    res_floor = min(_vint((img[x][0] - eig * tables[x][0]) % mod, p) for x in range(ctx.ms.index))
    eig_prec = min(M, res_floor - D)
    assert eig_prec >= M - 2, "eigenvalue residual exceeds the documented two-digit loss"
    eig = eig % p**eig_prec

    # unscale and tag
    final: list[list[int]] = []
    for x in range(ctx.ms.index):
        row = []
        for j in range(M):
            c = tables[x][j] % p ** (M + D - j)
            assert c % sD == 0, "unscaling lost divisibility"
            row.append((c // sD) % p ** (M - j))
        final.append(row)
    # ultrametric Cauchy bound: stored moment j is within p^(M-j) of the limit
    tags = [M - j for j in range(M)]

    spec_ok = True
    for x in range(ctx.ms.index):
        for j in range(k + 1):
            if (final[x][j] - sym.table[x][j]) % p ** (M - j):
                spec_ok = False
    return LiftReport(
        converged=True, iterations=iterations, N=ctx.ms.N, p=p, k=k, M=M,
        eigenvalue=eig, eigenvalue_precision=eig_prec,
        specialization_ok=spec_ok, specialization_precision=M,
        moment_precision=tags, solve_loss_ledger=list(ctx.loss_profile),
        relation_valuation=rel_val, tables=final,
    )


def random_initial_lift_pair(
    space: ClassicalSpace, sym: Eigensymbol, M: int, seed: int
) -> tuple[bool, int]:
    """Iterate two random-tail initial lifts of the same eigensymbol; returns
    (agree, worst graded valuation of the difference). Uniqueness of the
    slope-0 eigenlift makes agreement at the filtration moduli the oracle.
    """
    import random

    p, k = sym.p, sym.k
    ctx = oc_context(space.ms.N, p, k, M)
    Kint = M + 2 * ctx.D + 4
    mod = p**Kint
    cache = ModCache(ctx, mod)
    plan = ctx.ms.hecke_plan(up_deltas(p))
    ainv = inv_mod(sym.alpha % mod, mod)
    rng = random.Random(seed)
    outs = []
    for _ in range(2):
        higher = {
            e: [rng.randrange(mod) for _ in range(M - k - 1)] for e in ctx.sp.free_edges
        }
        tables = _tuned_initial_tables(ctx, cache, sym, mod, higher, rng.randrange(mod))
        for _ in range(4 * M):
            tables = up_apply_mod(ctx, cache, plan, tables, mod)
            tables = [[c * ainv % mod for c in row] for row in tables]
        outs.append(tables)
    a, b = outs
    S = max(ctx.loss_profile[:M])
    worst = INF
    agree = True
    for x in range(ctx.ms.index):
        for j in range(M):
            d = (a[x][j] - b[x][j]) % mod
            if d:
                worst = min(worst, _vint(d, p) - ctx.D + j)
            need = max(0, M + ctx.D - j - S)
            if d % p**need:
                agree = False
    return agree, worst


# ---------------------------------------------------------------------------
# U_p characteristic series over one weight
#
# Model: a symbol is coordinatized by the mlen moments of each free edge plus
# the top moment of the tail value; U_p becomes an n x n matrix over Z_p. All
# work happens on the p^D-scaled integral matrix mod p^Kbig. Certification is
# two-sided: (representative) Newton's identities lose v_p(r) digits per
# division, tracked per coefficient; (model vs truth) discarding moments
# beyond mlen perturbs coefficient r by at least (mlen - S_sol) plus the sum
# of the r-1 smallest column valuation floors, read off the matrix itself.


@dataclass
class CoefficientReading:
    index: int
    valuation: int | None       # None when the residue is 0 at full precision
    precision: int              # certified p-adic digits of the coefficient
    certified: bool             # valuation < precision, so the vertex is real
    residue: int | None         # coefficient mod p^precision (unscaled)

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "valuation": self.valuation,
            "precision": self.precision,
            "certified": self.certified,
            "residue": self.residue,
        }


@dataclass
class UpSpectralData:
    N: int
    p: int
    k: int
    M: int
    mlen: int
    xdeg: int
    model_dim: int
    coefficients: list[CoefficientReading]
    polygon: "object"
    elapsed: float

    def certified_slopes(self) -> list[tuple[Fraction, int]]:
        return self.polygon.certified_slopes()

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "p": self.p,
            "k": self.k,
            "M": self.M,
            "mlen": self.mlen,
            "xdeg": self.xdeg,
            "model_dim": self.model_dim,
            "coefficients": [c.as_dict() for c in self.coefficients],
            "polygon": self.polygon.as_dict(),
            "certified_slopes": [[str(s), m] for s, m in self.certified_slopes()],
        }

    def csv_rows(self) -> list[list[str]]:
        rows = [["record", "index", "value", "precision", "certified"]]
        for c in self.coefficients:
            rows.append([
                "coefficient", str(c.index),
                "" if c.valuation is None else str(c.valuation),
                str(c.precision), str(c.certified).lower(),
            ])
        for v in self.polygon.vertices:
            rows.append(["vertex", str(v.index), str(v.height), "", str(v.certified).lower()])
        for s in self.polygon.segments:
            rows.append(["slope", str(s.length), str(s.slope), "", str(s.certified).lower()])
        return rows


def _model_positions(ctx: OCContext) -> list[tuple[int, int]]:
    pos = [(e, i) for e in ctx.sp.free_edges for i in range(ctx.mlen)]
    return pos


def up_model_matrix(ctx: OCContext, cache: ModCache, mod: int) -> list[list[int]]:
    """p^D-scaled matrix of U_p in the free-moment coordinates, mod p^K.

    Delta columns at k > 0 sit outside the tail-consistency kernel, so the
    builds route the defect into a sink; the determinant computed from this
    matrix is the Fredholm series of U_p on the free approximation module.
    """
    plan = ctx.ms.hecke_plan(up_deltas(ctx.p))
    pos = _model_positions(ctx)
    n = len(pos) + 1
    x0 = ctx.sp.tail.x0
    wanted = list(ctx.sp.free_edges) + [x0]
    cols: list[list[int]] = []
    zero = [0] * ctx.mlen
    sink: list = []
    for e0, i0 in pos:
        fv = {e: ([0] * ctx.mlen) for e in ctx.sp.free_edges}
        fv[e0] = list(zero)
        fv[e0][i0] = 1
        tables = build_tables_mod(ctx, cache, fv, 0, mod, defect_out=sink)
        cols.append(_extract_column(ctx, cache, plan, tables, wanted, mod))
    fv = {e: [0] * ctx.mlen for e in ctx.sp.free_edges}
    tables = build_tables_mod(ctx, cache, fv, 1, mod, defect_out=sink)
    cols.append(_extract_column(ctx, cache, plan, tables, wanted, mod))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _extract_column(
    ctx: OCContext,
    cache: ModCache,
    plan: list[list[tuple[int, int, Mat2]]],
    tables: list[list[int]],
    wanted: list[int],
    mod: int,
) -> list[int]:
    img: dict[int, list[int]] = {}
    for x in wanted:
        acc = [0] * ctx.mlen
        for (y, sgn, m) in plan[x]:
            v = _matvec_mod(cache.up(m), tables[y], mod)
            if sgn == 1:
                acc = [(a + b) % mod for a, b in zip(acc, v)]
            else:
                acc = [(a - b) % mod for a, b in zip(acc, v)]
        img[x] = acc
    out: list[int] = []
    for e in ctx.sp.free_edges:
        out.extend(img[e])
    out.append(img[ctx.sp.tail.x0][ctx.mlen - 1])
    return out


def _elementary_from_traces(
    traces: list[int], xdeg: int, p: int, mod: int
) -> tuple[list[int], list[int]]:
    """Newton's identities mod p^K with per-coefficient division-loss budget."""
    e = [1] + [0] * xdeg
    nloss = [0] * (xdeg + 1)
    for r in range(1, xdeg + 1):
        acc = 0
        worst_in = 0
        for i in range(1, r + 1):
            term = e[r - i] * traces[i - 1]
            acc = acc + (term if i % 2 == 1 else -term)
            worst_in = max(worst_in, nloss[r - i])
        acc %= mod
        vr = _vint(r, p)
        if vr == INF:
            vr = 0
        if vr:
            assert acc % p**vr == 0, "Newton numerator lost required divisibility"
            acc //= p**vr
            rr = r // p**vr
        else:
            rr = r
        e[r] = acc * inv_mod(rr, mod) % mod
        nloss[r] = worst_in + vr
    return e[1:], nloss[1:]


def charpoly_up(
    N: int, p: int, k: int, M: int, xdeg: int = 14, pad: int = 4
) -> UpSpectralData:
    """Certified initial segment of the U_p characteristic series det(1 - X U_p).

    Coefficient r of the model charpoly is read mod p^Kbig, unscaled by p^(rD),
    and certified against both the representative budget and the
    model-truncation bound before entering the Newton polygon.
    """
    from .padics import NewtonPolygon, PolygonPoint

    t0 = time.monotonic()
    mlen = M + pad
    ctx = oc_context(N, p, k, mlen)
    D, S = ctx.D, ctx.S_sol
    n = ctx.n_model
    xdeg = min(xdeg, n)
    Kbig = mlen + xdeg * (D + 1) + 16
    mod = p**Kbig
    cache = ModCache(ctx, mod)
    U = up_model_matrix(ctx, cache, mod)

    # empirical column valuation floors of the unscaled operator
    floors = []
    for l in range(n):
        v = min(_vint(U[i][l], p) for i in range(n))
        v = min(v, Kbig)
        floors.append(min(v - D, mlen - S))
    floors.sort()

    traces = power_traces_mod(U, xdeg, mod)
    elem, nloss = _elementary_from_traces(traces, xdeg, p, mod)

    readings = [CoefficientReading(0, 0, Kbig, True, 1)]
    points = [PolygonPoint(0, 0, True)]
    for r in range(1, xdeg + 1):
        kappa = (mlen - S) + sum(floors[: r - 1])
        rep_prec = Kbig - nloss[r - 1] - r * D
        prec = min(kappa, rep_prec)
        rep = (-1) ** r * elem[r - 1] % mod
        assert rep % p ** (r * D) == 0 or rep == 0, "scaled coefficient lost p^(rD)"
        c = (rep // p ** (r * D)) % mod if rep else 0
        v = _vint(c, p)
        if prec <= 0:
            readings.append(CoefficientReading(r, None, max(prec, 0), False, None))
            points.append(PolygonPoint(r, 0, False))
            continue
        if v < prec:
            readings.append(CoefficientReading(r, v, prec, True, c % p**prec))
            points.append(PolygonPoint(r, v, True))
        else:
            readings.append(CoefficientReading(r, None, prec, False, 0))
            points.append(PolygonPoint(r, prec, False))
    poly = NewtonPolygon(points)
    return UpSpectralData(
        N=N, p=p, k=k, M=M, mlen=mlen, xdeg=xdeg, model_dim=n,
        coefficients=readings, polygon=poly, elapsed=time.monotonic() - t0,
    )


# ---------------------------------------------------------------------------
# characteristic series over a weight disc
#
# Coefficients live in Z_p[w]/(w^T, p^K); the center w = 0 is the classical
# weight k0 and integer w near the center correspond to weights k0 + w. All
# arithmetic happens genuinely in the truncated ring: evaluation at a unit w
# is not a homomorphism of Z[w]/(w^T), so no evaluate-and-interpolate
# shortcut can recover ring coefficients beyond the first two digits.


class FamCache:
    """Truncated-ring moment matrices of the family action."""

    def __init__(self, ctx: OCContext, k0: int, T: int, mod: int, K: int):
        self.ctx = ctx
        self.k0 = k0
        self.T = T
        self.mod = mod
        self.K = K
        self._fam: dict[Mat2, list[list[tuple[int, ...]]]] = {}

    def _get(self, m: Mat2) -> list[list[tuple[int, ...]]]:
        if m not in self._fam:
            E = family_moment_matrix(m, self.k0, self.ctx.mlen, self.T, self.ctx.p, self.K)
            self._fam[m] = [[tuple(c % self.mod for c in cell) for cell in row] for row in E]
        return self._fam[m]

    def gamma(self, m: Mat2) -> list[list[tuple[int, ...]]]:
        return self._get(m)

    def up(self, m: Mat2) -> list[list[tuple[int, ...]]]:
        p = self.ctx.p
        assert m[3] % p == 0 and m[2] % p == 0 and m[0] % p != 0
        return self._get(m)


def _fam_matvec(
    E: list[list[tuple[int, ...]]], v: Sequence[tuple[int, ...]], T: int, mod: int
) -> list[tuple[int, ...]]:
    zero = (0,) * T
    out = []
    for row in E:
        acc = [0] * T
        for cell, x in zip(row, v):
            if x == zero:
                continue
            for s in range(T):
                cs = cell[s]
                if cs:
                    for t in range(T - s):
                        acc[s + t] += cs * x[t]
        out.append(tuple(a % mod for a in acc))
    return out


def _fam_scale(vec: Sequence[tuple[int, ...]], c: int, mod: int) -> list[tuple[int, ...]]:
    return [tuple(x * c % mod for x in cell) for cell in vec]


def _fam_add(a, b, mod, sign=1):
    if sign == 1:
        return [tuple((x + y) % mod for x, y in zip(ca, cb)) for ca, cb in zip(a, b)]
    return [tuple((x - y) % mod for x, y in zip(ca, cb)) for ca, cb in zip(a, b)]


def build_family_tables(
    ctx: OCContext,
    cache: FamCache,
    free_values: dict[int, Sequence[tuple[int, ...]]],
    tail_top: tuple[int, ...],
    mod: int,
    defect_out: list | None = None,
) -> list[list[tuple[int, ...]]]:
    """Ring-valued tables (scaled by p^D) from free data in true units.

    Away from the w = 0 layer the tail consistency functional is a genuine
    linear condition on the free data, not an identity; callers that feed
    data outside its kernel must pass defect_out to collect nu_0 instead of
    tripping the exactness assert.
    """
    p, mlen, D, T = ctx.p, ctx.mlen, ctx.D, cache.T
    sD = p**D
    zero = (0,) * T
    vals: dict[int, list[tuple[int, ...]]] = {}
    for e in ctx.sp.free_edges:
        mv = list(free_values[e])
        assert len(mv) == mlen
        vals[e] = [tuple(c * sD % mod for c in cell) for cell in mv]
    for st in ctx.sp.steps:
        acc = [zero] * mlen
        for (src, sgn, m) in st.terms:
            img = _fam_matvec(cache.gamma(m), vals[src], T, mod)
            acc = _fam_add(acc, img, mod, sgn)
        vals[st.target] = acc
    nu_scaled = _fam_matvec(cache.gamma(ctx.sp.tail.gamma_w_inv), vals[ctx.sp.tail.w_coset], T, mod)
    nu = []
    for cell in nu_scaled:
        assert all(x % sD == 0 for x in cell), "scaled family nu lost p^D divisibility"
        nu.append(tuple(x // sD for x in cell))
    if defect_out is not None:
        defect_out.append(nu[0])
    else:
        assert nu[0] == zero, "family tail consistency: nu_0 must vanish"
    v0 = []
    for j in range(mlen):
        acc = [0] * T
        for l in range(1, mlen):
            c = ctx.solve_mat[j][l]
            if c and nu[l] != zero:
                ci = frac_mod(c * sD, mod)
                for t in range(T):
                    acc[t] += ci * nu[l][t]
        v0.append(tuple(a % mod for a in acc))
    v0[mlen - 1] = tuple((a + b * sD) % mod for a, b in zip(v0[mlen - 1], tail_top))
    vals[ctx.sp.tail.x0] = v0
    tables: list[list[tuple[int, ...]]] = [None] * ctx.ms.index  # type: ignore[list-item]
    for x in range(ctx.ms.index):
        ld, sgn, tw = ctx.ms.value_resolution(x)
        if tw is None:
            tables[x] = vals[ld]
        else:
            img = _fam_matvec(cache.gamma(tw), vals[ld], T, mod)
            if sgn == -1:
                img = [tuple((-y) % mod for y in cell) for cell in img]
            tables[x] = img
    return tables


def family_model_matrix(
    ctx: OCContext, cache: FamCache, mod: int
) -> list[list[tuple[int, ...]]]:
    """p^D-scaled family U_p in the free-moment coordinates over Z[w]/(w^T).

    Away from w = 0 the tail consistency is a genuine condition and the delta
    columns violate it, so the builds collect the defect in a sink; the
    resulting determinant is the complex-level Fredholm series on the free
    approximation module, whose w = 0 layer is exactly the single-weight model.
    """
    T = cache.T
    plan = ctx.ms.hecke_plan(up_deltas(ctx.p))
    pos = _model_positions(ctx)
    n = len(pos) + 1
    x0 = ctx.sp.tail.x0
    wanted = list(ctx.sp.free_edges) + [x0]
    zero = (0,) * T
    one = (1,) + (0,) * (T - 1)
    sink: list = []

    def column(tables) -> list[tuple[int, ...]]:
        img: dict[int, list[tuple[int, ...]]] = {}
        for x in wanted:
            acc = [zero] * ctx.mlen
            for (y, sgn, m) in plan[x]:
                v = _fam_matvec(cache.up(m), tables[y], T, mod)
                acc = _fam_add(acc, v, mod, sgn)
            img[x] = acc
        out: list[tuple[int, ...]] = []
        for e in ctx.sp.free_edges:
            out.extend(img[e])
        out.append(img[x0][ctx.mlen - 1])
        return out

    cols = []
    for e0, i0 in pos:
        fv = {e: [zero] * ctx.mlen for e in ctx.sp.free_edges}
        row = list(fv[e0])
        row[i0] = one
        fv[e0] = row
        cols.append(column(build_family_tables(ctx, cache, fv, zero, mod, defect_out=sink)))
    fv = {e: [zero] * ctx.mlen for e in ctx.sp.free_edges}
    cols.append(column(build_family_tables(ctx, cache, fv, one, mod, defect_out=sink)))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _fam_power_traces(
    A: list[list[tuple[int, ...]]], count: int, T: int, mod: int
) -> list[list[int]]:
    """Traces of A^1..A^count as w-tuples."""
    n = len(A)
    zero = (0,) * T
    traces = []
    B = [row[:] for row in A]
    for step in range(count):
        tr = [0] * T
        for i in range(n):
            for t in range(T):
                tr[t] += B[i][i][t]
        traces.append([t % mod for t in tr])
        if step == count - 1:
            break
        # B <- B A
        C: list[list[tuple[int, ...]]] = []
        for i in range(n):
            Bi = B[i]
            Crow: list[tuple[int, ...]] = []
            for j in range(n):
                acc = [0] * T
                for l in range(n):
                    x = Bi[l]
                    if x == zero:
                        continue
                    y = A[l][j]
                    if y == zero:
                        continue
                    for s in range(T):
                        xs = x[s]
                        if xs:
                            for t in range(T - s):
                                acc[s + t] += xs * y[t]
                Crow.append(tuple(a % mod for a in acc))
            C.append(Crow)
        B = C
    return traces


def _fam_elementary_from_traces(
    traces: list[list[int]], xdeg: int, T: int, p: int, mod: int
) -> tuple[list[list[int]], list[int]]:
    """Newton's identities in the truncated ring, tracking division losses."""
    one = [1] + [0] * (T - 1)
    e: list[list[int]] = [one] + [[0] * T for _ in range(xdeg)]
    nloss = [0] * (xdeg + 1)
    for r in range(1, xdeg + 1):
        acc = [0] * T
        worst_in = 0
        for i in range(1, r + 1):
            sgn = 1 if i % 2 == 1 else -1
            er_i = e[r - i]
            pi = traces[i - 1]
            for s in range(T):
                es = er_i[s]
                if es:
                    for t in range(T - s):
                        acc[s + t] += sgn * es * pi[t]
            worst_in = max(worst_in, nloss[r - i])
        vr = _vint(r, p)
        if vr == INF:
            vr = 0
        rr = r
        if vr:
            rr = r // p**vr
        inv_rr = inv_mod(rr, mod)
        out = []
        for t in range(T):
            a = acc[t] % mod
            if vr:
                assert a % p**vr == 0, "family Newton numerator lost divisibility"
                a //= p**vr
            out.append(a * inv_rr % mod)
        e[r] = out
        nloss[r] = worst_in + vr
    return e[1:], nloss[1:]


@dataclass
class FamilySpectralData:
    N: int
    p: int
    k0: int
    M: int
    T: int
    mlen: int
    xdeg: int
    model_dim: int
    coefficients: list[list[CoefficientReading]]   # [r][t] readings of w^t part
    center_polygon: "object"
    column_floors: list[int]        # sorted valuation floors of model columns
    trunc_floor: int                # mlen - S, the omitted-tail column floor
    elapsed: float

    def center_readings(self) -> list[CoefficientReading]:
        return [row[0] for row in self.coefficients]

    def center_matches(self, single: UpSpectralData) -> tuple[bool, list[int]]:
        """Coefficient-by-coefficient agreement with a one-weight run at the
        shared certified precision."""
        shared: list[int] = []
        ok = True
        for mine, theirs in zip(self.center_readings(), single.coefficients):
            s = min(mine.precision, theirs.precision)
            shared.append(s)
            if s <= 0:
                continue
            a = mine.residue if mine.residue is not None else 0
            b = theirs.residue if theirs.residue is not None else 0
            if (a - b) % self.p**s:
                ok = False
        return ok, shared

    def specialized_points(self, w_value: int) -> list:
        """Polygon points of the series at an integer point of the disc.

        The true series has integral coefficients, so truncating it at w^T
        perturbs the value at w by at most p^(T v_p(w)); that floor is folded
        into each point's certification.
        """
        from .padics import PolygonPoint

        p = self.p
        vw = _vint(w_value, p)
        drop = self.T * min(vw, 10**3)
        pts = [PolygonPoint(0, 0, True)]
        for r in range(1, len(self.coefficients)):
            row = self.coefficients[r]
            prec = min(c.precision for c in row)
            prec = min(prec, drop)
            acc = 0
            wp = 1
            m = p ** max(prec, 1)
            for c in row:
                acc = (acc + (c.residue or 0) * wp) % m
                wp = wp * w_value % m if w_value else 0
                if wp == 0 and w_value == 0:
                    break
            v = _vint(acc, p)
            if prec > 0 and v < prec:
                pts.append(PolygonPoint(r, v, True))
            else:
                pts.append(PolygonPoint(r, max(prec, 0), False))
        return pts

    def _window_closed(self, points, h: int, count: int) -> bool:
        """True when no coefficient after the breakpoint, inside the window or
        beyond it, can extend the slope-<=h part of the polygon.

        In-window points carry measured heights (uncertified ones already sit
        at their precision floor). Past the window, coefficient r of the model
        series clears the sum of the r smallest column floors, and the omitted
        tail columns clear trunc_floor each; both must stay strictly above the
        slope-h line through the breakpoint.
        """
        ystar = None
        for pt in points:
            if pt.index == count:
                ystar = pt.height
        if ystar is None:
            return False
        for pt in points:
            if pt.index > count and pt.height <= ystar + h * (pt.index - count):
                return False
        run = sum(self.column_floors[: self.xdeg])
        for r in range(self.xdeg + 1, self.model_dim + 1):
            step = self.column_floors[r - 1] if r - 1 < len(self.column_floors) else self.trunc_floor
            bound = run + min(step, self.trunc_floor)
            if bound <= ystar + h * (r - count):
                return False
            run += step
            if min(step, self.trunc_floor) > h and bound > ystar + h * (r - count):
                break
        return min(self.column_floors[-1], self.trunc_floor) > h

    def breakpoint_constancy(self, h: int, w_probe: int | None = None) -> str:
        """'constant' / 'varies' / 'inconclusive' for the x-coordinate of the
        slope-h breakpoint between the center and a probe point of the disc.

        The default probe w = p^2 trades disc radius for truncation accuracy:
        vertices up to height T v_p(w) stay readable there. 'constant' is only
        reported when both windows provably contain their breakpoints.
        """
        from .padics import AmbiguityError, NewtonPolygon

        wp = self.p**2 if w_probe is None else w_probe
        pts_a = self.specialized_points(0)
        pts_b = self.specialized_points(wp)
        try:
            a = NewtonPolygon(pts_a).slope_le_count(h)
            b = NewtonPolygon(pts_b).slope_le_count(h)
        except AmbiguityError:
            return "inconclusive"
        if a >= self.xdeg or b >= self.xdeg:
            return "inconclusive"
        if not (self._window_closed(pts_a, h, a) and self._window_closed(pts_b, h, b)):
            return "inconclusive"
        return "constant" if a == b else "varies"

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "p": self.p,
            "k0": self.k0,
            "M": self.M,
            "T": self.T,
            "mlen": self.mlen,
            "xdeg": self.xdeg,
            "model_dim": self.model_dim,
            "coefficients": [
                [c.as_dict() for c in row] for row in self.coefficients
            ],
            "center_polygon": self.center_polygon.as_dict(),
        }

    def csv_rows(self) -> list[list[str]]:
        """Flat rows: X-coefficient r, weight-variable layer t, then the
        center polygon's vertices and slopes."""
        rows = [["record", "index", "value", "precision", "certified"]]
        for r, row in enumerate(self.coefficients):
            for t, c in enumerate(row):
                rows.append([
                    "coefficient", f"{r}.{t}",
                    "" if c.valuation is None else str(c.valuation),
                    str(c.precision), str(c.certified).lower(),
                ])
        for v in self.center_polygon.vertices:
            rows.append(["vertex", str(v.index), str(v.height), "", str(v.certified).lower()])
        for s in self.center_polygon.segments:
            rows.append(["slope", str(s.length), str(s.slope), "", str(s.certified).lower()])
        return rows


def family_charpoly(
    N: int, p: int, k0: int, M: int, T: int = 3, xdeg: int = 8, pad: int = 2
) -> FamilySpectralData:
    """U_p characteristic series over the weight disc, coefficients in
    Z_p[w]/(w^T) with per-coefficient certified precision."""
    from .padics import NewtonPolygon, PolygonPoint

    t0 = time.monotonic()
    mlen = M + pad
    ctx = oc_context(N, p, k0, mlen)
    D, S = ctx.D, ctx.S_sol
    n = ctx.n_model
    xdeg = min(xdeg, n)
    Kbig = mlen + xdeg * (D + 1) + 16
    mod = p**Kbig
    cache = FamCache(ctx, k0, T, mod, Kbig)
    Ufam = family_model_matrix(ctx, cache, mod)

    floors = []
    for l in range(n):
        v = Kbig
        for i in range(n):
            for c in Ufam[i][l]:
                if c:
                    v = min(v, _vint(c, p))
        floors.append(min(v - D, mlen - S))
    floors.sort()

    traces = _fam_power_traces(Ufam, xdeg, T, mod)
    elem, nloss = _fam_elementary_from_traces(traces, xdeg, T, p, mod)

    coefficients: list[list[CoefficientReading]] = [
        [CoefficientReading(0, 0, Kbig, True, 1)] + [
            CoefficientReading(0, None, Kbig, True, 0) for _ in range(T - 1)
        ]
    ]
    center_points = [PolygonPoint(0, 0, True)]
    for r in range(1, xdeg + 1):
        kappa = (mlen - S) + sum(floors[: r - 1])
        rep_prec = Kbig - nloss[r - 1] - r * D
        prec = min(kappa, rep_prec)
        sgn = (-1) ** r
        row = []
        for t in range(T):
            rep = sgn * elem[r - 1][t] % mod
            assert rep % p ** (r * D) == 0, "scaled family coefficient lost p^(rD)"
            c = rep // p ** (r * D) % mod
            v = _vint(c, p)
            if prec > 0 and v < prec:
                row.append(CoefficientReading(r, v, prec, True, c % p**prec))
            else:
                row.append(CoefficientReading(r, None, max(prec, 0), False,
                                              c % p**prec if prec > 0 else None))
        coefficients.append(row)
        c0 = row[0]
        if c0.certified:
            center_points.append(PolygonPoint(r, c0.valuation, True))
        else:
            center_points.append(PolygonPoint(r, max(prec, 0), False))
    poly = NewtonPolygon(center_points)
    return FamilySpectralData(
        N=N, p=p, k0=k0, M=M, T=T, mlen=mlen, xdeg=xdeg, model_dim=n,
        coefficients=coefficients,
        center_polygon=poly, column_floors=floors, trunc_floor=mlen - S,
        elapsed=time.monotonic() - t0,
    )
