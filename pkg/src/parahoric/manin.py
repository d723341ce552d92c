"""Coset bookkeeping for modular symbols on Gamma_0(N p).

P^1(Z/M) normalization follows Stein, Algorithms 8.29 and 8.32. Values of a
symbol are indexed by cosets; the two- and three-term relations carry
Gamma_0(M) twists only, so every transport stays in the Hecke monoid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Mat2 = tuple[int, int, int, int]  # (a, b, c, d) row-major

IDENTITY: Mat2 = (1, 0, 0, 1)
S_MAT: Mat2 = (0, -1, 1, 0)


class UnsupportedLevel(ValueError):
    """The solved presentation needs a torsion-free level with an unfolded tail."""


def mat_mul(m1: Mat2, m2: Mat2) -> Mat2:
    a, b, c, d = m1
    e, f, g, h = m2
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def mat_det(m: Mat2) -> int:
    return m[0] * m[3] - m[1] * m[2]


def mat_inv(m: Mat2) -> Mat2:
    if mat_det(m) != 1:
        raise ValueError("only determinant-one inverses supported")
    a, b, c, d = m
    return (d, -b, -c, a)


def mobius(m: Mat2, x: Fraction | None) -> Fraction | None:
    """Action on P^1(Q); None encodes infinity."""
    a, b, c, d = m
    if x is None:
        return None if c == 0 else Fraction(a, c)
    num = a * x + b
    den = c * x + d
    if den == 0:
        return None
    return Fraction(num, den)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a x + b y = g >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class P1List:
    """Canonical representatives for P^1(Z/M). See Stein, Algorithm 8.32."""

    def __init__(self, M: int):
        if M < 1:
            raise ValueError("M must be positive")
        self.M = M
        seen = set()
        for u in range(M):
            for v in range(M):
                if gcd(gcd(u, v), M) == 1:
                    seen.add(self.normalize(u, v))
        if M == 1:
            seen = {(0, 0)}
        self.reps: list[tuple[int, int]] = sorted(seen)
        self._index = {uv: i for i, uv in enumerate(self.reps)}

    def normalize(self, u: int, v: int) -> tuple[int, int]:
        M = self.M
        if M == 1:
            return (0, 0)
        u %= M
        v %= M
        if gcd(gcd(u, v), M) != 1:
            raise ValueError(f"({u}:{v}) is not a point of P^1(Z/{M})")
        if u == 0:
            return (0, 1)
        g, s, _ = xgcd(u, M)
        # make s a unit mod M without changing it mod M/g
        A = M // g
        s %= M
        if s == 0:
            s = A  # g == M would force u == 0, handled above
        guard = 0
        while gcd(s, M) != 1:
            s = (s + A) % M
            guard += 1
            assert guard <= M, "unit lift failed"
        u2 = g
        v2 = (s * v) % M
        best = v2
        t = 1
        for _ in range(1, g):
            t = (t + A) % M
            if gcd(t, M) == 1:
                w = (t * v2) % M
                if w < best:
                    best = w
        return (u2, best)

    def index(self, u: int, v: int) -> int:
        return self._index[self.normalize(u, v)]

    def __len__(self) -> int:
        return len(self.reps)

    def __getitem__(self, i: int) -> tuple[int, int]:
        return self.reps[i]


def lift_to_sl2(u: int, v: int, M: int) -> Mat2:
    """A determinant-one integer matrix with bottom row (u, v) mod M."""
    if M == 1:
        return IDENTITY
    u %= M
    v %= M
    if (u, v) == (0, 1):
        return IDENTITY
    if (u, v) == (1, 0):
        return S_MAT
    c, d = u, v
    if c == 0:
        c = M
    if d == 0:
        d = M
    guard = 0
    while gcd(c, d) != 1:
        d += M
        guard += 1
        assert guard <= M, "coprime lift failed"
    g, x, y = xgcd(c, d)
    assert g == 1
    m = (y, -x, c, d)
    assert mat_det(m) == 1
    return m


# right action of 2x2 integer matrices on row classes (u, v)

def act_right(uv: tuple[int, int], m: Mat2) -> tuple[int, int]:
    u, v = uv
    a, b, c, d = m
    return (u * a + v * c, u * b + v * d)


U_MAT: Mat2 = mat_mul(S_MAT, (1, 1, 0, 1))  # order three up to sign


@dataclass(frozen=True)
class TriangleSlot:
    coset: int
    gamma: Mat2      # g_x U^k g_y^{-1}, an element of Gamma_0(M)


@dataclass(frozen=True)
class Triangle:
    slots: tuple[TriangleSlot, TriangleSlot, TriangleSlot]


@dataclass(frozen=True)
class ProgramStep:
    """v_target = sum of sign * (v_source | matrix) over the listed terms."""

    target: int
    terms: tuple[tuple[int, int, Mat2], ...]  # (source leader coset, sign, matrix)


@dataclass(frozen=True)
class IdentityTail:
    """Data of the folded identity triangle: v0 | (W - 1) = v_w | gamma_w_inv."""

    x0: int
    partner: int
    w_coset: int
    gamma_w_inv: Mat2
    W: Mat2


@dataclass
class SolvedPresentation:
    free_edges: list[int]            # leader cosets carrying free values
    steps: list[ProgramStep]         # topologically ordered eliminations
    tail: IdentityTail


class ManinSystem:
    """Coset structure for Gamma_0(Np) with p prime to N."""

    def __init__(self, N: int, p: int):
        if N < 1:
            raise ValueError("N must be >= 1")
        if not is_prime(p):
            raise ValueError("p must be prime")
        if N % p == 0:
            raise ValueError("p must not divide N")
        self.N = N
        self.p = p
        self.M = N * p
        self.p1 = P1List(self.M)
        self.lifts: list[Mat2] = [lift_to_sl2(u, v, self.M) for (u, v) in self.p1.reps]
        self._build_orbits()

    @property
    def index(self) -> int:
        return len(self.p1)

    def coset_of_matrix(self, m: Mat2) -> int:
        return self.p1.index(m[2] % self.M, m[3] % self.M)

    def in_gamma0(self, m: Mat2) -> bool:
        return mat_det(m) == 1 and m[2] % self.M == 0

    def transport(self, g: Mat2) -> tuple[int, Mat2]:
        """Write g = gamma g_y; returns (y, gamma)."""
        y = self.coset_of_matrix(g)
        gamma = mat_mul(g, mat_inv(self.lifts[y]))
        assert self.in_gamma0(gamma), "transport left Gamma_0(M)"
        return y, gamma

    def _build_orbits(self) -> None:
        n = self.index
        # S pairs: v_{xS} = -v_x | gamma with gamma = g_x S g_{xS}^{-1}
        self.s_partner: list[int] = [-1] * n
        self.s_twist: list[Mat2] = [IDENTITY] * n  # for partner slots
        self.torsion_s: list[int] = []
        for x in range(n):
            gs = mat_mul(self.lifts[x], S_MAT)
            y, gamma = self.transport(gs)
            self.s_partner[x] = y
            if y == x:
                self.torsion_s.append(x)
            self.s_twist[x] = gamma
        # leader of each S edge
        self.leader: list[int] = [min(x, self.s_partner[x]) for x in range(n)]
        self.edges: list[int] = sorted({self.leader[x] for x in range(n)})
        # U triangles
        seen = set()
        self.triangles: list[Triangle] = []
        self.torsion_u: list[int] = []
        for x in range(n):
            if x in seen:
                continue
            slots = []
            g = self.lifts[x]
            orbit = []
            for k in range(3):
                gk = g if k == 0 else mat_mul(g, U_MAT if k == 1 else mat_mul(U_MAT, U_MAT))
                y, gamma = self.transport(gk)
                slots.append(TriangleSlot(y, gamma))
                orbit.append(y)
            if len(set(orbit)) == 1:
                self.torsion_u.append(x)
                seen.update(orbit)
                continue
            assert len(set(orbit)) == 3, "U orbit of size 2 cannot happen"
            seen.update(orbit)
            self.triangles.append(Triangle(tuple(slots)))

    def value_resolution(self, coset: int) -> tuple[int, int, Mat2 | None]:
        """(leader, sign, twist): v_coset = sign * v_leader | twist (twist None = Id)."""
        ld = self.leader[coset]
        if ld == coset:
            return coset, 1, None
        # coset is the S image of its leader
        return ld, -1, self.s_twist[ld]

    # solved presentation

    def solved_presentation(self) -> SolvedPresentation:
        if self.torsion_s or self.torsion_u:
            raise UnsupportedLevel(
                f"level {self.M} has elliptic points; the solved presentation "
                "needs nu_2 = nu_3 = 0"
            )
        x0 = self.p1.index(0, 1)
        partner = self.s_partner[x0]
        assert partner == self.p1.index(1, 0)
        tail_edge = self.leader[x0]

        identity_tri = None
        others = []
        for tri in self.triangles:
            cosets = {s.coset for s in tri.slots}
            if x0 in cosets or partner in cosets:
                if not (x0 in cosets and partner in cosets):
                    raise UnsupportedLevel("tail cosets split across triangles")
                identity_tri = tri
                continue
            others.append(tri)
        if identity_tri is None:
            raise UnsupportedLevel("no folded identity triangle at this level")

        tail = self._tail_data(identity_tri, x0, partner)

        # Dual graph: non-identity triangles joined along shared S-edges. Every
        # edge class borders two triangle slots, except the one pendant edge
        # whose partner slot sits in the identity triangle. Rooting a spanning
        # tree at the pendant owner gives an elimination order in which each
        # triangle solves for the edge shared with its parent.
        occ: dict[int, list[int]] = {}
        for ti, tri in enumerate(others):
            leaders = [self.leader[s.coset] for s in tri.slots]
            if len(set(leaders)) < 3:
                raise UnsupportedLevel("folded non-identity triangle")
            if tail_edge in leaders:
                raise UnsupportedLevel("tail edge reappears outside its triangle")
            for ld in leaders:
                occ.setdefault(ld, []).append(ti)
        pendants = sorted(e for e, ts in occ.items() if len(ts) == 1)
        w_edge = self.leader[tail.w_coset]
        if pendants != [w_edge]:
            raise UnsupportedLevel("expected exactly one pendant edge, at the tail triangle")

        root = occ[w_edge][0]
        parent_edge: dict[int, int] = {root: w_edge}
        children: dict[int, list[int]] = {ti: [] for ti in range(len(others))}
        visited = {root}
        queue = [root]
        while queue:
            u = queue.pop(0)
            u_edges = sorted(
                self.leader[s.coset] for s in others[u].slots
            )
            for e in u_edges:
                for v in occ[e]:
                    if v not in visited:
                        visited.add(v)
                        parent_edge[v] = e
                        children[u].append(v)
                        queue.append(v)
        if len(visited) < len(others):
            raise UnsupportedLevel("triangle adjacency graph is disconnected")

        tree_edges = {parent_edge[v] for v in visited if v != root}
        free = sorted(e for e, ts in occ.items() if len(ts) == 2 and e not in tree_edges)

        determined: set[int] = set(free)
        steps: list[ProgramStep] = []
        stack: list[tuple[int, bool]] = [(root, False)]
        while stack:
            u, expanded = stack.pop()
            if expanded:
                steps.append(self._solve_triangle(others[u], parent_edge[u], determined))
                determined.add(parent_edge[u])
            else:
                stack.append((u, True))
                for v in reversed(children[u]):
                    stack.append((v, False))

        assert determined | {tail_edge} == set(self.edges)
        return SolvedPresentation(free_edges=free, steps=steps, tail=tail)

    def _tail_data(self, tri: Triangle, x0: int, partner: int) -> IdentityTail:
        # rebuild the triangle from base x0 so slot 0 carries the identity twist
        del tri
        g = self.lifts[x0]
        slots = []
        for k in range(3):
            gk = g if k == 0 else mat_mul(g, U_MAT if k == 1 else mat_mul(U_MAT, U_MAT))
            y, gamma = self.transport(gk)
            slots.append(TriangleSlot(y, gamma))
        s0, s1, s2 = slots
        assert s0.coset == x0 and s0.gamma == IDENTITY
        assert s2.coset == partner and s1.coset not in (x0, partner)
        # v_{partner} = -v_{x0} | s_twist[x0]
        # relation: v_{x0} + v_w|g1^{-1} - v_{x0} | (s_twist g2^{-1}) = 0
        W = mat_mul(self.s_twist[x0], mat_inv(s2.gamma))
        if W[2] % self.M != 0 or W[2] != 0:
            raise UnsupportedLevel("tail twist is not upper triangular")
        if abs(W[0]) != 1 or abs(W[3]) != 1:
            raise UnsupportedLevel("tail twist is not unipotent up to sign")
        return IdentityTail(
            x0=x0,
            partner=partner,
            w_coset=s1.coset,
            gamma_w_inv=mat_inv(s1.gamma),
            W=W,
        )

    def _solve_triangle(self, tri: Triangle, target: int, determined: set[int]) -> ProgramStep:
        """Solve the triangle relation for the leader 'target'."""
        target_term: tuple[int, Mat2] | None = None
        other_terms: list[tuple[int, int, Mat2]] = []
        for s in tri.slots:
            ld, sign, twist = self.value_resolution(s.coset)
            m = mat_inv(s.gamma) if twist is None else mat_mul(twist, mat_inv(s.gamma))
            if ld == target:
                assert target_term is None, "folded triangle escaped detection"
                target_term = (sign, m)
            else:
                assert ld in determined, "elimination order broken"
                other_terms.append((ld, sign, m))
        assert target_term is not None
        tsign, tmat = target_term
        tinv = mat_inv(tmat)
        terms = []
        for ld, sign, m in other_terms:
            terms.append((ld, -sign * tsign, mat_mul(m, tinv)))
        for _, _, m in terms:
            assert self.in_gamma0(m)
        return ProgramStep(target=target, terms=tuple(terms))

    # path decomposition

    def path_terms(
        self, r: Fraction | None, s: Fraction | None
    ) -> list[tuple[int, Mat2, int]]:
        """Terms (coset, gamma_inv, sign) with {r -> s} = sum sign * gamma path(g_coset).

        The value of a symbol on {r -> s} is sum sign * (v_coset | gamma_inv).
        """
        out = []
        for q, sgn in ((s, 1), (r, -1)):
            for g in unimodular_pieces(q):
                y, gamma = self.transport(g)
                out.append((y, mat_inv(gamma), sgn))
        return out

    def hecke_plan(self, deltas: Sequence[Mat2]) -> list[list[tuple[int, int, Mat2]]]:
        """For each coset x: terms (y, sign, m) with the operator value at path x
        equal to sum sign * (v_y | m).

        m = gamma^{-1} delta stays in the Sigma_0 monoid when the deltas do.
        """
        plan: list[list[tuple[int, int, Mat2]]] = []
        for x in range(self.index):
            terms: list[tuple[int, int, Mat2]] = []
            for delta in deltas:
                g = mat_mul(delta, self.lifts[x])
                r = mobius(g, Fraction(0))
                s = mobius(g, None)
                for y, ginv, sgn in self.path_terms(r, s):
                    terms.append((y, sgn, mat_mul(ginv, delta)))
            plan.append(terms)
        return plan


def unimodular_pieces(q: Fraction | None) -> list[Mat2]:
    """Determinant-one matrices whose basic paths compose to {oo -> q}."""
    if q is None:
        return []
    q = Fraction(q)
    # continued fraction convergents, floor variant
    a = []
    num, den = q.numerator, q.denominator
    while True:
        fl = num // den
        a.append(fl)
        num, den = den, num - fl * den
        if den == 0:
            break
    ps: list[int] = [1]
    qs: list[int] = [0]
    pieces = []
    for i, ai in enumerate(a):
        pnew = ai * ps[-1] + (ps[-2] if len(ps) >= 2 else 0)
        qnew = ai * qs[-1] + (qs[-2] if len(qs) >= 2 else 1)
        ps.append(pnew)
        qs.append(qnew)
        m = (pnew, ps[-2], qnew, qs[-2])
        if mat_det(m) == -1:
            m = (-pnew, ps[-2], -qnew, qs[-2])
        assert mat_det(m) == 1
        pieces.append(m)
    return pieces
