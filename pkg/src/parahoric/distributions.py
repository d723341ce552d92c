"""Moment coordinates for p-adic distribution modules.

A distribution is stored through its moments m_j = mu(z^j). The weight-k
right action of an integer matrix has an exact rational moment matrix;
truncation keeps the first mlen moments. Matrices with unit upper-left entry
and lower-left entry divisible by p never decrease the moment filtration:
v_p(E[j][i]) >= i - j.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

from .linalg import frac_mod
from .manin import Mat2


def padic_val(q: Fraction | int, p: int) -> int | None:
    """Valuation of a rational; None for zero."""
    q = Fraction(q)
    if q == 0:
        return None
    v = 0
    n = q.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = q.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _lin_pow_series(a: Fraction, c: Fraction, e: int, mlen: int) -> list[Fraction]:
    """Coefficients of (a + c z)^e through z^{mlen-1}; needs a != 0 when e < 0."""
    if e >= 0:
        out = [Fraction(0)] * mlen
        for t in range(min(e, mlen - 1) + 1):
            out[t] = comb(e, t) * a ** (e - t) * c**t
        return out
    if a == 0:
        raise ValueError("negative power of a pure monomial has no moment expansion")
    u = c / a
    term = a**e
    out = [term]
    for t in range(1, mlen):
        term = term * Fraction(e - (t - 1), t) * u
        out.append(term)
    return out


@lru_cache(maxsize=None)
def moment_matrix(
    gamma: Mat2, k: int, mlen: int, p: int | None = None
) -> tuple[tuple[Fraction, ...], ...]:
    """Moment matrix E with (mu|gamma)(z^j) = sum_i E[j][i] mu(z^i).

    Row j expands (a + c z)^(k-j) (b + d z)^j. When p is given the matrix must
    lie in the monoid with unit a and p | c, and the filtration bound is
    asserted.
    """
    a, b, c, d = gamma
    if a * d - b * c == 0:
        raise ValueError("singular matrix")
    if p is not None:
        if a % p == 0:
            raise ValueError("upper-left entry must be a p-adic unit")
        if c % p != 0:
            raise ValueError("lower-left entry must be divisible by p")
    rows = []
    af, bf, cf, df = Fraction(a), Fraction(b), Fraction(c), Fraction(d)
    for j in range(mlen):
        A = _lin_pow_series(af, cf, k - j, mlen)
        row = [Fraction(0)] * mlen
        for s in range(min(j, mlen - 1) + 1):
            B = comb(j, s) * bf ** (j - s) * df**s
            if B == 0:
                continue
            for i in range(s, mlen):
                if A[i - s] != 0:
                    row[i] += B * A[i - s]
        rows.append(tuple(row))
    if p is not None:
        for j in range(mlen):
            for i in range(j + 1, mlen):
                v = padic_val(rows[j][i], p)
                assert v is None or v >= i - j, "filtration bound violated"
    return tuple(rows)


def apply_moments(
    E: Sequence[Sequence[Fraction]], vec: Sequence[Fraction]
) -> list[Fraction]:
    return [sum((r[i] * vec[i] for i in range(len(vec))), Fraction(0)) for r in E]


def tail_solve(
    E: Sequence[Sequence[Fraction]],
    nu: Sequence[Fraction],
    top: Fraction,
) -> list[Fraction]:
    """Solve m|(W-1) = nu for the first mlen-1 moments, with free top moment.

    E is the moment matrix of the tail twist W; it must be unipotent in the
    moment filtration. Row j reads sum_{i<=j-1} E[j][i] m_i = nu_j, so the
    moments come out in order, at the cost of dividing by E[j][j-1].
    """
    mlen = len(nu)
    if nu[0] != 0:
        raise ValueError("tail relation is inconsistent: nu must kill constants")
    for j in range(mlen):
        assert E[j][j] == 1, "tail twist is not unipotent on moments"
        assert all(E[j][i] == 0 for i in range(j + 1, mlen))
    m: list[Fraction] = [Fraction(0)] * mlen
    m[mlen - 1] = Fraction(top)
    for j in range(1, mlen):
        acc = Fraction(nu[j])
        for i in range(j - 1):
            acc -= E[j][i] * m[i]
        piv = E[j][j - 1]
        assert piv != 0, "tail solve pivot vanished"
        m[j - 1] = acc / piv
    return m


def tail_solve_matrix(
    E: Sequence[Sequence[Fraction]], mlen: int
) -> list[list[Fraction]]:
    """Matrix Sol with (tail_solve(E, nu, 0))_j = sum_l Sol[j][l] nu_l."""
    cols = []
    for l in range(mlen):
        nu = [Fraction(0)] * mlen
        nu[l] = Fraction(1)
        if l == 0:
            cols.append([Fraction(0)] * mlen)
            continue
        cols.append(tail_solve(E, nu, Fraction(0)))
    return [[cols[l][j] for l in range(mlen)] for j in range(mlen)]


def solve_error_profile(
    E: Sequence[Sequence[Fraction]], p: int, in_prof: Sequence[int]
) -> list[int]:
    """Worst-case valuation floors for the solved moments.

    in_prof[j] bounds below the valuation of the error on nu_j; the returned
    list bounds the error on each solved moment (top moment exact).
    """
    mlen = len(in_prof)
    out = [10**9] * mlen
    for j in range(1, mlen):
        floor = in_prof[j]
        for i in range(j - 1):
            v = padic_val(E[j][i], p)
            if v is not None:
                floor = min(floor, out[i] + v)
        piv = padic_val(E[j][j - 1], p)
        assert piv is not None
        out[j - 1] = floor - piv
    out[mlen - 1] = 10**9
    return out


# family coefficients: Z_p[[w]]/(w^T) with integer representatives mod p^K

def teichmuller(a: int, p: int, K: int) -> int:
    if a % p == 0:
        raise ValueError("Teichmuller lift needs a unit")
    m = p**K
    x = a % m
    for _ in range(K + 2):
        y = pow(x, p, m)
        if y == x:
            break
        x = y
    assert pow(x, p, m) == x
    return x


def iwasawa_log(a: int, p: int, K: int) -> int:
    """log of the 1-unit part of a, as an integer mod p^K."""
    pad = 4
    m = p ** (K + pad)
    om = teichmuller(a, p, K + pad)
    u = (a % m) * pow(om, -1, m) % m
    x = u - 1
    assert x % p == 0
    tot = Fraction(0)
    t = 1
    xt = 1
    while t - _vint(t, p) < K + pad:
        xt *= x
        tot += Fraction((-1) ** (t + 1) * xt, t)
        t += 1
    return frac_mod(tot, p**K)


def _vint(n: int, p: int) -> int:
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


def _wseries_conv(u: Sequence[int], v: Sequence[int], mod: int) -> list[int]:
    n = len(u)
    out = [0] * n
    for i, ui in enumerate(u):
        if ui == 0:
            continue
        for j in range(n - i):
            out[i + j] = (out[i + j] + ui * v[j]) % mod
    return out


def _zconv(u: Sequence[int], v: Sequence[int], mlen: int, mod: int) -> list[int]:
    out = [0] * mlen
    for i, ui in enumerate(u):
        if ui == 0 or i >= mlen:
            continue
        for j in range(mlen - i):
            out[i + j] = (out[i + j] + ui * v[j]) % mod
    return out


@lru_cache(maxsize=None)
def family_moment_matrix(
    gamma: Mat2, k0: int, mlen: int, T: int, p: int, K: int
) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Moment matrix over Z_p[[w]]/(w^T), entries as w-coefficient tuples mod p^K.

    The action multiplies the weight-k0 row by exp(w log<a + c z>); the log of
    the 1-unit part splits as log<a> + log(1 + (c/a) z). Internal precision is
    padded so the divisions by t! keep K true digits.
    """
    a, b, c, d = gamma
    if a % p == 0 or c % p != 0:
        raise ValueError("matrix outside the p-adic monoid")
    if p == 2:
        raise ValueError("family coefficients need p odd")
    vfact = _vint(factorial(max(T - 1, 1)), p)
    Kw = K + vfact
    mw = p**Kw
    kappa = iwasawa_log(a % p ** (Kw + 4), p, Kw)
    u = Fraction(c, a)
    # L(z) = log<a + c z> as a z-series; constant term kappa
    L = [kappa % mw]
    for s in range(1, mlen):
        L.append(frac_mod(Fraction((-1) ** (s + 1), s) * u**s, mw))
    # G_t = L^t / t!, dividing out p-powers exactly as they appear
    Gs: list[list[int]] = [[1] + [0] * (mlen - 1)]
    cur = Gs[0]
    lost = 0
    for t in range(1, T):
        nxt = _zconv(cur, L, mlen, mw)
        vt = _vint(t, p)
        lost += vt
        assert lost <= vfact
        scale = p**vt
        unit = t // scale
        inv_unit = pow(unit, -1, mw)
        div = []
        for x in nxt:
            assert x % scale == 0, "family series lost integrality"
            div.append(x // scale * inv_unit % mw)
        cur = div
        Gs.append(cur)
    mK = p**K
    rows = []
    for j in range(mlen):
        Pj = [frac_mod(x, mw) for x in _series_product(a, b, c, d, k0, j, mlen)]
        row = []
        for i in range(mlen):
            wco = []
            for t in range(T):
                acc = 0
                Gt = Gs[t]
                for s in range(i + 1):
                    acc += Pj[s] * Gt[i - s]
                wco.append(acc % mK)
            row.append(tuple(wco))
        rows.append(tuple(row))
    return tuple(rows)


def _series_product(
    a: int, b: int, c: int, d: int, k0: int, j: int, mlen: int
) -> list[Fraction]:
    A = _lin_pow_series(Fraction(a), Fraction(c), k0 - j, mlen)
    out = [Fraction(0)] * mlen
    for s in range(min(j, mlen - 1) + 1):
        B = comb(j, s) * Fraction(b) ** (j - s) * Fraction(d) ** s
        if B == 0:
            continue
        for i in range(s, mlen):
            if A[i - s] != 0:
                out[i] += B * A[i - s]
    return out


def apply_family_moments(
    E: Sequence[Sequence[Sequence[int]]],
    vec: Sequence[Sequence[int]],
    T: int,
    mod: int,
) -> list[list[int]]:
    out = []
    for row in E:
        acc = [0] * T
        for i, m in enumerate(vec):
            if any(m):
                prod = _wseries_conv(row[i], m, mod)
                acc = [(x + y) % mod for x, y in zip(acc, prod)]
        out.append(acc)
    return out
