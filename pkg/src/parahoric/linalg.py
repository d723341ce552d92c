"""Dense exact linear algebra over Fraction, plus modular helpers.

Matrices are lists of row lists. Everything here is exact; callers that
want p-adic truncation reduce afterwards.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Row = list[Fraction]
Matrix = list[Row]


def mat(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[Fraction(0)] * c for _ in range(r)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError("shape mismatch")
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Matrix, v: Sequence[Fraction]) -> Row:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def rref(rows: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form. Returns (R, pivot column indices)."""
    m = [row[:] for row in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        pr = next((i for i in range(r, nr) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nr):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return m, pivots


def rank(rows: Matrix) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Matrix) -> list[Row]:
    """Basis of the right kernel, one vector per free column."""
    if not rows:
        return []
    nc = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * nc
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(a: Matrix, b: Sequence[Fraction]) -> Row | None:
    """One solution of a x = b, or None if inconsistent."""
    nr = len(a)
    nc = len(a[0]) if nr else 0
    aug = [a[i][:] + [Fraction(b[i])] for i in range(nr)]
    red, pivots = rref(aug)
    if nc in pivots:
        return None
    x = [Fraction(0)] * nc
    for r, pc in enumerate(pivots):
        x[pc] = red[r][nc]
    return x


def row_space_canonical(rows: Matrix) -> Matrix:
    red, pivots = rref(rows)
    return red[: len(pivots)]


def same_span(a: Matrix, b: Matrix) -> bool:
    """Do the rows of a and b span the same subspace?"""
    if not a and not b:
        return True
    if not a or not b:
        return not a and not b
    return row_space_canonical(a) == row_space_canonical(b)


def in_span(rows: Matrix, v: Sequence[Fraction]) -> bool:
    if not rows:
        return all(x == 0 for x in v)
    red = row_space_canonical(rows)
    return row_space_canonical(red + [list(v)]) == red


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [a[i][:] + identity(n)[i] for i in range(n)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix not invertible")
    return [row[n:] for row in red]


def charpoly_berkowitz(a: Matrix) -> list[Fraction]:
    """Coefficients of det(X I - A), ascending degree, division free (Berkowitz).

    Returns [c_0, ..., c_n] with c_n = 1.
    """
    n = len(a)
    if n == 0:
        return [Fraction(1)]
    vec = [Fraction(1), -Fraction(a[0][0])]  # descending degree
    for k in range(1, n):
        m = Fraction(a[k][k])
        row = [Fraction(x) for x in a[k][:k]]
        col = [Fraction(a[i][k]) for i in range(k)]
        sub = [[Fraction(x) for x in a[i][:k]] for i in range(k)]
        # first column of the Toeplitz operator: 1, -M, -R C, -R A C, ...
        diag = [Fraction(1), -m]
        w = col
        for _ in range(k):
            diag.append(-sum(x * y for x, y in zip(row, w)))
            w = matvec(sub, w)
        new = []
        for i in range(k + 2):
            s = Fraction(0)
            for j in range(len(vec)):
                d = i - j
                if 0 <= d < len(diag):
                    s += diag[d] * vec[j]
            new.append(s)
        vec = new
    return vec[::-1]


# modular arithmetic helpers (p-power moduli)

def inv_mod(a: int, mod: int) -> int:
    g = pow(a % mod, -1, mod)
    return g


def frac_mod(x: Fraction, mod: int) -> int:
    """Reduce an exact rational with mod-coprime denominator."""
    num = x.numerator % mod
    den = x.denominator % mod
    return (num * inv_mod(den, mod)) % mod


def matmul_mod(a: list[list[int]], b: list[list[int]], mod: int) -> list[list[int]]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) % mod for col in bt] for row in a]


def power_traces_mod(a: list[list[int]], count: int, mod: int) -> list[int]:
    """Traces of a^1 .. a^count modulo mod."""
    traces = []
    cur = [row[:] for row in a]
    for _ in range(count):
        traces.append(sum(cur[i][i] for i in range(len(cur))) % mod)
        if len(traces) == count:
            break
        cur = matmul_mod(cur, a, mod)
    return traces
