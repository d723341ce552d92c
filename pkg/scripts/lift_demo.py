"""Lift the ordinary eigensymbol at N = 11, p = 3, weight 0 and print the
convergence ledger: iterations, per-moment precision, and the eigenvalue
against the unit root of X^2 + X + 3.
"""
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from parahoric.ocsymbols import auto_eigensymbol, classical_space, lift_symbol
from parahoric.padics import hensel_lift_root

N, P, K, M = 11, 3, 0, 10

if __name__ == "__main__":
    t0 = time.monotonic()
    space = classical_space(N, P, K)
    print(f"classical symbol space: dimension {space.dimension}")
    sym = auto_eigensymbol(space, B=M + 30)
    print(f"stabilized eigensymbol: alpha = {sym.alpha % P**8} mod {P}^8, slope {sym.slope}")
    rep = lift_symbol(space, sym, M)
    print(f"converged after {rep.iterations} iterations ({time.monotonic() - t0:.2f}s)")
    print(f"moment precision profile: {rep.moment_precision}")
    print(f"specialization check: {rep.specialization_ok} at {rep.specialization_precision} digits")
    alpha = hensel_lift_root([3, 1, 1], P, r0=2, prec=rep.eigenvalue_precision)
    match = (rep.eigenvalue - alpha) % P**rep.eigenvalue_precision == 0
    print(
        f"U_{P} eigenvalue {rep.eigenvalue} mod {P}^{rep.eigenvalue_precision}; "
        f"Hensel unit root match: {match}"
    )
