"""Print small-slope bound tables for the built-in groups.

Reproduces the closed forms: successive weight gaps plus one on GL(n),
k2 + 1 (Siegel) and k1 - k2 + 1 (Klingen) on GSp(4).
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from parahoric.rootdata import gl_datum, gsp4_datum
from parahoric.slopes import greedy_factorization, h_crit


def gl_table(n: int, weights) -> None:
    d = gl_datum(n)
    print(f"GL({n}), Borel chain:")
    for lam in weights:
        cd = greedy_factorization(d, frozenset(), 2)
        bounds = [h_crit(s.t, s.simple_index, lam) for s in cd.steps]
        print(f"  weight {lam}: bounds {bounds}")


def gsp4_table(weights) -> None:
    d = gsp4_datum()
    print("GSp(4):")
    for k1, k2 in weights:
        lam = (k1, k2, 0)
        sie = greedy_factorization(d, {0}, 2).steps[0]
        kli = greedy_factorization(d, {1}, 2).steps[0]
        print(
            f"  (k1, k2) = ({k1}, {k2}): "
            f"Siegel {h_crit(sie.t, sie.simple_index, lam)}, "
            f"Klingen {h_crit(kli.t, kli.simple_index, lam)}"
        )


if __name__ == "__main__":
    gl_table(2, [(k, 0) for k in range(0, 6)])
    gl_table(3, [(2, 1, 0), (4, 2, 0), (5, 5, 0)])
    gsp4_table([(2, 2), (5, 2), (9, 3)])
