"""Scan the U_p spectrum over a small weight disc at N = 11, p = 3.

Runs the single-weight series at the disc center, the family series in
Z_p[w]/(w^T), checks center agreement, and reports the slope-h breakpoint
constancy verdicts together with specialized polygons at a few disc points.
"""
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from parahoric.ocsymbols import charpoly_up, family_charpoly
from parahoric.padics import NewtonPolygon

N, P, K0, M, T, XDEG = 11, 3, 0, 12, 3, 8

if __name__ == "__main__":
    t0 = time.monotonic()
    single = charpoly_up(N, P, K0, M, xdeg=14)
    print(f"single weight k = {K0}: certified slopes {single.certified_slopes()}")
    fam = family_charpoly(N, P, K0, M, T=T, xdeg=XDEG)
    ok, shared = fam.center_matches(single)
    print(f"family center agrees with single weight: {ok} (shared digits {shared})")
    for h in (0, 1):
        print(f"slope-{h} breakpoint across the disc: {fam.breakpoint_constancy(h)}")
    for w in (0, P**2, 2 * P**2):
        pts = fam.specialized_points(w)
        poly = NewtonPolygon(pts)
        print(f"  w = {w}: polygon slopes {poly.slopes()}")
    print(f"total {time.monotonic() - t0:.2f}s")
