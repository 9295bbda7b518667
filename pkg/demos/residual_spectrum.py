"""Residual subspaces and their Plancherel weights for the rank two systems."""
from fractions import Fraction

from hypergeo import residual as res
from hypergeo.rootsys import build_root_system
from hypergeo.weights import MultiplicityFunction

CASES = [("A", 2, (Fraction(-1, 5),)),
         ("B", 2, (Fraction(-1, 5), Fraction(-3, 20))),
         ("G2", 2, (Fraction(-1, 20), Fraction(-1, 30)))]

for fam, rank, vals in CASES:
    R = build_root_system(fam, rank)
    k = MultiplicityFunction(R, vals)
    parts = res.plancherel_parts(R, k)
    by_dim = {}
    for p in parts:
        by_dim.setdefault(p.L.dim, []).append(p)
    print(f"{R.label} k={[str(v) for v in vals]}:",
          ", ".join(f"{len(v)} of dim {d}" for d, v in sorted(by_dim.items(), reverse=True)))
    for p in by_dim.get(0, []):
        g = "unknown" if p.gamma is None else str(p.gamma)
        print(f"   point {[str(v) for v in p.L.center]}  gamma {g}  in support {p.in_support}")

for R in (build_root_system("A", 1), build_root_system("A", 2)):
    for fam in res.cuspidal_families(R):
        print(f"{R.label} cuspidal family on k in {[str(v) for v in fam.interval()]}")
