"""Numerical chamber integral of the weight delta_k against the closed-form volume."""
from hypergeo.plancherel import weighted_norm_sq
from hypergeo.rootsys import build_root_system
from hypergeo.weights import MultiplicityFunction, check_integrability, macdonald_volume

for fam, rank, k in [("A", 1, -0.25), ("A", 2, -0.2), ("B", 2, -0.1), ("G2", 2, -0.05)]:
    R = build_root_system(fam, rank)
    kk = MultiplicityFunction.equal(R, k)
    print(R.label, k, check_integrability(R, kk))
    num = weighted_norm_sq(None, R, kk).value
    closed = macdonald_volume(R, kk)
    print(f"   quadrature {num:.12g}  closed form {closed:.12g}  rel err {abs(num - closed) / closed:.1e}")
