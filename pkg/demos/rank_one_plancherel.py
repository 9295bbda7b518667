"""Rank one walk-through: F, the c-function and the Plancherel identity on A1.

For -1/2 < k < 0 the continuous spectrum alone misses part of ||f||^2.  The
residual points +-rho(k) carry the rest, and their spherical function F(rho(k))
is the constant 1.
"""
from fractions import Fraction

import numpy as np

from hypergeo import series
from hypergeo.cfunc import c_tilde
from hypergeo.plancherel import TestFunction, plancherel_verify
from hypergeo.rootsys import build_root_system
from hypergeo.weights import MultiplicityFunction, rho

R = build_root_system("A", 1)
k = MultiplicityFunction.equal(R, Fraction(-1, 4))
r = rho(R, k)
print("rho(k) =", r)

x = np.array([[-0.3], [-1.0], [-2.5]])
print("F(rho(k)) at three points:", np.round(series.eval_F(R, tuple(float(v) for v in r), k, x), 14))
print("F(0.7 i):", np.round(series.eval_F(R, (0.7j,), k, x), 6))
print("c~(rho(k)) =", c_tilde(R, r, k).value)

for f in (TestFunction(width=1.0), TestFunction(width=0.6, order=2.0, center=0.8)):
    rep = plancherel_verify(f, k)
    print(f"||f||^2 = {rep.norm_sq:.9f}  continuous {rep.continuous:.9f}"
          f"  discrete {rep.discrete:.9f}  mismatch {rep.mismatch:.1e}")
