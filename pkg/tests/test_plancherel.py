import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy import integrate

from hypergeo import plancherel as P
from hypergeo.quadrature import ChamberQuadrature, InsufficientDecay, tanh_sinh
from hypergeo.residual import cuspidal_families
from hypergeo.rootsys import build_root_system
from hypergeo.weights import MultiplicityFunction, rho


def _F_mp(Lam, k, x):
    return complex(mpmath.hyp2f1((k + Lam) / 2, (k - Lam) / 2, k + 0.5, -mpmath.sinh(x) ** 2))


def test_tanh_sinh_endpoint_singularity():
    x, xc, w = tanh_sinh(60)
    # int_0^1 x^{-0.7} (1-x)^{-0.4} dx = B(0.3, 0.6)
    got = np.sum(w * x ** -0.7 * xc ** -0.4)
    assert got == pytest.approx(math.gamma(0.3) * math.gamma(0.6) / math.gamma(0.9), rel=1e-10)


def test_chamber_quadrature_gaussian():
    # int over the plane of exp(-|x|^2) = pi, independent of the chamber split
    for fam in ("A", "B", "G2"):
        R = build_root_system(fam, 2)
        q = ChamberQuadrature(R, T=12.0)
        vals = np.exp(-np.sum(q.x ** 2, axis=1))
        assert q.integrate(vals) == pytest.approx(math.pi, rel=1e-10)


def test_weighted_norm_against_scipy():
    # a Gaussian factor in place of F; delta carries the wall singularity
    R = build_root_system("A", 1)
    k = -0.35
    kk = MultiplicityFunction.equal(R, k)

    def g(x):
        return np.exp(-0.5 * np.sum(np.atleast_2d(x) ** 2, axis=-1))

    got = P.weighted_norm_sq(g, R, kk, rate=0.5).value
    ref = integrate.quad(lambda x: math.exp(-x * x) * abs(2 * math.sinh(x)) ** (2 * k), 0, 40, limit=200)[0]
    assert got == pytest.approx(2 * ref, rel=1e-10)


def test_real_lambda_is_not_square_integrable():
    # |F(lam)|^2 delta grows like e^{2|Lam| x} for real Lam off the residual points
    R = build_root_system("A", 1)
    kk = MultiplicityFunction.equal(R, -0.4)
    assert P.decay_rate(R, (0.05,), kk) == 0.0
    with pytest.raises(InsufficientDecay):
        P.weighted_norm_sq(P.F_evaluator(R, (0.05,), kk), R, kk, lam=(0.05,))


def test_weighted_norm_rejects_non_decaying():
    R = build_root_system("A", 1)
    with pytest.raises(InsufficientDecay):
        P.weighted_norm_sq(None, R, MultiplicityFunction.equal(R, 0.0))
    with pytest.raises(InsufficientDecay):
        P.weighted_norm_sq(None, R, MultiplicityFunction.equal(R, -0.6))


def test_decay_rate_rank1():
    R = build_root_system("A", 1)
    k = MultiplicityFunction.equal(R, -0.3)
    # F(rho) = 1 and delta decays like e^{-2 |rho_1| t} along the chamber
    assert P.decay_rate(R, rho(R, k), k) == pytest.approx(0.3)


def test_test_function_support_and_invariance():
    f = P.TestFunction(width=0.6, order=2.0, center=0.8)
    r = np.linspace(0, 2, 401)
    v = f.profile(r)
    assert np.all(v[(r <= 0.2) | (r >= 1.4)] == 0)
    assert np.all(v[(r > 0.2001) & (r < 1.3999)] > 0)
    R = build_root_system("B", 2)
    x = np.array([0.3, -0.5])
    assert all(abs(f((w @ x)[None]) - f(x[None]))[0] < 1e-15 for w in R.weyl_float)


def test_hull_point_contains_support():
    R = build_root_system("A", 2)
    f = P.TestFunction(width=1.0)
    xh = f.hull_point(R)
    # every unit vector v: max_w <w xh, v> >= |v| * radius, i.e. the ball fits in conv(W xh)
    orbit = np.array([w @ xh for w in R.weyl_float])
    for t in np.linspace(0, 2 * math.pi, 73):
        v = np.array([math.cos(t), math.sin(t)])
        assert np.max(orbit @ v) >= f.radius - 1e-12


def test_fourier_k0_is_cosine_transform():
    R = build_root_system("A", 1)
    f = P.TestFunction(width=1.0)
    mu = np.array([0.0, 1.3, 7.0, 25.0])
    got = P.fourier_transform(f, 1j * mu, R, MultiplicityFunction.equal(R, 0.0))
    ref = [2 * integrate.quad(lambda x: float(f(np.array([x]))[0]) * math.cos(m * x), 0, 1,
                              limit=200)[0] for m in mu]
    assert np.allclose(got, ref, atol=1e-12)


def test_fourier_against_mpmath_integrand():
    R = build_root_system("A", 1)
    k = -0.3
    f = P.TestFunction(width=1.0)
    for mu in (0.5, 6.0):
        got = P.fourier_transform(f, [1j * mu], R, MultiplicityFunction.equal(R, k))[0]

        def g(x):
            return (float(f(np.array([x]))[0]) * _F_mp(-1j * mu, k, x).real
                    * abs(2 * math.sinh(x)) ** (2 * k))

        ref = 2 * integrate.quad(g, 0, 1, limit=400, points=[1e-6])[0]
        assert abs(got - ref) < 1e-8 * max(1, abs(ref))


def test_norm_formula_rank1_constant_two():
    R = build_root_system("A", 1)
    (fam,) = cuspidal_families(R)
    grid = [MultiplicityFunction.equal(R, Fraction(-3, 20)), MultiplicityFunction.equal(R, Fraction(-1, 4))]
    rep = P.norm_formula_check(fam, grid)
    assert rep.expected == 2
    assert rep.passed
    assert all(abs(c - 2) < 1e-9 for c in rep.constants)


def test_norm_rhs_singular_grid():
    R = build_root_system("A", 1)
    (fam,) = cuspidal_families(R)
    with pytest.raises(P.SingularGrid):
        P.norm_rhs(fam, MultiplicityFunction.equal(R, Fraction(-1, 2)))
