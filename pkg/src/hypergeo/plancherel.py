"""Weighted norms, the hypergeometric Fourier transform in rank one, the rank-one
Plancherel check and the cuspidal norm formula."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import gammafn
from .cfunc import ZERO, c_normalized
from .quadrature import ChamberQuadrature, InsufficientDecay, radius_for, tanh_sinh
from .residual import (
    CuspidalFamily,
    UnderdeterminedMeasure,
    enumerate_residual,
    gamma_easy,
    plancherel_parts,
)
from .rootsys import RootSystem, build_root_system
from .series import eval_F, eval_F_rank1
from .weights import MultiplicityFunction, check_integrability, log_delta_from_alpha, rho


@dataclass(frozen=True)
class TestFunction:
    """Radial bump exp(-m / (1 - s^2)), s = (|x| - center) / width, zero for |s| >= 1.

    Radial in the W-invariant norm, hence W-invariant.  ``center = 0`` gives a
    bump of support radius ``width``.
    """

    __test__ = False  # not a pytest class

    width: float = 1.0
    order: float = 1.0
    center: float = 0.0
    amplitude: float = 1.0

    @property
    def radius(self) -> float:
        return self.center + self.width

    def profile(self, r) -> np.ndarray:
        s = (np.abs(np.asarray(r, dtype=float)) - self.center) / self.width
        out = np.zeros_like(s)
        inside = np.abs(s) < 1
        out[inside] = self.amplitude * np.exp(-self.order / (1 - s[inside] ** 2))
        return out

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r = np.abs(x) if x.ndim <= 1 else np.linalg.norm(x, axis=-1)
        return self.profile(r)

    def hull_point(self, R: RootSystem) -> np.ndarray:
        """A dominant x with supp f inside C_x = conv(W x)."""
        e = R.embedding
        # rho-direction in the space: the dual basis vector sum, made dominant
        v = np.linalg.solve(e.T, -np.ones(R.rank))
        v = -v / np.linalg.norm(v)
        # distance from 0 to the facet of conv(W v) normal to omega_i
        fw = np.array([[float(c) for c in w] for w in R.fundamental_weights]) @ e.T
        dist = min(float(w @ v) / np.linalg.norm(w) for w in fw)
        return v * self.radius / dist

    def support_function(self, R: RootSystem, lam) -> float:
        """H_x(lam) = max_w Re(w lam)(x) for lam in simple-root coordinates."""
        x = self.hull_point(R)
        return max(float(np.real(R.to_float(np.asarray(R.act(w, tuple(lam)), dtype=complex)) @ x))
                   for w in R.weyl)


# -- norms ---------------------------------------------------------------------

@dataclass(frozen=True)
class NormReport:
    value: float
    tail_bound: float
    T: float
    nodes: int


def decay_rate(R: RootSystem, lam: Sequence, k: MultiplicityFunction) -> float:
    """Radial rate of the envelope of |F(lam)|^2 delta along the chamber.

    Only exponents w lam whose coefficient c(-w lam) is nonzero occur in F;
    each gives |F|^2 delta ~ e^{2 Re(w lam)(x)}, which in the t-coordinates
    decays at rate 2 min_i Re(w lam)_i.  A nonpositive result means no decay.
    """
    rates = []
    for w in R.weyl:
        mu = R.act(w, tuple(complex(v) for v in lam))
        if c_normalized(R, tuple(-v for v in mu), k.as_float()).flag == ZERO:
            continue
        rates.append(2 * min(c.real for c in mu))
    return max(min(rates), 0.0) if rates else 0.0


def weighted_norm_sq(evaluator: Callable | None, R: RootSystem, k: MultiplicityFunction,
                     quad: ChamberQuadrature | None = None, tol: float = 1e-12,
                     rate: float | None = None, lam: Sequence | None = None) -> NormReport:
    """|W| times the chamber integral of |F|^2 delta; ``evaluator=None`` means F = 1."""
    if k.is_zero:
        raise InsufficientDecay("delta = 1 for k = 0: the integral diverges")
    if not check_integrability(R, k).short_root_ok:
        raise InsufficientDecay("multiplicity outside the integrable regime")
    if rate is None:
        rate = decay_rate(R, lam if lam is not None else tuple(-v for v in rho(R, k.as_float())), k)
    if quad is None:
        quad = ChamberQuadrature(R, radius_for(rate, R.rank, tol, t_max=400.0))
    kf = k.as_float()
    logd = log_delta_from_alpha(R, kf, quad.alpha)
    if evaluator is None:
        vals = 1.0
    elif hasattr(evaluator, "from_simple"):
        vals = np.abs(np.asarray(evaluator.from_simple(-quad.t))) ** 2
    else:
        vals = np.abs(np.asarray(evaluator(quad.x))) ** 2
    value = float(np.real(quad.integrate(vals, log_factor=logd)))

    def envelope(t):
        ax = -np.asarray(t) @ np.array(R.positive, dtype=float).T
        if evaluator is None:
            f = 1.0
        elif hasattr(evaluator, "from_simple"):
            f = np.abs(np.asarray(evaluator.from_simple(-t))) ** 2
        else:
            f = np.abs(np.asarray(evaluator(-np.linalg.solve(R.embedding.T, t.T).T))) ** 2
        return f * np.exp(log_delta_from_alpha(R, kf, ax))

    tail = quad.tail_bound(envelope, rate, coords="t")
    if tail > tol * abs(value) * 10:
        raise InsufficientDecay(f"tail bound {tail:.2e} exceeds tolerance; enlarge T")
    return NormReport(value, tail, quad.T, quad.size)


def F_evaluator(R: RootSystem, lam: Sequence, k: MultiplicityFunction, tol: float = 1e-13) -> Callable:
    """x -> F(lam, k; x) on chamber points, for use as a quadrature integrand."""
    kf = k.as_float()
    lam = tuple(complex(v) for v in lam)

    def chunked(pts, key):
        pts = np.atleast_2d(pts)
        out = np.empty(pts.shape[0], dtype=complex)
        for s in range(0, pts.shape[0], 4096):
            block = pts[s:s + 4096]
            if key == "x":
                out[s:s + 4096] = eval_F(R, lam, kf, block, tol)
            else:
                out[s:s + 4096] = eval_F(R, lam, kf, None, tol, simple=block)
        return out

    class _Evaluator:
        def __call__(self, x):
            return chunked(x, "x")

        def from_simple(self, a):
            """Evaluate from the values alpha_i(x) of the simple roots."""
            return chunked(a, "simple")

    return _Evaluator()


# -- rank one Fourier transform and Plancherel ----------------------------------------

def _radial_rule(f: TestFunction, m: int = 120):
    """tanh-sinh rule on [max(0, center - width), radius]."""
    a = max(0.0, f.center - f.width)
    b = f.radius
    u, _, w = tanh_sinh(m)
    return a + (b - a) * u, (b - a) * w


def _rank1_delta(x, k: float) -> np.ndarray:
    # delta = |2 sinh x|^{2k} for A1 with alpha(x) = 2x
    return np.exp(2 * k * (np.abs(x) + np.log(-np.expm1(-2 * np.abs(x)))))


def fourier_transform(f: TestFunction, lam_grid, R: RootSystem, k: MultiplicityFunction,
                      m: int = 120) -> np.ndarray:
    """Ff(lam) = int f(x) F(-lam, k; x) delta(k; x) dx for A1, lam given by Lam = lam(alpha^v).

    The integrand is even in x, so the integral is twice the one over x > 0.
    """
    if R.rank != 1:
        raise NotImplementedError("Fourier transform is implemented in rank one")
    kk = float(k.values[0])
    x, w = _radial_rule(f, m)
    base = 2 * w * f(x) * _rank1_delta(x, kk)
    out = []
    for Lam in np.atleast_1d(lam_grid):
        out.append(np.sum(base * eval_F_rank1(-complex(Lam), kk, x)))
    return np.array(out)


def norm_sq_rank1(f: TestFunction, k: float, m: int = 120) -> float:
    x, w = _radial_rule(f, m)
    return float(2 * np.sum(w * f(x) ** 2 * _rank1_delta(x, k)))


@dataclass
class PlancherelReport:
    norm_sq: float
    continuous: float
    discrete: float
    mismatch: float
    tol: float
    passed: bool
    config: dict = field(default_factory=dict)

    @property
    def spectral(self) -> float:
        return self.continuous + self.discrete


def _abs_c_sq_inv(Lam: np.ndarray, R, k) -> np.ndarray:
    out = []
    for L in Lam:
        c = c_normalized(R, (1j * L / 2,), k).value
        out.append(1.0 / abs(c) ** 2)
    return np.array(out)


def plancherel_verify(f: TestFunction, k: MultiplicityFunction, tol: float = 1e-3,
                      mu_max: float = 60.0, h: float = 0.1, m: int = 120) -> PlancherelReport:
    """Compare ||f||^2 with the spectral side on A1 (continuous plus cuspidal points)."""
    R = k.R
    if R.rank != 1:
        raise NotImplementedError("Plancherel verification is rank one")
    kk = float(k.values[0])
    kx = k if k.is_exact else MultiplicityFunction.equal(R, Fraction(str(kk)))
    parts = plancherel_parts(R, kx)
    if any(p.gamma is None for p in parts):
        raise UnderdeterminedMeasure("unknown gamma in a Plancherel part")
    lhs = norm_sq_rank1(f, kk, m)
    mu = np.arange(0.0, mu_max + h / 2, h)
    Ff = fourier_transform(f, 1j * mu, R, k.as_float(), m)
    cont_part = next(p for p in parts if p.L.dim == 1)
    dens = float(cont_part.gamma) * _abs_c_sq_inv(mu, R, k.as_float()) * cont_part.omega
    if np.any(dens < 0):
        raise ArithmeticError("negative Plancherel density sample")
    g = np.abs(Ff) ** 2 * dens
    # even integrand: trapezoid over [0, mu_max], doubled
    continuous = float(2 * h * (np.sum(g) - 0.5 * g[0] - 0.5 * g[-1]))
    discrete = 0.0
    for p in parts:
        if p.L.dim == 0 and p.in_support:
            c = p.L.center
            Lam = float(R.pairing(c, R.coroot(R.simple_roots[0])))
            Fc = fourier_transform(f, [Lam], R, k.as_float(), m)[0]
            discrete += float(p.gamma) * p.f([float(v) for v in c]) * abs(Fc) ** 2
    mismatch = abs(lhs - continuous - discrete) / abs(lhs) if lhs else abs(continuous + discrete)
    return PlancherelReport(lhs, continuous, discrete, mismatch, tol, mismatch <= tol,
                            {"k": str(kx.values[0]), "mu_max": mu_max, "h": h, "nodes": 2 * m + 1,
                             "width": f.width, "order": f.order, "center": f.center})


def discrete_normalization(k: MultiplicityFunction) -> float:
    """Weight of the point rho(k) times ||F(rho(k), k)||^2 on A1 (both points: twice this)."""
    R = k.R
    kx = k if k.is_exact else MultiplicityFunction.equal(R, Fraction(str(float(k.values[0]))))
    r = rho(R, kx)
    part = next(p for p in plancherel_parts(R, kx) if p.L.dim == 0 and tuple(p.L.center) == tuple(r))
    weight = float(part.gamma) * part.f([float(v) for v in r])
    nrm = weighted_norm_sq(F_evaluator(R, [float(v) for v in r], kx), R, kx, lam=[float(v) for v in r])
    return 2 * weight * nrm.value


# -- norm formula -----------------------------------------------------------------

class SingularGrid(ValueError):
    pass


def norm_rhs(family: CuspidalFamily, k: MultiplicityFunction) -> float:
    """The Gamma-factor ratio multiplying c in the norm formula."""
    R = family.R
    lam = family.at(k)
    r = rho(R, k)
    sign, logv = 1, 0.0

    def acc(z, power):
        nonlocal sign, logv
        z = float(z)
        if gammafn.pole_index(z) is not None:
            raise SingularGrid(f"grid point singular: Gamma pole at {z}")
        s, lg = gammafn.real_gamma_signed(z)
        sign *= s ** abs(power)
        logv += power * lg

    for a in R.positive:
        p = R.pairing(r, R.coroot(a))
        acc(p + k(a), 2)
        acc(p, -2)
    for i, a in enumerate(R.roots):
        v = R.pairing(lam, R.coroot(a))
        if i not in family.R_z:
            acc(v, 1)
        if i not in family.R_p:
            acc(v + k(a), -1)
    return sign * math.exp(logv)


@dataclass
class NormFormulaReport:
    ks: list
    lhs: list
    rhs: list
    constants: list
    spread: float
    expected: float | None
    deviation: float | None
    tol: float
    passed: bool


def norm_formula_check(family: CuspidalFamily, k_grid: Sequence[MultiplicityFunction],
                       tol: float = 1e-4, expected_tol: float = 1e-3) -> NormFormulaReport:
    R = family.R
    lhs, rhs, cs = [], [], []
    expected = None
    for k in k_grid:
        lam = family.at(k)
        rep = weighted_norm_sq(F_evaluator(R, lam, k), R, k, lam=[float(v) for v in lam])
        q = norm_rhs(family, k)
        lhs.append(rep.value)
        rhs.append(q)
        cs.append(rep.value / q)
        if expected is None and k.is_exact:
            res = enumerate_residual(R, k)
            L = next(L for L in res if L.dim == 0 and tuple(L.center) == tuple(lam))
            g = gamma_easy(L)
            if g:
                orbit = {R.act(w, lam) for w in R.weyl}
                expected = float(1 / (g * len(orbit)))
    mean = sum(cs) / len(cs)
    spread = (max(cs) - min(cs)) / abs(mean)
    deviation = None if expected is None else abs(abs(mean) - expected) / abs(mean)
    ok = spread <= tol and (deviation is None or deviation <= expected_tol)
    return NormFormulaReport(list(k_grid), lhs, rhs, cs, spread, expected, deviation, tol, ok)
