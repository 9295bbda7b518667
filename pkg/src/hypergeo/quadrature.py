"""Quadrature over the negative Weyl chamber with graded endpoint clustering.

The chamber a_- is parametrised by t_i = -alpha_i(x) > 0 (simple roots), then
t = r * theta with theta on the standard simplex.  The weight |alpha(x)|^{2k}
blows up at the walls theta_i = 0 and at the apex r = 0; both are endpoint
singularities of algebraic type, which double-exponential (tanh-sinh) nodes
integrate at near-spectral rates.  The radial variable is truncated at T and
the discarded tail is bounded from the exponential envelope of the integrand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rootsys import RootSystem


class InsufficientDecay(RuntimeError):
    """Tail bound exceeds the tolerance at the largest allowed radius."""


def tanh_sinh(m: int, tmax: float = 6.1) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes x, complements 1 - x and weights for int_0^1, with 2m + 1 nodes."""
    h = tmax / m
    s = np.arange(-m, m + 1) * h
    u = 0.5 * math.pi * np.sinh(s)
    x = 1.0 / (1.0 + np.exp(-2 * u))
    xc = 1.0 / (1.0 + np.exp(2 * u))
    w = h * 0.5 * math.pi * np.cosh(s) / (2 * np.cosh(u) ** 2)
    keep = (x > 0) & (xc > 0) & (w > 0)
    return x[keep], xc[keep], w[keep]


def gauss_legendre(m: int, a: float = 0.0, b: float = 1.0):
    x, w = np.polynomial.legendre.leggauss(m)
    return a + (b - a) * (x + 1) / 2, (b - a) * w / 2


@dataclass(eq=False)
class ChamberQuadrature:
    """Product rule on a_- truncated at radius T (in the simple-root t-coordinates)."""

    R: RootSystem
    T: float
    radial_nodes: int = 120
    angular_nodes: int = 80
    wall_exponents: tuple = ()
    t: np.ndarray = field(init=False, repr=False)
    x: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.R.rank
        rx, _, rw = tanh_sinh(self.radial_nodes)
        r = self.T * rx
        rw = self.T * rw * r ** (n - 1)
        if n == 1:
            theta = np.ones((1, 1))
            tw = np.ones(1)
        elif n == 2:
            u, uc, w = tanh_sinh(self.angular_nodes)
            theta = np.stack([u, uc], axis=1)
            tw = w
        elif n == 3:
            u, uc, wu = tanh_sinh(self.angular_nodes)
            v, vc, wv = tanh_sinh(self.angular_nodes)
            U, V = np.meshgrid(u, v, indexing="ij")
            UC, VC = np.meshgrid(uc, vc, indexing="ij")
            WU, WV = np.meshgrid(wu, wv, indexing="ij")
            theta = np.stack([U, UC * V, UC * VC], axis=-1).reshape(-1, 3)
            tw = (WU * WV * UC).ravel()
        else:
            raise ValueError("chamber quadrature supports rank <= 3")
        self.t = (r[:, None, None] * theta[None, :, :]).reshape(-1, n)
        self.weights = (rw[:, None] * tw[None, :]).ravel()
        self._r = np.repeat(r, len(tw))
        # nodes whose coordinates underflow carry negligible weight
        keep = np.all(self.t > 1e-280, axis=1)
        self.t, self.weights, self._r = self.t[keep], self.weights[keep], self._r[keep]
        self._theta = theta
        self._theta_w = tw
        # dx = dt / |det E|, and x = -E^{-T} t
        e = self.R.embedding
        self.weights = self.weights / abs(np.linalg.det(e))
        self.x = -np.linalg.solve(e.T, self.t.T).T

    @property
    def alpha(self) -> np.ndarray:
        """alpha(x) at the nodes for positive roots, computed exactly from t."""
        return -self.t @ np.array(self.R.positive, dtype=float).T

    @property
    def size(self) -> int:
        return len(self.weights)

    def integrate(self, values, log_factor=None) -> float:
        """|W| times the chamber sum: the integral of a W-invariant function.

        The integrand is ``values * exp(log_factor)``; passing the singular
        weight as a logarithm keeps apex nodes from overflowing.
        """
        v = np.asarray(values) if values is not None else 1.0
        if log_factor is None:
            w = self.weights
        else:
            with np.errstate(divide="ignore"):
                w = np.exp(np.log(self.weights) + log_factor)
        terms = w * v
        if np.any(~np.isfinite(terms)):
            raise FloatingPointError("non-finite integrand on a quadrature node")
        return len(self.R.weyl) * _pairwise_sum(terms)

    def tail_bound(self, func, rate: float, coords: str = "x") -> float:
        """Bound on |W| int_{r > T} for an integrand with envelope e^{-rate r}.

        The angular slice at r = T is integrated with the same angular rule and
        continued by r^{n-1} e^{-rate (r - T)}.  ``func`` receives points x, or
        the chamber coordinates t when ``coords == "t"``.
        """
        n = self.R.rank
        t = self.T * self._theta
        pts = t if coords == "t" else -np.linalg.solve(self.R.embedding.T, t.T).T
        slice_abs = np.sum(self._theta_w * np.abs(func(pts)))
        if rate <= 0:
            return math.inf
        # int_T^inf r^{n-1} e^{-rate (r-T)} dr, evaluated in closed form
        s = sum(math.factorial(n - 1) / math.factorial(j) * self.T ** j / rate ** (n - j)
                for j in range(n))
        return len(self.R.weyl) * slice_abs * s / abs(np.linalg.det(self.R.embedding))


def _pairwise_sum(a: np.ndarray) -> float:
    """Deterministic pairwise reduction."""
    a = np.asarray(a, dtype=complex if np.iscomplexobj(a) else float).ravel()
    while a.size > 1:
        if a.size % 2:
            a = np.concatenate([a, np.zeros(1, dtype=a.dtype)])
        a = a[0::2] + a[1::2]
    return a[0] if a.size else 0.0


def radius_for(rate: float, n: int, eps: float, t_max: float = 200.0) -> float:
    """Smallest T with T^{n-1} e^{-rate T} below eps (coarse fixed point)."""
    if rate <= 0:
        raise InsufficientDecay("integrand does not decay along the chamber")
    T = max(1.0, math.log(1 / eps) / rate)
    for _ in range(50):
        T_new = (math.log(1 / eps) + (n - 1) * math.log(max(T, 1.0))) / rate
        if abs(T_new - T) < 1e-6:
            break
        T = T_new
    if T > t_max:
        raise InsufficientDecay(f"needs truncation radius {T:.1f} > {t_max}")
    return T
