"""Multiplicity functions, rho(k), the weight delta(k; x) and closed-form volumes."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import gammafn
from ._exact import frac
from .rootsys import RootSystem


class WallSingularity(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MultiplicityFunction:
    """A W-invariant function on the roots: one value per W-orbit.

    ``values`` follows ``R.orbit_data`` order (long roots first).  Values may
    be Fractions (exact mode), floats or complex numbers.
    """

    R: RootSystem
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.R.orbit_data.orbits):
            raise ValueError("need one value per W-orbit of roots")

    @classmethod
    def equal(cls, R: RootSystem, k) -> "MultiplicityFunction":
        return cls(R, (k,) * len(R.orbit_data.orbits))

    @classmethod
    def from_long_short(cls, R: RootSystem, long, short) -> "MultiplicityFunction":
        if R.orbit_data.simply_laced:
            if long != short:
                raise ValueError("simply laced system takes a single multiplicity")
            return cls(R, (long,))
        return cls(R, (long, short))

    @classmethod
    def parse(cls, R: RootSystem, spec: str | Sequence) -> "MultiplicityFunction":
        """From ``"-1/4"`` or ``"-1/4,-1/8"`` (long, short), kept exact."""
        if isinstance(spec, str):
            parts = [frac(p) for p in spec.split(",")]
        else:
            parts = [frac(p) if isinstance(p, str) else p for p in spec]
        if len(parts) == 1:
            return cls.equal(R, parts[0])
        return cls(R, tuple(parts))

    def __call__(self, root) -> object:
        return self.values[self.R.orbit_of(root)]

    def of_index(self, i: int):
        return self.values[self._orbit_by_index[i]]

    @property
    def _orbit_by_index(self) -> dict:
        cache = self.__dict__.get("_obi")
        if cache is None:
            cache = {i: o for o, idx in enumerate(self.R.orbit_data.orbits) for i in idx}
            object.__setattr__(self, "_obi", cache)
        return cache

    def scaled(self, t) -> "MultiplicityFunction":
        return MultiplicityFunction(self.R, tuple(t * v for v in self.values))

    def as_float(self) -> "MultiplicityFunction":
        return MultiplicityFunction(self.R, tuple(
            complex(v) if isinstance(v, complex) else float(v) for v in self.values))

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    @property
    def all_negative(self) -> bool:
        return all(complex(v).real < 0 for v in self.values)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.values)

    def __repr__(self):
        vals = ", ".join(str(v) for v in self.values)
        return f"MultiplicityFunction({self.R.label}; {vals})"


@dataclass(frozen=True)
class RegimeReport:
    all_negative: bool
    short_root_ok: bool
    coxeter_ok: bool
    margin: object  # rho(k)(beta^vee) + k_beta + 1
    coxeter_margin: object  # sum_i k_i h_i + 1

    @property
    def integrable(self) -> bool:
        return self.short_root_ok


def rho(R: RootSystem, k: MultiplicityFunction) -> tuple:
    """rho(k) = 1/2 sum_{alpha > 0} k_alpha alpha, in simple-root coordinates."""
    half = Fraction(1, 2) if k.is_exact else 0.5
    out = [0] * R.rank
    for a in R.positive:
        ka = k(a)
        for j, c in enumerate(a):
            if c:
                out[j] += ka * c
    return tuple(half * v for v in out)


def _alpha_x(R: RootSystem, x) -> np.ndarray:
    """alpha(x) for positive roots; x has shape (..., n)."""
    return np.asarray(x, dtype=float) @ R.positive_float.T


def log_abs_2sinh_half(t) -> np.ndarray:
    """log|2 sinh(t/2)|, overflow-free; -inf at t = 0."""
    a = np.abs(t)
    with np.errstate(divide="ignore"):
        return a / 2 + np.log(-np.expm1(-a))


def delta_density(R: RootSystem, k: MultiplicityFunction, x) -> np.ndarray:
    """prod_{alpha>0} |2 sinh(alpha(x)/2)|^{2 k_alpha}, extended-real on walls."""
    return delta_from_alpha(R, k, _alpha_x(R, x))


def delta_from_alpha(R: RootSystem, k: MultiplicityFunction, ax) -> np.ndarray:
    """delta(k; x) given the values alpha(x) for positive roots (last axis)."""
    return np.exp(log_delta_from_alpha(R, k, ax))


def log_delta_from_alpha(R: RootSystem, k: MultiplicityFunction, ax) -> np.ndarray:
    kk = np.array([float(k(a)) for a in R.positive])
    logs = log_abs_2sinh_half(ax)
    # on a wall: log = -inf; k<0 -> +inf, k>0 -> -inf (factor 0), k=0 skipped
    terms = np.where(kk == 0, 0.0, 2 * kk * logs)
    return np.sum(terms, axis=-1)


def check_integrability(R: RootSystem, k: MultiplicityFunction) -> RegimeReport:
    beta = R.highest_short_root
    margin = R.pairing(rho(R, k), R.coroot(beta)) + k(beta) + 1
    od = R.orbit_data
    coxeter_margin = sum((k.values[i] * od.h[i] for i in range(len(od.orbits))), 0) + 1
    neg = k.all_negative
    return RegimeReport(
        all_negative=neg,
        short_root_ok=bool(neg and margin > 0),
        coxeter_ok=bool(neg and coxeter_margin > 0),
        margin=margin,
        coxeter_margin=coxeter_margin,
    )


def macdonald_volume(R: RootSystem, k) -> float:
    """Closed form for the integral of delta(k; x) over the whole space (equal k)."""
    if isinstance(k, MultiplicityFunction):
        vals = set(k.values)
        if len(vals) != 1:
            raise ValueError("closed-form volume needs equal multiplicities")
        kmf = k
        k = vals.pop()
    else:
        kmf = MultiplicityFunction.equal(R, k)
    if not check_integrability(R, kmf).short_root_ok:
        raise gammafn.SingularParameter("multiplicity outside the integrable regime")
    k = float(k)
    out = 1.0
    for d, m in zip(R.degrees, R.exponents):
        s = math.sin(-m * math.pi * k)
        if abs(s) < 1e-14:
            raise gammafn.SingularParameter("parameter on singular set: sin factor vanishes")
        out *= gammafn.binom(d * k, k) * math.pi / s
    return out


def schrodinger_potential(R: RootSystem, k: MultiplicityFunction, x) -> np.ndarray:
    """-1/4 sum (alpha,alpha) k(k-1) / sinh^2(alpha(x)/2)."""
    ax = _alpha_x(R, x)
    if np.any(ax == 0):
        raise WallSingularity("x lies on a wall")
    kk = np.array([float(k(a)) for a in R.positive])
    ll = np.sum(R.positive_float ** 2, axis=1)
    return -0.25 * np.sum(ll * kk * (kk - 1) / np.sinh(ax / 2) ** 2, axis=-1)
