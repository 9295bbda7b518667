"""Harish-Chandra c-functions, the Yang factorization and Plancherel densities."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import gammafn
from .rootsys import RootSystem
from .weights import MultiplicityFunction, rho


class NormalizationSingular(ValueError):
    """c~(rho(k), k) is zero or infinite."""


class NotOnTemperedForm(ValueError):
    pass


FINITE, ZERO, POLE = "finite", "zero", "pole"


@dataclass(frozen=True)
class CFunctionValue:
    value: complex
    flag: str = FINITE

    @classmethod
    def from_order(cls, value: complex, order: int) -> "CFunctionValue":
        if order > 0:
            return cls(complex(math.inf, 0), POLE)
        if order < 0:
            return cls(0j, ZERO)
        return cls(complex(value), FINITE)

    @property
    def finite(self) -> bool:
        return self.flag == FINITE

    def __complex__(self):
        return complex(self.value)


class SpectralPoint:
    """A point of the complexified dual with cached coroot pairings."""

    def __init__(self, R: RootSystem, coords: Sequence):
        self.R = R
        self.coords = tuple(coords)
        self.pairings = {a: R.pairing(self.coords, R.coroot(a)) for a in R.roots}

    def __call__(self, root) -> complex:
        return self.pairings[tuple(root)]

    def __neg__(self) -> "SpectralPoint":
        return SpectralPoint(self.R, tuple(-c for c in self.coords))

    def act(self, w) -> "SpectralPoint":
        return SpectralPoint(self.R, self.R.act(w, self.coords))

    def is_regular(self, tol: float = 1e-12) -> bool:
        return all(abs(complex(v)) > tol for v in self.pairings.values())

    def __repr__(self):
        return f"SpectralPoint({self.R.label}, {self.coords})"


def _as_point(R, lam) -> SpectralPoint:
    return lam if isinstance(lam, SpectralPoint) else SpectralPoint(R, lam)


def _product(R: RootSystem, lam: SpectralPoint, k: MultiplicityFunction, shift: int) -> CFunctionValue:
    """prod_{alpha>0} Gamma(lam(a^v) + shift) / Gamma(lam(a^v) + k_a + shift)."""
    logv = 0j
    order = 0
    for a in R.positive:
        z = complex(lam(a)) + shift
        val, o = gammafn.gamma_ratio(z, z + complex(k(a)))
        order += o
        if o == 0:
            logv += np.log(complex(val))
    return CFunctionValue.from_order(np.exp(logv), order)


def c_tilde(R: RootSystem, lam, k: MultiplicityFunction) -> CFunctionValue:
    """prod_{alpha>0} Gamma(lam(alpha^v)) / Gamma(lam(alpha^v) + k_alpha)."""
    return _product(R, _as_point(R, lam), k, 0)


def c_tilde_rho(R: RootSystem, k: MultiplicityFunction) -> complex:
    v = c_tilde(R, rho(R, k), k)
    if not v.finite or v.value == 0:
        raise NormalizationSingular(f"c~(rho(k), k) is {v.flag} for {k}")
    return v.value


def c_normalized(R: RootSystem, lam, k: MultiplicityFunction) -> CFunctionValue:
    """c(lam, k) = c~(lam, k) / c~(rho(k), k)."""
    norm = c_tilde_rho(R, k)
    v = c_tilde(R, lam, k)
    if not v.finite:
        return v
    return CFunctionValue(v.value / norm)


def c_yang(R: RootSystem, lam, k: MultiplicityFunction) -> CFunctionValue:
    """prod_{alpha>0} (lam(alpha^v) + k_alpha) / lam(alpha^v)."""
    lam = _as_point(R, lam)
    val = 1 + 0j
    order = 0
    for a in R.positive:
        z = complex(lam(a))
        num = z + complex(k(a))
        if abs(z) < gammafn.POLE_TOL:
            order += 1
            if abs(num) < gammafn.POLE_TOL:
                order -= 1
            else:
                val *= num
            continue
        if abs(num) < gammafn.POLE_TOL:
            order -= 1
            val /= z
            continue
        val *= num / z
    return CFunctionValue.from_order(val, order)


def c_upper(R: RootSystem, lam, k: MultiplicityFunction) -> CFunctionValue:
    """c~(rho,k)^{-1} prod Gamma(lam(a^v) + 1) / Gamma(lam(a^v) + k_a + 1)."""
    norm = c_tilde_rho(R, k)
    v = _product(R, _as_point(R, lam), k, 1)
    if not v.finite:
        return v
    return CFunctionValue(v.value / norm)


def plancherel_density_generic(R: RootSystem, lam, k: MultiplicityFunction) -> float:
    """|c(lam, k) c(-lam, k)|^{-1}, the density of the most continuous part."""
    lam = _as_point(R, lam)
    a = c_normalized(R, lam, k)
    b = c_normalized(R, -lam, k)
    if a.flag == POLE or b.flag == POLE:
        return 0.0
    if a.flag == ZERO or b.flag == ZERO:
        return math.inf
    return 1.0 / abs(a.value * b.value)


def f_L_density(R: RootSystem, L, lam, k: MultiplicityFunction, tol: float = 1e-12) -> float:
    """Plancherel density of the residual subspace ``L`` at lam in L^temp.

    Factors whose argument vanishes identically on L^temp are left out; which
    ones is decided from L's exact data, never from the numerical value.
    """
    lam = _as_point(R, lam)
    if not L.contains_tempered(lam.coords, tol):
        raise NotOnTemperedForm(f"{lam} is not on the tempered form of {L}")
    skip_num, skip_den = L.vanishing_gamma_arguments(k)
    norm = c_tilde_rho(R, k)
    logv = 2 * math.log(abs(norm))
    for i, a in enumerate(R.roots):
        z = complex(lam(a))
        if i not in skip_num:
            zn = z + complex(k(a))
            if gammafn.pole_index(zn) is not None:
                return math.inf
            logv += gammafn.log_gamma(zn).real
        if i not in skip_den:
            if gammafn.pole_index(z) is not None:
                return 0.0
            logv -= gammafn.log_gamma(z).real
    return math.exp(logv)
