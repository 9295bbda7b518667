"""Gamma function kernel with explicit pole bookkeeping.

Everything Gamma-related in the package goes through :func:`log_gamma`, which
returns ``log Gamma(z)`` on the principal branch (via the reflection formula
for Re z < 1/2, as implemented by :func:`scipy.special.loggamma`) together
with the order of the pole when ``z`` sits on a nonpositive integer.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special

POLE_TOL = 1e-9


class SingularParameter(ValueError):
    """Parameter on the singular set of a Gamma/sine factor."""


def pole_index(z, tol: float = POLE_TOL) -> int | None:
    """If ``z`` is within ``tol`` of -m (m = 0, 1, ...) return m, else None."""
    z = complex(z)
    if abs(z.imag) > tol or z.real > tol:
        return None
    m = round(-z.real)
    if abs(z.real + m) <= tol:
        return m
    return None


def log_gamma(z) -> complex:
    """Principal log Gamma(z) for z off the poles."""
    if pole_index(z) is not None:
        raise SingularParameter(f"Gamma pole at {z}")
    return complex(special.loggamma(complex(z)))


def gamma(z) -> complex:
    return np.exp(log_gamma(z))


def gamma_ratio(num, den) -> tuple[complex, int]:
    """Gamma(num) / Gamma(den) as (finite value, net pole order).

    net order > 0: pole of that order; < 0: zero; 0: ``value`` is the finite
    ratio.  When both arguments sit on poles, the value is the limit of
    Gamma(num + e) / Gamma(den + e) as e -> 0.
    """
    pn, pd = pole_index(num), pole_index(den)
    if pn is None and pd is None:
        return np.exp(log_gamma(num) - log_gamma(den)), 0
    if pn is not None and pd is not None:
        # Gamma(-m + e) ~ (-1)^m / (m! e)
        return (-1) ** (pn - pd) * math.factorial(pd) / math.factorial(pn) + 0j, 0
    if pn is not None:
        return complex(math.inf, 0), 1
    return 0j, -1


def real_gamma_signed(x: float) -> tuple[int, float]:
    """(sign, log|Gamma(x)|) for real x; raises on a pole."""
    if pole_index(x) is not None:
        raise SingularParameter(f"Gamma pole at {x}")
    return int(special.gammasgn(x)), float(special.gammaln(x))


def binom(a: float, b: float) -> float:
    """Gamma(a+1) / (Gamma(b+1) Gamma(a-b+1)) with sign tracking."""
    s1, l1 = real_gamma_signed(a + 1)
    s2, l2 = real_gamma_signed(b + 1)
    s3, l3 = real_gamma_signed(a - b + 1)
    return s1 * s2 * s3 * math.exp(l1 - l2 - l3)
