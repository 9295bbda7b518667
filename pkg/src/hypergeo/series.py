"""The asymptotically free series Phi, the hypergeometric function F, and
termwise operator algebra on exponential series.

Series live on the negative chamber, where

    Phi(lam, k; x) = e^{(lam + rho)(x)} sum_{kappa in Q_+} Delta_kappa e^{kappa(x)},

and the coefficients follow from L(k) Phi = (lam + rho, lam - rho) Phi using
(1 + e^a)(1 - e^a)^{-1} = 1 + 2 sum_{j>=1} e^{j a} there.  Inner products are
taken in gram units throughout; this rescales L(k) and its eigenvalue by the
same constant, so coefficients are unaffected.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import os
from pathlib import Path
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import cfunc
from .rootsys import RootSystem
from .weights import MultiplicityFunction, rho


class PoleHyperplane(ValueError):
    """lam sits on a hyperplane lam(kappa^v) + 1 = 0 met by the recurrence."""

    def __init__(self, kappa):
        self.kappa = tuple(kappa)
        super().__init__(f"spectral parameter on pole hyperplane lam(kappa^v)+1=0 at kappa={self.kappa}")


class SeriesNotConverged(RuntimeError):
    """Raised with the last shell contributions; increase the cutoff."""

    def __init__(self, msg, shells):
        self.shells = shells
        super().__init__(msg)


class OutsideChamber(ValueError):
    pass


def q_plus(rank: int, N: int, start: int = 0) -> list[tuple[int, ...]]:
    """Elements of Q_+ with start <= height <= N, ordered by height."""
    out = []
    for h in range(start, N + 1):
        shell = [c for c in itertools.product(range(h + 1), repeat=rank) if sum(c) == h]
        out.extend(sorted(shell, reverse=True))
    return out


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction))


@dataclass(eq=False)
class ExponentSeries:
    """e^{base} sum_kappa coeffs[kappa] e^{kappa}, kappa in Q_+ of height <= N."""

    R: RootSystem
    base: tuple
    coeffs: dict
    N: int
    lam: tuple | None = None
    k: MultiplicityFunction | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __getitem__(self, kappa) -> object:
        return self.coeffs.get(tuple(kappa), 0)

    @property
    def exact(self) -> bool:
        return all(_is_exact(v) for v in self.coeffs.values()) and all(_is_exact(b) for b in self.base)

    def scaled(self, c) -> "ExponentSeries":
        return ExponentSeries(self.R, self.base, {kk: c * v for kk, v in self.coeffs.items()}, self.N)

    def _combine(self, other: "ExponentSeries", sign: int) -> "ExponentSeries":
        if tuple(self.base) != tuple(other.base):
            raise ValueError("series with different base exponents")
        keys = set(self.coeffs) | set(other.coeffs)
        N = min(self.N, other.N)
        out = {kk: self[kk] + sign * other[kk] for kk in keys if sum(kk) <= N}
        return ExponentSeries(self.R, self.base, out, N)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def max_abs(self) -> object:
        return max((abs(v) for v in self.coeffs.values()), default=0)

    def shell(self, h: int) -> dict:
        return {kk: v for kk, v in self.coeffs.items() if sum(kk) == h}


class _Geometry:
    """Gram-unit data for the recurrence, exact or float."""

    def __init__(self, R: RootSystem, k: MultiplicityFunction, exact: bool):
        conv = (lambda v: v) if exact else complex
        n = R.rank
        self.B = [[conv(R.gram[i][j]) for j in range(n)] for i in range(n)]
        self.pos = R.positive
        self.Ba = [tuple(sum(self.B[i][j] * a[j] for j in range(n)) for i in range(n)) for a in self.pos]
        self.aa = [sum(a[i] * ba[i] for i in range(n)) for a, ba in zip(self.pos, self.Ba)]
        self.ka = [conv(k(a)) for a in self.pos]

    def inner(self, u, v):
        n = len(u)
        return sum(u[i] * self.B[i][j] * v[j] for i in range(n) for j in range(n))

    def with_root(self, p, u):
        ba = self.Ba[p]
        return sum(u[i] * ba[i] for i in range(len(u)))


CACHE_ENV = "HYPERGEO_CACHE_DIR"


def _cache_path(R: RootSystem, lam, k: MultiplicityFunction, N: int) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    key = json.dumps([R.label, [str(v) for v in k.values], [str(v) for v in lam], N])
    return Path(root) / (hashlib.sha256(key.encode()).hexdigest() + ".json")


def _encode(v):
    return str(v) if isinstance(v, (int, Fraction)) else [complex(v).real, complex(v).imag]


def _decode(v):
    return Fraction(v) if isinstance(v, str) else complex(v[0], v[1])


def series_coefficients(R: RootSystem, lam: Sequence, k: MultiplicityFunction, N: int,
                        extend: ExponentSeries | None = None) -> ExponentSeries:
    """Coefficients Delta_kappa of Phi(lam, k) through height N.

    Exact when lam and k are rational.  Passing ``extend`` continues an
    existing series from its cutoff instead of starting over.  With
    HYPERGEO_CACHE_DIR set, finished tables are memoised on disk, keyed by a
    hash of (system, k, lam, N).
    """
    path = _cache_path(R, lam, k, N) if extend is None else None
    if path is not None and path.exists():
        data = json.loads(path.read_text())
        coeffs = {tuple(kk): _decode(v) for kk, v in data["coeffs"]}
        out = _series_coefficients(R, lam, k, 0)
        return ExponentSeries(R, out.base, coeffs, N, out.lam, k)
    s = _series_coefficients(R, lam, k, N, extend)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {"coeffs": [[list(kk), _encode(v)] for kk, v in sorted(s.coeffs.items())]}
        path.write_text(json.dumps(payload))
    return s


def _series_coefficients(R: RootSystem, lam: Sequence, k: MultiplicityFunction, N: int,
                         extend: ExponentSeries | None = None) -> ExponentSeries:
    lam = tuple(lam)
    exact = all(_is_exact(v) for v in lam) and k.is_exact
    if not exact:
        lam = tuple(complex(v) for v in lam)
    g = _Geometry(R, k, exact)
    r = rho(R, k)
    if not exact:
        r = tuple(complex(v) for v in r)
    base = tuple(a + b for a, b in zip(lam, r))
    nu_a = [g.with_root(p, base) for p in range(len(g.pos))]
    if extend is not None:
        coeffs = dict(extend.coeffs)
        start = extend.N + 1
    else:
        coeffs = {tuple([0] * R.rank): Fraction(1) if exact else 1 + 0j}
        start = 1
    for kappa in q_plus(R.rank, N, start):
        denom = g.inner(kappa, kappa) + 2 * g.inner(lam, kappa)
        if (denom == 0) if exact else abs(denom) < 1e-12 * (1 + abs(g.inner(kappa, kappa))):
            raise PoleHyperplane(kappa)
        s = 0
        for p, a in enumerate(g.pos):
            ka = g.ka[p]
            if ka == 0:
                continue
            mu = list(kappa)
            for _ in range(1, sum(kappa) // sum(a) + 1):
                mu = [m - c for m, c in zip(mu, a)]
                if min(mu) < 0:
                    break
                d = coeffs.get(tuple(mu))
                if d:
                    s += ka * (nu_a[p] + g.with_root(p, mu)) * d
        coeffs[kappa] = 2 * s / denom
    return ExponentSeries(R, base, coeffs, N, lam, k)


def eigenvalue(R: RootSystem, lam: Sequence, k: MultiplicityFunction):
    """(lam + rho, lam - rho) in gram units."""
    r = rho(R, k)
    return R.inner(tuple(a + b for a, b in zip(lam, r)), tuple(a - b for a, b in zip(lam, r)))


def apply_L_series(R: RootSystem, k: MultiplicityFunction, series: ExponentSeries) -> ExponentSeries:
    """Termwise image of L(k) on an exponential series, truncated at its cutoff."""
    exact = series.exact and k.is_exact
    g = _Geometry(R, k, exact)
    base = series.base
    out = {}
    for kappa in q_plus(R.rank, series.N):
        nu = tuple(b + c for b, c in zip(base, kappa))
        c0 = series[kappa]
        v = g.inner(nu, nu) * c0
        for p, a in enumerate(g.pos):
            ka = g.ka[p]
            if ka == 0:
                continue
            v -= ka * g.with_root(p, nu) * c0
            mu = list(kappa)
            while True:
                mu = [m - c for m, c in zip(mu, a)]
                if min(mu) < 0:
                    break
                cm = series[mu]
                if cm:
                    nu_m = tuple(b + c for b, c in zip(base, mu))
                    v -= 2 * ka * g.with_root(p, nu_m) * cm
        if v != 0:
            out[kappa] = v
    return ExponentSeries(R, base, out, series.N)


@dataclass(frozen=True)
class EigenReport:
    ok: bool
    max_residual: object
    eigenvalue: object
    N: int


def verify_simultaneous_eigen(R: RootSystem, lam: Sequence, k: MultiplicityFunction, N: int,
                              tol: float = 0.0) -> EigenReport:
    """Check L(k) Phi = (lam+rho, lam-rho) Phi coefficientwise through height N."""
    s = series_coefficients(R, lam, k, N)
    ev = eigenvalue(R, s.lam if s.lam is not None else lam, k)
    res = apply_L_series(R, k, s) - s.scaled(ev)
    m = res.max_abs()
    return EigenReport(m <= tol, m, ev, N)


# -- numerical evaluation ----------------------------------------------------------

def _simple_values(R: RootSystem, x) -> np.ndarray:
    """alpha_i(x) for simple roots; x has shape (..., n) in orthonormal coordinates."""
    return np.asarray(x, dtype=float) @ R.embedding


def _check_chamber(R: RootSystem, a: np.ndarray, margin: float = 0.0) -> None:
    pos = a @ np.array(R.positive, dtype=float).T
    if np.any(pos >= -margin):
        raise OutsideChamber("x must lie in the open negative chamber")


def eval_phi(series: ExponentSeries, x, tol: float = 1e-13, check: bool = True,
             simple: np.ndarray | None = None):
    """(value, error estimate) of Phi at points x of the negative chamber.

    Converged when each of the last three height shells contributes less than
    ``tol`` times the partial sum.  ``simple`` may carry the values
    alpha_i(x) directly (exact chamber coordinates), in which case x is ignored.
    """
    R = series.R
    if simple is not None:
        a = np.atleast_2d(np.asarray(simple, dtype=float))
        single = np.asarray(simple).ndim == 1
    else:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        a = _simple_values(R, np.atleast_2d(x))
    _check_chamber(R, a)
    keys = sorted(series.coeffs, key=lambda kk: (sum(kk), kk))
    K = np.array(keys, dtype=float)
    c = np.array([complex(series.coeffs[kk]) for kk in keys])
    h = np.array([sum(kk) for kk in keys])
    terms = c[None, :] * np.exp(a @ K.T)
    shells = np.zeros((a.shape[0], series.N + 1), dtype=complex)
    for j in range(series.N + 1):
        m = h == j
        if np.any(m):
            shells[:, j] = terms[:, m].sum(axis=1)
    partial = shells.sum(axis=1)
    last = np.abs(shells[:, -3:]) if series.N >= 3 else np.abs(shells)
    scale = np.maximum(np.abs(partial), 1e-300)
    converged = np.all(last < tol * scale[:, None], axis=1) | np.all(last == 0, axis=1)
    if check and not np.all(converged):
        raise SeriesNotConverged(f"no convergence at cutoff {series.N}; increase cutoff", last)
    nu = np.array([complex(v) for v in series.base])
    value = np.exp(a @ nu) * partial
    err = np.abs(np.exp(a @ nu)) * last.sum(axis=1)
    if single:
        return complex(value[0]), float(err[0])
    return value, err


_N_START = {1: 48, 2: 24, 3: 12}
_N_MAX = {1: 1024, 2: 128, 3: 48}


def phi_adaptive(R: RootSystem, lam, k: MultiplicityFunction, x, tol: float = 1e-13,
                 n_max: int | None = None, simple=None):
    """Phi(lam, k; x), doubling the cutoff until the shell rule is met."""
    N = _N_START.get(R.rank, 12)
    n_max = n_max or _N_MAX.get(R.rank, 48)
    s = series_coefficients(R, lam, k, N)
    while True:
        try:
            return eval_phi(s, x, tol, simple=simple)
        except SeriesNotConverged:
            if N >= n_max:
                raise
            N = min(2 * N, n_max)
            s = series_coefficients(R, lam, k, N, extend=s)


def eval_F(R: RootSystem, lam: Sequence, k: MultiplicityFunction, x, tol: float = 1e-13,
           n_max: int | None = None, simple=None):
    """F(lam, k; x) = sum_w c(-w lam, k) Phi(w lam, k; x) on the negative chamber.

    ``simple`` optionally gives alpha_i(x) in place of x (see eval_phi).
    """
    if k.is_zero:
        raise cfunc.NormalizationSingular("k = 0: c(rho(k), k) normalisation degenerates")
    lam = tuple(complex(v) for v in lam)
    orbit = [R.act(w, lam) for w in R.weyl]
    rounded = {tuple(np.round(np.array(mu), 10)) for mu in orbit}
    if len(rounded) != len(orbit):
        raise ValueError("lam must be regular (|W lam| = |W|)")
    x = np.asarray(x if simple is None else simple, dtype=float)
    total = 0j if x.ndim == 1 else np.zeros(x.shape[0], dtype=complex)
    for w, mu in zip(R.weyl, orbit):
        cv = cfunc.c_normalized(R, tuple(-v for v in mu), k)
        if cv.flag == cfunc.ZERO:
            continue
        if cv.flag == cfunc.POLE:
            raise cfunc.NormalizationSingular(f"c(-w lam) has a pole for w = {w}")
        val, _ = phi_adaptive(R, mu, k, x, tol, n_max, simple)
        total = total + cv.value * val
    return total


# -- rank one -------------------------------------------------------------------------

X_SWITCH = 0.25


def _hyp_series(Lam: complex, k: float, z: np.ndarray, max_terms: int = 4000) -> np.ndarray:
    """2F1((k+Lam)/2, (k-Lam)/2; k+1/2; z), even in Lam term by term."""
    q = Lam * Lam / 4
    c = k + 0.5
    term = np.ones_like(z, dtype=complex)
    total = term.copy()
    for n in range(max_terms):
        ab = (k / 2 + n) ** 2 - q
        term = term * ab / ((c + n) * (n + 1)) * z
        total += term
        if n > 4 and np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _pfaff_series(Lam: complex, k: float, x: np.ndarray, max_terms: int = 20000) -> np.ndarray:
    """cosh(x)^{-2a} 2F1(a, c - b; c; tanh^2 x), a = (k+Lam)/2, b = (k-Lam)/2, c = k+1/2."""
    a, b, c = (k + Lam) / 2, (k - Lam) / 2, k + 0.5
    t = np.tanh(x) ** 2
    term = np.ones_like(t, dtype=complex)
    total = term.copy()
    for n in range(max_terms):
        term = term * (a + n) * (c - b + n) / ((c + n) * (n + 1)) * t
        total += term
        if n > 4 and np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return np.cosh(x) ** (-2 * a) * total


PFAFF_LAM = 1.0


def eval_F_rank1(Lam: complex, k: float, x, tol: float = 1e-14):
    """F for A1 at Lam = lam(alpha^v) and orthonormal coordinate x, any sign.

    Near the origin the hypergeometric series in -sinh^2 x is used.  Further
    out, small |Lam| goes through the Pfaff transform in tanh^2 x (the chamber
    expansion cancels badly as Lam -> 0); otherwise the chamber expansion
    sum_w c(-w lam) Phi(w lam) is used.
    """
    from .rootsys import build_root_system

    R = build_root_system("A", 1)
    kk = MultiplicityFunction.equal(R, float(k))
    x = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    out = np.empty(x.shape, dtype=complex)
    near = x <= X_SWITCH
    if np.any(near):
        out[near] = _hyp_series(complex(Lam), float(k), -np.sinh(x[near]) ** 2)
    far = ~near
    if np.any(far):
        if k == 0:
            out[far] = np.cosh(complex(Lam) * x[far])
        elif abs(Lam) < PFAFF_LAM:
            out[far] = _pfaff_series(complex(Lam), float(k), x[far])
        else:
            out[far] = eval_F(R, (complex(Lam) / 2,), kk, -x[far, None], tol)
    return out
