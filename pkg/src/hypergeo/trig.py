"""Trigonometric polynomials on the weight lattice and Cherednik operators.

A polynomial is a finite map from weights to coefficients; weights are keyed
by their fundamental-weight coordinates m_i = mu(alpha_i^v), which are
integers exactly when mu lies in P.  Coroot-side vectors xi are given in
simple-coroot coordinates, so mu(xi) = sum m_i xi_i.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Sequence

from . import _exact as ex
from .rootsys import RootSystem
from .weights import MultiplicityFunction, rho


class NotOnLattice(ValueError):
    pass


class TrigPolynomial:
    __slots__ = ("R", "terms")

    def __init__(self, R: RootSystem, terms: dict | None = None):
        self.R = R
        self.terms = {}
        for mu, c in (terms or {}).items():
            mu = tuple(mu)
            if any(not float(m).is_integer() for m in mu):
                raise NotOnLattice(f"weight {mu} is not in P")
            mu = tuple(int(m) for m in mu)
            if c != 0:
                self.terms[mu] = self.terms.get(mu, 0) + c
        self.terms = {m: c for m, c in self.terms.items() if c != 0}

    @classmethod
    def monomial(cls, R: RootSystem, mu: Sequence[int], c=1) -> "TrigPolynomial":
        return cls(R, {tuple(mu): Fraction(c)})

    @classmethod
    def one(cls, R: RootSystem) -> "TrigPolynomial":
        return cls.monomial(R, (0,) * R.rank)

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return TrigPolynomial(self.R, out)

    def __sub__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        return self + other.scale(-1)

    def scale(self, c) -> "TrigPolynomial":
        return TrigPolynomial(self.R, {m: c * v for m, v in self.terms.items()})

    def shift(self, nu: Sequence[int]) -> "TrigPolynomial":
        """Multiply by e^nu."""
        return TrigPolynomial(self.R, {tuple(a + b for a, b in zip(m, nu)): v for m, v in self.terms.items()})

    def __mul__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return TrigPolynomial(self.R, out)

    def __eq__(self, other) -> bool:
        return isinstance(other, TrigPolynomial) and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def act(self, w) -> "TrigPolynomial":
        """w acting on exponents; w is an integer matrix in simple-root coordinates."""
        return TrigPolynomial(self.R, {_act_fw(self.R, w, m): c for m, c in self.terms.items()})

    def is_invariant(self) -> bool:
        return all(self.act(w) == self for w in self.R.weyl)

    def __repr__(self):
        body = " + ".join(f"{c}*e^{m}" for m, c in sorted(self.terms.items()))
        return f"TrigPolynomial({body or 0})"


def _fw_to_root(R: RootSystem, m: Sequence) -> tuple:
    fw = R.fundamental_weights
    return tuple(sum(m[i] * fw[i][j] for i in range(R.rank)) for j in range(R.rank))


def _root_to_fw(R: RootSystem, a: Sequence) -> tuple:
    return tuple(sum(R.cartan[i][j] * a[j] for j in range(R.rank)) for i in range(R.rank))


def _act_fw(R: RootSystem, w, m) -> tuple:
    mu = R.act(w, _fw_to_root(R, m))
    return tuple(int(v) for v in _root_to_fw(R, mu))


def _pair(m: Sequence, xi: Sequence):
    return sum(a * b for a, b in zip(m, xi))


def divided_reflection(R: RootSystem, alpha: Sequence[int], f: TrigPolynomial) -> TrigPolynomial:
    """(1 - r_alpha) f / (1 - e^{-alpha}), by the finite geometric sum."""
    a = _root_to_fw(R, alpha)
    cv = R.coroot(alpha)
    out: dict = {}
    for m, c in f.terms.items():
        n = _pair(m, cv)
        if n > 0:
            steps = range(0, -n, -1)  # e^{mu - j alpha}, j = 0..n-1
            sign = 1
        elif n < 0:
            steps = range(1, -n + 1)  # -e^{mu + j alpha}, j = 1..|n|
            sign = -1
        else:
            continue
        for j in steps:
            mu = tuple(x + j * y for x, y in zip(m, a))
            out[mu] = out.get(mu, 0) + sign * c
    return TrigPolynomial(R, out)


def apply_cherednik(xi: Sequence, R: RootSystem, k: MultiplicityFunction, f: TrigPolynomial) -> TrigPolynomial:
    """D_xi(k) f with xi in simple-coroot coordinates, exact."""
    r = rho(R, k)
    rho_xi = sum(xi[i] * R.pairing(r, R.simple_roots[i]) for i in range(R.rank) if xi[i])
    out = TrigPolynomial(R, {m: (_pair(m, xi) - rho_xi) * c for m, c in f.terms.items()})
    for alpha in R.positive:
        a_xi = _pair(_root_to_fw(R, alpha), xi)
        if a_xi == 0 or k(alpha) == 0:
            continue
        out = out + divided_reflection(R, alpha, f).scale(k(alpha) * a_xi)
    return out


def coroot_metric_inverse(R: RootSystem) -> list[list[Fraction]]:
    """M with sum_i X_i (x) X_i = sum_ab M_ab alpha_a^v (x) alpha_b^v, gram units."""
    g = R.gram
    n = R.rank
    cg = [[4 * g[i][j] / (g[i][i] * g[j][j]) for j in range(n)] for i in range(n)]
    return ex.inverse(cg)


def casimir_cherednik(R: RootSystem, k: MultiplicityFunction, f: TrigPolynomial) -> TrigPolynomial:
    """sum_i D_{X_i}(k)^2 f."""
    M = coroot_metric_inverse(R)
    n = R.rank
    units = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    first = [apply_cherednik(u, R, k, f) for u in units]
    out = TrigPolynomial(R)
    for a in range(n):
        for b in range(n):
            if M[a][b]:
                out = out + apply_cherednik(units[a], R, k, first[b]).scale(M[a][b])
    return out


def apply_L_trig(R: RootSystem, k: MultiplicityFunction, f: TrigPolynomial) -> TrigPolynomial:
    """L(k) f for W-invariant f, exact.

    The first-order term -k (1+e^a)(1-e^a)^{-1} d_a f equals
    k (1 + e^{-a}) d_a f / (1 - e^{-a}), and d_a f is r_a-anti-invariant, so
    the quotient is half the divided reflection of d_a f.
    """
    if not f.is_invariant():
        raise ValueError("L(k) is applied on W-invariant polynomials only")
    out = TrigPolynomial(R, {m: R.norm2(_fw_to_root(R, m)) * c for m, c in f.terms.items()})
    for alpha in R.positive:
        ka = k(alpha)
        if ka == 0:
            continue
        half_aa = R.norm2(alpha) / 2
        # d_alpha e^mu = (alpha, mu) e^mu = mu(alpha^v) (alpha, alpha)/2 e^mu
        cv = R.coroot(alpha)
        g = TrigPolynomial(R, {m: _pair(m, cv) * half_aa * c for m, c in f.terms.items()})
        q = divided_reflection(R, alpha, g).scale(Fraction(1, 2))
        neg = tuple(-v for v in _root_to_fw(R, alpha))
        out = out + (q + q.shift(neg)).scale(ka)
    return out


def symmetrize(f: TrigPolynomial) -> TrigPolynomial:
    out = TrigPolynomial(f.R)
    for w in f.R.weyl:
        out = out + f.act(w)
    return out


def random_trig_polynomial(R: RootSystem, rng: random.Random, terms: int = 4, radius: int = 3,
                           invariant: bool = False) -> TrigPolynomial:
    d = {}
    for _ in range(terms):
        mu = tuple(rng.randint(-radius, radius) for _ in range(R.rank))
        d[mu] = d.get(mu, 0) + Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    f = TrigPolynomial(R, d)
    return symmetrize(f) if invariant else f


def commutator(R: RootSystem, k: MultiplicityFunction, xi: Sequence, eta: Sequence,
               f: TrigPolynomial) -> TrigPolynomial:
    a = apply_cherednik(xi, R, k, apply_cherednik(eta, R, k, f))
    b = apply_cherednik(eta, R, k, apply_cherednik(xi, R, k, f))
    return a - b


def casimir_identity_residual(R: RootSystem, k: MultiplicityFunction, f: TrigPolynomial) -> TrigPolynomial:
    """sum D_{X_i}^2 f - (L(k) + (rho, rho)) f; zero for W-invariant f."""
    r = rho(R, k)
    return casimir_cherednik(R, k, f) - apply_L_trig(R, k, f) - f.scale(R.norm2(r))


def iter_random_cases(R: RootSystem, count: int, seed: int = 0) -> Iterable[tuple]:
    rng = random.Random(seed)
    for _ in range(count):
        xi = tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(R.rank))
        eta = tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(R.rank))
        yield xi, eta, random_trig_polynomial(R, rng)
