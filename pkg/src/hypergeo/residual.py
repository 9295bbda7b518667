"""Residual subspaces, tempered forms, Plancherel measure parts and cuspidal families.

All combinatorics runs in exact rational arithmetic: a multiplicity function
with Fraction values, affine subspaces of the dual space as reduced row
echelon systems ``C lam = d`` whose rows are coroot functionals.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import _exact as ex
from .cfunc import f_L_density
from .rootsys import RootSystem, hull_contains, lattice_index
from .weights import MultiplicityFunction, check_integrability, rho


class UnstableParameter(ValueError):
    """The multiplicity function sits on a wall of the combinatorial type."""


class ResidualEnumerationError(RuntimeError):
    pass


class UnderdeterminedMeasure(ValueError):
    pass


def _canonical(rows: Sequence[Sequence[Fraction]], vals: Sequence[Fraction]):
    if not rows:
        return ()
    red, piv = ex.rref([list(r) + [v] for r, v in zip(rows, vals)])
    n = len(rows[0])
    if n in piv:
        return None  # inconsistent
    return tuple(tuple(row) for row in red)


@dataclass(eq=False)
class ResidualSubspace:
    """An affine subspace of the dual space cut out by k-hyperplanes."""

    R: RootSystem
    k: MultiplicityFunction
    key: tuple  # canonical RREF rows of [C | d]
    residual: bool = False
    parents: list = field(default_factory=list)  # residual witnesses M

    # -- geometry -------------------------------------------------------------
    @property
    def rows(self) -> list[tuple]:
        return [r[:-1] for r in self.key]

    @property
    def values(self) -> list[Fraction]:
        return [r[-1] for r in self.key]

    @property
    def codim(self) -> int:
        return len(self.key)

    @property
    def dim(self) -> int:
        return self.R.rank - self.codim

    @cached_property
    def point(self) -> tuple:
        if not self.key:
            return tuple(Fraction(0) for _ in range(self.R.rank))
        return ex.solve_affine(self.rows, self.values)

    @cached_property
    def root_indices(self) -> tuple[int, ...]:
        """Indices of R_L: roots whose coroot is constant on L."""
        rows = self.rows
        return tuple(i for i, f in enumerate(self.R.functionals) if ex.in_span(f, rows))

    def value_on(self, i: int) -> Fraction:
        return ex.dot(self.R.functionals[i], self.point)

    @cached_property
    def k_incidences(self) -> frozenset:
        return frozenset(i for i in self.root_indices if self.value_on(i) == self.k.of_index(i))

    @cached_property
    def zero_incidences(self) -> frozenset:
        return frozenset(i for i in self.root_indices if self.value_on(i) == 0)

    @cached_property
    def root_rank(self) -> int:
        return ex.rank([list(self.R.roots[i]) for i in self.root_indices]) if self.root_indices else 0

    @cached_property
    def center(self) -> tuple:
        """{c_L} = L meet span(R_L)."""
        if not self.key:
            return tuple(Fraction(0) for _ in range(self.R.rank))
        basis = [self.R.roots[i] for i in self.root_indices]
        red, piv = ex.rref([list(b) for b in basis])
        basis = red  # independent spanning rows of V_L
        # solve C (sum s_j b_j) = d for s
        m = [[ex.dot(row, b) for b in basis] for row in self.rows]
        s = ex.solve_affine(m, self.values)
        if s is None:
            raise ResidualEnumerationError("L does not meet V_L")
        return tuple(sum(sj * b[c] for sj, b in zip(s, basis)) for c in range(self.R.rank))

    @cached_property
    def direction(self) -> list[tuple]:
        """Basis of V^L (the direction space of L), simple-root coordinates."""
        return ex.nullspace(self.rows, self.R.rank) if self.rows else ex.nullspace([], self.R.rank)

    def tempered_form(self) -> tuple[tuple, list[tuple]]:
        """(c_L, basis of V^L); the tempered form is c_L + i V^L."""
        return self.center, self.direction

    def contains_tempered(self, lam: Sequence, tol: float = 1e-12) -> bool:
        lam = np.asarray([complex(v) for v in lam])
        c = np.array([float(v) for v in self.center])
        if np.max(np.abs(lam.real - c), initial=0.0) > tol:
            return False
        if not self.rows:
            return True
        rows = np.array([[float(v) for v in r] for r in self.rows])
        return float(np.max(np.abs(rows @ lam.imag))) <= tol * (1 + float(np.max(np.abs(lam.imag))))

    def contains(self, other: "ResidualSubspace") -> bool:
        """Is ``other`` a subset of self?"""
        if not self.key:
            return True
        p = other.point
        if any(ex.dot(r, p) != v for r, v in zip(self.rows, self.values)):
            return False
        return all(ex.in_span(r, other.rows) for r in self.rows)

    def vanishing_gamma_arguments(self, k: MultiplicityFunction | None = None):
        """Root indices whose f_L numerator / denominator argument is identically 0."""
        k = self.k
        num, den = set(), set()
        for i in self.root_indices:
            v = ex.dot(self.R.functionals[i], self.center)
            if v + k.of_index(i) == 0:
                num.add(i)
            if v == 0:
                den.add(i)
        return num, den

    @property
    def distinguished(self) -> bool:
        return self.residual and self.dim == 0

    def act(self, w) -> tuple:
        """Canonical key of w(L)."""
        if not self.key:
            return ()
        R = self.R
        winv = _inverse_int(w)
        # lam in wL iff w^{-1} lam in L: rows become row @ w^{-1}
        rows = [tuple(sum(r[i] * winv[i][j] for i in range(R.rank)) for j in range(R.rank))
                for r in self.rows]
        return _canonical(rows, self.values)

    def signature(self) -> tuple:
        return (self.dim, self.k_incidences, self.zero_incidences, self.residual)

    def __repr__(self):
        c = ", ".join(str(v) for v in self.center)
        return f"ResidualSubspace(dim={self.dim}, center=({c}), residual={self.residual})"


def _inverse_int(w):
    inv = ex.inverse([[Fraction(v) for v in row] for row in w])
    return [[int(v) for v in row] for row in inv]


def _require_exact(k: MultiplicityFunction) -> None:
    if not k.is_exact:
        raise TypeError("residual combinatorics needs exact rational multiplicities")
    if any(v == 0 for v in k.values):
        raise UnstableParameter("k must be nonzero on every orbit: all hyperplanes pass through 0")


def _lattice(R: RootSystem, k: MultiplicityFunction) -> list[ResidualSubspace]:
    """All nonempty intersections of the hyperplanes lam(alpha^v) = k_alpha."""
    top = ResidualSubspace(R, k, ())
    found = {(): top}
    frontier = [top]
    hyper = [(f, k.of_index(i)) for i, f in enumerate(R.functionals)]
    while frontier:
        nxt = []
        for L in frontier:
            for f, v in hyper:
                if L.rows and ex.in_span(f, L.rows):
                    continue
                key = _canonical(L.rows + [f], L.values + [v])
                if key is None or key in found:
                    continue
                M = ResidualSubspace(R, k, key)
                found[key] = M
                nxt.append(M)
        frontier = nxt
    return list(found.values())


def _mark_residual(subspaces: list[ResidualSubspace]) -> None:
    by_dim: dict[int, list[ResidualSubspace]] = {}
    for L in subspaces:
        by_dim.setdefault(L.dim, []).append(L)
    top_dim = max(by_dim)
    for L in by_dim[top_dim]:
        L.residual = True
    for d in sorted(by_dim, reverse=True)[1:]:
        for L in by_dim[d]:
            for M in by_dim.get(d + 1, []):
                if not M.residual or not M.contains(L):
                    continue
                extra = set(L.root_indices) - set(M.root_indices)
                nk = len(extra & L.k_incidences)
                nz = len(extra & L.zero_incidences)
                if nk >= nz + 1:
                    L.residual = True
                    L.parents.append(M)


def _sort_key(L: ResidualSubspace):
    return (-L.dim, tuple(sorted(L.k_incidences)), L.key)


def enumerate_residual(R: RootSystem, k: MultiplicityFunction, check_stability: bool = True,
                       seed: int = 0) -> list[ResidualSubspace]:
    """All residual subspaces for (R, k), ordered by dimension then incidences."""
    _require_exact(k)
    lattice = _lattice(R, k)
    _mark_residual(lattice)
    out = [L for L in lattice if L.residual]
    for L in out:
        if L.codim != L.root_rank:
            raise ResidualEnumerationError(f"codim != rank(R_L) on residual {L}")
    keys = {L.key for L in out}
    for L in out:
        for w in R.weyl:
            if L.act(w) not in keys:
                raise ResidualEnumerationError("residual set is not W-stable")
    if check_stability:
        sig = _combinatorial_type(lattice)
        rng = random.Random(seed)
        for _ in range(2):
            eps = [Fraction(rng.randint(1, 97), 10_007) for _ in k.values]
            kp = MultiplicityFunction(R, tuple(v * (1 + e) for v, e in zip(k.values, eps)))
            lat2 = _lattice(R, kp)
            _mark_residual(lat2)
            if _combinatorial_type(lat2) != sig:
                raise UnstableParameter(f"combinatorics of {k} change under perturbation")
    return sorted(out, key=_sort_key)


def _combinatorial_type(lattice) -> frozenset:
    return frozenset(L.signature() for L in lattice)


# -- Plancherel measure --------------------------------------------------------

def gamma_easy(L: ResidualSubspace, R: RootSystem | None = None, k=None):
    """The constant gamma_L where it is known in closed form, else None."""
    R = L.R
    W = len(R.weyl)
    if L.dim == R.rank:
        return Fraction(1, W * W)
    if L.dim != 0:
        return None
    c = L.center
    if any(ex.dot(f, c) == 0 for f in R.functionals):
        return None  # c not regular
    # beta^v(c) + k_beta = 0  <=>  (-beta) is a k-incidence
    betas = [tuple(-v for v in R.roots[i]) for i in sorted(L.k_incidences)]
    if len(betas) != R.rank or ex.rank([list(b) for b in betas]) != R.rank:
        return None
    # c = sum s_i beta_i
    m = ex.transpose([[Fraction(v) for v in b] for b in betas])
    s = ex.solve_affine(m, list(c))
    if all(si > 0 for si in s):
        ind = lattice_index([R.coroot(b) for b in betas], R)
        return Fraction(1, W * W) / ind
    return Fraction(0)


def omega_density(L: ResidualSubspace) -> float:
    """Density of omega_L w.r.t. Lebesgue measure on iV^L (true metric).

    A fundamental domain of V^L meet 2 pi P gets volume one.
    """
    R = L.R
    d = L.dim
    if d == 0:
        return 1.0
    if d == R.rank:
        return 1.0 / (2 * math.pi) ** d  # covol(P) = 1/covol(Q^v) = 1
    if d == 1:
        v = L.direction[0]
        # fundamental-weight coordinates are the simple coroot pairings
        fw = [R.pairing(v, R.simple_roots[i]) for i in range(R.rank)]
        den = math.lcm(*[Fraction(x).denominator for x in fw])
        g = math.gcd(*[int(x * den) for x in fw])
        prim = [Fraction(x) * den / g for x in v]
        length = math.sqrt(R.scale * float(R.norm2(prim)))
        return 1.0 / (2 * math.pi * length)
    # codimension one: covol(V meet P) = covol(P) * covol(V^perp meet Q^v)
    normal = [R.coroot(R.roots[i]) for i in L.root_indices]
    red, _ = ex.rref([list(v) for v in normal])
    u = red[0]
    den = math.lcm(*[Fraction(x).denominator for x in u])
    g = math.gcd(*[int(x * den) for x in u])
    prim = [Fraction(x) * den / g for x in u]
    # coroot lattice Gram (true metric) = coroot gram / scale
    n = R.rank
    gr = R.gram
    cg = [[4 * gr[i][j] / (gr[i][i] * gr[j][j]) for j in range(n)] for i in range(n)]
    length = math.sqrt(float(sum(prim[i] * cg[i][j] * prim[j] for i in range(n) for j in range(n)))
                       / R.scale)
    return 1.0 / ((2 * math.pi) ** d * length)


@dataclass(eq=False)
class SpectralMeasurePart:
    L: ResidualSubspace
    gamma: Fraction | None

    @property
    def gamma_known(self) -> bool:
        return self.gamma is not None

    @property
    def omega(self) -> float:
        return omega_density(self.L)

    def f(self, lam, k: MultiplicityFunction | None = None) -> float:
        kk = (k or self.L.k)
        return f_L_density(self.L.R, self.L, lam, kk.as_float() if kk.is_exact else kk)

    def density(self, lam, k: MultiplicityFunction | None = None) -> float:
        """gamma_L f_L(lam) times the omega_L density; needs a known gamma."""
        if self.gamma is None:
            raise UnderdeterminedMeasure(f"gamma unknown for {self.L}")
        return float(self.gamma) * self.f(lam, k) * self.omega

    def symbolic_density(self, lam, k=None) -> tuple[float, str]:
        """(f_L * omega, placeholder name for the unknown constant)."""
        return self.f(lam, k) * self.omega, f"gamma[{self.L.key}]"

    @property
    def in_support(self) -> bool:
        """Conservative: unknown gamma counts as present."""
        if self.gamma == 0:
            return False
        if self.L.dim == 0:
            return self.f(self.L.center) > 0
        return True


def plancherel_parts(R: RootSystem, k: MultiplicityFunction, residual=None) -> list[SpectralMeasurePart]:
    residual = residual if residual is not None else enumerate_residual(R, k)
    return [SpectralMeasurePart(L, gamma_easy(L)) for L in residual]


# -- growth and cuspidal families -------------------------------------------------

@dataclass(frozen=True)
class GrowthReport:
    exponents: tuple  # w lam retained (Re w lam >= 0 in dominance order)
    in_support: bool | None
    tempered: bool
    square_integrable: bool
    caveat: str = ""


def _real_coords(v):
    return tuple(complex(x).real for x in v)


def growth_classify(R: RootSystem, lam, k: MultiplicityFunction, parts=None,
                    tol: float = 1e-12) -> GrowthReport:
    """Leading exponents of F(lam, k) and the resulting growth class."""
    orbit = {R.act(w, tuple(lam)) for w in R.weyl}
    retained = tuple(sorted((mu for mu in orbit if all(x >= -tol for x in _real_coords(mu))),
                            key=lambda m: tuple(_real_coords(m))))
    # strictly positive in the dominance order: >= 0 and nonzero
    strictly = bool(retained) and all(max(abs(x) for x in _real_coords(mu)) > tol for mu in retained)
    caveat = ""
    in_support = None
    if parts is None and k.is_exact:
        parts = plancherel_parts(R, k)
    if parts is not None:
        in_support = False
        for p in parts:
            if p.L.contains_tempered([complex(v) for v in lam], 1e-10) and p.in_support:
                in_support = True
                if p.gamma is None:
                    caveat = "membership relies on a part with unknown gamma"
                break
    tempered = bool(in_support) if in_support is not None else bool(retained)
    return GrowthReport(retained, in_support, tempered, tempered and strictly, caveat)


@dataclass(eq=False)
class CuspidalFamily:
    R: RootSystem
    defining: tuple  # root indices of beta with beta^v(lam(k)) + k_beta = 0
    directions: tuple  # lam(k) = sum_o k_o * directions[o]
    R_z: tuple
    R_p: tuple
    simplex: tuple  # ((coeffs per orbit), const) meaning coeffs . k + const > 0

    def at(self, k: MultiplicityFunction) -> tuple:
        return tuple(sum(k.values[o] * self.directions[o][j] for o in range(len(self.directions)))
                     for j in range(self.R.rank))

    def in_simplex(self, k: MultiplicityFunction) -> bool:
        return all(sum(c * v for c, v in zip(co, k.values)) + d > 0 for co, d in self.simplex)

    def interval(self) -> tuple:
        """For one-parameter k: the open interval Sigma = (lo, hi)."""
        if len(self.directions) != 1:
            raise ValueError("interval() needs a single multiplicity parameter")
        lo, hi = -math.inf, math.inf
        for (c,), d in self.simplex:
            if c > 0:
                lo = max(lo, -d / c)
            elif c < 0:
                hi = min(hi, -d / c)
        return lo, hi


def _linear_forms(R, fam_dirs, i):
    f = R.functionals[i]
    return [ex.dot(f, v) for v in fam_dirs]


def sample_multiplicity(R: RootSystem) -> MultiplicityFunction:
    """A generic exact point inside the integrable regime."""
    h = R.coxeter_number
    if R.orbit_data.simply_laced:
        return MultiplicityFunction(R, (Fraction(-1, 3 * h),))
    return MultiplicityFunction(R, (Fraction(-1, 3 * h), Fraction(-1, 5 * h)))


def cuspidal_families(R: RootSystem, k0: MultiplicityFunction | None = None) -> list[CuspidalFamily]:
    if R.rank > 2:
        raise ValueError("cuspidal families are implemented for rank <= 2")
    k0 = k0 or sample_multiplicity(R)
    parts = plancherel_parts(R, k0)
    norb = len(k0.values)
    orbit_of = k0._orbit_by_index
    fams = []
    seen = set()
    for p in parts:
        L = p.L
        if not L.distinguished or not p.in_support:
            continue
        dom = R.dominant(L.center)
        if dom != L.center or dom in seen:
            continue
        seen.add(dom)
        inc = sorted(L.k_incidences)
        # pick n independent defining roots
        chosen = []
        for i in inc:
            if ex.rank([list(R.functionals[j]) for j in chosen + [i]]) == len(chosen) + 1:
                chosen.append(i)
        rows = [R.functionals[i] for i in chosen]
        dirs = []
        for o in range(norb):
            rhs = [Fraction(int(orbit_of[i] == o)) for i in chosen]
            dirs.append(ex.solve_affine(rows, rhs))
        for i in inc:
            forms = _linear_forms(R, dirs, i)
            if any(forms[o] != int(orbit_of[i] == o) for o in range(norb)):
                raise UnstableParameter("defining incidence holds only at the sample k")
        R_z, R_p = [], []
        for i in range(len(R.roots)):
            forms = _linear_forms(R, dirs, i)
            if all(v == 0 for v in forms):
                R_z.append(i)
            if all(forms[o] + int(orbit_of[i] == o) == 0 for o in range(norb)):
                R_p.append(i)
        # Sigma: k < 0, condition (1.6), retained exponents strictly positive
        cons = set()
        for o in range(norb):
            cons.add((tuple(Fraction(-int(q == o)) for q in range(norb)), Fraction(0)))
        beta = R.highest_short_root
        bi = R.root_index(beta)
        unit = [MultiplicityFunction(R, tuple(Fraction(int(q == o)) for q in range(norb)))
                for o in range(norb)]
        coeffs = tuple(R.pairing(rho(R, u), R.coroot(beta)) + u.of_index(bi) for u in unit)
        cons.add((coeffs, Fraction(1)))
        lam0 = L.center
        for w in R.weyl:
            mu0 = R.act(w, lam0)
            if all(x >= 0 for x in mu0):
                wd = [R.act(w, d) for d in dirs]
                for j in range(R.rank):
                    co = tuple(wd[o][j] for o in range(norb))
                    if any(co):
                        cons.add((co, Fraction(0)))
        defining = tuple(sorted(R.root_index(tuple(-v for v in R.roots[i])) for i in inc))
        fams.append(CuspidalFamily(R, defining, tuple(dirs), tuple(R_z), tuple(R_p),
                                   tuple(sorted(_normalize(cons)))))
    return fams


def _normalize(cons):
    out = set()
    for co, d in cons:
        s = max(abs(c) for c in co) if d == 0 else abs(d)
        out.add((tuple(c / s for c in co), d / s))
    return out


def eigenvalues_separated(R: RootSystem, points: Sequence[tuple], k: MultiplicityFunction) -> bool:
    """Distinct dominant points give distinct (lam+rho, lam-rho), exactly."""
    r = rho(R, k)
    ev = [R.norm2(p) - R.norm2(r) for p in points]
    return len(set(ev)) == len(ev)


def lemma_hull_check(R: RootSystem, L: ResidualSubspace) -> bool:
    """Center in conv(W rho(k)) and |c_L(alpha^v)| < 1 for all roots."""
    c = L.center
    if not hull_contains(R, rho(R, L.k), c):
        return False
    return all(abs(ex.dot(f, c)) < 1 for f in R.functionals)
