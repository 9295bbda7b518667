"""Irreducible reduced root systems at the unit-covolume normalization.

Roots are kept exactly as integer coordinates in the basis of simple roots;
coroots as integer coordinates in the basis of simple coroots.  The rational
Gram matrix ``gram`` of the simple roots fixes the shape of the inner product.
The true inner product on the dual space is ``scale * gram`` where ``scale``
is chosen so that the coroot lattice has covolume one in the space itself.
``scale`` can be irrational (``scale**rank`` is always rational), so anything
combinatorial is computed from ``gram``/``cartan`` and only the numerical
layer ever touches ``scale``.

Points of the dual space (spectral parameters, weights) use simple-root
coordinates.  Points ``x`` of the space itself are plain float vectors in an
orthonormal frame; ``embedding`` maps simple-root coordinates into the dual
orthonormal frame so that ``alpha(x) = (embedding @ a) . x``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from . import _exact as ex


class UnsupportedRootSystem(ValueError):
    """Requested family/rank is outside what this library builds."""


class WeylGroupError(RuntimeError):
    """Weyl group closure did not terminate within its bound."""


class DegenerateBasis(ValueError):
    pass


# Degrees of the basic invariants.  Cross-checked against |W| on construction.
_DEGREES = {
    ("A", 1): (2,),
    ("A", 2): (2, 3),
    ("A", 3): (2, 3, 4),
    ("B", 2): (2, 4),
    ("B", 3): (2, 4, 6),
    ("C", 2): (2, 4),
    ("C", 3): (2, 4, 6),
    ("D", 3): (2, 3, 4),
    ("G2", 2): (2, 6),
}


def _gram(family: str, rank: int) -> list[list[Fraction]]:
    """Gram matrix of the simple roots in the usual coordinate embeddings."""
    n = rank
    g = [[Fraction(0)] * n for _ in range(n)]
    if family == "G2":
        return ex.to_matrix([[2, -3], [-3, 6]])
    for i in range(n):
        g[i][i] = Fraction(2)
        if i + 1 < n:
            g[i][i + 1] = g[i + 1][i] = Fraction(-1)
    if family == "B":
        # alpha_n = e_n
        g[n - 1][n - 1] = Fraction(1)
    elif family == "C":
        # alpha_n = 2 e_n
        g[n - 1][n - 1] = Fraction(4)
        g[n - 2][n - 1] = g[n - 1][n - 2] = Fraction(-2)
    elif family == "D":
        # alpha_{n} = e_{n-1} + e_n
        g[n - 2][n - 1] = g[n - 1][n - 2] = Fraction(0)
        g[n - 3][n - 1] = g[n - 1][n - 3] = Fraction(-1)
    return g


@dataclass(frozen=True, eq=False)
class OrbitData:
    """W-orbits of roots, ordered long before short."""

    orbits: tuple[tuple[int, ...], ...]  # indices into RootSystem.roots
    lengths: tuple[Fraction, ...]  # (alpha, alpha) in gram units
    h: tuple[Fraction, ...]  # #R_i / n

    @property
    def simply_laced(self) -> bool:
        return len(self.orbits) == 1


@dataclass(eq=False)
class RootSystem:
    """An irreducible reduced root system; see the module docstring for conventions."""

    family: str
    rank: int
    gram: list[list[Fraction]]
    degrees: tuple[int, ...]
    cartan: list[list[Fraction]] = field(init=False)
    roots: list[tuple[int, ...]] = field(init=False)
    positive: list[tuple[int, ...]] = field(init=False)
    scale_pow: Fraction = field(init=False)

    def __post_init__(self):
        n = self.rank
        g = self.gram
        # cartan[i][j] = <alpha_i^vee, alpha_j>
        self.cartan = [[2 * g[i][j] / g[i][i] for j in range(n)] for i in range(n)]
        for row in self.cartan:
            for v in row:
                if v.denominator != 1:
                    raise UnsupportedRootSystem("Gram matrix is not crystallographic")
        self.roots = self._generate_roots()
        self.positive = [a for a in self.roots if all(c >= 0 for c in a)]
        # coroot Gram in gram units: 4 B_ij / (B_ii B_jj); the true one is that / scale
        cg = [[4 * g[i][j] / (g[i][i] * g[j][j]) for j in range(n)] for i in range(n)]
        self.scale_pow = ex.det(cg)
        self._check_invariants()

    # -- construction helpers -------------------------------------------------
    def _reflect_int(self, i: int, a: Sequence[int]) -> tuple[int, ...]:
        p = sum(int(self.cartan[i][j]) * a[j] for j in range(self.rank))
        out = list(a)
        out[i] -= p
        return tuple(out)

    def _generate_roots(self) -> list[tuple[int, ...]]:
        n = self.rank
        simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        seen = set(simple)
        frontier = list(simple)
        while frontier:
            nxt = []
            for a in frontier:
                for i in range(n):
                    b = self._reflect_int(i, a)
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
            frontier = nxt
        return sorted(seen, key=lambda a: (-sum(a), tuple(-c for c in a)))

    def _check_invariants(self):
        n = self.rank
        if ex.rank([list(a) for a in self.roots]) != n:
            raise UnsupportedRootSystem("roots do not span")
        if len(self.weyl) != int(np.prod(self.degrees)):
            raise WeylGroupError("|W| disagrees with the product of degrees")
        if len(self.positive) != sum(self.exponents):
            raise UnsupportedRootSystem("#R_+ disagrees with the sum of exponents")
        if 2 * len(self.positive) != len(self.roots):
            raise UnsupportedRootSystem("positive system is not half of R")

    # -- basic exact data -----------------------------------------------------
    @property
    def label(self) -> str:
        return self.family if self.family == "G2" else f"{self.family}{self.rank}"

    @property
    def n(self) -> int:
        return self.rank

    @cached_property
    def exponents(self) -> tuple[int, ...]:
        return tuple(d - 1 for d in self.degrees)

    @property
    def coxeter_number(self) -> int:
        return max(self.degrees)

    def inner(self, u: Sequence, v: Sequence):
        """Inner product in gram units (multiply by ``scale`` for the true value)."""
        g = self.gram
        n = self.rank
        return sum(u[i] * g[i][j] * v[j] for i in range(n) for j in range(n) if g[i][j])

    def norm2(self, a: Sequence) -> Fraction:
        return self.inner(a, a)

    def coroot(self, a: Sequence[int]) -> tuple:
        """Coroot of the root ``a`` in simple-coroot coordinates (integers)."""
        la = self.norm2(a)
        out = []
        for j, c in enumerate(a):
            v = Fraction(c) * self.gram[j][j] / la
            out.append(int(v) if v.denominator == 1 else v)
        return tuple(out)

    @cached_property
    def coroots(self) -> list[tuple]:
        return [self.coroot(a) for a in self.roots]

    def pairing(self, lam: Sequence, xi: Sequence):
        """``lam(xi)`` for ``lam`` in simple-root and ``xi`` in simple-coroot coordinates."""
        n = self.rank
        total = 0
        for i in range(n):
            if xi[i]:
                s = 0
                for j in range(n):
                    if lam[j] and self.cartan[i][j]:
                        s += self.cartan[i][j] * lam[j]
                total += xi[i] * s
        return total

    def coroot_functional(self, a: Sequence[int]) -> tuple:
        """Row vector f with ``lam(a^vee) = f . lam`` for lam in simple-root coordinates."""
        cv = self.coroot(a)
        n = self.rank
        return tuple(sum(cv[i] * self.cartan[i][j] for i in range(n)) for j in range(n))

    @cached_property
    def functionals(self) -> list[tuple]:
        return [self.coroot_functional(a) for a in self.roots]

    def root_index(self, a: Sequence[int]) -> int:
        return self._root_index[tuple(a)]

    @cached_property
    def _root_index(self) -> dict:
        return {a: i for i, a in enumerate(self.roots)}

    @cached_property
    def simple_roots(self) -> list[tuple[int, ...]]:
        n = self.rank
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]

    @cached_property
    def fundamental_weights(self) -> list[tuple]:
        """Fundamental weights in simple-root coordinates (columns of cartan^{-1})."""
        inv = ex.inverse(self.cartan)
        return [tuple(inv[j][i] for j in range(self.rank)) for i in range(self.rank)]

    @property
    def root_lattice_basis(self) -> list[tuple[int, ...]]:
        return self.simple_roots

    @property
    def weight_lattice_basis(self) -> list[tuple]:
        return self.fundamental_weights

    @property
    def coroot_lattice_basis(self) -> list[tuple[int, ...]]:
        """Simple coroots, in simple-coroot coordinates."""
        return self.simple_roots

    @cached_property
    def orbit_data(self) -> OrbitData:
        groups: dict[Fraction, list[int]] = {}
        for i, a in enumerate(self.roots):
            groups.setdefault(self.norm2(a), []).append(i)
        lengths = tuple(sorted(groups, reverse=True))
        orbits = tuple(tuple(groups[l]) for l in lengths)
        h = tuple(Fraction(len(o), self.rank) for o in orbits)
        return OrbitData(orbits, lengths, h)

    def orbit_of(self, a: Sequence[int]) -> int:
        return self.orbit_data.lengths.index(self.norm2(a))

    @cached_property
    def highest_short_root(self) -> tuple[int, ...]:
        short = min(self.orbit_data.lengths)
        cands = [a for a in self.positive if self.norm2(a) == short]
        return max(cands, key=sum)

    @cached_property
    def highest_root(self) -> tuple[int, ...]:
        return max(self.positive, key=sum)

    def height(self, a: Sequence) -> int:
        return sum(a)

    # -- Weyl group -----------------------------------------------------------
    def simple_reflection_matrix(self, i: int) -> tuple[tuple[int, ...], ...]:
        n = self.rank
        m = [[int(r == c) for c in range(n)] for r in range(n)]
        for c in range(n):
            m[i][c] -= int(self.cartan[i][c])
        return tuple(tuple(r) for r in m)

    @cached_property
    def weyl(self) -> list[tuple[tuple[int, ...], ...]]:
        return generate_weyl_group(self)

    def act(self, w, lam: Sequence) -> tuple:
        return tuple(sum(w[i][j] * lam[j] for j in range(self.rank)) for i in range(self.rank))

    def reflect(self, a: Sequence[int], lam: Sequence) -> tuple:
        """r_a(lam) = lam - lam(a^vee) a."""
        p = ex.dot(self.coroot_functional(a), lam)
        return tuple(l - p * c for l, c in zip(lam, a))

    def dominant(self, lam: Sequence, tol: float = 0.0) -> tuple:
        """Dominant representative of W lam (lam(alpha_i^vee) >= 0 for all simple i)."""
        lam = tuple(lam)
        n = self.rank
        for _ in range(10 * len(self.roots) + 10):
            for i in range(n):
                p = sum(self.cartan[i][j] * lam[j] for j in range(n))
                if p < -tol:
                    lam = tuple(lam[j] - (p if j == i else 0) for j in range(n))
                    break
            else:
                return lam
        raise WeylGroupError("dominance loop did not terminate")

    # -- numerical layer ------------------------------------------------------
    @cached_property
    def scale(self) -> float:
        return float(self.scale_pow) ** (1.0 / self.rank)

    @cached_property
    def embedding(self) -> np.ndarray:
        """E with E^T E = scale * gram; column i is alpha_i in an orthonormal frame."""
        g = np.array([[float(v) for v in row] for row in self.gram])
        chol = np.linalg.cholesky(self.scale * g)
        return chol.T

    @cached_property
    def roots_float(self) -> np.ndarray:
        return np.array(self.roots, dtype=float) @ self.embedding.T

    @cached_property
    def positive_float(self) -> np.ndarray:
        return np.array(self.positive, dtype=float) @ self.embedding.T

    @cached_property
    def coroots_float(self) -> np.ndarray:
        """alpha^vee = 2 X_alpha / (alpha, alpha) as vectors of the space itself."""
        r = self.roots_float
        return 2 * r / np.sum(r * r, axis=1)[:, None]

    @cached_property
    def weyl_float(self) -> list[np.ndarray]:
        """Weyl group as orthogonal matrices acting on points x of the space."""
        e = self.embedding
        einv = np.linalg.inv(e)
        # w acts on the dual by E w E^-1; on the space by the inverse transpose,
        # which for an orthogonal map is the map itself.
        return [e @ np.array(w, dtype=float) @ einv for w in self.weyl]

    def to_float(self, lam: Sequence) -> np.ndarray:
        """Dual vector in the orthonormal frame (complex allowed)."""
        return self.embedding @ np.asarray(lam, dtype=complex if np.iscomplexobj(lam) else float)

    def from_float(self, v: np.ndarray) -> np.ndarray:
        return np.linalg.solve(self.embedding, v)

    def covolume_coroot_lattice(self) -> Fraction:
        """Squared covolume of Q^vee, exactly; equals 1 by construction."""
        n = self.rank
        g = self.gram
        cg = [[4 * g[i][j] / (g[i][i] * g[j][j]) for j in range(n)] for i in range(n)]
        return ex.det(cg) / self.scale_pow

    # -- misc -----------------------------------------------------------------
    def dual(self) -> "RootSystem":
        """The coroot system R^vee with its own positive system of simple coroots."""
        n = self.rank
        g = self.gram
        cg = [[4 * g[i][j] / (g[i][i] * g[j][j]) for j in range(n)] for i in range(n)]
        fam = {"B": "C", "C": "B"}.get(self.family, self.family)
        return RootSystem(fam, n, cg, self.degrees)

    def to_json(self) -> str:
        def fr(v):
            return str(Fraction(v))

        n = self.rank
        scale_str = f"({self.scale_pow})^(1/{n})" if n > 1 else str(self.scale_pow)
        doc = {
            "family": self.family,
            "rank": n,
            "scale": scale_str,
            "scale_float": float(f"{self.scale:.17g}"),
            "gram": [[fr(v) for v in row] for row in self.gram],
            "roots": [
                {
                    "simple_coords": [fr(c) for c in a],
                    "exact": f"sqrt({scale_str}) * gram-frame",
                    "float": [float(f"{v:.17g}") for v in self.embedding @ np.array(a, float)],
                    "positive": a in self.positive,
                    "orbit": self.orbit_of(a),
                }
                for a in self.roots
            ],
            "coroots": [[fr(c) for c in cv] for cv in self.coroots],
            "weyl": [[[float(f"{v:.17g}") for v in row] for row in w] for w in self.weyl_float],
            "degrees": list(self.degrees),
            "exponents": list(self.exponents),
            "orbits": [list(o) for o in self.orbit_data.orbits],
            "highest_short_root": list(self.highest_short_root),
            "coxeter_number": self.coxeter_number,
        }
        return json.dumps(doc, indent=1, sort_keys=True)


def build_root_system(family: str, rank: int | None = None) -> RootSystem:
    """Build the root system of the given type, scaled so covol(Q^vee) = 1.

    >>> R = build_root_system("A", 2)
    >>> len(R.roots), len(R.weyl)
    (6, 6)
    """
    fam = family.upper()
    if fam == "G":
        fam = "G2"
    if fam == "G2":
        rank = 2 if rank is None else rank
    if rank is None:
        raise UnsupportedRootSystem(f"unsupported type {family}: rank required")
    key = (fam, int(rank))
    if key not in _DEGREES:
        raise UnsupportedRootSystem(f"unsupported type {family}{rank}")
    return RootSystem(fam, int(rank), _gram(fam, int(rank)), _DEGREES[key])


def generate_weyl_group(R: RootSystem) -> list:
    """All elements of W as integer matrices on simple-root coordinates."""
    n = R.rank
    gens = [R.simple_reflection_matrix(i) for i in range(n)]
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))

    def mul(a, b):
        return tuple(tuple(sum(a[i][l] * b[l][j] for l in range(n)) for j in range(n))
                     for i in range(n))

    bound = int(np.prod(R.degrees)) * n
    seen = {ident}
    order = [ident]
    frontier = [ident]
    steps = 0
    while frontier:
        steps += 1
        if steps > bound:
            raise WeylGroupError("Weyl group closure exceeded its bound")
        nxt = []
        for w in frontier:
            for s in gens:
                v = mul(s, w)
                if v not in seen:
                    seen.add(v)
                    order.append(v)
                    nxt.append(v)
        frontier = nxt
    return order


def hull_contains(R: RootSystem, orbit_generator, point) -> bool:
    """Is ``point`` in the convex hull of the W-orbit(s) of the generator(s)?

    ``orbit_generator`` is one vector or a list of vectors (simple-root
    coordinates).  For one or two generators the test is exact: the hull of
    W(t a + (1-t) b) for dominant a, b equals t conv(Wa) + (1-t) conv(Wb), and
    a point lies in conv(W a) iff a minus its dominant representative is a
    nonnegative combination of simple roots.
    """
    gens = orbit_generator
    if not gens or not isinstance(gens[0], (list, tuple)):
        gens = [gens]
    exact = all(isinstance(v, (int, Fraction)) for g in gens for v in g) and all(
        isinstance(v, (int, Fraction)) for v in point)
    tol = 0 if exact else 1e-12
    x = R.dominant(point, tol)
    doms = [R.dominant(g, tol) for g in gens]
    if len(doms) == 1:
        return all(a - b >= -tol for a, b in zip(doms[0], x))
    if len(doms) == 2:
        a, b = doms
        lo, hi = Fraction(0) if exact else 0.0, Fraction(1) if exact else 1.0
        # need t*a_i + (1-t)*b_i - x_i >= 0 for every coordinate
        for ai, bi, xi in zip(a, b, x):
            slope, const = ai - bi, bi - xi
            if slope > 0:
                lo = max(lo, -const / slope)
            elif slope < 0:
                hi = min(hi, -const / slope)
            elif const < -tol:
                return False
        return lo <= hi + tol
    return hull_contains_lp(R, gens, point)


def hull_contains_lp(R: RootSystem, gens, point, tol: float = 1e-9) -> bool:
    """Floating-point convex-hull membership by linear programming."""
    verts = {R.act(w, g) for g in gens for w in R.weyl}
    v = np.array([[float(c) for c in p] for p in verts]).T
    m = v.shape[1]
    a_eq = np.vstack([v, np.ones((1, m))])
    b_eq = np.concatenate([[float(c) for c in point], [1.0]])
    res = linprog(np.zeros(m), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * m, method="highs")
    return res.status == 0 and np.max(np.abs(a_eq @ res.x - b_eq)) < tol


def lattice_index(sub_basis, R: RootSystem | None = None):
    """Index of the lattice spanned by ``sub_basis`` in Q^vee.

    Vectors are given in simple-coroot coordinates.  Returns an int when the
    sublattice lies in Q^vee and the exact rational |det| otherwise.
    """
    m = [[Fraction(c) for c in v] for v in sub_basis]
    n = len(m[0]) if m else 0
    if R is not None and n != R.rank:
        raise DegenerateBasis("dimension mismatch")
    if len(m) != n or ex.rank(m) != n:
        raise DegenerateBasis("degenerate basis: vectors do not span")
    d = abs(ex.det(m))
    if all(c.denominator == 1 for row in m for c in row):
        return int(d)
    return d
