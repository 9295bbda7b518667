import itertools
from fractions import Fraction

import pytest

from hypergeo import residual as res
from hypergeo.rootsys import build_root_system
from hypergeo.weights import MultiplicityFunction, rho

GENERIC = {
    ("A", 2): (Fraction(-1, 5),),
    ("B", 2): (Fraction(-1, 5), Fraction(-3, 20)),
    ("G2", 2): (Fraction(-1, 20), Fraction(-1, 30)),
}


def _cv(R, a, lam):
    return R.pairing(lam, R.coroot(a))


def _brute_rank2(R, k):
    """Residual lines and points of a rank-2 system straight from the definition.

    A line {a^v = c} has R_L = {+-a}; it is residual when at least one of
    a^v = k_a, (-a)^v = k_a holds on it.  A point p on a residual line M is
    residual when, among roots with b^v constant on p but not on M, the
    k-incidences outnumber the zero incidences.
    """
    lines = set()
    for a in R.positive:
        for c in (k(a), -k(a)):
            lines.add((a, c))
    points = set()
    for (a, c), (b, d) in itertools.combinations(sorted(lines), 2):
        if a == b:
            continue
        # solve a^v(p) = c, b^v(p) = d in simple-root coordinates
        fa = [R.pairing(e, R.coroot(a)) for e in R.simple_roots]
        fb = [R.pairing(e, R.coroot(b)) for e in R.simple_roots]
        det = fa[0] * fb[1] - fa[1] * fb[0]
        p = ((c * fb[1] - d * fa[1]) / det, (fa[0] * d - fb[0] * c) / det)
        for line in ((a, c), (b, d)):
            extra = [r for r in R.roots if r not in (line[0], tuple(-v for v in line[0]))]
            nk = sum(_cv(R, r, p) == k(r) for r in extra)
            nz = sum(_cv(R, r, p) == 0 for r in extra)
            if nk >= nz + 1:
                points.add(p)
    return lines, points


def test_a1_exact():
    R = build_root_system("A", 1)
    k = MultiplicityFunction.equal(R, Fraction(-1, 4))
    subs = res.enumerate_residual(R, k)
    assert [L.dim for L in subs] == [1, 0, 0]
    r = rho(R, k)
    assert {L.center for L in subs if L.dim == 0} == {r, tuple(-v for v in r)}


@pytest.mark.parametrize("fam,rank", list(GENERIC))
def test_rank2_against_brute_force(fam, rank):
    R = build_root_system(fam, rank)
    k = MultiplicityFunction(R, GENERIC[(fam, rank)])
    subs = res.enumerate_residual(R, k)
    lines, points = _brute_rank2(R, k)
    assert sum(L.dim == 1 for L in subs) == len(lines)
    assert {L.center for L in subs if L.dim == 0} == points


def test_known_point_counts():
    # equal-parameter A_n: the residual points are exactly W rho(k)
    for rank in (2, 3):
        R = build_root_system("A", rank)
        k = MultiplicityFunction.equal(R, Fraction(-1, 7))
        pts = {L.center for L in res.enumerate_residual(R, k) if L.dim == 0}
        r = rho(R, k)
        assert pts == {R.act(w, r) for w in R.weyl}


@pytest.mark.parametrize("fam,rank", list(GENERIC))
def test_structure(fam, rank):
    R = build_root_system(fam, rank)
    k = MultiplicityFunction(R, GENERIC[(fam, rank)])
    subs = res.enumerate_residual(R, k)
    keys = {L.key for L in subs}
    for L in subs:
        assert L.codim == L.root_rank
        assert res.lemma_hull_check(R, L)
        assert all(L.act(w) in keys for w in R.weyl)
    dom = sorted({R.dominant(L.center) for L in subs if L.dim == 0})
    assert res.eigenvalues_separated(R, dom, k)


def test_equal_parameter_b2_is_unstable():
    R = build_root_system("B", 2)
    with pytest.raises(res.UnstableParameter):
        res.enumerate_residual(R, MultiplicityFunction.equal(R, Fraction(-1, 5)))


def test_gamma_values():
    R = build_root_system("A", 1)
    parts = res.plancherel_parts(R, MultiplicityFunction.equal(R, Fraction(-1, 4)))
    assert [p.gamma for p in parts] == [Fraction(1, 4)] * 3
    R2 = build_root_system("A", 2)
    parts2 = res.plancherel_parts(R2, MultiplicityFunction.equal(R2, Fraction(-1, 5)))
    assert [p.gamma for p in parts2 if p.L.dim == 0] == [Fraction(1, 36)] * 6
    assert parts2[0].gamma == Fraction(1, 36)
    # lines are not covered by the closed-form cases
    assert all(p.gamma is None for p in parts2 if p.L.dim == 1)


def test_b2_support_splits_orbit():
    R = build_root_system("B", 2)
    parts = res.plancherel_parts(R, MultiplicityFunction(R, GENERIC[("B", 2)]))
    pts = [p for p in parts if p.L.dim == 0]
    assert {p.gamma for p in pts} == {0, Fraction(1, 64)}
    assert all(p.in_support == (p.gamma != 0) for p in pts)


def test_exact_k_required():
    R = build_root_system("A", 2)
    with pytest.raises((TypeError, ValueError)):
        res.enumerate_residual(R, MultiplicityFunction.equal(R, -0.2))


def test_growth_rank1():
    R = build_root_system("A", 1)
    k = MultiplicityFunction.equal(R, Fraction(-1, 4))
    r = rho(R, k)
    cusp = res.growth_classify(R, tuple(-v for v in r), k)
    assert cusp.square_integrable and cusp.tempered
    gen = res.growth_classify(R, (0.37j,), k)
    assert gen.tempered and not gen.square_integrable
    off = res.growth_classify(R, (0.2,), k)
    assert not off.tempered


def test_cuspidal_families_rank1_and_a2():
    R = build_root_system("A", 1)
    (fam,) = res.cuspidal_families(R)
    assert fam.interval() == (Fraction(-1, 2), 0)
    k = MultiplicityFunction.equal(R, Fraction(-1, 4))
    assert fam.at(k) in {rho(R, k), tuple(-v for v in rho(R, k))}
    R2 = build_root_system("A", 2)
    (fam2,) = res.cuspidal_families(R2)
    assert fam2.interval() == (Fraction(-1, 3), 0)
    assert fam2.in_simplex(MultiplicityFunction.equal(R2, Fraction(-1, 4)))
    assert not fam2.in_simplex(MultiplicityFunction.equal(R2, Fraction(-2, 5)))
