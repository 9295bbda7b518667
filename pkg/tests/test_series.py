from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from hypergeo import cfunc
from hypergeo import series as S
from hypergeo.rootsys import build_root_system
from hypergeo.weights import MultiplicityFunction, rho

from _oracles import Lam_s, k_s, rank1_oracle


@pytest.fixture(scope="module")
def oracle8():
    return rank1_oracle(8)


def test_rank1_coefficients_match_ode(oracle8):
    R = build_root_system("A", 1)
    for Lam, k in [(Fraction(1, 2), Fraction(-1, 4)), (Fraction(7, 3), Fraction(-2, 5)),
                   (Fraction(-1, 3), Fraction(1, 6))]:
        s = S.series_coefficients(R, (Lam / 2,), MultiplicityFunction.equal(R, k), 8)
        for n in range(9):
            ref = oracle8[n].subs({Lam_s: sp.Rational(Lam.numerator, Lam.denominator),
                                   k_s: sp.Rational(k.numerator, k.denominator)})
            assert s[(n,)] == Fraction(int(sp.numer(ref)), int(sp.denom(ref)))


def test_first_coefficient_sign():
    R = build_root_system("A", 1)
    s = S.series_coefficients(R, (Fraction(1, 4),), MultiplicityFunction.equal(R, Fraction(-1, 4)), 1)
    # Delta_alpha = k (Lam + k) / (1 + Lam) at Lam = 1/2, k = -1/4
    assert s[(1,)] == Fraction(-1, 24)


def test_rank1_pole_structure(oracle8):
    for n in range(1, 9):
        den = sp.denom(sp.together(oracle8[n]))
        roots = set(sp.roots(sp.Poly(den, Lam_s)).keys())
        assert roots <= {-j for j in range(1, n + 1)}
        assert -n in roots


def _kostant(R, kappa):
    """Number of ways to write kappa as a sum of positive roots."""
    pos = sorted(R.positive)

    def count(v, i):
        if all(c == 0 for c in v):
            return 1
        if i == len(pos):
            return 0
        total = 0
        w = v
        while all(c >= 0 for c in w):
            total += count(w, i + 1)
            w = tuple(a - b for a, b in zip(w, pos[i]))
        return total

    return count(tuple(kappa), 0)


@pytest.mark.parametrize("fam,rank", [("A", 2), ("B", 2), ("G2", 2)])
def test_k_one_gives_kostant_partition_function(fam, rank):
    # at k = 1, Phi = e^{(lam + rho)} / prod_{a>0} (1 - e^a) on the negative chamber
    R = build_root_system(fam, rank)
    k = MultiplicityFunction.equal(R, Fraction(1))
    lam = (Fraction(3, 7), Fraction(5, 11))
    s = S.series_coefficients(R, lam, k, 6)
    for kappa in S.q_plus(rank, 6):
        assert s[kappa] == _kostant(R, kappa)


@pytest.mark.parametrize("fam,rank", [("A", 1), ("A", 2), ("B", 2)])
def test_termwise_eigen_exact(fam, rank):
    R = build_root_system(fam, rank)
    k = MultiplicityFunction(R, tuple(Fraction(-1, 4 + i) for i in range(len(R.orbit_data.orbits))))
    rep = S.verify_simultaneous_eigen(R, tuple(Fraction(2 + i, 9) for i in range(rank)), k, 8)
    assert rep.ok and rep.max_residual == 0


@settings(max_examples=15, deadline=None)
@given(st.tuples(st.fractions(-3, 3, max_denominator=12), st.fractions(-3, 3, max_denominator=12)),
       st.fractions(-Fraction(1, 2), Fraction(1, 2), max_denominator=10))
def test_termwise_eigen_random_a2(lam, k):
    R = build_root_system("A", 2)
    kk = MultiplicityFunction.equal(R, k)
    try:
        rep = S.verify_simultaneous_eigen(R, lam, kk, 5)
    except S.PoleHyperplane:
        return
    assert rep.max_residual == 0


def test_pole_hyperplane():
    R = build_root_system("A", 1)
    # Lam = -2 hits <kappa, kappa> + 2 <lam, kappa> = 0 at kappa = 2 alpha
    with pytest.raises(S.PoleHyperplane):
        S.series_coefficients(R, (Fraction(-1),), MultiplicityFunction.equal(R, Fraction(-1, 4)), 4)


def _F_rank1_mpmath(Lam, k, x):
    return complex(mpmath.hyp2f1((k + Lam) / 2, (k - Lam) / 2, k + 0.5, -mpmath.sinh(x) ** 2))


@pytest.mark.parametrize("Lam", [0.3, 1.7, 4j, 0.2 + 11j, 0.0])
@pytest.mark.parametrize("k", [-0.15, -0.35])
def test_F_rank1_against_mpmath(Lam, k):
    xs = np.array([0.05, 0.2, 0.6, 1.5, 4.0])
    got = S.eval_F_rank1(Lam, k, xs)
    ref = np.array([_F_rank1_mpmath(Lam, k, x) for x in xs])
    assert np.max(np.abs(got - ref) / np.maximum(np.abs(ref), 1)) < 1e-11


def test_eval_F_rank1_chamber_path():
    R = build_root_system("A", 1)
    k = MultiplicityFunction.equal(R, -0.2)
    Lam = 2.5 + 1j
    for x in [0.3, 1.0, 3.0]:
        got = S.eval_F(R, (Lam / 2,), k, np.array([-x]))
        assert abs(got - _F_rank1_mpmath(Lam, -0.2, x)) < 1e-11


def _F_complex_case(R, lam, x):
    """k = 1: F = pi(rho)/pi(lam) * sum_w det(w) e^{w lam} / sum_w det(w) e^{w rho}."""
    r = rho(R, MultiplicityFunction.equal(R, 1))
    pi = lambda v: np.prod([complex(R.pairing(v, R.coroot(a))) for a in R.positive])
    e = R.embedding
    num = sum(round(np.linalg.det(np.array(w, float))) * np.exp(np.dot(e @ np.array(R.act(w, lam)), x))
              for w in R.weyl)
    den = sum(round(np.linalg.det(np.array(w, float))) * np.exp(np.dot(e @ np.array(R.act(w, r), float), x))
              for w in R.weyl)
    return pi(r) / pi(lam) * num / den


@pytest.mark.parametrize("fam,rank", [("A", 2), ("B", 2)])
def test_eval_F_complex_group_case(fam, rank):
    R = build_root_system(fam, rank)
    k = MultiplicityFunction.equal(R, 1.0)
    lam = (0.3 + 0.8j, -0.4 + 1.9j)
    for a in ([0.7, 1.3], [2.0, 0.4]):
        x = -np.linalg.solve(R.embedding.T, np.array(a))
        got = S.eval_F(R, lam, k, x)
        assert abs(got - _F_complex_case(R, lam, x)) < 1e-10 * max(1, abs(got))


@pytest.mark.parametrize("fam,rank,kv", [("A", 2, (-0.2,)), ("B", 2, (-0.1, -0.15))])
def test_F_is_W_invariant_in_lambda(fam, rank, kv):
    R = build_root_system(fam, rank)
    k = MultiplicityFunction(R, kv)
    lam = (0.4 + 1.1j, 0.25 + 2.3j)
    x = -np.linalg.solve(R.embedding.T, np.array([0.9, 0.6]))
    vals = [S.eval_F(R, R.act(w, lam), k, x) for w in R.weyl]
    assert max(abs(v - vals[0]) for v in vals) < 1e-11 * abs(vals[0])


def test_F_at_rho_is_one():
    R = build_root_system("A", 2)
    k = MultiplicityFunction.equal(R, -0.25)
    r = rho(R, k)
    xs = -np.linalg.solve(R.embedding.T, np.array([[0.1, 0.2], [1.0, 3.0], [5.0, 0.05]]).T).T
    assert np.allclose(S.eval_F(R, r, k, xs), 1.0, atol=1e-12)


def test_eval_F_rejects_degenerate_input():
    R = build_root_system("A", 1)
    with pytest.raises(cfunc.NormalizationSingular):
        S.eval_F(R, (0.7,), MultiplicityFunction.equal(R, 0.0), np.array([-1.0]))
    with pytest.raises(S.OutsideChamber):
        S.eval_F(R, (0.7,), MultiplicityFunction.equal(R, -0.2), np.array([1.0]))
    with pytest.raises(ValueError):
        S.eval_F(R, (0.0,), MultiplicityFunction.equal(R, -0.2), np.array([-1.0]))


def test_series_cache_roundtrip(tmp_path, monkeypatch):
    monkeypatch.setenv(S.CACHE_ENV, str(tmp_path))
    R = build_root_system("B", 2)
    k = MultiplicityFunction(R, (Fraction(-1, 5), Fraction(-1, 7)))
    lam = (Fraction(1, 3), Fraction(2, 5))
    a = S.series_coefficients(R, lam, k, 5)
    assert len(list(tmp_path.iterdir())) == 1
    b = S.series_coefficients(R, lam, k, 5)
    assert a.coeffs == b.coeffs and a.base == b.base


def test_extend_matches_fresh():
    R = build_root_system("G2")
    k = MultiplicityFunction(R, (Fraction(-1, 20), Fraction(-1, 30)))
    lam = (Fraction(1, 3), Fraction(2, 5))
    s4 = S.series_coefficients(R, lam, k, 4)
    assert S.series_coefficients(R, lam, k, 7, extend=s4).coeffs == S.series_coefficients(R, lam, k, 7).coeffs
