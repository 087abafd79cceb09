from fractions import Fraction

import numpy as np
import pytest

from momentkit.errors import DegreeOverflowError, NotAMomentSequenceError, RankDetectionError
from momentkit.fixtures import random_interval_measure, random_polynomial, random_ball_measure
from momentkit.hausdorff import (Sequence1D, hankel, interval_bound, is_psd_on_N0, marginal, recover_atoms,
                                 verify_recovery)
from momentkit.moments import AtomicMeasure, moments_from_measure, uniform_interval_moments
from momentkit.poly import Polynomial, parse_polynomial
from momentkit.vnorm import vnorm_ratio


def P(text, s=1):
    return parse_polynomial(text, s)


def seq_from(mu, N):
    return Sequence1D([sum(w * x[0] ** n for x, w in mu.atoms) for n in range(N + 1)], normalize=True)


def test_marginal_examples():
    L = moments_from_measure(AtomicMeasure.dirac((0.5,)), 4)
    assert marginal(L, P("x"), 3).values == (1, 0.5, 0.25, 0.125)
    assert marginal(L, Polynomial.one(1), 4).values == (1.0,) * 5
    L2 = moments_from_measure(AtomicMeasure.dirac((0.6, 0.8)), 4)
    np.testing.assert_allclose(marginal(L2, P("x1^2 + x2^2", 2), 2).values, [1, 1, 1], atol=1e-15)
    with pytest.raises(DegreeOverflowError):
        marginal(L, P("x^2"), 3)


def test_sequence_validation():
    with pytest.raises(ValueError):
        Sequence1D([1.0, 0.5])
    with pytest.raises(ValueError):
        Sequence1D([2.0, 0.5, 0.25])
    assert Sequence1D([2.0, 1.0, 0.5], normalize=True).values == (1.0, 0.5, 0.25)
    f = Sequence1D([1.0, 0.25, 0.125])
    assert Sequence1D.from_json(f.to_json()) == f


def test_is_psd_on_N0_examples():
    assert is_psd_on_N0(Sequence1D([1, 0.5, 0.25, 0.125, 0.0625]))
    bad = is_psd_on_N0(Sequence1D([1, 0, -1]))
    assert not bad and bad.failing_d == 1
    c = bad.witness
    assert c @ hankel([1, 0, -1], 1) @ c < 0


def test_is_psd_on_N0_uniform_exact():
    H = [[Fraction(1, j + k + 1) if (j + k) % 2 == 0 else Fraction(0) for k in range(3)] for j in range(3)]
    # exact determinants of the leading minors are positive
    assert H[0][0] > 0
    assert H[0][0] * H[1][1] - H[0][1] ** 2 > 0
    det3 = (H[0][0] * (H[1][1] * H[2][2] - H[1][2] * H[2][1]) - H[0][1] * (H[1][0] * H[2][2] - H[1][2] * H[2][0])
            + H[0][2] * (H[1][0] * H[2][1] - H[1][1] * H[2][0]))
    assert det3 > 0
    assert is_psd_on_N0(Sequence1D([1, 0, 1 / 3, 0, 1 / 5]))


def test_interval_bound_examples():
    assert interval_bound(Sequence1D([1, 0.5, 0.25, 0.125, 0.0625])) == 0.5
    assert interval_bound(Sequence1D([1, 0, 1, 0, 1])) == 1.0
    uni = uniform_interval_moments(10)
    f = Sequence1D([uni[(n,)] for n in range(11)])
    assert interval_bound(f) == pytest.approx(float(Fraction(9, 11)) ** 0.5, rel=1e-14)
    with pytest.raises(NotAMomentSequenceError):
        interval_bound(Sequence1D([1, 0, -1]))


def test_interval_bound_never_exceeds_support():
    rng = np.random.default_rng(41)
    for _ in range(200):
        b = float(rng.uniform(0.2, 3.0))
        mu = random_interval_measure(rng, bound=b, min_sep=0.05 * b)
        f = seq_from(mu, int(rng.integers(2, 16)))
        assert interval_bound(f) <= b + 1e-9


def test_recover_examples():
    r = recover_atoms(Sequence1D([0.5 ** n for n in range(7)]))
    assert r.rank == 1
    assert r.atoms[0] == pytest.approx((0.5, 1.0), abs=1e-12)
    r = recover_atoms(Sequence1D([1.0] + [0.0] * 6))
    assert r.atoms == ((0.0, 1.0),)
    vals = [0.3 * (-0.5) ** n + 0.7 * 0.5 ** n for n in range(7)]
    r = recover_atoms(Sequence1D(vals))
    assert r.rank == 2
    np.testing.assert_allclose(r.locations, [-0.5, 0.5], atol=1e-8)
    np.testing.assert_allclose(r.weights, [0.3, 0.7], atol=1e-8)
    assert verify_recovery(Sequence1D(vals), r).max_error <= 1e-8


def test_verify_recovery_single_atom_and_perturbation():
    f = Sequence1D([0.25 ** n for n in range(5)])
    r = recover_atoms(f)
    assert verify_recovery(f, r).max_error <= 1e-14
    vals = [0.3 * (-0.5) ** n + 0.7 * 0.5 ** n for n in range(7)]
    r = recover_atoms(Sequence1D(vals))
    vals[2] += 1e-3
    rep = verify_recovery(Sequence1D(vals), r)
    assert rep.max_error >= 1e-4
    assert rep.errors[2] == pytest.approx(1e-3, rel=1e-6)


def test_rank_exceeding_data_is_reported():
    uni = uniform_interval_moments(6)
    with pytest.raises(RankDetectionError):
        recover_atoms(Sequence1D([uni[(n,)] for n in range(7)]))


def test_round_trip_recovery():
    rng = np.random.default_rng(42)
    for _ in range(120):
        mu = random_interval_measure(rng)
        k = len(mu.atoms)
        f = seq_from(mu, 2 * k + 2)
        r = recover_atoms(f)
        assert r.rank == k
        np.testing.assert_allclose(r.locations, [p[0] for p in mu.points], atol=1e-6)
        np.testing.assert_allclose(r.weights, mu.weights, atol=1e-6)
        assert r.residual <= 1e-7
        assert sum(r.weights) == pytest.approx(1.0, abs=1e-8)


def psd_boundary(vals, idx, tol=1e-9):
    lo, hi = -10.0, vals[idx]  # hi is PSD, lo is not
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        v = list(vals)
        v[idx] = mid
        if is_psd_on_N0(Sequence1D(v), tol):
            hi = mid
        else:
            lo = mid
    return hi


def test_rejects_entries_below_psd_boundary():
    rng = np.random.default_rng(43)
    for _ in range(30):
        mu = random_interval_measure(rng)
        N = 2 * len(mu.atoms) + 2
        f = seq_from(mu, N)
        assert is_psd_on_N0(f)
        idx = 2 * int(rng.integers(1, N // 2 + 1))
        edge = psd_boundary(f.values, idx)
        below = list(f.values)
        below[idx] = edge - 1e-6 * max(1.0, abs(edge))
        assert not is_psd_on_N0(Sequence1D(below))


def test_agrees_with_vnorm_ratio():
    rng = np.random.default_rng(44)
    for _ in range(50):
        s = int(rng.integers(1, 3))
        mu = random_ball_measure(rng, s)
        a = random_polynomial(rng, s, max_degree=2)
        B = 4
        L = moments_from_measure(mu, (2 * B + 2) * a.degree)
        f = marginal(L, a, 2 * B + 2)
        assert interval_bound(f) == pytest.approx(vnorm_ratio(L, a, B).value, rel=1e-12, abs=1e-12)
