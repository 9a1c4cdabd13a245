"""Sanity checks on the reference implementations themselves."""

import math

import numpy as np
import pytest

from gacpd.objective import BicIID

from oracles import (OracleSizeError, admissible_taus, brute_cpt_dist, dense_gaussian_loglik,
                     enumerate_assignments, exhaustive_best, psi_autocov, scan_expected_m)

from toy import step_series


def test_admissible_enumeration_counts():
    # N=10, minDist=2: locations 3..8, pairs need a gap of at least 2
    sets = list(admissible_taus(10, 2, 2))
    assert sets[0] == ()
    assert sum(len(s) == 1 for s in sets) == 6
    assert sum(len(s) == 2 for s in sets) == 10


def test_exhaustive_finds_a_large_shift():
    x = step_series(60, (30,), (4.0,), seed=11)
    best, taus = exhaustive_best(BicIID(x), 60, 1, 1)
    assert len(taus) == 1 and abs(taus[0] - 30) <= 1
    assert math.isfinite(best)


def test_exhaustive_with_no_changepoints_allowed():
    seen = []

    def obj(c):
        seen.append(c.taus)
        return 1.0

    assert exhaustive_best(obj, 40, 1, 0) == (1.0, ())
    assert seen == [()]


def test_size_guards():
    with pytest.raises(OracleSizeError):
        exhaustive_best(lambda c: 0.0, 81, 1, 1)
    with pytest.raises(OracleSizeError):
        dense_gaussian_loglik(np.zeros(51), (), (), 1.0)
    with pytest.raises(OracleSizeError):
        enumerate_assignments(np.zeros((8, 8)))


def test_dense_iid_formula(rng):
    x = rng.normal(size=12)
    ref = -0.5 * (12 * math.log(2 * math.pi * 2.0) + x @ x / 2.0)
    assert dense_gaussian_loglik(x, (), (), 2.0) == pytest.approx(ref, rel=1e-13)


def test_dense_ar1_three_points():
    phi, s2 = 0.6, 1.5
    x = np.array([0.3, -1.2, 0.8])
    # factor the joint density as stationary start times two conditionals
    v0 = s2 / (1 - phi**2)
    ref = -0.5 * (3 * math.log(2 * math.pi) + math.log(v0) + 2 * math.log(s2)
                  + x[0] ** 2 / v0 + ((x[1] - phi * x[0]) ** 2 + (x[2] - phi * x[1]) ** 2) / s2)
    assert dense_gaussian_loglik(x, (phi,), (), s2) == pytest.approx(ref, rel=1e-12)


def test_psi_autocov_ma1():
    g = psi_autocov((), (0.5,), 2.0, 3)
    np.testing.assert_allclose(g, [2.5, 1.0, 0.0, 0.0])


def test_assignment_enumeration_small():
    assert enumerate_assignments([[1, 100], [100, 1]]) == 2
    assert enumerate_assignments(np.array([[5, 1, 9]])) == 1
    assert enumerate_assignments(np.array([[5], [1], [9]])) == 1


def test_brute_distance_printed_values():
    assert brute_cpt_dist((249, 750), (250, 750), 1000) == 0.001
    assert brute_cpt_dist((), (250, 750), 1000) == 2


def test_scan_expectation_limits():
    assert scan_expected_m(50, 1, 0.0, 10) == 0.0
    assert scan_expected_m(50, 1, 1.0, 100) == 48  # every point in 2..49
    assert scan_expected_m(50, 1, 1.0, 5) == 5
