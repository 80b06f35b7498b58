#!/usr/bin/env python3
"""
Test Script for Dirichlet Random Means

Exact moments from the stick-breaking recursion, the samplers behind
them and the Markov-Krein identity.
"""

import math
import os
import sys

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from conftest import assert_within
from gcrm import BaseDistribution, DomainError
from gcrm.dirichlet import (
    DirichletMeanSpec,
    mean_moments,
    merge_bases,
    moment_recursion,
    sample_dirichlet_mean,
    sample_dirichlet_means,
    stieltjes_identity_gap,
)
from gcrm.estimators import moment_match_report

HALF_HALF = BaseDistribution.from_atoms([(0.0, 0.5), (1.0, 0.5)])


def test_degenerate_base_is_deterministic():
    spec = DirichletMeanSpec(theta=3.3, base=BaseDistribution.point(0.4))
    np.testing.assert_allclose(mean_moments(spec, 6), 0.4 ** np.arange(7), rtol=1e-15)


def test_arcsine_moments():
    """theta = 1 with base (delta_0 + delta_1)/2 gives M ~ Beta(1/2, 1/2)."""
    moments = mean_moments(DirichletMeanSpec(theta=1.0, base=HALF_HALF), 4)
    assert moments[0] == 1.0
    assert moments[1] == pytest.approx(0.5, rel=1e-12)
    assert moments[2] == pytest.approx(3.0 / 8.0, rel=1e-12)
    assert moments[4] == pytest.approx((0.5 * 1.5 * 2.5 * 3.5) / (1 * 2 * 3 * 4), rel=1e-12)


def test_beta_moments_for_two_point_base():
    """Base w delta_1 + (1-w) delta_0 gives M ~ Beta(theta w, theta (1-w))."""
    theta, w = 2.5, 0.3
    base = BaseDistribution.from_atoms([(0.0, 1 - w), (1.0, w)])
    moments = mean_moments(DirichletMeanSpec(theta=theta, base=base), 8)
    for n in range(9):
        expected = math.exp(math.lgamma(theta * w + n) - math.lgamma(theta * w)
                            - math.lgamma(theta + n) + math.lgamma(theta))
        assert moments[n] == pytest.approx(expected, rel=1e-11)


def test_mean_moments_range():
    spec = DirichletMeanSpec(theta=1.0, base=HALF_HALF)
    with pytest.raises(DomainError):
        mean_moments(spec, 0)
    with pytest.raises(DomainError):
        mean_moments(spec, 65)
    assert moment_recursion(1.0, HALF_HALF.moments(100), 100)[100] > 0


def test_spec_validation():
    with pytest.raises(DomainError):
        DirichletMeanSpec(theta=0.0, base=HALF_HALF)
    with pytest.raises(DomainError):
        BaseDistribution.from_atoms([(1.5, 1.0)])
    with pytest.raises(DomainError):
        BaseDistribution.from_atoms([(0.1, 0.5), (0.2, 0.4)])


def test_merge_bases():
    merged = merge_bases(1.0, BaseDistribution.point(0.0), 3.0, HALF_HALF)
    assert dict(merged.atoms) == pytest.approx({0.0: 0.25 + 0.375, 1.0: 0.375})


def test_sampler_degenerate_base_exact(rng):
    spec = DirichletMeanSpec(theta=0.7, base=BaseDistribution.point(0.25))
    assert sample_dirichlet_mean(spec, 1e-10, rng) == 0.25
    assert np.all(sample_dirichlet_means(spec, 100, 1e-10, rng) == 0.25)


def test_sampler_mean_and_second_moment(rng):
    """Stick-breaking draws against exact moments at theta = 1 and theta = 5."""
    draws = sample_dirichlet_means(DirichletMeanSpec(1.0, HALF_HALF), 100000, 1e-10, rng)
    assert_within(draws.mean(), 0.5, draws.std(ddof=1) / math.sqrt(draws.size))

    spec = DirichletMeanSpec(5.0, HALF_HALF)
    draws = sample_dirichlet_means(spec, 100000, 1e-10, rng)
    squares = draws ** 2
    assert_within(squares.mean(), mean_moments(spec, 2)[2], squares.std(ddof=1) / math.sqrt(draws.size))


def test_single_draw_sampler_matches_moments(rng):
    spec = DirichletMeanSpec(2.0, BaseDistribution.from_atoms([(0.1, 0.3), (0.6, 0.7)]))
    draws = np.array([sample_dirichlet_mean(spec, 1e-10, rng) for _ in range(20000)])
    assert_within(draws.mean(), mean_moments(spec, 1)[1], draws.std(ddof=1) / math.sqrt(draws.size))


@pytest.mark.parametrize("theta,atoms", [
    (0.5, [(0.0, 0.5), (1.0, 0.5)]),
    (1.0, [(0.2, 0.5), (0.9, 0.5)]),
    (2.0, [(0.0, 0.3), (0.5, 0.3), (1.0, 0.4)]),
    (5.0, [(0.1, 0.9), (0.8, 0.1)]),
    (0.3, [(0.25, 0.25), (0.75, 0.75)]),
    (10.0, [(0.0, 0.2), (0.4, 0.2), (0.7, 0.6)]),
])
def test_moment_match_configurations(theta, atoms):
    spec = DirichletMeanSpec(theta, BaseDistribution.from_atoms(atoms))
    draws = sample_dirichlet_means(spec, 100000, 1e-10, np.random.default_rng(11))
    report = moment_match_report(draws, mean_moments(spec, 5), 5)
    assert report.passes, [(e.index, e.z_score) for e in report]


def test_stieltjes_deterministic_cases():
    gap = stieltjes_identity_gap(DirichletMeanSpec(1.0, BaseDistribution.point(0.5)), -1.0, samples=100, seed=1)
    assert gap.lhs == pytest.approx(2.0 / 3.0, rel=1e-14)
    assert gap.rhs == pytest.approx(2.0 / 3.0, rel=1e-14)
    assert gap.std_error == 0.0

    lhs, rhs = stieltjes_identity_gap(DirichletMeanSpec(1.0, HALF_HALF), 0.0, samples=100, seed=1)
    assert lhs == 1.0 and rhs == 1.0


def test_stieltjes_monte_carlo():
    gap = stieltjes_identity_gap(DirichletMeanSpec(1.0, HALF_HALF), 0.5, samples=100000, seed=3)
    assert gap.rhs == pytest.approx(1.0 / math.sqrt(0.5), rel=1e-12)
    assert abs(gap.z_score) <= 5


def test_stieltjes_precondition():
    with pytest.raises(DomainError):
        stieltjes_identity_gap(DirichletMeanSpec(1.0, HALF_HALF), 1.0, samples=10, seed=1)
