#!/usr/bin/env python3
"""
Test Script for Correlation Estimators

Summand accumulation, z-scored reports, orthogonality scans and moment
matching.
"""

import math
import os
import sys

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from gcrm import DomainError, PartitionSpec
from gcrm.estimators import (
    CorrelationEntry,
    CorrelationReport,
    SummandAccumulator,
    corr_summand,
    estimate_canonical_corr,
    moment_match_report,
    orthogonality_scan,
)
from gcrm.samplers import PairBatch, algorithm_a1_batch, dw_pair_batch

PART2 = PartitionSpec(alphas=(1.0, 2.0))


def independent_batch(part, size, seed):
    rng = np.random.default_rng(seed)
    alphas = part.as_array()
    return PairBatch(x=rng.gamma(alphas, size=(size, part.dim)), y=rng.gamma(alphas, size=(size, part.dim)))


def test_zero_index_is_exact_one():
    batch = independent_batch(PART2, 100, 1)
    assert estimate_canonical_corr(batch, PART2, (0, 0)) == (1.0, 0.0)


def test_independent_pairs_have_zero_correlations():
    batch = independent_batch(PART2, 100000, 2)
    for n in [(1, 0), (0, 1), (1, 1), (2, 0)]:
        estimate, std_error = estimate_canonical_corr(batch, PART2, n)
        assert abs(estimate) <= 5 * std_error


def test_summand_normalisation():
    """Diagonal summand with m = n has mean c_n / c_n = 1 when Y = X."""
    rng = np.random.default_rng(3)
    x = rng.gamma(PART2.as_array(), size=(200000, 2))
    batch = PairBatch(x=x, y=x)
    estimate, std_error = estimate_canonical_corr(batch, PART2, (1, 1))
    assert abs(estimate - 1.0) <= 5 * std_error
    assert corr_summand(batch, PART2, (1, 0), (0, 1)).shape == (200000,)


def test_estimator_domain():
    batch = independent_batch(PART2, 10, 4)
    with pytest.raises(DomainError):
        estimate_canonical_corr(batch, PART2, (1, 0, 0))
    with pytest.raises(DomainError):
        estimate_canonical_corr(PairBatch(x=np.empty((0, 2)), y=np.empty((0, 2))), PART2, (1, 0))
    with pytest.raises(DomainError):
        estimate_canonical_corr(batch, PartitionSpec(alphas=(1.0,)), (1,))


def test_accumulator_merge_equals_pooled():
    values = np.random.default_rng(5).normal(size=1001)
    pooled = SummandAccumulator.from_values(values)
    parts = [SummandAccumulator.from_values(chunk) for chunk in np.array_split(values, 7)]
    folded = SummandAccumulator()
    for part in parts:
        folded = folded.merge(part)
    assert folded.count == pooled.count
    assert folded.estimate == pytest.approx(pooled.estimate, rel=1e-12)
    assert folded.std_error == pytest.approx(pooled.std_error, rel=1e-12)

    updated = SummandAccumulator()
    for chunk in np.array_split(values, 3):
        updated.update(chunk)
    assert updated.estimate == pytest.approx(pooled.estimate, rel=1e-12)


def test_accumulator_edge_cases():
    constant = SummandAccumulator.from_values(np.full(5, 0.25))
    assert constant.estimate == 0.25 and constant.std_error == 0.0
    assert SummandAccumulator.from_values([3.0, 4.0]).merge(SummandAccumulator()).count == 2
    assert SummandAccumulator.from_values([2.0, 2.0]).merge(SummandAccumulator.from_values([3.0])).constant is None
    single = SummandAccumulator(count=1, mean=1.5, m2=0.0)
    assert math.isinf(single.std_error)
    with pytest.raises(DomainError):
        SummandAccumulator().estimate


def test_entry_z_scores():
    assert CorrelationEntry("1", 0.5, 0.4, 0.05).z_score == pytest.approx(2.0)
    assert CorrelationEntry("0", 1.0, 1.0, 0.0).z_score == 0.0
    assert CorrelationEntry("1", 0.3, 0.2, 0.0).z_score == math.inf
    assert CorrelationEntry("1", 0.1, 0.2, 0.0).z_score == -math.inf


def test_report_gates():
    report = CorrelationReport(entries=[CorrelationEntry(str(k), 0.0, 0.0, 1.0) for k in range(50)])
    assert report.gate == 5.0
    report.entries.append(CorrelationEntry("extra", 5.5, 0.0, 1.0))
    assert report.gate == 6.0 and report.passes
    assert CorrelationReport(entries=report.entries, analytic=True).gate == 1.0
    report.entries.append(CorrelationEntry("bad", 7.0, 0.0, 1.0))
    assert [e.index for e in report.failures()] == ["bad"]
    assert report.max_abs_z == 7.0
    assert CorrelationReport().passes and CorrelationReport().max_abs_z == 0.0


def test_orthogonality_scan_passes_on_a1():
    part = PartitionSpec(alphas=(2.0,))
    batch = algorithm_a1_batch(2.0, 1.0, 200000, np.random.default_rng(6))
    report = orthogonality_scan(batch, part, 4)
    assert len(report) == 20
    assert all(e.exact == 0.0 for e in report)
    assert report.passes, [(e.index, e.z_score) for e in report.failures()]


def test_orthogonality_scan_detects_wrong_shape():
    """Pairs built for alpha = 2 scanned with alpha = 1 polynomials are not orthogonal."""
    batch = dw_pair_batch(0.8, PartitionSpec(alphas=(2.0,)), 50000, np.random.default_rng(7))
    report = orthogonality_scan(batch, PartitionSpec(alphas=(1.0,)), 2)
    assert not report.passes


def test_orthogonality_scan_degree_range():
    batch = independent_batch(PART2, 10, 8)
    with pytest.raises(DomainError):
        orthogonality_scan(batch, PART2, 0)
    with pytest.raises(DomainError):
        orthogonality_scan(batch, PART2, 7)


def test_moment_match_constant_samples():
    report = moment_match_report(np.full(20, 0.5), 0.5 ** np.arange(4), 3)
    assert len(report) == 3
    assert report.passes and report.max_abs_z == 0.0


def test_moment_match_flags_mismatch():
    draws = np.random.default_rng(9).uniform(size=100000)
    good = moment_match_report(draws, 1.0 / (np.arange(5) + 1.0), 4)
    assert good.passes
    wrong = 1.0 / (np.arange(5) + 1.0)
    wrong[2] = 0.36
    assert [e.index for e in moment_match_report(draws, wrong, 4).failures()] == ["2"]


def test_moment_match_domain():
    with pytest.raises(DomainError):
        moment_match_report([], [1.0, 0.5], 1)
    with pytest.raises(DomainError):
        moment_match_report([0.5], [1.0, 0.5], 2)


def test_standard_error_scales_as_inverse_root_n():
    """sqrt(N) * SE stays within a factor of 2 across N = 1e4, 1e5, 1e6."""
    part = PartitionSpec(alphas=(1.5,))
    full = algorithm_a1_batch(1.5, 1.0, 10 ** 6, np.random.default_rng(47))
    scaled = []
    for size in (10 ** 4, 10 ** 5, 10 ** 6):
        batch = PairBatch(x=full.x[:size], y=full.y[:size])
        estimate, std_error = estimate_canonical_corr(batch, part, (1,))
        assert abs(estimate - 0.5) <= 5 * std_error
        scaled.append(std_error * math.sqrt(size))
    assert max(scaled) / min(scaled) <= 2.0
    print("✓ standard error shrinks like N^-1/2")
