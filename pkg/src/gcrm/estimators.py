"""
Empirical canonical correlations with standard errors.

rho_hat_n = mean over pairs of prod_i L~_{n_i}(X_i) L~_{n_i}(Y_i) / c_{n_i, alpha_i},
with standard error std(ddof=1) / sqrt(N). Reports carry a z-score per
entry and pass when every |z| is within the gate.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .base import CorrelationIndex, DomainError, PartitionSpec, PolyIndex
from .config import get_config
from .samplers import PairBatch
from .specfun import laguerre_norm, laguerre_table

logger = logging.getLogger(__name__)

MAX_SCAN_DEGREE = 6


@dataclass
class SummandAccumulator:
    """
    Running (count, mean, M2) of a summand. ``merge`` is associative, so
    partial folds over derived streams pool to the one-pass result.
    """
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    constant: Optional[float] = None

    @classmethod
    def from_values(cls, values: np.ndarray) -> "SummandAccumulator":
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            return cls()
        mean = float(values.mean())
        m2 = float(np.sum((values - mean) ** 2))
        constant = float(values[0]) if np.ptp(values) == 0 else None
        if constant is not None:
            mean, m2 = constant, 0.0
        return cls(count=int(values.size), mean=mean, m2=m2, constant=constant)

    def update(self, values: np.ndarray) -> "SummandAccumulator":
        merged = self.merge(SummandAccumulator.from_values(values))
        self.count, self.mean, self.m2, self.constant = merged.count, merged.mean, merged.m2, merged.constant
        return self

    def merge(self, other: "SummandAccumulator") -> "SummandAccumulator":
        if self.count == 0:
            return SummandAccumulator(other.count, other.mean, other.m2, other.constant)
        if other.count == 0:
            return SummandAccumulator(self.count, self.mean, self.m2, self.constant)
        count = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / count
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / count
        constant = self.constant if self.constant is not None and self.constant == other.constant else None
        if constant is not None:
            mean, m2 = constant, 0.0
        return SummandAccumulator(count=count, mean=mean, m2=m2, constant=constant)

    @property
    def estimate(self) -> float:
        if self.count == 0:
            raise DomainError("No samples accumulated")
        return self.mean

    @property
    def std_error(self) -> float:
        if self.count == 0:
            raise DomainError("No samples accumulated")
        if self.constant is not None:
            return 0.0
        if self.count == 1:
            return math.inf
        return math.sqrt(self.m2 / (self.count - 1) / self.count)


@dataclass(frozen=True)
class CorrelationEntry:
    """One compared quantity: label, estimate, exact value and standard error."""
    index: str
    estimate: float
    exact: float
    std_error: float

    @property
    def z_score(self) -> float:
        diff = self.estimate - self.exact
        if self.std_error == 0:
            if math.isclose(self.estimate, self.exact, rel_tol=1e-12, abs_tol=1e-15):
                return 0.0
            return math.copysign(math.inf, diff)
        return diff / self.std_error


@dataclass
class CorrelationReport:
    """
    Entries of one experiment. Analytic reports store their tolerance as
    std_error and gate at |z| <= 1.
    """
    entries: List[CorrelationEntry] = field(default_factory=list)
    sample_count: int = 0
    seed: Optional[int] = None
    analytic: bool = False

    @property
    def gate(self) -> float:
        if self.analytic:
            return 1.0
        gates = get_config().gates
        if len(self.entries) > gates.widen_after:
            return gates.widened_z_threshold
        return gates.z_threshold

    @property
    def max_abs_z(self) -> float:
        return max((abs(e.z_score) for e in self.entries), default=0.0)

    def failures(self) -> List[CorrelationEntry]:
        return [e for e in self.entries if not abs(e.z_score) <= self.gate]

    @property
    def passes(self) -> bool:
        return not self.failures()

    def extend(self, other: "CorrelationReport") -> "CorrelationReport":
        self.entries.extend(other.entries)
        return self

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def _check_batch(batch: PairBatch, part: PartitionSpec):
    if batch.size == 0:
        raise DomainError("Empty batch")
    if batch.dim != part.dim:
        raise DomainError(f"Batch has {batch.dim} cells, partition has {part.dim}")


def corr_summand(
    batch: PairBatch,
    part: PartitionSpec,
    n: Union[CorrelationIndex, Sequence[int]],
    m: Optional[Union[CorrelationIndex, Sequence[int]]] = None,
) -> np.ndarray:
    """prod_i L~_{n_i}(X_i) L~_{m_i}(Y_i) / sqrt(c_{n_i} c_{m_i}) per pair; m defaults to n."""
    _check_batch(batch, part)
    n = CorrelationIndex.of(n).check(part)
    m = n if m is None else CorrelationIndex.of(m).check(part)
    values = np.ones(batch.size)
    for i, (alpha, n_i, m_i) in enumerate(zip(part.alphas, n, m)):
        if n_i:
            values *= laguerre_table(n_i, alpha, batch.x[:, i])[n_i] / math.sqrt(laguerre_norm(PolyIndex(n_i, alpha)))
        if m_i:
            values *= laguerre_table(m_i, alpha, batch.y[:, i])[m_i] / math.sqrt(laguerre_norm(PolyIndex(m_i, alpha)))
    return values


def estimate_canonical_corr(
    batch: PairBatch, part: PartitionSpec, n: Union[CorrelationIndex, Sequence[int]]
) -> Tuple[float, float]:
    """Sample-mean estimate of rho_n and its standard error."""
    acc = SummandAccumulator.from_values(corr_summand(batch, part, n))
    return acc.estimate, acc.std_error


def correlation_report(
    batch: PairBatch,
    part: PartitionSpec,
    indices: Iterable[Union[CorrelationIndex, Sequence[int]]],
    exact: Callable[[CorrelationIndex], float],
) -> CorrelationReport:
    """estimate_canonical_corr against ``exact`` for each index."""
    report = CorrelationReport(sample_count=batch.size, seed=batch.seed)
    for n in indices:
        n = CorrelationIndex.of(n).check(part)
        estimate, std_error = estimate_canonical_corr(batch, part, n)
        report.entries.append(CorrelationEntry(n.label(), estimate, float(exact(n)), std_error))
    return report


def orthogonality_scan(
    batch: PairBatch,
    part: PartitionSpec,
    max_degree: int,
    exact: Optional[Callable[[CorrelationIndex], float]] = None,
) -> CorrelationReport:
    """
    E[L~_n(X_i) L~_m(Y_i)] / sqrt(c_n c_m) for every cell i and n != m up to
    max_degree (exact value 0). Diagonal entries n = m >= 1 are added when
    ``exact`` supplies rho_n.
    """
    if int(max_degree) != max_degree or not 1 <= max_degree <= MAX_SCAN_DEGREE:
        raise DomainError(f"max_degree must be an integer in [1, {MAX_SCAN_DEGREE}], got {max_degree}")
    _check_batch(batch, part)
    report = CorrelationReport(sample_count=batch.size, seed=batch.seed)
    for cell in range(part.dim):
        for n_deg in range(int(max_degree) + 1):
            for m_deg in range(int(max_degree) + 1):
                if n_deg == m_deg and (n_deg == 0 or exact is None):
                    continue
                n = CorrelationIndex.unit(part.dim, cell, n_deg)
                m = CorrelationIndex.unit(part.dim, cell, m_deg)
                acc = SummandAccumulator.from_values(corr_summand(batch, part, n, m))
                target = float(exact(n)) if n_deg == m_deg else 0.0
                report.entries.append(
                    CorrelationEntry(f"{n.label()}|{m.label()}", acc.estimate, target, acc.std_error)
                )
    logger.debug("Orthogonality scan produced %d entries", len(report))
    return report


def moment_match_report(
    samples: Sequence[float], exact_moments: Sequence[float], n_max: int, seed: Optional[int] = None
) -> CorrelationReport:
    """
    Sample moments of orders 1..n_max against ``exact_moments`` indexed by
    order (entry 0 is the order-0 moment, as returned by mean_moments).
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise DomainError("No samples to compare")
    exact_moments = np.asarray(exact_moments, dtype=float)
    if int(n_max) != n_max or not 1 <= n_max < exact_moments.size:
        raise DomainError(f"n_max must lie in [1, {exact_moments.size - 1}], got {n_max}")
    report = CorrelationReport(sample_count=samples.size, seed=seed)
    for order in range(1, int(n_max) + 1):
        acc = SummandAccumulator.from_values(samples ** order)
        report.entries.append(CorrelationEntry(str(order), acc.estimate, float(exact_moments[order]), acc.std_error))
    return report


def factorization_gap(batch: PairBatch, part: PartitionSpec, cells: Tuple[int, int] = (0, 1)) -> CorrelationEntry:
    """
    rho_hat_(1,1) against rho_hat_(1,0) rho_hat_(0,1) on two cells, with a
    delta-method standard error for the difference. Pairs of CRMs factorize.
    """
    i, j = cells
    part._check_pair(i, j)
    a = corr_summand(batch, part, CorrelationIndex.unit(part.dim, i))
    b = corr_summand(batch, part, CorrelationIndex.unit(part.dim, j))
    joint_index = [0] * part.dim
    joint_index[i] = joint_index[j] = 1
    c = corr_summand(batch, part, joint_index)

    mean_a, mean_b, mean_c = a.mean(), b.mean(), c.mean()
    influence = c - mean_b * a - mean_a * b
    std_error = float(influence.std(ddof=1) / math.sqrt(batch.size)) if batch.size > 1 else math.inf
    label = CorrelationIndex(tuple(joint_index)).label()
    return CorrelationEntry(label, float(mean_c), float(mean_a * mean_b), std_error)


__all__ = [
    "SummandAccumulator",
    "CorrelationEntry",
    "CorrelationReport",
    "corr_summand",
    "estimate_canonical_corr",
    "correlation_report",
    "orthogonality_scan",
    "moment_match_report",
    "factorization_gap",
]
