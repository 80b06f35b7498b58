"""
Subordinated Dawson-Watanabe transitions and the Poisson-clock embedding.

A subordinator here is drift plus a compound Poisson part with finitely
supported jumps, so psi(u) = drift * u + rate * sum_j w_j (1 - exp(-u h_j))
and increments are sampled exactly.

Time convention: a subordinated step draws S ~ S_t and runs one DW
transition with z = exp(-S / 2), so rho_n(t) = exp(-t psi(|n| / 2)). Pure
drift 1 recovers the plain DW autocorrelation exp(-|n| t / 2).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .base import CorrelationIndex, DomainError, JumpLaw, PartitionSpec
from .samplers import (
    PairBatch,
    check_masses,
    dw_transition_batch,
    dw_transition_step,
    sample_gamma_vectors,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubordinatorSpec:
    """Drift, compound-Poisson jump rate and finite jump-size law."""
    drift: float = 0.0
    jump_rate: float = 0.0
    jump_law: Optional[JumpLaw] = None

    def __post_init__(self):
        if not self.drift >= 0 or not math.isfinite(self.drift):
            raise DomainError(f"Drift must be finite and nonnegative, got {self.drift}")
        if not self.jump_rate >= 0 or not math.isfinite(self.jump_rate):
            raise DomainError(f"Jump rate must be finite and nonnegative, got {self.jump_rate}")
        if self.jump_rate > 0 and self.jump_law is None:
            raise DomainError("A positive jump rate needs a jump law")
        if self.jump_law is not None and not isinstance(self.jump_law, JumpLaw):
            raise DomainError("Jump law must be a JumpLaw with positive atoms")

    @classmethod
    def pure_drift(cls, drift: float = 1.0) -> "SubordinatorSpec":
        return cls(drift=drift)

    @property
    def has_jumps(self) -> bool:
        return self.jump_rate > 0

    def mean_rate(self) -> float:
        """E[S_1] = drift + rate * E[jump]."""
        jumps = self.jump_rate * self.jump_law.mean() if self.has_jumps else 0.0
        return self.drift + jumps

    def to_dict(self) -> dict:
        return {
            "drift": self.drift,
            "jump_rate": self.jump_rate,
            "jump_law": self.jump_law.to_dict() if self.jump_law is not None else None,
        }


def laplace_exponent(spec: SubordinatorSpec, u: Union[float, np.ndarray]):
    """psi(u) with E[exp(-u S_t)] = exp(-t psi(u))."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise DomainError("Laplace exponent needs u >= 0")
    value = spec.drift * u
    if spec.has_jumps:
        h = np.asarray(spec.jump_law.locations)
        w = np.asarray(spec.jump_law.weights)
        value = value + spec.jump_rate * np.sum(w * -np.expm1(-u[..., None] * h), axis=-1)
    return value if np.ndim(value) else float(value)


def _check_time(t: float, strict: bool = True) -> float:
    if (strict and not t > 0) or t < 0 or not math.isfinite(t):
        raise DomainError(f"Time must be {'positive' if strict else 'nonnegative'}, got {t}")
    return float(t)


def sample_increment(spec: SubordinatorSpec, t: float, rng: np.random.Generator) -> float:
    """S_t = drift * t + sum of Poisson(rate * t) jumps drawn from the jump law."""
    t = _check_time(t)
    value = spec.drift * t
    if spec.has_jumps:
        count = rng.poisson(spec.jump_rate * t)
        if count:
            value += float(np.sum(spec.jump_law.sample(rng, size=count)))
    return value


def sample_increments(spec: SubordinatorSpec, t: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent copies of S_t."""
    t = _check_time(t)
    values = np.full(size, spec.drift * t)
    if spec.has_jumps:
        counts = rng.poisson(spec.jump_rate * t, size=size)
        jumps = spec.jump_law.sample(rng, size=int(counts.sum()))
        owners = np.repeat(np.arange(size), counts)
        values += np.bincount(owners, weights=jumps, minlength=size)
    return values


def markov_corr(spec: SubordinatorSpec, n: Union[CorrelationIndex, int], t: float) -> float:
    """exp(-t psi(|n| / 2)): canonical autocorrelation of the subordinated process."""
    t = _check_time(t, strict=False)
    total = n if isinstance(n, int) else CorrelationIndex.of(n).total
    if total < 0:
        raise DomainError(f"Index must be nonnegative, got {total}")
    return math.exp(-t * laplace_exponent(spec, total / 2.0))


def subordinated_dw_step(
    m, part: PartitionSpec, spec: SubordinatorSpec, t: float, rng: np.random.Generator
) -> np.ndarray:
    """Draw S ~ S_t, then one DW transition with z = exp(-S / 2)."""
    s = sample_increment(spec, t, rng)
    return dw_transition_step(m, math.exp(-s / 2.0), part, rng)


def subordinated_dw_batch(
    m: np.ndarray, part: PartitionSpec, spec: SubordinatorSpec, t: float, rng: np.random.Generator
) -> np.ndarray:
    """Each row of ``m`` advanced by its own subordinated step."""
    m = check_masses(np.atleast_2d(m), part, "m")
    s = sample_increments(spec, t, m.shape[0], rng)
    return dw_transition_batch(m, np.exp(-s / 2.0), part, rng)


def subordinated_pair_batch(
    part: PartitionSpec,
    spec: SubordinatorSpec,
    t: float,
    size: int,
    rng: np.random.Generator,
    seed: Optional[int] = None,
    steps: int = 1,
) -> PairBatch:
    """
    Stationary pairs (m_0, m_t). With ``steps > 1`` the interval is split
    into equal chained steps, which must agree in law with a single step.
    """
    if int(steps) != steps or steps < 1:
        raise DomainError(f"steps must be a positive integer, got {steps}")
    x = sample_gamma_vectors(part, size, rng)
    y = x
    for _ in range(int(steps)):
        y = subordinated_dw_batch(y, part, spec, t / steps, rng)
    return PairBatch(
        x=x, y=y, seed=seed,
        meta={"sampler": "subordinated", "t": t, "steps": int(steps), **spec.to_dict()},
    )


def poissonized_corr(gamma_rate: float, rho1: float, n: int, t: float) -> float:
    """exp(-t gamma (1 - rho_n(1))) for a chain run on a Poisson(gamma) clock."""
    if not gamma_rate > 0:
        raise DomainError(f"Clock rate must be positive, got {gamma_rate}")
    if not 0.0 <= rho1 <= 1.0:
        raise DomainError(f"One-step correlation must lie in [0, 1], got {rho1}")
    if int(n) != n or n < 0:
        raise DomainError(f"Degree must be a nonnegative integer, got {n}")
    t = _check_time(t, strict=False)
    return math.exp(-t * gamma_rate * (1.0 - rho1))


def sample_poissonized_chain(
    x0: np.ndarray, part: PartitionSpec, z: float, gamma_rate: float, t: float, rng: np.random.Generator
) -> np.ndarray:
    """
    X_{K} with K ~ Poisson(gamma t) DW steps of parameter z, one K per row.
    Pairs (x0, result) have rho_n(t) = exp(-gamma t (1 - z^n)).
    """
    if not gamma_rate > 0:
        raise DomainError(f"Clock rate must be positive, got {gamma_rate}")
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"z must lie in [0, 1], got {z}")
    t = _check_time(t, strict=False)
    state = check_masses(np.atleast_2d(x0), part, "x0").copy()
    steps = rng.poisson(gamma_rate * t, size=state.shape[0])
    max_steps = int(steps.max()) if steps.size else 0
    for k in range(1, max_steps + 1):
        active = steps >= k
        state[active] = dw_transition_batch(state[active], z, part, rng)
    logger.debug("Poisson-clock chain ran up to %d steps", max_steps)
    return state


def poissonized_pair_batch(
    part: PartitionSpec,
    z: float,
    gamma_rate: float,
    t: float,
    size: int,
    rng: np.random.Generator,
    seed: Optional[int] = None,
) -> PairBatch:
    x = sample_gamma_vectors(part, size, rng)
    y = sample_poissonized_chain(x, part, z, gamma_rate, t, rng)
    return PairBatch(
        x=x, y=y, seed=seed,
        meta={"sampler": "poisson-clock", "z": z, "gamma_rate": gamma_rate, "t": t},
    )


__all__ = [
    "SubordinatorSpec",
    "laplace_exponent",
    "sample_increment",
    "sample_increments",
    "markov_corr",
    "subordinated_dw_step",
    "subordinated_dw_batch",
    "subordinated_pair_batch",
    "poissonized_corr",
    "sample_poissonized_chain",
    "poissonized_pair_batch",
]
