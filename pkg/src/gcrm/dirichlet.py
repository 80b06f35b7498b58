"""
Random means of Dirichlet processes on [0, 1].

M = integral s p(ds), where p is a Dirichlet process with total mass theta
and a finite-support base G. Exact moments come from the stick-breaking
self-similarity M = V U + (1 - V) M', V ~ Beta(1, theta), U ~ G, which gives

    E[M^n] n / (theta + n)
        = sum_{j=1}^{n} C(n, j) j! (theta)_{n-j} / (1 + theta)_n  m_j E[M^{n-j}]

with m_j the j-th moment of G.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .base import BaseDistribution, DomainError
from .config import get_config
from .specfun import log_pochhammer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DirichletMeanSpec:
    """Total mass theta and base distribution of a Dirichlet random mean."""
    theta: float
    base: BaseDistribution

    def __post_init__(self):
        if not self.theta > 0 or not math.isfinite(self.theta):
            raise DomainError(f"Dirichlet total mass must be positive, got {self.theta}")
        if not isinstance(self.base, BaseDistribution):
            raise DomainError("Dirichlet base must be a BaseDistribution on [0, 1]")


@dataclass(frozen=True)
class IdentityGap:
    """Both sides of the Markov-Krein identity E[(1 - lam M)^(-theta)] = exp(...)."""
    lhs: float
    rhs: float
    std_error: float

    @property
    def z_score(self) -> float:
        if self.std_error == 0:
            return 0.0 if math.isclose(self.lhs, self.rhs, rel_tol=1e-12) else math.inf
        return (self.lhs - self.rhs) / self.std_error

    def __iter__(self):
        return iter((self.lhs, self.rhs))


def base_moments(base: BaseDistribution, n_max: int) -> np.ndarray:
    """Moments m_0..m_{n_max} of the base distribution."""
    return base.moments(n_max)


def moment_recursion(theta: float, base_moms: np.ndarray, n_max: int) -> np.ndarray:
    """
    Moments E[M^0..M^{n_max}] from the stick-breaking recursion.

    No order cap: callers needing long series (the Laplace-ratio
    expansion) go through here, everything else through mean_moments.
    """
    moments = np.empty(n_max + 1)
    moments[0] = 1.0
    for n in range(1, n_max + 1):
        j = np.arange(1, n + 1)
        log_weights = (
            gammaln(n + 1) - gammaln(n - j + 1)
            + np.array([log_pochhammer(theta, n - k) for k in j])
            - log_pochhammer(1.0 + theta, n)
        )
        total = np.sum(np.exp(log_weights) * base_moms[j] * moments[n - j])
        moments[n] = total * (theta + n) / n
    return moments


def mean_moments(spec: DirichletMeanSpec, n_max: int) -> np.ndarray:
    """
    Exact moments of the Dirichlet random mean.

    Returns an array whose entry n is E[M^n] for n = 0..n_max (entry 0 is 1).
    """
    cap = get_config().numerics.max_moment_order
    if int(n_max) != n_max or not 1 <= n_max <= cap:
        raise DomainError(f"n_max must be an integer in [1, {cap}], got {n_max}")
    n_max = int(n_max)
    if spec.base.is_degenerate:
        return spec.base.locations[0] ** np.arange(n_max + 1, dtype=float)
    return moment_recursion(spec.theta, base_moments(spec.base, n_max), n_max)


def merge_bases(
    theta_i: float, base_i: BaseDistribution, theta_j: float, base_j: BaseDistribution
) -> BaseDistribution:
    """Base (theta_i G_i + theta_j G_j) / (theta_i + theta_j) of a merged cell."""
    total = theta_i + theta_j
    atoms = {}
    for theta, base in ((theta_i, base_i), (theta_j, base_j)):
        for loc, prob in base.atoms:
            atoms[loc] = atoms.get(loc, 0.0) + theta * prob / total
    locations = sorted(atoms)
    weights = np.array([atoms[loc] for loc in locations])
    return BaseDistribution(locations=tuple(locations), weights=tuple(weights / weights.sum()))


def _resolve_eps(eps: Optional[float]) -> float:
    if eps is None:
        eps = get_config().numerics.stick_breaking_eps
    if not 0 < eps < 1:
        raise DomainError(f"Truncation eps must lie in (0, 1), got {eps}")
    return float(eps)


def sample_dirichlet_mean(
    spec: DirichletMeanSpec, eps: Optional[float], rng: np.random.Generator
) -> float:
    """
    One draw of M by stick breaking with GEM(theta) weights.

    Sticks are broken until the residual mass drops below ``eps``; the
    residual then goes to one last base draw, so the bias is at most eps.
    """
    eps = _resolve_eps(eps)
    if spec.base.is_degenerate:
        return spec.base.locations[0]

    value, residual, sticks = 0.0, 1.0, 0
    while residual >= eps:
        v = rng.beta(1.0, spec.theta)
        value += residual * v * spec.base.sample(rng)
        residual *= 1.0 - v
        sticks += 1
    value += residual * spec.base.sample(rng)
    logger.debug("Dirichlet mean draw used %d sticks", sticks)
    return value


def sample_dirichlet_means(
    spec: DirichletMeanSpec, size: int, eps: Optional[float], rng: np.random.Generator
) -> np.ndarray:
    """Vectorised batch of ``size`` independent draws of M."""
    eps = _resolve_eps(eps)
    if spec.base.is_degenerate:
        return np.full(size, spec.base.locations[0])

    values = np.zeros(size)
    residual = np.ones(size)
    active = np.ones(size, dtype=bool)
    rounds = 0
    while active.any():
        idx = np.flatnonzero(active)
        v = rng.beta(1.0, spec.theta, size=idx.size)
        values[idx] += residual[idx] * v * spec.base.sample(rng, size=idx.size)
        residual[idx] *= 1.0 - v
        active[idx] = residual[idx] >= eps
        rounds += 1
    values += residual * spec.base.sample(rng, size=size)
    logger.debug("Batch of %d Dirichlet means needed %d stick rounds", size, rounds)
    return values


def stieltjes_identity_gap(
    spec: DirichletMeanSpec,
    lam: float,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    eps: Optional[float] = None,
) -> IdentityGap:
    """
    Compare E[(1 - lam M)^(-theta)] (Monte Carlo) with
    exp(-theta * integral log(1 - lam s) G(ds)) (exact).
    """
    locations = np.asarray(spec.base.locations)
    if np.any(1.0 - lam * locations <= 0):
        raise DomainError(f"1 - lam * s must be positive on the base support (lam={lam})")

    cfg = get_config()
    samples = cfg.experiments.stieltjes_samples if samples is None else int(samples)
    seed = cfg.experiments.default_seed if seed is None else int(seed)

    rhs = math.exp(-spec.theta * spec.base.expect(lambda s: math.log1p(-lam * s)))

    rng = np.random.default_rng(seed)
    means = sample_dirichlet_means(spec, samples, eps, rng)
    values = (1.0 - lam * means) ** (-spec.theta)
    lhs = float(values.mean())
    std_error = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    if np.ptp(values) == 0:
        lhs, std_error = float(values[0]), 0.0
    return IdentityGap(lhs=lhs, rhs=rhs, std_error=std_error)
