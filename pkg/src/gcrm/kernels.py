"""
Directing kernels and the exact objects they determine.

A pair of gamma CRMs in canonical correlation is directed by a (possibly
random) probability kernel Q_x from the base space to [0, 1]. On a finite
partition the kernel reduces to the law of a vector (Z_{A_1}, ..., Z_{A_d})
whose mixed moments are the canonical correlations.

Kernel variants:
- DegenerateConstant: Q_x = delta_z for every x
- PerCellDistribution: Q_x deterministic; cell i pushes forward to a
  finite base G_i and Z_{A_i} is a Dirichlet mean with total mass alpha_i
- RandomConstant: Q_x = delta_Z for a random Z (finite support or Beta)
- CommonComponent: shared gamma component carrying a fraction eta of
  every cell's mass

Exact operations:
- canonical_corr_exact / merge_corr / merge_partition
- joint_laplace_ratio / joint_laplace_series / closed_form_laplace_ratio
- extreme_pair_density / conditional_laplace_extreme / extreme_joint_laplace
- bell_form_comparison
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln, roots_jacobi

from .base import (
    BaseDistribution,
    CorrelationIndex,
    DomainError,
    PartitionSpec,
)
from .config import get_config
from .dirichlet import (
    DirichletMeanSpec,
    mean_moments,
    merge_bases,
    moment_recursion,
    sample_dirichlet_means,
)
from .specfun import bell_complete, bessel_i, log_pochhammer

logger = logging.getLogger(__name__)

Scenario = Tuple[float, List[BaseDistribution]]


@dataclass(frozen=True)
class BetaLaw:
    """Beta(a, b) law for the random constant Z, handled through exact moments."""
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError(f"Beta parameters must be positive, got ({self.a}, {self.b})")

    def moment(self, n: int) -> float:
        """(a)_n / (a + b)_n."""
        return math.exp(log_pochhammer(self.a, n) - log_pochhammer(self.a + self.b, n))

    def moments(self, n_max: int) -> np.ndarray:
        return np.array([self.moment(n) for n in range(n_max + 1)])

    def mean(self) -> float:
        return self.a / (self.a + self.b)

    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        return rng.beta(self.a, self.b, size=size)

    def to_base(self, points: int) -> BaseDistribution:
        """
        Moment-matched finite support: Gauss-Jacobi nodes mapped to [0, 1].
        Moments agree exactly up to order 2 * points - 1.
        """
        nodes, weights = roots_jacobi(int(points), self.b - 1.0, self.a - 1.0)
        locations = np.clip((nodes + 1.0) / 2.0, 0.0, 1.0)
        weights = weights / weights.sum()
        return BaseDistribution(locations=tuple(locations), weights=tuple(weights))

    def to_dict(self) -> dict:
        return {"beta": [self.a, self.b]}


ZLaw = Union[BaseDistribution, BetaLaw]


def _pochhammer_ratio(top: float, bottom: float, n: int) -> float:
    return math.exp(log_pochhammer(top, n) - log_pochhammer(bottom, n))


def _cell_moments(alpha: float, base: BaseDistribution, n_max: int) -> np.ndarray:
    """E[Z_A^0..Z_A^{n_max}] for a Dirichlet mean with mass alpha and base G."""
    if base.is_degenerate:
        return base.locations[0] ** np.arange(n_max + 1, dtype=float)
    if 1 <= n_max <= get_config().numerics.max_moment_order:
        return mean_moments(DirichletMeanSpec(theta=alpha, base=base), n_max)
    return moment_recursion(alpha, base.moments(n_max), n_max)


def _series_terms(alpha: float, theta: float, trunc: int) -> np.ndarray:
    """(alpha)_n theta^n / n! for n = 0..trunc."""
    terms = np.zeros(trunc + 1)
    terms[0] = 1.0
    if theta == 0:
        return terms
    n = np.arange(1, trunc + 1)
    log_poch = np.array([log_pochhammer(alpha, k) for k in n])
    terms[1:] = np.exp(log_poch + n * math.log(theta) - gammaln(n + 1))
    return terms


class DirectingKernel(ABC):
    """
    Abstract base class for directing kernels.

    All kernels must implement:
    - correlation: rho_n on a partition for an index with |n| >= 1
    - scenarios: finite mixture of per-cell Dirichlet bases
    - merged: the kernel seen on a partition with two cells fused
    - realize: draws of the vector (Z_{A_1}, ..., Z_{A_d})
    """

    name: str = ""

    def check(self, part: PartitionSpec) -> "DirectingKernel":
        """Validate the kernel against a partition."""
        return self

    @abstractmethod
    def correlation(self, part: PartitionSpec, n: CorrelationIndex) -> float:
        pass

    @abstractmethod
    def scenarios(self, part: PartitionSpec, max_order: int) -> List[Scenario]:
        """
        Finite mixture (weight, [base per cell]) with
        rho_n = sum_w w prod_i E[M_i^{n_i}], M_i a Dirichlet mean with mass
        alpha_i and base G_i; exact for all |n| <= max_order.
        """
        pass

    @abstractmethod
    def merged(self, part: PartitionSpec, i: int, j: int) -> "DirectingKernel":
        pass

    @abstractmethod
    def realize(self, part: PartitionSpec, size: int, rng: np.random.Generator) -> np.ndarray:
        """``size`` draws of Z as an array of shape (size, d)."""
        pass

    def laplace_series(self, part: PartitionSpec, thetas: np.ndarray, trunc: int) -> float:
        """Truncated sum_n rho_n prod_i (alpha_i)_{n_i} theta_i^{n_i} / n_i!, n_i <= trunc."""
        total = 0.0
        for weight, bases in self.scenarios(part, trunc):
            factor = weight
            for alpha, base, theta in zip(part.alphas, bases, thetas):
                factor *= float(np.dot(_cell_moments(alpha, base, trunc), _series_terms(alpha, theta, trunc)))
            total += factor
        return total

    def closed_form_laplace(self, part: PartitionSpec, thetas: np.ndarray) -> Optional[float]:
        """
        E[(1 - theta M)^(-alpha)] per cell via the Markov-Krein identity,
        mixed over scenarios; None when no finite mixture exists.
        """
        total = 0.0
        for weight, bases in self.scenarios(part, 0):
            log_factor = 0.0
            for alpha, base, theta in zip(part.alphas, bases, thetas):
                log_factor -= alpha * base.expect(lambda s: math.log1p(-theta * s))
            total += weight * math.exp(log_factor)
        return total

    def to_dict(self) -> dict:
        return {"kernel": self.name}


class DegenerateConstant(DirectingKernel):
    """Q_x = delta_z: the extreme family, rho_n = z^{|n|}."""

    name = "degenerate"

    def __init__(self, z: float):
        if not 0.0 <= z <= 1.0:
            raise DomainError(f"z must lie in [0, 1], got {z}")
        self.z = float(z)

    def correlation(self, part, n):
        return self.z ** n.total

    def scenarios(self, part, max_order):
        return [(1.0, [BaseDistribution.point(self.z)] * part.dim)]

    def merged(self, part, i, j):
        return self

    def realize(self, part, size, rng):
        return np.full((size, part.dim), self.z)

    def to_dict(self):
        return {"kernel": self.name, "z": self.z}


class PerCellDistribution(DirectingKernel):
    """
    Deterministic kernel Q_x = delta_{zeta(x)}; cell i carries the pushforward
    G_i of P0 restricted to A_i, and Z_{A_i} is a Dirichlet mean.
    """

    name = "percell"

    def __init__(self, bases: Sequence[BaseDistribution]):
        bases = tuple(bases)
        if not bases or not all(isinstance(b, BaseDistribution) for b in bases):
            raise DomainError("PerCellDistribution needs one BaseDistribution per cell")
        self.bases = bases

    def check(self, part):
        if len(self.bases) != part.dim:
            raise DomainError(
                f"Kernel has {len(self.bases)} cell bases, partition has {part.dim} cells"
            )
        return self

    def correlation(self, part, n):
        value = 1.0
        for alpha, base, n_i in zip(part.alphas, self.bases, n):
            if n_i:
                value *= _cell_moments(alpha, base, n_i)[n_i]
        return value

    def scenarios(self, part, max_order):
        return [(1.0, list(self.bases))]

    def merged(self, part, i, j):
        lo, hi = min(i, j), max(i, j)
        bases = list(self.bases)
        bases[lo] = merge_bases(part.alphas[lo], bases[lo], part.alphas[hi], bases[hi])
        del bases[hi]
        return PerCellDistribution(bases)

    def realize(self, part, size, rng):
        columns = [
            sample_dirichlet_means(DirichletMeanSpec(theta=alpha, base=base), size, None, rng)
            for alpha, base in zip(part.alphas, self.bases)
        ]
        return np.column_stack(columns)

    def to_dict(self):
        return {"kernel": self.name, "bases": [b.to_dict() for b in self.bases]}


class RandomConstant(DirectingKernel):
    """Q_x = delta_Z for a random Z shared by all cells: rho_n = E[Z^{|n|}]."""

    name = "random"

    def __init__(self, law: ZLaw):
        if not isinstance(law, (BaseDistribution, BetaLaw)):
            raise DomainError("RandomConstant needs a BaseDistribution or BetaLaw")
        self.law = law

    def correlation(self, part, n):
        return self.law.moment(n.total)

    def _finite_law(self, max_order: int) -> BaseDistribution:
        if isinstance(self.law, BetaLaw):
            return self.law.to_base(max_order // 2 + 1)
        return self.law

    def scenarios(self, part, max_order):
        law = self._finite_law(max_order)
        return [(w, [BaseDistribution.point(z)] * part.dim) for z, w in law.atoms]

    def merged(self, part, i, j):
        return self

    def realize(self, part, size, rng):
        z = np.atleast_1d(self.law.sample(rng, size=size)).astype(float)
        return np.repeat(z[:, None], part.dim, axis=1)

    def laplace_series(self, part, thetas, trunc):
        # rho_n depends on |n| only: convolve the per-cell series.
        coeffs = np.ones(1)
        for alpha, theta in zip(part.alphas, thetas):
            coeffs = np.convolve(coeffs, _series_terms(alpha, theta, trunc))
        return float(np.dot(self.law.moments(coeffs.size - 1), coeffs))

    def closed_form_laplace(self, part, thetas):
        if isinstance(self.law, BetaLaw):
            return None
        return super().closed_form_laplace(part, thetas)

    def to_dict(self):
        return {"kernel": self.name, "law": self.law.to_dict()}


class CommonComponent(DirectingKernel):
    """
    Shared-component model: X = mu_1 + mu_0, Y = mu_2 + mu_0 with
    mu_0 ~ Gamma(eta alpha_i) and mu_1, mu_2 ~ Gamma((1 - eta) alpha_i) per cell,
    so rho_n = prod_i (eta alpha_i)_{n_i} / (alpha_i)_{n_i}.
    """

    name = "common"

    def __init__(self, eta: float):
        if not 0.0 < eta < 1.0:
            raise DomainError(f"eta must lie in (0, 1), got {eta}")
        self.eta = float(eta)

    def cell_base(self) -> BaseDistribution:
        """Per-cell base eta delta_1 + (1 - eta) delta_0 (Z_{A_i} ~ Beta(eta alpha_i, (1-eta) alpha_i))."""
        return BaseDistribution(locations=(0.0, 1.0), weights=(1.0 - self.eta, self.eta))

    def correlation(self, part, n):
        value = 1.0
        for alpha, n_i in zip(part.alphas, n):
            value *= _pochhammer_ratio(self.eta * alpha, alpha, n_i)
        return value

    def scenarios(self, part, max_order):
        return [(1.0, [self.cell_base()] * part.dim)]

    def merged(self, part, i, j):
        return self

    def realize(self, part, size, rng):
        alphas = part.as_array()
        return rng.beta(self.eta * alphas, (1.0 - self.eta) * alphas, size=(size, part.dim))

    def closed_form_laplace(self, part, thetas):
        return float(np.prod([(1.0 - th) ** (-self.eta * a) for a, th in zip(part.alphas, thetas)]))

    def to_dict(self):
        return {"kernel": self.name, "eta": self.eta}


def get_kernel(name: str, **params) -> DirectingKernel:
    """Get a directing kernel instance by name."""
    kernels = {
        "degenerate": DegenerateConstant,
        "percell": PerCellDistribution,
        "random": RandomConstant,
        "common": CommonComponent,
    }

    if name not in kernels:
        raise DomainError(f"Unknown kernel: {name}. Available: {list(kernels.keys())}")

    return kernels[name](**params)


def canonical_corr_exact(
    part: PartitionSpec, kernel: DirectingKernel, n: Union[CorrelationIndex, Sequence[int]]
) -> float:
    """rho_n(A_1, ..., A_d) for the given kernel."""
    n = CorrelationIndex.of(n).check(part)
    kernel.check(part)
    if n.total == 0:
        return 1.0
    return float(kernel.correlation(part, n))


def merge_corr(part: PartitionSpec, kernel: DirectingKernel, n: int, i: int, j: int) -> float:
    """
    Beta-binomial mixture
        sum_k C(n, k) (a_i)_k (a_j)_{n-k} / (a_i + a_j)_n  rho_{k e_i + (n-k) e_j},
    which must equal rho_n on the merged cell A_i u A_j.
    """
    part._check_pair(i, j)
    kernel.check(part)
    if int(n) != n or n < 0:
        raise DomainError(f"Degree must be a nonnegative integer, got {n}")
    n = int(n)
    a_i, a_j = part.alphas[i], part.alphas[j]
    total = 0.0
    for k in range(n + 1):
        log_weight = (
            math.log(math.comb(n, k))
            + log_pochhammer(a_i, k)
            + log_pochhammer(a_j, n - k)
            - log_pochhammer(a_i + a_j, n)
        )
        index = [0] * part.dim
        index[i], index[j] = k, n - k
        total += math.exp(log_weight) * canonical_corr_exact(part, kernel, index)
    return total


def merge_partition(
    part: PartitionSpec, kernel: DirectingKernel, i: int, j: int
) -> Tuple[PartitionSpec, DirectingKernel]:
    """The partition with cells i and j fused, and the kernel it inherits."""
    kernel.check(part)
    merged_part = part.merge(i, j)
    return merged_part, kernel.merged(part, i, j)


def merged_cell_corr(part: PartitionSpec, kernel: DirectingKernel, n: int, i: int, j: int) -> float:
    """rho_n of the merged cell computed directly on the merged partition."""
    merged_part, merged_kernel = merge_partition(part, kernel, i, j)
    return canonical_corr_exact(merged_part, merged_kernel, CorrelationIndex.unit(merged_part.dim, min(i, j), n))


def _laplace_thetas(part: PartitionSpec, s: Sequence[float], t: Sequence[float]) -> np.ndarray:
    s = np.atleast_1d(np.asarray(s, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if s.shape != (part.dim,) or t.shape != (part.dim,):
        raise DomainError(f"s and t must both have length {part.dim}")
    if np.any(s < 0) or np.any(t < 0):
        raise DomainError("Laplace arguments must be nonnegative")
    thetas = s * t / ((1.0 + s) * (1.0 + t))
    if np.any(thetas >= 1.0):
        raise DomainError("Series diverges for theta_i >= 1")
    return thetas


@dataclass(frozen=True)
class LaplaceSeries:
    """Truncated Laplace-ratio series and its dominating tail bound."""
    value: float
    tail_bound: float
    trunc: int


def joint_laplace_series(
    part: PartitionSpec,
    kernel: DirectingKernel,
    s: Sequence[float],
    t: Sequence[float],
    trunc: int,
) -> LaplaceSeries:
    """phi(f, g) / (phi(f) phi(g)) for simple f = sum s_i 1_{A_i}, g = sum t_i 1_{A_i}."""
    cap = get_config().numerics.max_laplace_trunc
    if int(trunc) != trunc or not 0 <= trunc <= cap:
        raise DomainError(f"trunc must be an integer in [0, {cap}], got {trunc}")
    trunc = int(trunc)
    kernel.check(part)
    thetas = _laplace_thetas(part, s, t)

    value = kernel.laplace_series(part, thetas, trunc)

    # rho <= 1, so the rho == 1 series dominates the tail.
    full = 1.0
    partial = 1.0
    for alpha, theta in zip(part.alphas, thetas):
        full *= (1.0 - theta) ** (-alpha)
        partial *= float(_series_terms(alpha, theta, trunc).sum())
    tail_bound = max(full - partial, 0.0)
    logger.debug("Laplace series truncated at %d, tail bound %.3e", trunc, tail_bound)
    return LaplaceSeries(value=value, tail_bound=tail_bound, trunc=trunc)


def joint_laplace_ratio(
    part: PartitionSpec,
    kernel: DirectingKernel,
    s: Sequence[float],
    t: Sequence[float],
    trunc: int,
) -> float:
    """Value of the truncated Laplace-ratio series."""
    return joint_laplace_series(part, kernel, s, t, trunc).value


def closed_form_laplace_ratio(
    part: PartitionSpec, kernel: DirectingKernel, s: Sequence[float], t: Sequence[float]
) -> Optional[float]:
    """Closed-form Laplace ratio where the kernel admits one, else None."""
    kernel.check(part)
    return kernel.closed_form_laplace(part, _laplace_thetas(part, s, t))


def extreme_joint_laplace(s: float, t: float, z: float, alpha: float) -> float:
    """E_z[exp(-sX - tY)] = ((1+s)(1+t) - z s t)^(-alpha)."""
    if s < 0 or t < 0:
        raise DomainError("Laplace arguments must be nonnegative")
    if not 0.0 <= z <= 1.0 or not alpha > 0:
        raise DomainError(f"Need z in [0, 1] and alpha > 0, got z={z}, alpha={alpha}")
    return ((1.0 + s) * (1.0 + t) - z * s * t) ** (-alpha)


def extreme_pair_density(x, y, z: float, alpha: float):
    """
    Joint density of the extreme pair with rho_n = z^n (Kibble's bivariate gamma):

        g(x) g(y) Gamma(alpha) / (1 - z) exp(-z (x + y) / (1 - z))
            (x y z)^{-(alpha - 1)/2} I_{alpha-1}(2 sqrt(x y z) / (1 - z)),

    g the Gamma(alpha, 1) density. Accepts arrays for x and y.
    """
    if not 0.0 < z < 1.0:
        raise DomainError(f"z must lie in (0, 1), got {z}")
    if not alpha > 0:
        raise DomainError(f"Gamma shape must be positive, got {alpha}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("Density arguments must be positive")

    xyz = x * y * z
    log_prefactor = (
        (alpha - 1.0) * (np.log(x) + np.log(y)) - x - y - 2.0 * gammaln(alpha)
        + gammaln(alpha) - math.log1p(-z)
        - z * (x + y) / (1.0 - z)
        - 0.5 * (alpha - 1.0) * np.log(xyz)
    )
    density = np.exp(log_prefactor) * bessel_i(alpha - 1.0, 2.0 * np.sqrt(xyz) / (1.0 - z))
    return density if np.ndim(density) else float(density)


def conditional_laplace_extreme(s: float, x: float, z: float, alpha: float) -> float:
    """E_z[exp(-sY) | X = x] = (1 + s(1-z))^(-alpha) exp(-x s z / (1 + s(1-z)))."""
    if s < 0 or x < 0:
        raise DomainError("s and x must be nonnegative")
    if not 0.0 <= z <= 1.0 or not alpha > 0:
        raise DomainError(f"Need z in [0, 1] and alpha > 0, got z={z}, alpha={alpha}")
    denom = 1.0 + s * (1.0 - z)
    return denom ** (-alpha) * math.exp(-x * s * z / denom)


@dataclass(frozen=True)
class BellComparison:
    """rho_n three ways: recursion, Bell form with (j-1)! alpha m_j, Bell form with j! c m_j."""
    recursion: float
    bell_form: float
    literal: float


def _bell_cell(n: int, alpha: float, args: List[float]) -> float:
    if n == 0:
        return 1.0
    return bell_complete(n, args) / math.exp(log_pochhammer(alpha, n))


def bell_form_comparison(
    part: PartitionSpec, kernel: DirectingKernel, n: Union[CorrelationIndex, Sequence[int]]
) -> BellComparison:
    """
    Canonical correlation by the moment recursion and by two Bell-polynomial
    expansions. The (j-1)! alpha_i m_j arguments reproduce the recursion;
    the j! c m_j arguments do not, and are reported for reference only.
    """
    n = CorrelationIndex.of(n).check(part)
    kernel.check(part)
    recursion = canonical_corr_exact(part, kernel, n)

    bell_form = 0.0
    literal = 0.0
    for weight, bases in kernel.scenarios(part, n.total):
        b_factor = l_factor = weight
        for alpha, base, n_i in zip(part.alphas, bases, n):
            moms = base.moments(n_i)
            b_args = [math.factorial(j - 1) * alpha * moms[j] for j in range(1, n_i + 1)]
            l_args = [math.factorial(j) * part.total_mass * moms[j] for j in range(1, n_i + 1)]
            b_factor *= _bell_cell(n_i, alpha, b_args)
            l_factor *= _bell_cell(n_i, alpha, l_args)
        bell_form += b_factor
        literal += l_factor
    return BellComparison(recursion=recursion, bell_form=bell_form, literal=literal)


__all__ = [
    "BetaLaw",
    "DirectingKernel",
    "DegenerateConstant",
    "PerCellDistribution",
    "RandomConstant",
    "CommonComponent",
    "get_kernel",
    "canonical_corr_exact",
    "merge_corr",
    "merge_partition",
    "merged_cell_corr",
    "LaplaceSeries",
    "joint_laplace_series",
    "joint_laplace_ratio",
    "closed_form_laplace_ratio",
    "extreme_joint_laplace",
    "extreme_pair_density",
    "conditional_laplace_extreme",
    "BellComparison",
    "bell_form_comparison",
]
