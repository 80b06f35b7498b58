"""
Pair samplers for canonically correlated gamma vectors.

Every sampler takes an explicit ``numpy.random.Generator``. Per-draw
functions (algorithm_a1 .. algorithm_a4, dw_transition_step,
sample_pair_general) carry the reference semantics; the ``*_batch``
functions draw many pairs at once and return a PairBatch.

Construction shared by all of them: X is a stationary gamma vector, and
given X and b_i = Z_i / (1 - Z_i), cell i gets N_i ~ Poisson(b_i X_i) and
Y_i ~ Gamma(alpha_i + N_i, scale 1 / (1 + b_i)). Z_i = 1 copies the cell.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .base import BaseDistribution, DomainError, PartitionSpec, RangeError
from .config import get_config
from .kernels import BetaLaw, CommonComponent, DirectingKernel

logger = logging.getLogger(__name__)


@dataclass
class PairBatch:
    """N pairs (X, Y) of d-vectors with the seed and generator description."""
    x: np.ndarray
    y: np.ndarray
    seed: Optional[int] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if y.ndim == 1:
            y = y[:, None]
        if x.shape != y.shape or x.ndim != 2:
            raise DomainError(f"x and y must be N x d matrices of equal shape, got {x.shape} and {y.shape}")
        if np.any(x < 0) or np.any(y < 0):
            raise DomainError("Pair entries must be nonnegative")
        self.x, self.y = x, y

    @property
    def size(self) -> int:
        return self.x.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def swapped(self) -> "PairBatch":
        """The same pairs with the roles of x and y exchanged."""
        return PairBatch(x=self.y, y=self.x, seed=self.seed, meta=dict(self.meta, swapped=True))

    def concat(self, other: "PairBatch") -> "PairBatch":
        if other.dim != self.dim:
            raise DomainError("Cannot pool batches of different dimension")
        return PairBatch(
            x=np.vstack([self.x, other.x]),
            y=np.vstack([self.y, other.y]),
            seed=self.seed,
            meta=dict(self.meta, pooled_with=other.seed),
        )


class FiniteVectorLaw:
    """
    Finite mixture of point masses on [0, inf)^d, used as the law P* of the
    vector B in algorithm A.2. Callable as ``law(rng)`` or ``law(rng, size)``.
    """

    def __init__(self, vectors: Sequence[Sequence[float]], weights: Optional[Sequence[float]] = None):
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        if np.any(vectors < 0):
            raise DomainError("P* must be supported on nonnegative vectors")
        if weights is None:
            weights = np.full(len(vectors), 1.0 / len(vectors))
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(vectors),) or np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise DomainError("P* weights must be nonnegative, one per vector, summing to 1")
        self.vectors = vectors
        self.weights = weights

    @classmethod
    def point(cls, vector: Sequence[float]) -> "FiniteVectorLaw":
        return cls([vector])

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __call__(self, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
        if len(self.vectors) == 1:
            if size is None:
                return self.vectors[0].copy()
            return np.repeat(self.vectors, size, axis=0)
        idx = rng.choice(len(self.vectors), size=size, p=self.weights)
        return self.vectors[idx].copy()

    def to_dict(self) -> dict:
        return {"vectors": self.vectors.tolist(), "weights": self.weights.tolist()}


def derive_streams(seed: int, count: int) -> List[np.random.Generator]:
    """Independent generators spawned from one seed, for fan-out over batches."""
    if count < 1:
        raise DomainError(f"Need at least one stream, got {count}")
    children = np.random.SeedSequence(seed).spawn(count)
    logger.debug("Derived %d streams from seed %d", count, seed)
    return [np.random.default_rng(child) for child in children]


def dw_z(t: float, criticality: float = 1.0) -> float:
    """Autocorrelation parameter z = exp(-criticality * t / 2) of the DW process."""
    if t < 0 or criticality <= 0:
        raise DomainError(f"Need t >= 0 and criticality > 0, got t={t}, criticality={criticality}")
    return math.exp(-criticality * t / 2.0)


def _b_from_z(z) -> np.ndarray:
    """b = z / (1 - z), infinite where z == 1."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z > 1):
        raise DomainError("Correlation parameter z must lie in [0, 1]")
    with np.errstate(divide="ignore"):
        return np.where(z >= 1.0, np.inf, z / np.where(z >= 1.0, 1.0, 1.0 - z))


def _check_poisson_mean(mean) -> None:
    limit = get_config().numerics.max_poisson_mean
    if np.any(mean > limit):
        raise RangeError(f"Poisson mean {np.max(mean):.3e} exceeds {limit:.0e}")


def _conditional_y(x: np.ndarray, b: np.ndarray, alphas: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Per-cell A.1 conditionals: Y_i ~ Gamma(alpha_i + Poisson(b_i x_i), 1 / (1 + b_i))."""
    x = np.asarray(x, dtype=float)
    b = np.broadcast_to(np.asarray(b, dtype=float), x.shape)
    copy = np.isinf(b)
    finite_b = np.where(copy, 0.0, b)
    mean = finite_b * x
    _check_poisson_mean(mean)
    counts = rng.poisson(mean)
    y = rng.gamma(alphas + counts, 1.0 / (1.0 + finite_b))
    return np.where(copy, x, y)


def check_masses(x, part: PartitionSpec, name: str = "x") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (part.dim,):
        raise DomainError(f"{name} must have {part.dim} cells, got shape {x.shape}")
    if np.any(x < 0):
        raise DomainError(f"{name} must be nonnegative")
    return x


def sample_gamma_vector(part: PartitionSpec, rng: np.random.Generator) -> np.ndarray:
    """Independent Gamma(alpha_i, 1) masses, one per cell."""
    return rng.gamma(part.as_array())


def sample_gamma_vectors(part: PartitionSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    return rng.gamma(part.as_array(), size=(size, part.dim))


def algorithm_a1(alpha: float, b: float, rng: np.random.Generator) -> Tuple[float, float]:
    """
    X ~ Gamma(alpha, 1); N | X ~ Poisson(bX); Y | N ~ Gamma(alpha + N, 1/(1+b)).
    The pair has rho_n = z^n with z = b / (1 + b).
    """
    if not alpha > 0:
        raise DomainError(f"Gamma shape must be positive, got {alpha}")
    if not b >= 0:
        raise DomainError(f"b must be nonnegative, got {b}")
    x = rng.gamma(alpha)
    y = _conditional_y(np.array([x]), np.array([b]), np.array([alpha]), rng)
    return float(x), float(y[0])


def algorithm_a1_batch(alpha: float, b: float, size: int, rng: np.random.Generator, seed: Optional[int] = None) -> PairBatch:
    if not alpha > 0:
        raise DomainError(f"Gamma shape must be positive, got {alpha}")
    if not b >= 0:
        raise DomainError(f"b must be nonnegative, got {b}")
    alphas = np.array([alpha])
    x = rng.gamma(alpha, size=(size, 1))
    y = _conditional_y(x, b, alphas, rng)
    return PairBatch(x=x, y=y, seed=seed, meta={"sampler": "a1", "alpha": alpha, "b": b})


def sample_directed_pairs(part: PartitionSpec, z, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    Stationary X and per-cell A.1 conditionals for realised Z.

    ``z`` is a d-vector (one pair) or an N x d matrix (N pairs).
    """
    z = np.asarray(z, dtype=float)
    if z.shape[-1:] != (part.dim,):
        raise DomainError(f"z must have {part.dim} cells, got shape {z.shape}")
    b = _b_from_z(z)
    alphas = part.as_array()
    x = rng.gamma(alphas, size=z.shape)
    return x, _conditional_y(x, b, alphas, rng)


def algorithm_a2(
    part: PartitionSpec, pstar_sampler: Callable, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draw B ~ P*, then d conditionally independent A.1 runs with (alpha_j, B_j).
    Canonical correlations are E[prod Z_i^{n_i}] with Z_i = B_i / (1 + B_i).
    """
    b = check_masses(pstar_sampler(rng), part, "P* draw")
    alphas = part.as_array()
    x = rng.gamma(alphas)
    return x, _conditional_y(x, b, alphas, rng)


def algorithm_a2_batch(
    part: PartitionSpec, pstar_sampler: Callable, size: int, rng: np.random.Generator, seed: Optional[int] = None
) -> PairBatch:
    b = check_masses(pstar_sampler(rng, size), part, "P* draws")
    alphas = part.as_array()
    x = rng.gamma(alphas, size=(size, part.dim))
    y = _conditional_y(x, b, alphas, rng)
    meta = {"sampler": "a2", "alphas": list(part.alphas)}
    if hasattr(pstar_sampler, "to_dict"):
        meta["pstar"] = pstar_sampler.to_dict()
    return PairBatch(x=x, y=y, seed=seed, meta=meta)


def _a3_rows(b: np.ndarray, x: np.ndarray, alphas: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Vectorised A.3 over rows of x with one b per row."""
    copy = np.isinf(b)
    finite_b = np.where(copy, 0.0, b)
    totals = x.sum(axis=1)
    mean = finite_b * totals
    _check_poisson_mean(mean)
    n = rng.poisson(mean)
    safe_totals = np.where(totals > 0, totals, 1.0)
    pvals = np.where(totals[:, None] > 0, x / safe_totals[:, None], 1.0 / x.shape[1])
    counts = rng.multinomial(n, pvals)
    y = rng.gamma(alphas + counts, (1.0 / (1.0 + finite_b))[:, None])
    return np.where(copy[:, None], x, y)


def algorithm_a3(b: float, x, part: PartitionSpec, rng: np.random.Generator) -> np.ndarray:
    """
    N ~ Poisson(b |x|), (N_1..N_d) ~ Multinomial(N; x_i / |x|),
    Y_i ~ Gamma(alpha_i + N_i, 1 / (1 + b)). |x| = 0 gives N = 0; b = inf copies x.
    """
    if not b >= 0:
        raise DomainError(f"b must be nonnegative, got {b}")
    x = check_masses(x, part)
    if math.isinf(b):
        return x.copy()
    total = x.sum()
    mean = b * total
    _check_poisson_mean(mean)
    n = rng.poisson(mean)
    counts = rng.multinomial(n, x / total) if n > 0 else np.zeros(part.dim, dtype=int)
    return rng.gamma(part.as_array() + counts, 1.0 / (1.0 + b))


def algorithm_a3_batch(
    b: float,
    part: PartitionSpec,
    size: int,
    rng: np.random.Generator,
    x: Optional[np.ndarray] = None,
    seed: Optional[int] = None,
) -> PairBatch:
    """A.3 from stationary inputs (or the given N x d ``x``)."""
    if not b >= 0:
        raise DomainError(f"b must be nonnegative, got {b}")
    alphas = part.as_array()
    if x is None:
        x = rng.gamma(alphas, size=(size, part.dim))
    x = check_masses(np.atleast_2d(x), part)
    y = _a3_rows(np.full(x.shape[0], float(b)), x, alphas, rng)
    return PairBatch(x=x, y=y, seed=seed, meta={"sampler": "a3", "b": b, "alphas": list(part.alphas)})


ZLaw = Union[BaseDistribution, BetaLaw]


def algorithm_a4(pz: ZLaw, x, part: PartitionSpec, rng: np.random.Generator) -> np.ndarray:
    """Z ~ pz, then A.3 with b = Z / (1 - Z); Z = 1 returns x."""
    z = float(pz.sample(rng))
    return algorithm_a3(float(_b_from_z(z)), x, part, rng)


def algorithm_a4_batch(
    pz: ZLaw,
    part: PartitionSpec,
    size: int,
    rng: np.random.Generator,
    x: Optional[np.ndarray] = None,
    seed: Optional[int] = None,
) -> PairBatch:
    alphas = part.as_array()
    if x is None:
        x = rng.gamma(alphas, size=(size, part.dim))
    x = check_masses(np.atleast_2d(x), part)
    z = np.asarray(pz.sample(rng, size=x.shape[0]), dtype=float)
    y = _a3_rows(_b_from_z(z), x, alphas, rng)
    return PairBatch(x=x, y=y, seed=seed, meta={"sampler": "a4", "pz": pz.to_dict(), "alphas": list(part.alphas)})


def dw_transition_step(m, z: float, part: PartitionSpec, rng: np.random.Generator) -> np.ndarray:
    """One Gamma-DW transition on the partition: A.3 with b = z / (1 - z)."""
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"z must lie in [0, 1], got {z}")
    return algorithm_a3(float(_b_from_z(z)), m, part, rng)


def dw_transition_batch(m: np.ndarray, z, part: PartitionSpec, rng: np.random.Generator) -> np.ndarray:
    """Rows of ``m`` each advanced by one transition; ``z`` scalar or one per row."""
    m = check_masses(np.atleast_2d(m), part, "m")
    z = np.broadcast_to(np.asarray(z, dtype=float), (m.shape[0],))
    return _a3_rows(_b_from_z(z), m, part.as_array(), rng)


def dw_pair_batch(z: float, part: PartitionSpec, size: int, rng: np.random.Generator, seed: Optional[int] = None) -> PairBatch:
    """Stationary DW pairs (m, m') one transition apart."""
    x = sample_gamma_vectors(part, size, rng)
    y = dw_transition_batch(x, z, part, rng)
    return PairBatch(x=x, y=y, seed=seed, meta={"sampler": "dw", "z": z, "alphas": list(part.alphas)})


def common_component_parts(
    part: PartitionSpec, eta: float, size: int, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Independent gamma vectors mu_0 ~ Gamma(eta alpha), mu_1, mu_2 ~ Gamma((1 - eta) alpha)."""
    CommonComponent(eta)
    alphas = part.as_array()
    mu0 = rng.gamma(eta * alphas, size=(size, part.dim))
    mu1 = rng.gamma((1.0 - eta) * alphas, size=(size, part.dim))
    mu2 = rng.gamma((1.0 - eta) * alphas, size=(size, part.dim))
    return mu0, mu1, mu2


def sample_common_component(
    part: PartitionSpec, eta: float, size: int, rng: np.random.Generator, seed: Optional[int] = None
) -> PairBatch:
    """X = mu_1 + mu_0, Y = mu_2 + mu_0."""
    mu0, mu1, mu2 = common_component_parts(part, eta, size, rng)
    return PairBatch(
        x=mu1 + mu0, y=mu2 + mu0, seed=seed,
        meta={"sampler": "common", "eta": eta, "alphas": list(part.alphas)},
    )


def sample_pair_general(
    part: PartitionSpec, kernel: DirectingKernel, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """One pair whose canonical correlations are those of ``kernel``."""
    kernel.check(part)
    if isinstance(kernel, CommonComponent):
        batch = sample_common_component(part, kernel.eta, 1, rng)
        return batch.x[0], batch.y[0]
    z = kernel.realize(part, 1, rng)[0]
    return sample_directed_pairs(part, z, rng)


def sample_pair_general_batch(
    part: PartitionSpec, kernel: DirectingKernel, size: int, rng: np.random.Generator, seed: Optional[int] = None
) -> PairBatch:
    kernel.check(part)
    if isinstance(kernel, CommonComponent):
        batch = sample_common_component(part, kernel.eta, size, rng, seed=seed)
        batch.meta = {"sampler": "general", **kernel.to_dict(), "alphas": list(part.alphas)}
        return batch
    z = kernel.realize(part, size, rng)
    x, y = sample_directed_pairs(part, z, rng)
    return PairBatch(x=x, y=y, seed=seed, meta={"sampler": "general", **kernel.to_dict(), "alphas": list(part.alphas)})


__all__ = [
    "PairBatch",
    "FiniteVectorLaw",
    "derive_streams",
    "dw_z",
    "sample_gamma_vector",
    "sample_gamma_vectors",
    "algorithm_a1",
    "algorithm_a1_batch",
    "sample_directed_pairs",
    "algorithm_a2",
    "algorithm_a2_batch",
    "algorithm_a3",
    "algorithm_a3_batch",
    "algorithm_a4",
    "algorithm_a4_batch",
    "dw_transition_step",
    "dw_transition_batch",
    "dw_pair_batch",
    "common_component_parts",
    "sample_common_component",
    "sample_pair_general",
    "sample_pair_general_batch",
]
