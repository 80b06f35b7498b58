"""
Shared value types for the gcrm package.

Every module exchanges these small validated dataclasses:

- PartitionSpec: masses alpha_i = c * P0(A_i) of a finite partition
- PolyIndex / CorrelationIndex: polynomial degrees
- DiscreteLaw and its two flavours, BaseDistribution (support in [0, 1])
  and JumpLaw (support in (0, inf))

The error hierarchy lives here too so that callers can catch
DomainError / RangeError without importing the numerical modules.
"""

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np


class GcrmError(Exception):
    """Root of all errors raised by the package."""


class DomainError(GcrmError, ValueError):
    """Parameters outside the domain of an operation."""


class RangeError(GcrmError, ArithmeticError):
    """Result or intermediate quantity outside the representable range."""


class ConfigurationError(GcrmError):
    """Experiment configuration that cannot be run."""


WEIGHT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DiscreteLaw:
    """A probability law with finitely many atoms."""
    locations: Tuple[float, ...]
    weights: Tuple[float, ...]

    def __post_init__(self):
        locations = tuple(float(v) for v in self.locations)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "locations", locations)
        object.__setattr__(self, "weights", weights)

        if not locations:
            raise DomainError("A discrete law needs at least one atom")
        if len(locations) != len(weights):
            raise DomainError(
                f"Got {len(locations)} locations but {len(weights)} weights"
            )
        if any(w < 0 or not np.isfinite(w) for w in weights):
            raise DomainError(f"Weights must be finite and nonnegative: {weights}")
        if abs(sum(weights) - 1.0) > WEIGHT_TOLERANCE:
            raise DomainError(f"Weights must sum to 1, got {sum(weights)!r}")
        self._check_support(locations)

    def _check_support(self, locations: Tuple[float, ...]):
        if any(not np.isfinite(v) for v in locations):
            raise DomainError(f"Atom locations must be finite: {locations}")

    @classmethod
    def from_atoms(cls, atoms: Iterable[Tuple[float, float]]):
        """Build a law from (location, probability) pairs."""
        pairs = list(atoms)
        return cls(
            locations=tuple(loc for loc, _ in pairs),
            weights=tuple(prob for _, prob in pairs),
        )

    @classmethod
    def point(cls, location: float):
        """Dirac mass at ``location``."""
        return cls(locations=(location,), weights=(1.0,))

    @property
    def atoms(self) -> Tuple[Tuple[float, float], ...]:
        return tuple(zip(self.locations, self.weights))

    @property
    def is_degenerate(self) -> bool:
        """True when the law has a single atom."""
        return len(self.locations) == 1

    def mean(self) -> float:
        return float(np.dot(self.locations, self.weights))

    def moment(self, j: int) -> float:
        """j-th raw moment sum_k w_k * s_k**j."""
        locs = np.asarray(self.locations)
        return float(np.dot(self.weights, locs ** j))

    def moments(self, n_max: int) -> np.ndarray:
        """Raw moments of orders 0..n_max."""
        locs = np.asarray(self.locations)[None, :]
        orders = np.arange(n_max + 1)[:, None]
        return (locs ** orders) @ np.asarray(self.weights)

    def expect(self, func) -> float:
        """Exact expectation of ``func`` over the atoms."""
        values = np.array([func(loc) for loc in self.locations], dtype=float)
        return float(np.dot(self.weights, values))

    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        """
        Draw from the law.

        A one-atom law returns its location without touching ``rng``,
        so degenerate laws leave the stream where it was.
        """
        if self.is_degenerate:
            if size is None:
                return self.locations[0]
            return np.full(size, self.locations[0])
        idx = rng.choice(len(self.locations), size=size, p=self.weights)
        if size is None:
            return self.locations[int(idx)]
        return np.asarray(self.locations)[idx]

    def to_dict(self) -> dict:
        return {"locations": list(self.locations), "weights": list(self.weights)}


class BaseDistribution(DiscreteLaw):
    """Finite-support law on [0, 1], the base of a Dirichlet random mean."""

    def _check_support(self, locations):
        super()._check_support(locations)
        if any(v < 0.0 or v > 1.0 for v in locations):
            raise DomainError(f"Base locations must lie in [0, 1]: {locations}")


class JumpLaw(DiscreteLaw):
    """Finite-support law of subordinator jump sizes on (0, inf)."""

    def _check_support(self, locations):
        super()._check_support(locations)
        if any(v <= 0.0 for v in locations):
            raise DomainError(f"Jump sizes must be positive: {locations}")


@dataclass(frozen=True)
class PolyIndex:
    """Degree n and gamma shape alpha of a monic Laguerre polynomial."""
    n: int
    alpha: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"Polynomial degree must be a nonnegative integer, got {self.n}")
        if not self.alpha > 0:
            raise DomainError(f"Gamma shape must be positive, got {self.alpha}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "alpha", float(self.alpha))


@dataclass(frozen=True)
class PartitionSpec:
    """
    Finite-dimensional stage of a gamma CRM with parameter measure c*P0.

    ``alphas[i]`` is c*P0(A_i) for disjoint cells A_1..A_d; ``total_mass``
    is c and defaults to the sum of the cells (a partition exhausting the
    space).
    """
    alphas: Tuple[float, ...]
    total_mass: Optional[float] = None

    def __post_init__(self):
        alphas = tuple(float(a) for a in np.atleast_1d(self.alphas))
        object.__setattr__(self, "alphas", alphas)
        if not alphas:
            raise DomainError("A partition needs at least one cell")
        if any(not a > 0 or not np.isfinite(a) for a in alphas):
            raise DomainError(f"Cell masses must be positive and finite: {alphas}")

        total = sum(alphas) if self.total_mass is None else float(self.total_mass)
        if total < sum(alphas) * (1.0 - WEIGHT_TOLERANCE):
            raise DomainError(
                f"Cell masses sum to {sum(alphas)!r}, above total mass {total!r}"
            )
        object.__setattr__(self, "total_mass", total)

    @property
    def dim(self) -> int:
        return len(self.alphas)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.alphas, dtype=float)

    def merge(self, i: int, j: int) -> "PartitionSpec":
        """Partition with cells i and j fused into position min(i, j)."""
        i, j = self._check_pair(i, j)
        lo, hi = min(i, j), max(i, j)
        alphas = list(self.alphas)
        alphas[lo] = alphas[lo] + alphas[hi]
        del alphas[hi]
        return PartitionSpec(alphas=tuple(alphas), total_mass=self.total_mass)

    def _check_pair(self, i: int, j: int) -> Tuple[int, int]:
        if i == j:
            raise DomainError("Merging needs two distinct cells")
        for k in (i, j):
            if not 0 <= k < self.dim:
                raise DomainError(f"Cell {k} outside partition of dimension {self.dim}")
        return int(i), int(j)

    def to_dict(self) -> dict:
        return {"alphas": list(self.alphas), "total_mass": self.total_mass}


@dataclass(frozen=True)
class CorrelationIndex:
    """Multi-index n = (n_1, ..., n_d) of a canonical correlation."""
    n: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        values = tuple(np.atleast_1d(self.n).tolist())
        if any(int(v) != v or v < 0 for v in values):
            raise DomainError(f"Index entries must be nonnegative integers: {values}")
        object.__setattr__(self, "n", tuple(int(v) for v in values))

    @classmethod
    def of(cls, value: Union["CorrelationIndex", int, Sequence[int]]) -> "CorrelationIndex":
        if isinstance(value, CorrelationIndex):
            return value
        return cls(n=tuple(np.atleast_1d(value).tolist()))

    @classmethod
    def unit(cls, dim: int, cell: int, degree: int = 1) -> "CorrelationIndex":
        values = [0] * dim
        values[cell] = degree
        return cls(n=tuple(values))

    @property
    def total(self) -> int:
        """|n|."""
        return sum(self.n)

    @property
    def dim(self) -> int:
        return len(self.n)

    def check(self, part: PartitionSpec) -> "CorrelationIndex":
        if self.dim != part.dim:
            raise DomainError(
                f"Index of length {self.dim} does not match partition of dimension {part.dim}"
            )
        return self

    def label(self) -> str:
        return ":".join(str(v) for v in self.n)

    def __iter__(self):
        return iter(self.n)

    def __getitem__(self, item):
        return self.n[item]
