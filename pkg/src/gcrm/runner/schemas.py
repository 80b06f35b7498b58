"""
Pydantic Schemas for Experiment Configuration
"""

import math
import re
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from ..base import BaseDistribution, ConfigurationError, CorrelationIndex, JumpLaw
from ..kernels import BetaLaw

SUBCOMMANDS = (
    "orthogonality",
    "genfun-check",
    "pair-corr",
    "merge-check",
    "dirichlet-moments",
    "stieltjes-check",
    "density-check",
    "laplace-ratio",
    "subordinate",
    "poisson-embed",
)

_MISSING = object()
_LOG_REAL = re.compile(r"^log\s*\(?\s*([^()]+?)\s*\)?$")


def parse_real(text: str) -> float:
    """A real number; ``logX`` / ``log(X)`` means the natural log of X."""
    text = str(text).strip()
    match = _LOG_REAL.match(text)
    try:
        value = math.log(float(match.group(1))) if match else float(text)
    except ValueError as e:
        raise ConfigurationError(f"Cannot parse real number from {text!r}") from e
    if math.isnan(value):
        raise ConfigurationError(f"Not a number: {text!r}")
    return value


def parse_atoms(text: str) -> List[Tuple[float, float]]:
    """``loc@weight,loc@weight`` or a single ``loc`` (a point mass)."""
    atoms = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        loc, _, weight = item.partition("@")
        atoms.append((parse_real(loc), parse_real(weight) if weight else 1.0))
    if not atoms:
        raise ConfigurationError(f"No atoms in {text!r}")
    return atoms


class ExperimentConfig(BaseModel):
    """One runner invocation: subcommand, string parameters, seed, samples, output."""
    subcommand: str
    params: Dict[str, str] = Field(default_factory=dict)
    seed: int = Field(..., ge=0, lt=2 ** 64)
    samples: int = Field(..., ge=1)
    output: Optional[str] = None

    @field_validator("subcommand")
    @classmethod
    def _known_subcommand(cls, value: str) -> str:
        if value not in SUBCOMMANDS:
            raise ValueError(f"unknown subcommand {value!r}")
        return value

    @field_validator("params")
    @classmethod
    def _normalise_keys(cls, value: Dict[str, str]) -> Dict[str, str]:
        return {k.strip().replace("-", "_"): str(v).strip() for k, v in value.items()}

    def describe(self) -> dict:
        """Parameter map recorded in every CSV row."""
        return {**self.params, "seed": self.seed, "samples": self.samples}

    # Typed accessors; a missing key without default is a configuration error.

    def raw(self, key: str, default=_MISSING) -> str:
        if key in self.params:
            return self.params[key]
        if default is _MISSING:
            raise ConfigurationError(f"{self.subcommand}: missing required parameter --{key.replace('_', '-')}")
        return default

    def has(self, key: str) -> bool:
        return key in self.params

    def real(self, key: str, default=_MISSING) -> float:
        value = self.raw(key, default)
        return value if not isinstance(value, str) else parse_real(value)

    def integer(self, key: str, default=_MISSING) -> int:
        value = self.raw(key, default)
        if not isinstance(value, str):
            return value
        try:
            return int(value)
        except ValueError as e:
            raise ConfigurationError(f"--{key.replace('_', '-')} expects an integer, got {value!r}") from e

    def reals(self, key: str, default=_MISSING) -> List[float]:
        value = self.raw(key, default)
        if not isinstance(value, str):
            return list(value)
        return [parse_real(v) for v in value.split(",") if v.strip()]

    def choice(self, key: str, options, default=_MISSING) -> str:
        value = self.raw(key, default)
        if value not in options:
            raise ConfigurationError(f"--{key.replace('_', '-')} must be one of {list(options)}, got {value!r}")
        return value

    def indices(self, key: str, dim: int, default=_MISSING) -> List[CorrelationIndex]:
        """``1,2,3`` (one cell) or ``1:0,0:1,1:1`` (cells separated by ':')."""
        value = self.raw(key, default)
        if not isinstance(value, str):
            return list(value)
        result = []
        for item in value.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                n = CorrelationIndex(tuple(int(v) for v in item.split(":")))
            except ValueError as e:
                raise ConfigurationError(f"Bad index {item!r}") from e
            if n.dim != dim:
                raise ConfigurationError(f"Index {item!r} has {n.dim} cells, expected {dim}")
            result.append(n)
        if not result:
            raise ConfigurationError(f"--{key.replace('_', '-')} lists no indices")
        return result

    def base(self, key: str, default=_MISSING) -> BaseDistribution:
        return BaseDistribution.from_atoms(parse_atoms(self.raw(key, default)))

    def bases(self, key: str, dim: int) -> List[BaseDistribution]:
        """Per-cell bases separated by ';'; a single base is reused for every cell."""
        parts = [p for p in self.raw(key).split(";") if p.strip()]
        if len(parts) == 1:
            parts = parts * dim
        if len(parts) != dim:
            raise ConfigurationError(f"--{key} gives {len(parts)} bases for {dim} cells")
        return [BaseDistribution.from_atoms(parse_atoms(p)) for p in parts]

    def jump_law(self, key: str) -> JumpLaw:
        return JumpLaw.from_atoms(parse_atoms(self.raw(key)))

    def z_law(self, key: str):
        """``beta:a,b`` for a Beta law, otherwise finite atoms on [0, 1]."""
        text = self.raw(key)
        if text.startswith("beta:"):
            params = [parse_real(v) for v in text[len("beta:"):].split(",")]
            if len(params) != 2:
                raise ConfigurationError(f"Beta law needs two parameters, got {text!r}")
            return BetaLaw(*params)
        return BaseDistribution.from_atoms(parse_atoms(text))

    def vectors(self, key: str, dim: int) -> Tuple[List[List[float]], List[float]]:
        """``b1:b2@w;b1:b2@w`` mixture of d-vectors."""
        vectors, weights = [], []
        for item in self.raw(key).split(";"):
            item = item.strip()
            if not item:
                continue
            vec, _, weight = item.partition("@")
            values = [parse_real(v) for v in vec.split(":")]
            if len(values) == 1:
                values = values * dim
            if len(values) != dim:
                raise ConfigurationError(f"Vector {vec!r} has {len(values)} entries, expected {dim}")
            vectors.append(values)
            weights.append(parse_real(weight) if weight else None)
        if not vectors:
            raise ConfigurationError(f"--{key} lists no vectors")
        if all(w is None for w in weights):
            weights = [1.0 / len(vectors)] * len(vectors)
        elif any(w is None for w in weights):
            raise ConfigurationError(f"--{key}: give a weight for every vector or none")
        return vectors, weights
