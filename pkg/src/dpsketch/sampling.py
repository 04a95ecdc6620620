"""Distributions over coordinate subsets and the unbiased diagonal sketch.

A sketch selects a random subset S of {0, ..., d-1} and rescales the
selected coordinates by their inverse inclusion probabilities, so that
the sketched vector is unbiased: E[C x] = x.  Sketches are kept sparse
(selected indices plus reciprocals); the dense d x d diagonal is never
materialized, so per-step cost scales with |S|.

Randomness contract (fixed for byte-reproducible output): callers pass a
``numpy.random.Generator`` (``default_rng(seed)``, PCG64).  Each draw
consumes, in order:

- full sampling: nothing (the subset is deterministic);
- singleton and block sampling: one uniform via ``rng.random()``,
  mapped through the inverse CDF of the category probabilities;
- tau-nice sampling: tau integers via ``rng.integers(i, d)``
  (partial Fisher-Yates, O(tau) expected work).

Indices are 0-based everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_positive_diagonal, as_vector

__all__ = [
    "SamplingDistribution",
    "FullSampling",
    "SingletonSampling",
    "BlockSampling",
    "NiceSampling",
    "Sketch",
    "inclusion_probabilities",
    "sample_subset",
    "sketch_apply",
]

_PROB_SUM_TOL = 1e-12


def _validate_category_probs(probs: np.ndarray, what: str) -> np.ndarray:
    probs = as_vector(probs)
    if np.any(probs <= 0.0):
        raise ValueError(f"{what} must be strictly positive (proper distribution)")
    if abs(float(probs.sum()) - 1.0) > _PROB_SUM_TOL:
        raise ValueError(f"{what} must sum to 1 (got {probs.sum()!r})")
    return probs


def _inverse_cdf_draw(cumulative: np.ndarray, rng: np.random.Generator) -> int:
    u = rng.random()
    idx = int(np.searchsorted(cumulative, u, side="right"))
    return min(idx, len(cumulative) - 1)


class SamplingDistribution:
    """Base class; concrete variants implement the sampling protocol."""

    dimension: int

    def inclusion_probabilities(self) -> np.ndarray:
        """Per-coordinate probability p_j that coordinate j is selected."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Draw a subset; returns a sorted array of selected indices."""
        raise NotImplementedError

    @property
    def enumerable(self) -> bool:
        """True when the subsets in the range can be listed explicitly."""
        return True

    def subset_keys(self) -> list[str]:
        """Stable identifiers for every subset in the range."""
        raise NotImplementedError

    def subset_key(self, indices: np.ndarray) -> str:
        """Identifier of the subset containing exactly these indices."""
        raise NotImplementedError


@dataclass(frozen=True)
class FullSampling(SamplingDistribution):
    """S = {0, ..., d-1} with probability one."""

    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")

    def inclusion_probabilities(self) -> np.ndarray:
        return as_positive_diagonal(np.ones(self.dimension), max_value=1.0)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return np.arange(self.dimension)

    def subset_keys(self) -> list[str]:
        return ["full"]

    def subset_key(self, indices: np.ndarray) -> str:
        return "full"


@dataclass(frozen=True)
class SingletonSampling(SamplingDistribution):
    """S = {j} with probability probs[j]."""

    probs: np.ndarray
    dimension: int = field(init=False)
    _cumulative: np.ndarray = field(init=False, repr=False)

    def __init__(self, probs):
        probs = _validate_category_probs(probs, "singleton probabilities")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "dimension", len(probs))
        object.__setattr__(self, "_cumulative", np.cumsum(probs))

    @classmethod
    def uniform(cls, dimension: int) -> "SingletonSampling":
        return cls(np.full(dimension, 1.0 / dimension))

    def inclusion_probabilities(self) -> np.ndarray:
        return as_positive_diagonal(self.probs, max_value=1.0)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return np.array([_inverse_cdf_draw(self._cumulative, rng)])

    def subset_keys(self) -> list[str]:
        return [f"coord:{j}" for j in range(self.dimension)]

    def subset_key(self, indices: np.ndarray) -> str:
        return f"coord:{int(indices[0])}"


@dataclass(frozen=True)
class BlockSampling(SamplingDistribution):
    """S = A_i with probability probs[i], for a partition A_1..A_b of [d]."""

    blocks: tuple[tuple[int, ...], ...]
    probs: np.ndarray
    dimension: int = field(init=False)
    block_of: np.ndarray = field(init=False, repr=False)
    _cumulative: np.ndarray = field(init=False, repr=False)

    def __init__(self, blocks, probs):
        blocks = tuple(tuple(sorted(int(j) for j in block)) for block in blocks)
        if not blocks or any(len(b) == 0 for b in blocks):
            raise ValueError("every block must be nonempty")
        flat = [j for block in blocks for j in block]
        dimension = len(flat)
        if sorted(flat) != list(range(dimension)):
            raise ValueError("blocks must partition 0..d-1 (disjoint, exhaustive)")
        probs = _validate_category_probs(probs, "block probabilities")
        if len(probs) != len(blocks):
            raise ValueError("need one probability per block")
        block_of = np.empty(dimension, dtype=np.int64)
        for i, block in enumerate(blocks):
            block_of[list(block)] = i
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "block_of", block_of)
        object.__setattr__(self, "_cumulative", np.cumsum(probs))

    @classmethod
    def contiguous(cls, dimension: int, n_blocks: int, probs) -> "BlockSampling":
        """Partition 0..d-1 into n_blocks contiguous, near-equal blocks."""
        if not 1 <= n_blocks <= dimension:
            raise ValueError("need 1 <= n_blocks <= dimension")
        bounds = np.linspace(0, dimension, n_blocks + 1).astype(int)
        blocks = [tuple(range(bounds[i], bounds[i + 1])) for i in range(n_blocks)]
        return cls(blocks, probs)

    def inclusion_probabilities(self) -> np.ndarray:
        return as_positive_diagonal(self.probs[self.block_of], max_value=1.0)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        i = _inverse_cdf_draw(self._cumulative, rng)
        return np.array(self.blocks[i])

    def subset_keys(self) -> list[str]:
        return [f"block:{i}" for i in range(len(self.blocks))]

    def subset_key(self, indices: np.ndarray) -> str:
        return f"block:{int(self.block_of[int(indices[0])])}"


@dataclass(frozen=True)
class NiceSampling(SamplingDistribution):
    """S is a uniformly random subset of size tau (p_j = tau/d for all j)."""

    dimension: int
    subset_size: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not 1 <= self.subset_size <= self.dimension:
            raise ValueError("need 1 <= subset_size <= dimension")

    def inclusion_probabilities(self) -> np.ndarray:
        p = self.subset_size / self.dimension
        return as_positive_diagonal(np.full(self.dimension, p), max_value=1.0)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        # partial Fisher-Yates over a sparse view of the identity permutation
        d, tau = self.dimension, self.subset_size
        overrides: dict[int, int] = {}
        chosen = np.empty(tau, dtype=np.int64)
        for i in range(tau):
            j = int(rng.integers(i, d))
            vi = overrides.get(i, i)
            vj = overrides.get(j, j)
            overrides[i], overrides[j] = vj, vi
            chosen[i] = vj
        chosen.sort()
        return chosen

    @property
    def enumerable(self) -> bool:
        return False

    def subset_keys(self) -> list[str]:
        raise ValueError("tau-nice subsets are not enumerable; use per-coordinate maps")

    def subset_key(self, indices: np.ndarray) -> str:
        raise ValueError("tau-nice subsets are not enumerable; use per-coordinate maps")


@dataclass(frozen=True)
class Sketch:
    """A sampled subset with the inverse inclusion probabilities on it."""

    indices: np.ndarray
    inv_probs: np.ndarray
    dimension: int

    def apply(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(self.dimension)
        out[self.indices] = x[self.indices] * self.inv_probs
        return out


def inclusion_probabilities(dist: SamplingDistribution) -> np.ndarray:
    """The diagonal of P: p_j = Prob(j in S)."""
    return dist.inclusion_probabilities()


def sample_subset(dist: SamplingDistribution, rng: np.random.Generator) -> np.ndarray:
    """Draw S from the distribution; sorted index array, never empty."""
    return dist.sample(rng)


def sketch_apply(indices, probs, x) -> np.ndarray:
    """Apply the sketch for subset S: (C x)_j = x_j / p_j if j in S, else 0."""
    idx = np.asarray(indices, dtype=np.int64)
    p = as_positive_diagonal(probs, max_value=1.0)
    xv = as_vector(x)
    if len(p) != len(xv):
        raise ValueError(f"dimension mismatch: {len(p)} vs {len(xv)}")
    if idx.size == 0:
        raise ValueError("subset must be nonempty")
    if idx.min() < 0 or idx.max() >= len(xv):
        raise ValueError("subset indices out of range")
    return Sketch(idx, 1.0 / p[idx], len(xv)).apply(xv)
