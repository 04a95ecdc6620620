"""Synthetic ERM problems with exact, controllable regularity constants.

Features are built from a column-orthonormalized Gaussian matrix, then
column-scaled so the component-smoothness diagonal equals the requested
profile exactly (X^T X / n for quadratic, X^T X / (4n) for logistic has
the profile on its diagonal and zeros elsewhere).  That gives the
benchmark honest ground truth: the planted optimum, the smoothness
diagonal, and (for quadratic) the strong-convexity modulus are known by
construction rather than estimated.

Generator randomness (one ``default_rng(seed)`` stream, consumed in this
order): feature matrix normals, planted-direction draw (when not
user-set), label uniforms, flip uniforms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .erm import Dataset, make_loss, reference_optimum

__all__ = ["SyntheticSpec", "SyntheticProblem", "gen_synthetic", "profile_diagonal"]

PROFILES = ("uniform", "geometric", "spike")


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for one synthetic problem.

    Smoothness profiles: ``uniform`` (all m0), ``geometric`` (log-spaced
    m_min..m_max), ``spike`` (m_big at coordinate 0, 1.0 elsewhere).

    The planted vector is drawn from the unit ball (``planted="ball"``)
    or taken from ``planted_w``.  Quadratic labels use it verbatim
    (y = Xw*, so the optimum is exact); logistic labels use it as a
    direction whose strength is standardized so the margins have
    standard deviation ``margin_scale``, then each label flips with
    probability ``flip_noise``.
    """

    n: int
    d: int
    loss: str
    profile: str = "uniform"
    m0: float = 1.0
    m_min: float = 1.0
    m_max: float = 100.0
    m_big: float = 100.0
    planted: str = "ball"
    planted_w: tuple[float, ...] | None = None
    flip_noise: float = 0.1
    margin_scale: float = 2.0

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ValueError("need n >= 1 and d >= 1")
        if self.loss not in ("logistic", "quadratic"):
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}; expected {PROFILES}")
        if self.profile == "uniform" and not self.m0 > 0.0:
            raise ValueError("uniform profile needs m0 > 0")
        if self.profile == "geometric" and not 0.0 < self.m_min <= self.m_max:
            raise ValueError("geometric profile needs 0 < m_min <= m_max")
        if self.profile == "spike" and not self.m_big > 0.0:
            raise ValueError("spike profile needs m_big > 0")
        if self.planted not in ("ball", "given"):
            raise ValueError(f"unknown planted mode {self.planted!r}")
        if self.planted == "given":
            if self.planted_w is None or len(self.planted_w) != self.d:
                raise ValueError("planted_w must be a length-d vector")
            if not any(v != 0.0 for v in self.planted_w):
                raise ValueError("planted_w must be nonzero")
        if not 0.0 <= self.flip_noise < 0.5:
            raise ValueError("flip_noise must lie in [0, 0.5)")
        if not self.margin_scale > 0.0:
            raise ValueError("margin_scale must be > 0")


@dataclass(frozen=True)
class SyntheticProblem:
    """A generated problem plus its ground truth."""

    spec: SyntheticSpec
    dataset: Dataset
    smoothness: np.ndarray
    mu: float | None
    planted_w: np.ndarray
    w_star: np.ndarray
    w_star_kind: str  # "exact" (quadratic) or "approx" (solved numerically)
    f_star: float
    w_star_grad_norm: float


def profile_diagonal(spec: SyntheticSpec) -> np.ndarray:
    if spec.profile == "uniform":
        return np.full(spec.d, spec.m0)
    if spec.profile == "geometric":
        return np.geomspace(spec.m_min, spec.m_max, spec.d)
    out = np.ones(spec.d)
    out[0] = spec.m_big
    return out


def _orthonormal_columns(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    raw = rng.normal(size=(n, d))
    if n < d:
        warnings.warn(
            f"n={n} < d={d}: the smoothness profile is only matched on the "
            "Gram diagonal (rank-deficient design)",
            stacklevel=3,
        )
        norms = np.linalg.norm(raw, axis=0)
        return raw / norms
    q, r = np.linalg.qr(raw)
    # fix the sign convention so the construction is unambiguous
    return q * np.sign(np.diag(r))


def _planted_direction(spec: SyntheticSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.planted == "given":
        return np.asarray(spec.planted_w, dtype=float)
    direction = rng.normal(size=spec.d)
    direction /= np.linalg.norm(direction)
    radius = rng.random() ** (1.0 / spec.d)
    return radius * direction


def gen_synthetic(spec: SyntheticSpec, rng: np.random.Generator) -> SyntheticProblem:
    profile = profile_diagonal(spec)
    basis = _orthonormal_columns(spec.n, spec.d, rng)
    gram_target = spec.n * profile if spec.loss == "quadratic" else 4.0 * spec.n * profile
    features = basis * np.sqrt(gram_target)

    planted = _planted_direction(spec, rng)
    loss = make_loss(spec.loss)

    if spec.loss == "quadratic":
        labels = features @ planted
        data = Dataset(features, labels)
        if spec.n >= spec.d:
            w_star, kind = planted, "exact"
            f_star, gnorm = 0.0, 0.0
            mu = float(np.min(profile))
        else:
            w_star, f_star, gnorm = reference_optimum(loss, data)
            kind = "approx"
            mu = loss.strong_convexity(data)
        return SyntheticProblem(
            spec, data, profile, mu, planted, np.asarray(w_star), kind, f_star, gnorm
        )

    raw_margins = features @ planted
    spread = float(np.std(raw_margins))
    if spread == 0.0:
        raise ValueError("planted direction produces constant margins")
    w_plant = (spec.margin_scale / spread) * planted
    margins = (spec.margin_scale / spread) * raw_margins
    probs = 1.0 / (1.0 + np.exp(-margins))
    labels = np.where(rng.random(spec.n) < probs, 1.0, -1.0)
    flips = rng.random(spec.n) < spec.flip_noise
    labels[flips] = -labels[flips]
    data = Dataset(features, labels)
    w_star, f_star, gnorm = reference_optimum(loss, data)
    return SyntheticProblem(
        spec, data, profile, None, w_plant, w_star, "approx", f_star, gnorm
    )
