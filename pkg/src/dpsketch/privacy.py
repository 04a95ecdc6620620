"""Sensitivity bounds, Gaussian-mechanism noise calibration, and RDP accounting.

Conventions fixed once for the whole package (also in the README):

- Noise scales are stored and interpreted as *variances*; the optimizer
  draws with standard deviation sqrt(variance).
- Every logarithm is natural, including log(1/delta).
- The RDP -> (epsilon, delta) conversion is minimized over a fixed alpha
  grid: {1.25, 1.5} plus the integers 2..512 plus a geometric tail
  (ratio 1.25) up to 1e14.  The grid is dense enough that the calibrated
  noise always audits at or below its target epsilon; a finer grid could
  only lower the audited value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .erm import LipschitzMap
from .sampling import SamplingDistribution

__all__ = [
    "PrivacyBudget",
    "RdpCurvePoint",
    "NoiseScales",
    "ALPHA_GRID",
    "mean_gradient_sensitivity",
    "calibrate_noise",
    "gaussian_rdp",
    "compose_rdp",
    "rdp_to_dp",
    "audit_budget",
]


def _alpha_grid() -> tuple[float, ...]:
    grid = [1.25, 1.5] + [float(a) for a in range(2, 513)]
    a = 512.0
    while a < 1e14:
        a *= 1.25
        grid.append(a)
    return tuple(grid)


ALPHA_GRID = _alpha_grid()


@dataclass(frozen=True)
class PrivacyBudget:
    """Target (epsilon, delta).

    The type admits any epsilon > 0 and delta in (0, 1); the calibration
    path additionally requires epsilon <= 1 and delta < 1/3, the range
    its guarantee covers.
    """

    epsilon: float
    delta: float

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be > 0")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")


@dataclass(frozen=True)
class RdpCurvePoint:
    """One point (alpha, eps(alpha)) on a Renyi-DP curve."""

    alpha: float
    eps_rdp: float

    def __post_init__(self):
        if not self.alpha > 1.0:
            raise ValueError("alpha must be > 1")
        if self.eps_rdp < 0.0:
            raise ValueError("eps_rdp must be >= 0")


@dataclass(frozen=True)
class NoiseScales:
    """Per-subset noise variances, keyed like the sampling distribution.

    Mirrors :class:`dpsketch.erm.LipschitzMap`: enumerable distributions
    get one variance per subset; tau-nice sampling stores per-coordinate
    variances that add up over the drawn subset (consistent with the
    additive L_U^2 bound, so sigma_U^2 keeps the calibrated form exactly).
    """

    table: dict[str, float] | None = None
    per_coord: np.ndarray | None = None

    def __post_init__(self):
        if (self.table is None) == (self.per_coord is None):
            raise ValueError("exactly one of table / per_coord must be set")
        for _, value in self.items():
            if not value > 0.0:
                raise ValueError("every noise variance must be > 0")

    def items(self) -> list[tuple[str, float]]:
        if self.table is not None:
            return list(self.table.items())
        return [(f"coord:{j}", float(v)) for j, v in enumerate(self.per_coord)]

    def variance_for(self, dist: SamplingDistribution, indices) -> float:
        idx = np.asarray(indices, dtype=np.int64)
        if self.table is not None:
            key = dist.subset_key(idx)
            if key not in self.table:
                raise KeyError(f"no noise variance for sampled subset {key!r}")
            return self.table[key]
        return float(np.sum(self.per_coord[idx]))

    def scaled(self, factor: float) -> "NoiseScales":
        """All variances multiplied by ``factor`` (> 0)."""
        if not factor > 0.0:
            raise ValueError("factor must be > 0")
        if self.table is not None:
            return NoiseScales(table={k: v * factor for k, v in self.table.items()})
        return NoiseScales(per_coord=self.per_coord * factor)


def mean_gradient_sensitivity(lipschitz_u: float, n: int) -> float:
    """Sensitivity of the restricted mean gradient: 2 L_U / n.

    Swapping one sample changes the per-sample gradient by at most twice
    its bound, and the mean divides by n.
    """
    if not lipschitz_u > 0.0:
        raise ValueError("L_U must be > 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0 * lipschitz_u / n


def calibrate_noise(
    lipschitz: LipschitzMap,
    inner_k: int,
    outer_t: int,
    n: int,
    budget: PrivacyBudget,
) -> NoiseScales:
    """Variance making K*T sketched gradient steps (eps, delta)-DP.

    sigma_U^2 = 12 L_U^2 K T log(1/delta) / (n^2 eps^2), the composition
    of the per-subset Gaussian mechanisms through the RDP route.  Only
    valid on the guarantee's range eps <= 1 (delta < 1/3 is enforced by
    the budget type); outside it, calibration refuses.
    """
    if budget.epsilon > 1.0 or budget.delta >= 1.0 / 3.0:
        raise ValueError("calibration guarantee needs epsilon <= 1 and delta < 1/3")
    if inner_k < 1 or outer_t < 1 or n < 1:
        raise ValueError("K, T, n must be >= 1")
    factor = (
        12.0
        * inner_k
        * outer_t
        * math.log(1.0 / budget.delta)
        / (n**2 * budget.epsilon**2)
    )
    if lipschitz.table is not None:
        return NoiseScales(table={k: factor * l**2 for k, l in lipschitz.table.items()})
    return NoiseScales(per_coord=factor * lipschitz.per_coord**2)


def gaussian_rdp(alpha: float, sigma_sq: float, sensitivity: float) -> RdpCurvePoint:
    """RDP of the Gaussian mechanism on a coordinate subset.

    eps(alpha) = alpha * Delta_U^2 / (2 sigma^2), from the closed-form
    Renyi divergence between a Gaussian and its shifted copy.
    """
    if not alpha > 1.0:
        raise ValueError("alpha must be > 1")
    if not sigma_sq > 0.0:
        raise ValueError("sigma_sq must be > 0")
    if sensitivity < 0.0:
        raise ValueError("sensitivity must be >= 0")
    return RdpCurvePoint(alpha, alpha * sensitivity**2 / (2.0 * sigma_sq))


def compose_rdp(points, alpha: float | None = None) -> RdpCurvePoint:
    """Adaptive composition: eps values add at a common alpha.

    ``alpha`` is only needed for the empty composition.
    """
    points = list(points)
    if not points:
        if alpha is None:
            raise ValueError("empty composition needs an explicit alpha")
        return RdpCurvePoint(alpha, 0.0)
    alphas = {p.alpha for p in points}
    if len(alphas) != 1:
        raise ValueError(f"composition needs a common alpha, got {sorted(alphas)}")
    if alpha is not None and alpha not in alphas:
        raise ValueError("explicit alpha disagrees with the points")
    return RdpCurvePoint(points[0].alpha, sum(p.eps_rdp for p in points))


def rdp_to_dp(point: RdpCurvePoint, delta: float) -> float:
    """(alpha, eps)-RDP implies (eps + log(1/delta)/(alpha - 1), delta)-DP."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    return point.eps_rdp + math.log(1.0 / delta) / (point.alpha - 1.0)


def _worst_step_ratio(lipschitz: LipschitzMap, noise: NoiseScales, n: int) -> float:
    """max_U Delta_U^2 / (2 sigma_U^2) over the distribution's range.

    For tau-nice per-coordinate maps the per-coordinate maximum bounds
    every subset's ratio (a ratio of sums never exceeds the largest
    per-term ratio), and is exact for calibrated noise.
    """
    l_items = dict(lipschitz.items())
    s_items = dict(noise.items())
    if set(l_items) != set(s_items):
        missing = set(l_items) ^ set(s_items)
        raise ValueError(f"Lipschitz and noise maps disagree on subsets: {sorted(missing)}")
    worst = 0.0
    for key, l_u in l_items.items():
        delta_u = mean_gradient_sensitivity(l_u, n)
        worst = max(worst, delta_u**2 / (2.0 * s_items[key]))
    return worst


def audit_budget(
    lipschitz: LipschitzMap,
    outer_t: int,
    inner_k: int,
    noise: NoiseScales,
    n: int,
    delta: float,
) -> float:
    """The (eps, delta)-DP level the given noise actually achieves.

    Composes K*T Gaussian mechanisms at the worst-case per-step RDP and
    converts at every alpha on the fixed grid, returning the minimum.
    Noise produced by :func:`calibrate_noise` for a budget (eps, delta)
    audits at or below eps.
    """
    if outer_t < 1 or inner_k < 1:
        raise ValueError("T and K must be >= 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    worst = _worst_step_ratio(lipschitz, noise, n)
    steps = outer_t * inner_k
    best = math.inf
    for alpha in ALPHA_GRID:
        total = RdpCurvePoint(alpha, steps * alpha * worst)
        best = min(best, rdp_to_dp(total, delta))
    return best
