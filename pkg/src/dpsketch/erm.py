"""ERM problems: datasets, logistic/quadratic losses, and regularity constants.

The regularity constants drive everything downstream: per-subset gradient
bounds (Lipschitz) calibrate the noise, the component smoothness diagonal
sets the step sizes, and the strong-convexity modulus selects the
geometric schedule.

Quadratic loss is supported for optimizer correctness work (noiseless
convergence, strong convexity) but has an unbounded gradient on R^d, so
it is rejected by the Lipschitz computation: private runs use logistic
loss.  Refusing loudly beats silently wrong privacy.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .linalg import as_positive_diagonal
from .sampling import (
    BlockSampling,
    FullSampling,
    NiceSampling,
    SamplingDistribution,
    SingletonSampling,
)

__all__ = [
    "Dataset",
    "LogisticLoss",
    "QuadraticLoss",
    "LipschitzMap",
    "RegularityBundle",
    "UnboundedLipschitzError",
    "ConvergenceError",
    "make_loss",
    "lipschitz_map",
    "regularity",
    "reference_optimum",
    "rescale_columns",
    "dataset_to_csv",
    "dataset_from_csv",
    "load_dataset",
]

# coordinates never touched by the data get this smoothness floor: their
# step size becomes huge but their gradient is identically zero
SMOOTHNESS_FLOOR = 1e-12


class UnboundedLipschitzError(ValueError):
    """The loss has no finite gradient bound on R^d."""


class ConvergenceError(RuntimeError):
    """The reference-optimum solver did not reach its gradient tolerance."""


@dataclass(frozen=True)
class Dataset:
    """n samples of d features plus one label each.

    ``features`` is n x d (one row per sample); labels are +-1 for
    logistic loss and arbitrary reals for quadratic loss.
    """

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        x = np.array(self.features, dtype=np.float64)
        y = np.array(self.labels, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError(f"features must be n x d with n,d >= 1, got {x.shape}")
        if y.shape != (x.shape[0],):
            raise ValueError("need exactly one label per sample")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("dataset entries must be finite")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


def _sigmoid(t: np.ndarray) -> np.ndarray:
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _check_dim(data: Dataset, w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (data.d,):
        raise ValueError(f"point has dimension {w.shape}, dataset has d={data.d}")
    return w


class LogisticLoss:
    """Binary logistic loss, labels in {-1, +1}.

    f(w) = (1/n) sum_i log(1 + exp(-y_i <x_i, w>)), computed through
    logaddexp so values stay finite for |<x,w>| up to ~700.
    """

    kind = "logistic"

    def _check(self, data: Dataset) -> None:
        if not np.all(np.isin(data.labels, (-1.0, 1.0))):
            raise ValueError("logistic loss needs labels in {-1, +1}")

    def value(self, data: Dataset, w) -> float:
        self._check(data)
        w = _check_dim(data, w)
        margins = data.labels * (data.features @ w)
        return float(np.mean(np.logaddexp(0.0, -margins)))

    def gradient(self, data: Dataset, w) -> np.ndarray:
        self._check(data)
        w = _check_dim(data, w)
        margins = data.labels * (data.features @ w)
        coeff = -data.labels * _sigmoid(-margins)
        return data.features.T @ coeff / data.n

    def sample_gradient(self, data: Dataset, i: int, w) -> np.ndarray:
        """Gradient of the single-sample loss at sample i."""
        self._check(data)
        w = _check_dim(data, w)
        x, y = data.features[i], data.labels[i]
        return -y * _sigmoid(-y * float(x @ w)) * x

    def component_lipschitz(self, data: Dataset, indices) -> float:
        """sup_w ||I_U grad l(w; x_i)|| = max_i ||I_U x_i|| (sigmoid factor < 1)."""
        self._check(data)
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size == 0:
            raise ValueError("subset must be nonempty")
        return float(np.max(np.linalg.norm(data.features[:, idx], axis=1)))

    def component_smoothness(self, data: Dataset) -> np.ndarray:
        """Diagonal dominance bound on X^T X / (4n), the worst-case Hessian."""
        self._check(data)
        h = data.features.T @ data.features / (4.0 * data.n)
        m = np.sum(np.abs(h), axis=1)
        return as_positive_diagonal(np.maximum(m, SMOOTHNESS_FLOOR))

    def strong_convexity(self, data: Dataset) -> float | None:
        """Not strongly convex on R^d (flat directions at infinity)."""
        return None


class QuadraticLoss:
    """Least-squares loss f(w) = ||Xw - y||^2 / (2n)."""

    kind = "quadratic"

    def value(self, data: Dataset, w) -> float:
        w = _check_dim(data, w)
        r = data.features @ w - data.labels
        return float(r @ r) / (2.0 * data.n)

    def gradient(self, data: Dataset, w) -> np.ndarray:
        w = _check_dim(data, w)
        r = data.features @ w - data.labels
        return data.features.T @ r / data.n

    def sample_gradient(self, data: Dataset, i: int, w) -> np.ndarray:
        w = _check_dim(data, w)
        x, y = data.features[i], data.labels[i]
        return (float(x @ w) - y) * x

    def component_lipschitz(self, data: Dataset, indices) -> float:
        raise UnboundedLipschitzError(
            "quadratic loss has a linearly growing gradient, so no finite "
            "per-subset Lipschitz constant exists on R^d; private runs need "
            "a bounded-gradient loss (use logistic)"
        )

    def component_smoothness(self, data: Dataset) -> np.ndarray:
        """Diagonal dominance bound on the (constant) Hessian X^T X / n."""
        h = data.features.T @ data.features / data.n
        m = np.sum(np.abs(h), axis=1)
        return as_positive_diagonal(np.maximum(m, SMOOTHNESS_FLOOR))

    def strong_convexity(self, data: Dataset) -> float | None:
        h = data.features.T @ data.features / data.n
        lam = float(np.linalg.eigvalsh(h)[0])
        return lam if lam > 1e-10 else None


def make_loss(kind: str):
    if kind == "logistic":
        return LogisticLoss()
    if kind == "quadratic":
        return QuadraticLoss()
    raise ValueError(f"unknown loss kind {kind!r} (expected logistic or quadratic)")


@dataclass(frozen=True)
class LipschitzMap:
    """Per-subset gradient bounds, keyed like the sampling distribution.

    Enumerable distributions store one entry per subset.  tau-nice
    sampling stores per-coordinate constants and combines them on demand
    via L_U^2 = sum_{j in U} L_j^2 (a valid bound, since the squared
    restricted gradient norm is coordinate-additive).
    """

    table: dict[str, float] | None = None
    per_coord: np.ndarray | None = None

    def __post_init__(self):
        if (self.table is None) == (self.per_coord is None):
            raise ValueError("exactly one of table / per_coord must be set")
        for _, value in self.items():
            if not value > 0.0:
                raise ValueError("every Lipschitz constant must be > 0")

    def items(self) -> list[tuple[str, float]]:
        if self.table is not None:
            return list(self.table.items())
        return [(f"coord:{j}", float(v)) for j, v in enumerate(self.per_coord)]

    def for_subset(self, dist: SamplingDistribution, indices) -> float:
        idx = np.asarray(indices, dtype=np.int64)
        if self.table is not None:
            return self.table[dist.subset_key(idx)]
        return float(np.sqrt(np.sum(self.per_coord[idx] ** 2)))


def lipschitz_map(loss, data: Dataset, dist: SamplingDistribution) -> LipschitzMap:
    """Gradient bounds for every subset the distribution can draw."""
    if isinstance(dist, FullSampling):
        return LipschitzMap(
            table={"full": loss.component_lipschitz(data, np.arange(data.d))}
        )
    if isinstance(dist, SingletonSampling):
        return LipschitzMap(
            table={
                f"coord:{j}": loss.component_lipschitz(data, [j]) for j in range(data.d)
            }
        )
    if isinstance(dist, BlockSampling):
        return LipschitzMap(
            table={
                f"block:{i}": loss.component_lipschitz(data, block)
                for i, block in enumerate(dist.blocks)
            }
        )
    if isinstance(dist, NiceSampling):
        per = np.array(
            [loss.component_lipschitz(data, [j]) for j in range(data.d)]
        )
        return LipschitzMap(per_coord=per)
    raise TypeError(f"unsupported distribution {type(dist).__name__}")


@dataclass(frozen=True)
class RegularityBundle:
    """The constants a run needs: M, per-subset L, and mu.

    ``lipschitz`` is None for losses with unbounded gradients (quadratic);
    noiseless runs work without it, calibration refuses loudly.
    """

    smoothness: np.ndarray
    lipschitz: LipschitzMap | None
    mu: float | None

    def __post_init__(self):
        if self.mu is not None and self.mu > float(np.min(self.smoothness)) + 1e-9:
            raise ValueError("strong convexity modulus cannot exceed min smoothness")


def regularity(loss, data: Dataset, dist: SamplingDistribution) -> RegularityBundle:
    try:
        lmap = lipschitz_map(loss, data, dist)
    except UnboundedLipschitzError:
        lmap = None
    return RegularityBundle(
        smoothness=loss.component_smoothness(data),
        lipschitz=lmap,
        mu=loss.strong_convexity(data),
    )


def reference_optimum(
    loss, data: Dataset, grad_tol: float = 1e-10, max_iter: int = 200
) -> tuple[np.ndarray, float, float]:
    """Unconstrained minimizer of the empirical loss, solved to high precision.

    Quadratic: least-squares solve (exact).  Logistic: damped Newton until
    the gradient norm is <= grad_tol; raises ConvergenceError when the
    optimum does not exist at that precision (e.g. separable data).

    Returns (w_star, f_star, achieved_gradient_norm).
    """
    if isinstance(loss, QuadraticLoss):
        w, *_ = np.linalg.lstsq(data.features, data.labels, rcond=None)
        return w, loss.value(data, w), float(np.linalg.norm(loss.gradient(data, w)))

    w = np.zeros(data.d)
    x = data.features
    for _ in range(max_iter):
        g = loss.gradient(data, w)
        gnorm = float(np.linalg.norm(g))
        if gnorm <= grad_tol:
            return w, loss.value(data, w), gnorm
        s = _sigmoid(x @ w)
        hess = (x * (s * (1.0 - s))[:, None]).T @ x / data.n
        try:
            step = np.linalg.solve(hess + 1e-14 * np.eye(data.d), g)
        except np.linalg.LinAlgError:
            step = g
        # backtracking keeps the damped Newton iteration globally convergent
        f0 = loss.value(data, w)
        t = 1.0
        while t > 1e-12:
            w_new = w - t * step
            if loss.value(data, w_new) <= f0 - 1e-4 * t * float(g @ step):
                break
            t *= 0.5
        w = w - t * step
    gnorm = float(np.linalg.norm(loss.gradient(data, w)))
    if gnorm <= grad_tol:
        return w, loss.value(data, w), gnorm
    raise ConvergenceError(
        f"reference solve stalled at gradient norm {gnorm:.3e} (target {grad_tol:.0e}); "
        "the empirical optimum may not exist (separable labels?)"
    )


def rescale_columns(data: Dataset) -> Dataset:
    """Rescale each feature column to max |x_ij| = 1 (all-zero columns kept)."""
    scale = np.max(np.abs(data.features), axis=0)
    scale[scale == 0.0] = 1.0
    return Dataset(data.features / scale, data.labels)


# --- CSV round trip -------------------------------------------------------
#
# Header row names d feature columns plus one label column "y"; floats are
# written with repr() so a write/read cycle is bit-exact.


def dataset_to_csv(data: Dataset) -> str:
    header = ",".join([f"x{j}" for j in range(data.d)] + ["y"])
    lines = [header]
    for i in range(data.n):
        cells = [repr(float(v)) for v in data.features[i]] + [repr(float(data.labels[i]))]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def dataset_from_csv(text: str) -> Dataset:
    reader = io.StringIO(text)
    header = reader.readline().strip()
    if not header:
        raise ValueError("empty dataset CSV")
    columns = header.split(",")
    if "y" not in columns:
        raise ValueError('dataset CSV needs a label column named "y"')
    y_pos = columns.index("y")
    rows = []
    for line in reader:
        line = line.strip()
        if line:
            rows.append([float(cell) for cell in line.split(",")])
    if not rows:
        raise ValueError("dataset CSV has no data rows")
    arr = np.array(rows, dtype=np.float64)
    if arr.shape[1] != len(columns):
        raise ValueError("ragged dataset CSV")
    features = np.delete(arr, y_pos, axis=1)
    return Dataset(features, arr[:, y_pos])


def load_dataset(path: str) -> Dataset:
    with open(path, "r", encoding="utf-8") as fh:
        return dataset_from_csv(fh.read())
