"""Experiment configuration, orchestration, and flat-file reports.

Config files are flat ``key = value`` text ("#" starts a comment; array
values in brackets).  Every key mirrors an :class:`ExperimentConfig`
field; unknown keys are errors, so typos fail loudly.

Reports are deterministic byte-for-byte: floats are written with
``repr``, JSON keys are sorted, and per-seed work is merged in seed
order regardless of worker scheduling.  Runs start from w0 = 0.

Results CSV schema: ``method,seed,epoch,f_value,subopt,coord_evals,
audited_eps`` with one row per epoch (0..T) plus one ``final`` summary
row per seed.  Seeds that diverge contribute only a summary row with
``nan`` values and are listed separately in the JSON summary.
"""

from __future__ import annotations

import dataclasses
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .erm import (
    Dataset,
    LipschitzMap,
    UnboundedLipschitzError,
    dataset_from_csv,
    lipschitz_map,
    make_loss,
    reference_optimum,
    rescale_columns,
)
from .optimizer import (
    BoundQuery,
    DivergenceError,
    Schedule,
    default_step_sizes,
    importance_probabilities,
    schedule_convex,
    schedule_strongly_convex,
    sketch_second_moment,
    sketched_gd,
    utility_bound,
)
from .privacy import PrivacyBudget, audit_budget, calibrate_noise
from .sampling import (
    BlockSampling,
    FullSampling,
    NiceSampling,
    SamplingDistribution,
    SingletonSampling,
)
from .synth import SyntheticProblem, SyntheticSpec, gen_synthetic

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "RunArtifacts",
    "METHODS",
    "DISTRIBUTIONS",
    "SCHEDULE_MODES",
    "parse_config",
    "config_to_dict",
    "config_from_dict",
    "prepare_problem",
    "build_distribution",
    "run_experiment",
    "compare_methods",
    "calibration_table",
    "bound_value",
    "generate_dataset",
    "CSV_HEADER",
]

METHODS = ("dp-sgd", "dp-cd-uniform", "dp-skgd-importance", "dp-skgd-block")
DISTRIBUTIONS = (
    "full",
    "singleton-uniform",
    "singleton-importance",
    "block-uniform",
    "block-importance",
    "nice",
)
SCHEDULE_MODES = ("auto-convex", "auto-strongly-convex", "manual")

CSV_HEADER = "method,seed,epoch,f_value,subopt,coord_evals,audited_eps"

_MAX_WORKERS = 4


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    """One experiment: problem source, sampling scheme, budget, schedule, seeds."""

    dataset: str = "synthetic"  # "synthetic" or a CSV path
    loss: str = "logistic"
    # synthetic problem fields
    n: int = 1000
    d: int = 8
    profile: str = "uniform"
    m0: float = 1.0
    m_min: float = 1.0
    m_max: float = 100.0
    m_big: float = 100.0
    planted: str = "ball"
    planted_w: list[float] | None = None
    flip_noise: float = 0.1
    margin_scale: float = 2.0
    data_seed: int = 0
    # sampling scheme
    distribution: str = "singleton-uniform"
    blocks: int = 4
    tau: int = 2
    # privacy budget and schedule
    epsilon: float = 1.0
    delta: float = 1e-5
    schedule: str = "auto-convex"
    iters_t: int = 1
    iters_k: int = 10
    step_scale: float = 1.0
    # runs and output
    seeds: list[int] = field(default_factory=lambda: [0])
    out: str = "results"
    rescale_columns: bool = False
    methods: list[str] = field(default_factory=lambda: list(METHODS))

    def validate(self) -> "ExperimentConfig":
        if self.loss not in ("logistic", "quadratic"):
            raise ConfigError(f"unknown loss {self.loss!r}")
        if self.distribution not in DISTRIBUTIONS:
            raise ConfigError(
                f"unknown distribution {self.distribution!r}; expected {DISTRIBUTIONS}"
            )
        if self.schedule not in SCHEDULE_MODES:
            raise ConfigError(f"unknown schedule {self.schedule!r}; expected {SCHEDULE_MODES}")
        if not self.seeds or len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be nonempty and distinct")
        try:
            PrivacyBudget(self.epsilon, self.delta)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.schedule == "manual" and (self.iters_t < 1 or self.iters_k < 1):
            raise ConfigError("manual schedules need iters_t >= 1 and iters_k >= 1")
        if not self.step_scale > 0.0:
            raise ConfigError("step_scale must be > 0")
        for method in self.methods:
            if method not in METHODS:
                raise ConfigError(f"unknown method {method!r}; expected subset of {METHODS}")
        return self


_LIST_FIELDS = {"seeds": int, "planted_w": float, "methods": str}
_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def _parse_scalar(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    if kind == "int":
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"{name}: expected an integer, got {raw!r}") from exc
    if kind == "float":
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"{name}: expected a number, got {raw!r}") from exc
    if kind == "bool":
        if raw.lower() in ("true", "false"):
            return raw.lower() == "true"
        raise ConfigError(f"{name}: expected true/false, got {raw!r}")
    return raw


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat key=value config text; every key mirrors a config field."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if raw.startswith("["):
            if not raw.endswith("]"):
                raise ConfigError(f"line {lineno}: unterminated array for {key!r}")
            if key not in _LIST_FIELDS:
                raise ConfigError(f"line {lineno}: {key!r} does not take an array")
            items = [cell.strip() for cell in raw[1:-1].split(",") if cell.strip()]
            caster = _LIST_FIELDS[key]
            try:
                values[key] = [caster(item) for item in items]
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad array element for {key!r}") from exc
        else:
            if key in _LIST_FIELDS:
                raise ConfigError(f"line {lineno}: {key!r} takes an array in brackets")
            values[key] = _parse_scalar(key, raw)
    return ExperimentConfig(**values).validate()


def config_to_dict(config: ExperimentConfig) -> dict:
    return dataclasses.asdict(config)


def config_from_dict(payload: dict) -> ExperimentConfig:
    known = set(_FIELD_TYPES)
    unknown = set(payload) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**payload).validate()


# --- problem preparation ----------------------------------------------------


@dataclass(frozen=True)
class PreparedProblem:
    """Dataset plus solved ground truth and regularity constants."""

    loss: object
    data: Dataset
    smoothness: np.ndarray
    mu: float | None
    w_star: np.ndarray
    w_star_kind: str
    f_star: float
    synthetic: SyntheticProblem | None = None

    def lipschitz_for(self, dist: SamplingDistribution) -> LipschitzMap | None:
        try:
            return lipschitz_map(self.loss, self.data, dist)
        except UnboundedLipschitzError:
            return None


def synthetic_spec(config: ExperimentConfig) -> SyntheticSpec:
    return SyntheticSpec(
        n=config.n,
        d=config.d,
        loss=config.loss,
        profile=config.profile,
        m0=config.m0,
        m_min=config.m_min,
        m_max=config.m_max,
        m_big=config.m_big,
        planted=config.planted,
        planted_w=tuple(config.planted_w) if config.planted_w is not None else None,
        flip_noise=config.flip_noise,
        margin_scale=config.margin_scale,
    )


def prepare_problem(config: ExperimentConfig, dataset_csv: str | None = None) -> PreparedProblem:
    """Materialize the dataset and its constants for one config.

    File-backed configs receive the CSV content inline (``dataset_csv``);
    the path in the config is resolved by the client.  Column rescaling
    (when requested) happens before any constant is computed, since the
    constants are data-dependent.
    """
    loss = make_loss(config.loss)
    if config.dataset == "synthetic":
        try:
            problem = gen_synthetic(synthetic_spec(config), np.random.default_rng(config.data_seed))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not config.rescale_columns:
            return PreparedProblem(
                loss=loss,
                data=problem.dataset,
                smoothness=problem.smoothness,
                mu=problem.mu,
                w_star=problem.w_star,
                w_star_kind=problem.w_star_kind,
                f_star=problem.f_star,
                synthetic=problem,
            )
        data = rescale_columns(problem.dataset)
    else:
        if dataset_csv is None:
            raise ConfigError(
                f"config names dataset file {config.dataset!r} but no CSV content was supplied"
            )
        data = dataset_from_csv(dataset_csv)
        if config.rescale_columns:
            data = rescale_columns(data)
    w_star, f_star, _ = reference_optimum(loss, data)
    return PreparedProblem(
        loss=loss,
        data=data,
        smoothness=loss.component_smoothness(data),
        mu=loss.strong_convexity(data),
        w_star=w_star,
        w_star_kind="exact" if config.loss == "quadratic" else "approx",
        f_star=f_star,
    )


def build_distribution(
    name: str, dimension: int, smoothness, blocks: int = 4, tau: int = 2
) -> SamplingDistribution:
    """Distribution from its config name; importance variants use the smoothness."""
    if name == "full":
        return FullSampling(dimension)
    if name == "singleton-uniform":
        return SingletonSampling.uniform(dimension)
    if name == "singleton-importance":
        probs = importance_probabilities(smoothness, [(j,) for j in range(dimension)])
        return SingletonSampling(probs)
    if name in ("block-uniform", "block-importance"):
        if not 1 <= blocks <= dimension:
            raise ConfigError(f"blocks={blocks} incompatible with d={dimension}")
        uniform = np.full(blocks, 1.0 / blocks)
        base = BlockSampling.contiguous(dimension, blocks, uniform)
        if name == "block-uniform":
            return base
        probs = importance_probabilities(smoothness, base.blocks)
        return BlockSampling(base.blocks, probs)
    if name == "nice":
        if not 1 <= tau <= dimension:
            raise ConfigError(f"tau={tau} incompatible with d={dimension}")
        return NiceSampling(dimension, tau)
    raise ConfigError(f"unknown distribution {name!r}")


_METHOD_DISTRIBUTION = {
    "dp-sgd": "full",
    "dp-cd-uniform": "singleton-uniform",
    "dp-skgd-importance": "singleton-importance",
    "dp-skgd-block": "block-importance",
}

_DISTRIBUTION_BOUND_ROW = {
    "full": "skgd-full",
    "singleton-uniform": "skgd-coord-uniform",
    "singleton-importance": "skgd-coord-importance",
    "block-uniform": "skgd-block-uniform",
    "block-importance": "skgd-block-importance",
    "nice": "skgd-general",
}

_METHOD_BOUND_ROW = {
    "dp-sgd": "dp-sgd",
    "dp-cd-uniform": "dp-cd",
    "dp-skgd-importance": "skgd-coord-importance",
    "dp-skgd-block": "skgd-block-importance",
}


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class RunArtifacts:
    """Deterministic flat-file payloads of one run/compare call."""

    csv_text: str
    summary: dict
    all_diverged: bool

    def summary_json(self) -> str:
        return json.dumps(self.summary, sort_keys=True, indent=2) + "\n"


def _bound_for(
    row: str,
    regime: str,
    config: ExperimentConfig,
    problem: PreparedProblem,
    dist: SamplingDistribution,
    sigma_s_sq: float | None,
) -> float:
    """Evaluate a bound row with every constant the problem can supply.

    Constants come from the data itself (not from the run's subset map),
    so any row can be evaluated against any configured distribution;
    rows needing unavailable constants fail with an explicit list.
    """
    m = problem.smoothness
    p = dist.inclusion_probabilities()
    d = problem.data.d
    try:
        lip_scalar = problem.loss.component_lipschitz(problem.data, list(range(d)))
        lip_coord = np.array(
            [problem.loss.component_lipschitz(problem.data, [j]) for j in range(d)]
        )
        lip_block = (
            np.array(
                [
                    problem.loss.component_lipschitz(problem.data, block)
                    for block in dist.blocks
                ]
            )
            if isinstance(dist, BlockSampling)
            else None
        )
    except UnboundedLipschitzError:
        lip_scalar = lip_coord = lip_block = None
    gap = problem.w_star  # start point is w0 = 0
    query = BoundQuery(
        row=row,
        regime=regime,
        n=problem.data.n,
        epsilon=config.epsilon,
        delta=config.delta,
        d=d,
        b=len(dist.blocks) if isinstance(dist, BlockSampling) else None,
        lip_scalar=lip_scalar,
        lip_coord=lip_coord,
        lip_block=lip_block,
        partition=dist.blocks if isinstance(dist, BlockSampling) else None,
        smoothness=m,
        probs=p,
        mu=problem.mu,
        r_i=float(np.linalg.norm(gap)),
        r_m=math.sqrt(float(np.sum(m * gap**2))),
        r_mpinv=math.sqrt(float(np.sum(m / p * gap**2))),
        sigma_s=math.sqrt(sigma_s_sq) if sigma_s_sq is not None else None,
    )
    return utility_bound(query)


def _run_label(
    label: str, config: ExperimentConfig, problem: PreparedProblem, dist_name: str,
    bound_row: str,
) -> tuple[list[str], dict, int]:
    """Run one (labelled) configuration over all seeds; returns CSV rows, summary, completed count."""
    data, loss = problem.data, problem.loss
    dist = build_distribution(
        dist_name, data.d, problem.smoothness, blocks=config.blocks, tau=config.tau
    )
    p = dist.inclusion_probabilities()
    lmap = problem.lipschitz_for(dist)
    if lmap is None:
        raise ConfigError(
            "private runs need a bounded-gradient loss (logistic); "
            f"{config.loss!r} has unbounded per-subset sensitivity"
        )
    sigma_s_sq = sketch_second_moment(dist, lmap, problem.smoothness)
    budget = PrivacyBudget(config.epsilon, config.delta)

    gap = problem.w_star  # w0 = 0
    r_mpinv = math.sqrt(float(np.sum(problem.smoothness / p * gap**2)))
    if config.schedule == "auto-convex":
        schedule = schedule_convex(data.n, budget, r_mpinv, math.sqrt(sigma_s_sq))
    elif config.schedule == "auto-strongly-convex":
        if problem.mu is None:
            raise ConfigError(
                "auto-strongly-convex needs a strongly convex loss; "
                f"{config.loss!r} on this data has no positive modulus"
            )
        f0_gap = loss.value(data, np.zeros(data.d)) - problem.f_star
        schedule = schedule_strongly_convex(
            problem.mu, problem.smoothness, p, f0_gap, data.n, budget, sigma_s_sq
        )
    else:
        schedule = Schedule(outer_t=config.iters_t, inner_k=config.iters_k)

    try:
        noise = calibrate_noise(lmap, schedule.inner_k, schedule.outer_t, data.n, budget)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    audited = audit_budget(lmap, schedule.outer_t, schedule.inner_k, noise, data.n, config.delta)
    gamma = config.step_scale * default_step_sizes(p, problem.smoothness)

    regime = "strongly-convex" if config.schedule == "auto-strongly-convex" else "convex"
    bound = _bound_for(bound_row, regime, config, problem, dist, sigma_s_sq)

    def one_seed(seed: int):
        rng = np.random.default_rng(seed)
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                result = sketched_gd(
                    loss, data, dist, schedule, noise, gamma,
                    np.zeros(data.d), rng, seed=seed,
                )
            result.audited_epsilon = audited
            return seed, result, None
        except DivergenceError as exc:
            return seed, None, exc

    workers = min(_MAX_WORKERS, len(config.seeds))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(one_seed, config.seeds))

    rows: list[str] = []
    finals: list[float] = []
    diverged: list[dict] = []
    for seed, result, failure in outcomes:
        if failure is not None:
            diverged.append({"seed": seed, "epoch": failure.epoch, "step": failure.step})
            rows.append(
                ",".join(
                    [label, str(seed), "final", "nan", "nan", "nan", _fmt(audited)]
                )
            )
            continue
        for epoch, f_value in enumerate(result.objectives):
            rows.append(
                ",".join(
                    [
                        label,
                        str(seed),
                        str(epoch),
                        _fmt(f_value),
                        _fmt(f_value - problem.f_star),
                        str(result.coord_evals_per_epoch[epoch]),
                        _fmt(audited),
                    ]
                )
            )
        final_subopt = result.objectives[-1] - problem.f_star
        finals.append(final_subopt)
        rows.append(
            ",".join(
                [
                    label,
                    str(seed),
                    "final",
                    _fmt(result.objectives[-1]),
                    _fmt(final_subopt),
                    str(result.coord_evals),
                    _fmt(audited),
                ]
            )
        )

    if finals:
        q25, q50, q75 = (float(v) for v in np.percentile(finals, [25.0, 50.0, 75.0]))
        median_subopt, iqr_subopt = q50, q75 - q25
    else:
        # None keeps the JSON strictly valid (a NaN literal would not be)
        median_subopt = iqr_subopt = None
    summary = {
        "distribution": dist_name,
        "schedule": {"outer_t": schedule.outer_t, "inner_k": schedule.inner_k},
        "audited_epsilon": audited,
        "configured_epsilon": config.epsilon,
        "median_final_subopt": median_subopt,
        "iqr_final_subopt": iqr_subopt,
        "utility_bound": bound,
        "bound_row": bound_row,
        "completed_seeds": len(finals),
        "diverged": diverged,
        "w_star_kind": problem.w_star_kind,
        "f_star": problem.f_star,
        "sigma_s_sq": sigma_s_sq,
    }
    return rows, summary, len(finals)


def run_experiment(config: ExperimentConfig, dataset_csv: str | None = None) -> RunArtifacts:
    """Calibrate, schedule, run every seed, audit, and report one configuration."""
    config.validate()
    problem = prepare_problem(config, dataset_csv)
    label = config.distribution
    rows, summary, completed = _run_label(
        label, config, problem, config.distribution,
        _DISTRIBUTION_BOUND_ROW[config.distribution],
    )
    csv_text = "\n".join([CSV_HEADER, *rows]) + "\n"
    return RunArtifacts(
        csv_text=csv_text,
        summary={"methods": {label: summary}},
        all_diverged=completed == 0,
    )


def compare_methods(
    config: ExperimentConfig, methods: list[str] | None = None,
    dataset_csv: str | None = None,
) -> RunArtifacts:
    """Run each method at matched budget on the same dataset and seeds."""
    config.validate()
    chosen = config.methods if methods is None else methods
    if not chosen:
        raise ConfigError("method list must be nonempty")
    for method in chosen:
        if method not in METHODS:
            raise ConfigError(f"unknown method {method!r}; expected subset of {METHODS}")
    problem = prepare_problem(config, dataset_csv)
    rows: list[str] = []
    summaries: dict[str, dict] = {}
    completed_total = 0
    for method in chosen:
        method_rows, summary, completed = _run_label(
            method, config, problem, _METHOD_DISTRIBUTION[method],
            _METHOD_BOUND_ROW[method],
        )
        rows.extend(method_rows)
        summaries[method] = summary
        completed_total += completed
    medians = {m: summaries[m]["median_final_subopt"] for m in chosen}

    def _ratio(a: str, b: str) -> float | None:
        if medians[a] is None or medians[b] is None or medians[b] == 0:
            return None
        return medians[a] / medians[b]

    ratios = {f"{a}/{b}": _ratio(a, b) for a in chosen for b in chosen if a != b}
    csv_text = "\n".join([CSV_HEADER, *rows]) + "\n"
    return RunArtifacts(
        csv_text=csv_text,
        summary={"methods": summaries, "medians": medians, "ratios": ratios},
        all_diverged=completed_total == 0,
    )


def calibration_table(config: ExperimentConfig, dataset_csv: str | None = None) -> dict:
    """The calibrate surface: per-subset (L_U, sigma_U^2) plus the audit."""
    config.validate()
    problem = prepare_problem(config, dataset_csv)
    dist = build_distribution(
        config.distribution, problem.data.d, problem.smoothness,
        blocks=config.blocks, tau=config.tau,
    )
    lmap = problem.lipschitz_for(dist)
    if lmap is None:
        raise ConfigError(
            "private runs need a bounded-gradient loss (logistic); "
            f"{config.loss!r} has unbounded per-subset sensitivity"
        )
    budget = PrivacyBudget(config.epsilon, config.delta)
    sigma_s_sq = sketch_second_moment(dist, lmap, problem.smoothness)
    p = dist.inclusion_probabilities()
    gap = problem.w_star
    if config.schedule == "auto-convex":
        r_mpinv = math.sqrt(float(np.sum(problem.smoothness / p * gap**2)))
        schedule = schedule_convex(problem.data.n, budget, r_mpinv, math.sqrt(sigma_s_sq))
    elif config.schedule == "auto-strongly-convex":
        if problem.mu is None:
            raise ConfigError("auto-strongly-convex needs a strongly convex loss")
        f0_gap = problem.loss.value(problem.data, np.zeros(problem.data.d)) - problem.f_star
        schedule = schedule_strongly_convex(
            problem.mu, problem.smoothness, p, f0_gap, problem.data.n, budget, sigma_s_sq
        )
    else:
        schedule = Schedule(config.iters_t, config.iters_k)
    try:
        noise = calibrate_noise(lmap, schedule.inner_k, schedule.outer_t, problem.data.n, budget)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    audited = audit_budget(
        lmap, schedule.outer_t, schedule.inner_k, noise, problem.data.n, config.delta
    )
    lines = ["subset,lipschitz,sigma_sq"]
    noise_items = dict(noise.items())
    for key, l_u in lmap.items():
        lines.append(",".join([key, _fmt(float(l_u)), _fmt(float(noise_items[key]))]))
    return {
        "table_csv": "\n".join(lines) + "\n",
        "audited_epsilon": audited,
        "outer_t": schedule.outer_t,
        "inner_k": schedule.inner_k,
    }


def bound_value(
    config: ExperimentConfig,
    row: str | None = None,
    regime: str | None = None,
    dataset_csv: str | None = None,
) -> dict:
    """Evaluate a utility-bound row with constants taken from the config's problem."""
    config.validate()
    problem = prepare_problem(config, dataset_csv)
    dist = build_distribution(
        config.distribution, problem.data.d, problem.smoothness,
        blocks=config.blocks, tau=config.tau,
    )
    lmap = problem.lipschitz_for(dist)
    sigma_s_sq = (
        sketch_second_moment(dist, lmap, problem.smoothness) if lmap is not None else None
    )
    chosen_row = row if row is not None else _DISTRIBUTION_BOUND_ROW[config.distribution]
    chosen_regime = regime if regime is not None else (
        "strongly-convex" if config.schedule == "auto-strongly-convex" else "convex"
    )
    try:
        value = _bound_for(chosen_row, chosen_regime, config, problem, dist, sigma_s_sq)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return {"row": chosen_row, "regime": chosen_regime, "value": value}


def generate_dataset(config: ExperimentConfig) -> dict:
    """The gen surface: synthetic dataset CSV plus its ground-truth constants."""
    config.validate()
    if config.dataset != "synthetic":
        raise ConfigError("gen only produces synthetic datasets")
    from .erm import dataset_to_csv  # local import keeps module init light

    problem = gen_synthetic(synthetic_spec(config), np.random.default_rng(config.data_seed))
    loss = make_loss(config.loss)
    constants: dict = {
        "n": config.n,
        "d": config.d,
        "loss": config.loss,
        "profile": config.profile,
        "smoothness": [float(v) for v in problem.smoothness],
        "mu": problem.mu,
        "planted_w": [float(v) for v in problem.planted_w],
        "w_star": [float(v) for v in problem.w_star],
        "w_star_kind": problem.w_star_kind,
        "f_star": problem.f_star,
        "w_star_grad_norm": problem.w_star_grad_norm,
    }
    if config.loss == "logistic":
        constants["lipschitz_coord"] = [
            loss.component_lipschitz(problem.dataset, [j]) for j in range(config.d)
        ]
        constants["lipschitz_full"] = loss.component_lipschitz(
            problem.dataset, list(range(config.d))
        )
    return {"dataset_csv": dataset_to_csv(problem.dataset), "constants": constants}
