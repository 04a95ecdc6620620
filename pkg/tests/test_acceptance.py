"""Acceptance gate: every release criterion at its stated tolerance.

Each test prints one ``ACCEPTANCE <n> PASS/FAIL`` line (run pytest with
``-s`` or check the captured output), and fails the suite when its
criterion does not hold.
"""

import math
import time

import numpy as np
import pytest

from _oracles import (
    noise_energy_enumerable,
    noise_energy_nice,
    renyi_divergence_quadrature,
    run_sketch_mc,
)
from dpsketch.erm import Dataset, LipschitzMap, LogisticLoss, QuadraticLoss, make_loss
from dpsketch.experiments import compare_methods, parse_config, run_experiment
from dpsketch.optimizer import (
    Schedule,
    default_step_sizes,
    sketch_second_moment,
    sketch_second_moment_mc,
    sketched_gd,
)
from dpsketch.privacy import (
    NoiseScales,
    PrivacyBudget,
    audit_budget,
    calibrate_noise,
    gaussian_rdp,
)
from dpsketch.sampling import (
    BlockSampling,
    FullSampling,
    NiceSampling,
    SingletonSampling,
)


def _report(number: int, description: str, passed: bool, detail: str = ""):
    status = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {number} {status}: {description}{suffix}")
    assert passed, f"acceptance criterion {number} failed: {description}{suffix}"


def test_acceptance_1_privacy_round_trip():
    start = time.perf_counter()
    rng = np.random.default_rng(20240801)
    worst_margin = math.inf
    ok = True
    for _ in range(50):
        n = int(rng.integers(10, 10_001))
        epsilon = float(rng.uniform(0.0, 1.0)) or 1.0
        delta = float(rng.uniform(1e-12, 1.0 / 3.0))
        inner_k = int(rng.integers(1, 101))
        outer_t = int(rng.integers(1, 101))
        lmap = LipschitzMap(
            table={f"coord:{j}": float(rng.uniform(1e-9, 10.0)) for j in range(3)}
        )
        budget = PrivacyBudget(epsilon, delta)
        noise = calibrate_noise(lmap, inner_k, outer_t, n, budget)
        audited = audit_budget(lmap, outer_t, inner_k, noise, n, delta)
        worst_margin = min(worst_margin, epsilon - audited)
        ok = ok and audited <= epsilon
    elapsed = time.perf_counter() - start
    _report(
        1,
        "audit(calibrate(budget)) <= epsilon over 50 random configurations",
        ok and elapsed < 5.0,
        f"worst margin {worst_margin:.3e}, {elapsed:.2f}s",
    )


def test_acceptance_2_rdp_closed_form_quadrature():
    start = time.perf_counter()
    worst = 0.0
    for alpha in (1.5, 3.0, 16.0):
        for sigma in (0.5, 1.0, 2.0):
            for shift in (0.0, 0.7, 2.0):
                got = gaussian_rdp(alpha, sigma**2, shift).eps_rdp
                want = renyi_divergence_quadrature(alpha, sigma, shift)
                worst = max(worst, abs(got - want))
    elapsed = time.perf_counter() - start
    _report(
        2,
        "Gaussian RDP closed form matches 1-d quadrature on the 27-point grid",
        worst <= 1e-6 and elapsed < 10.0,
        f"worst abs error {worst:.2e}, {elapsed:.2f}s",
    )


def test_acceptance_3_sensitivity_fuzz():
    rng = np.random.default_rng(3)
    data = Dataset(
        rng.normal(scale=2.0, size=(30, 6)), rng.choice([-1.0, 1.0], size=30)
    )
    loss = LogisticLoss()
    subsets = [rng.choice(6, size=rng.integers(1, 7), replace=False) for _ in range(10)]
    bounds = [loss.component_lipschitz(data, u) for u in subsets]
    violations = 0
    for _ in range(10_000):
        k = rng.integers(0, len(subsets))
        u, bound = subsets[k], 2.0 * bounds[k] + 1e-9
        i, i2 = rng.integers(0, data.n, size=2)
        w = rng.normal(scale=4.0, size=6)
        w2 = rng.normal(scale=4.0, size=6)
        diff = loss.sample_gradient(data, i, w) - loss.sample_gradient(data, i2, w2)
        if np.linalg.norm(diff[u]) > bound:
            violations += 1
    _report(
        3,
        "pairwise restricted gradient sensitivity <= 2 L_U + 1e-9 on 10^4 draws",
        violations == 0,
        f"{violations} violations",
    )


def test_acceptance_4_gradient_finite_differences():
    rng = np.random.default_rng(4)
    worst = 0.0
    for kind in ("logistic", "quadratic"):
        loss = make_loss(kind)
        for _ in range(100):
            n, d = 12, 4
            x = rng.normal(scale=2.0, size=(n, d))
            y = rng.choice([-1.0, 1.0], size=n) if kind == "logistic" else rng.normal(size=n)
            data = Dataset(x, y)
            w = rng.normal(scale=1.5, size=d)
            g = loss.gradient(data, w)
            fd = np.zeros(d)
            for j in range(d):
                e = np.zeros(d)
                e[j] = 1e-5
                fd[j] = (loss.value(data, w + e) - loss.value(data, w - e)) / 2e-5
            worst = max(worst, np.linalg.norm(fd - g) / max(np.linalg.norm(g), 1e-12))
    _report(
        4,
        "analytic gradients match central differences (rel <= 1e-6, 100 per loss)",
        worst <= 1e-6,
        f"worst rel error {worst:.2e}",
    )


def _noise_setups():
    rng = np.random.default_rng(55)
    d = 4
    x = rng.normal(size=d)
    weights = rng.uniform(0.5, 2.0, size=d)
    full = FullSampling(d)
    full_var = 0.7
    singleton = SingletonSampling(np.array([0.1, 0.2, 0.3, 0.4]))
    single_vars = rng.uniform(0.2, 1.5, size=d)
    block = BlockSampling([(0, 1), (2, 3)], [0.35, 0.65])
    block_vars = np.array([0.5, 1.1])
    nice = NiceSampling(d, 2)
    nice_vars = rng.uniform(0.2, 1.0, size=d)
    p_single = singleton.inclusion_probabilities()
    p_block = block.inclusion_probabilities()
    return x, weights, [
        ("full", full, lambda idx: full_var,
         noise_energy_enumerable([(np.arange(d), 1.0, full_var)], np.ones(d), weights)),
        ("singleton", singleton, lambda idx: single_vars[idx[0]],
         noise_energy_enumerable(
             [([j], p_single[j], single_vars[j]) for j in range(d)], p_single, weights)),
        ("block", block, lambda idx: block_vars[block.block_of[idx[0]]],
         noise_energy_enumerable(
             [(blk, block.probs[i], block_vars[i]) for i, blk in enumerate(block.blocks)],
             p_block, weights)),
        ("nice", nice, lambda idx: float(np.sum(nice_vars[idx])),
         noise_energy_nice(nice_vars, d, 2, weights)),
    ]


def test_acceptance_5_sketch_unbiasedness_and_variance():
    x, weights, setups = _noise_setups()
    failures = []
    for name, dist, var_for, noise_energy in setups:
        stats = run_sketch_mc(dist, x, weights, var_for, 100_000, seed=71)
        if not np.all(np.abs(stats.mean - x) <= 4 * stats.mean_se + 1e-12):
            failures.append(f"{name}: mean")
        p = dist.inclusion_probabilities()
        expected = float(np.sum(weights * x * x / p)) + noise_energy
        if abs(stats.norm_mean - expected) > 4 * stats.norm_se + 1e-9 * abs(expected):
            failures.append(f"{name}: second moment")
    _report(
        5,
        "E[Cx]=x and E||C(x+eta)||^2_D match closed forms (4 SE, all variants)",
        not failures,
        "; ".join(failures) or "N=1e5 per variant",
    )


def test_acceptance_6_second_moment_closed_forms():
    failures = []
    # worked singleton value: L=(1,2), M=I -> 5 exactly
    singleton = SingletonSampling.uniform(2)
    s_map = LipschitzMap(table={"coord:0": 1.0, "coord:1": 2.0})
    if sketch_second_moment(singleton, s_map, [1.0, 1.0]) != pytest.approx(5.0):
        failures.append("singleton worked value")
    # worked full value: L^2 tr(M^{-1}) exactly
    full = FullSampling(2)
    f_map = LipschitzMap(table={"full": 2.0})
    if sketch_second_moment(full, f_map, [1.0, 4.0]) != pytest.approx(5.0):
        failures.append("full worked value")
    # Monte Carlo agreement at 4 SE for the three closed-form variants
    rng = np.random.default_rng(66)
    block = BlockSampling([(0, 1), (2,)], [0.3, 0.7])
    b_map = LipschitzMap(table={"block:0": 1.0, "block:1": 3.0})
    cases = [
        (singleton, s_map, np.array([1.0, 1.0])),
        (full, f_map, np.array([1.0, 4.0])),
        (block, b_map, np.ones(3)),
    ]
    for dist, lmap, m in cases:
        closed = sketch_second_moment(dist, lmap, m)
        est, se = sketch_second_moment_mc(dist, lmap, m, rng=rng)
        if abs(est - closed) > 4 * se + 1e-9 * closed:
            failures.append(f"{type(dist).__name__} MC")
    _report(
        6,
        "second-moment closed forms match Monte Carlo; worked values exact",
        not failures,
        "; ".join(failures) or "singleton=5, full=L^2 tr(M^-1)",
    )


def test_acceptance_7_reductions_bitwise():
    rng0 = np.random.default_rng(77)
    x = rng0.normal(size=(25, 3))
    y = rng0.choice([-1.0, 1.0], size=25)
    data = Dataset(x, y)
    loss = LogisticLoss()
    d = 3
    steps = 100
    ok = True

    # singleton uniform vs hand-coded single-coordinate noisy updates
    dist = SingletonSampling.uniform(d)
    p = dist.inclusion_probabilities()
    gamma = default_step_sizes(p, loss.component_smoothness(data))
    sigma_sq = np.array([0.4, 0.3, 0.5])
    noise = NoiseScales(table={f"coord:{j}": sigma_sq[j] for j in range(d)})
    run = sketched_gd(
        loss, data, dist, Schedule(outer_t=steps, inner_k=1), noise, gamma,
        np.zeros(d), np.random.default_rng(2024), keep_iterates=True,
    )
    rng = np.random.default_rng(2024)
    cumulative = np.cumsum(np.full(d, 1.0 / d))
    w = np.zeros(d)
    for step in range(steps):
        u = rng.random()
        j = min(int(np.searchsorted(cumulative, u, side="right")), d - 1)
        g = loss.gradient(data, w)
        eta = rng.normal(0.0, math.sqrt(sigma_sq[j]), size=1)
        w[j] -= gamma[j] * ((g[j] + eta[0]) / p[j])
        ok = ok and np.array_equal(run.iterates[step + 1], w)

    # full sampling vs hand-coded noisy full-gradient updates
    dist_full = FullSampling(d)
    gamma_full = default_step_sizes(
        dist_full.inclusion_probabilities(), loss.component_smoothness(data)
    )
    noise_full = NoiseScales(table={"full": 0.25})
    run_full = sketched_gd(
        loss, data, dist_full, Schedule(outer_t=steps, inner_k=1), noise_full,
        gamma_full, np.zeros(d), np.random.default_rng(4048), keep_iterates=True,
    )
    rng = np.random.default_rng(4048)
    w = np.zeros(d)
    for step in range(steps):
        g = loss.gradient(data, w)
        eta = rng.normal(0.0, math.sqrt(0.25), size=d)
        w = w - gamma_full * (g + eta)
        ok = ok and np.array_equal(run_full.iterates[step + 1], w)

    _report(
        7,
        "100-step trajectories bitwise equal to coordinate-descent and "
        "gradient-descent reference loops on a shared stream",
        ok,
    )


def test_acceptance_8_noiseless_convergence():
    d = 16
    rng = np.random.default_rng(88)
    m = rng.uniform(0.5, 8.0, size=d)
    target = rng.normal(size=d)
    x = np.diag(np.sqrt(d * m))
    data = Dataset(x, x @ target)
    loss = QuadraticLoss()

    # one full-sampling step with Gamma = M^{-1} lands on the optimum
    full = FullSampling(d)
    gamma = default_step_sizes(full.inclusion_probabilities(), m)
    one_step = sketched_gd(
        loss, data, full, Schedule(1, 1), None, gamma, np.zeros(d),
        np.random.default_rng(0),
    )
    rel_err = np.max(np.abs(one_step.w_priv - target) / np.maximum(np.abs(target), 1e-300))
    one_step_ok = rel_err <= 1e-12

    # singleton uniform, K = 10 d: median suboptimality strictly decreases
    singleton = SingletonSampling.uniform(d)
    gamma_s = default_step_sizes(singleton.inclusion_probabilities(), m)
    epochs = 4
    trajectories = []
    for seed in range(50):
        run = sketched_gd(
            loss, data, singleton, Schedule(outer_t=epochs, inner_k=10 * d), None,
            gamma_s, np.zeros(d), np.random.default_rng(seed),
        )
        trajectories.append(run.objectives)
    medians = np.median(np.asarray(trajectories), axis=0)
    monotone = bool(np.all(np.diff(medians) < 0.0))
    _report(
        8,
        "one exact step at full sampling; monotone median decay at singleton sampling",
        one_step_ok and monotone,
        f"one-step rel err {rel_err:.1e}, medians {np.array2string(medians, precision=2)}",
    )


def test_acceptance_9_convex_utility_desk_scale():
    start = time.perf_counter()
    seeds = ", ".join(str(s) for s in range(1, 51))
    config = parse_config(
        f"""
        dataset = synthetic
        loss = logistic
        n = 2000
        d = 8
        profile = uniform
        distribution = singleton-uniform
        epsilon = 1.0
        delta = 1e-5
        schedule = auto-convex
        data_seed = 0
        seeds = [{seeds}]
        """
    )
    art = run_experiment(config)
    summary = art.summary["methods"]["singleton-uniform"]
    median = summary["median_final_subopt"]
    bound = summary["utility_bound"]
    elapsed = time.perf_counter() - start
    _report(
        9,
        "median suboptimality over 50 seeds within 10x of the bound value",
        median <= 10.0 * bound and elapsed < 120.0,
        f"median {median:.4f}, bound {bound:.4f}, ratio {median / bound:.2f}, {elapsed:.1f}s",
    )


def test_acceptance_10_importance_sampling_advantage():
    start = time.perf_counter()
    planted = "[1.0" + ", 0.0" * 31 + "]"
    seeds = ", ".join(str(s) for s in range(1, 21))
    config = parse_config(
        f"""
        dataset = synthetic
        loss = logistic
        n = 4000
        d = 32
        profile = spike
        m_big = 1000.0
        planted = given
        planted_w = {planted}
        epsilon = 1.0
        delta = 1e-5
        schedule = auto-convex
        data_seed = 1
        seeds = [{seeds}]
        """
    )
    art = compare_methods(config, ["dp-cd-uniform", "dp-skgd-importance"])
    finals: dict[str, dict[int, float]] = {}
    for line in art.csv_text.strip().splitlines()[1:]:
        parts = line.split(",")
        if parts[2] == "final":
            finals.setdefault(parts[0], {})[int(parts[1])] = float(parts[4])
    seeds_list = sorted(finals["dp-skgd-importance"])
    wins = sum(
        1
        for s in seeds_list
        if finals["dp-skgd-importance"][s] < finals["dp-cd-uniform"][s]
    )
    n_pairs = len(seeds_list)
    # one-sided sign test: P(Bin(n, 1/2) >= wins)
    p_value = sum(math.comb(n_pairs, k) for k in range(wins, n_pairs + 1)) / 2.0**n_pairs
    medians = art.summary["medians"]
    elapsed = time.perf_counter() - start
    _report(
        10,
        "importance sampling beats uniform coordinate sampling on the spike profile",
        medians["dp-skgd-importance"] < medians["dp-cd-uniform"]
        and p_value < 0.05
        and elapsed < 300.0,
        f"medians {medians['dp-skgd-importance']:.4f} vs {medians['dp-cd-uniform']:.4f}, "
        f"wins {wins}/{n_pairs}, sign-test p {p_value:.2e}, {elapsed:.1f}s",
    )


def test_acceptance_11_byte_determinism():
    config_text = """
    dataset = synthetic
    loss = logistic
    n = 300
    d = 4
    distribution = block-importance
    blocks = 2
    epsilon = 1.0
    delta = 1e-5
    schedule = auto-convex
    seeds = [3, 1, 4]
    """
    a = run_experiment(parse_config(config_text))
    b = run_experiment(parse_config(config_text))
    ca = compare_methods(parse_config(config_text), ["dp-sgd", "dp-skgd-block"])
    cb = compare_methods(parse_config(config_text), ["dp-sgd", "dp-skgd-block"])
    ok = (
        a.csv_text == b.csv_text
        and a.summary_json() == b.summary_json()
        and ca.csv_text == cb.csv_text
        and ca.summary_json() == cb.summary_json()
    )
    _report(11, "rerunning an experiment config reproduces CSV/JSON bytes exactly", ok)
