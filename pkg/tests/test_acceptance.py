"""Acceptance suite: one test per release criterion, at the stated tolerance.

Each test prints a single PASS line on success (run pytest with -s to see
them inline).  The two experiment tests also leave their CSV traces under
out/acceptance/ so the plotting companion can consume them.
"""

import itertools
import math
import time
from pathlib import Path

import numpy as np
import pytest

from cbce.betting import (
    betting_fraction_from_potential,
    kt_betting_fraction,
    kt_potential,
    wealth_lower_bound_holds,
)
from cbce.blackbox import CoinBettingLea
from cbce.envs import LeaEnvironment
from cbce.harness import ExperimentConfig, run_experiment, simulate, verify_bounds
from cbce.intervals import (
    DataStreaming,
    GeometricCovering,
    Interval,
    ds_interval_starting_at,
    ds_partition,
    gc_active,
    gc_partition,
)
from cbce.meta import Cbce
from cbce.regret import best_shifting_loss, decompose_regret
from cbce.sleeping import SleepingCoinBetting, sleeping_regret_bound

OUT_DIR = Path(__file__).resolve().parent.parent / "out" / "acceptance"


def report(name: str) -> None:
    print(f"\nACCEPTANCE PASS: {name}", flush=True)


# -- coin betting core -------------------------------------------------------


def test_wealth_lower_bound_thousand_sequences():
    rng = np.random.default_rng(2024)
    started = time.perf_counter()
    for _ in range(1000):
        length = int(rng.integers(1, 257))
        coins = rng.uniform(-1.0, 1.0, size=length)
        check = wealth_lower_bound_holds(coins, tol=1e-9)
        assert check.ok, f"violation {check.max_violation} at round {check.worst_round}"
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    report(f"wealth lower bound holds on 1000 random coin sequences ({elapsed:.1f}s)")


def test_kt_potential_values_and_closed_form():
    assert abs(kt_potential(0, 0.0) - 1.0) <= 1e-12
    assert abs(kt_potential(1, 1.0) - 1.0) <= 1e-9
    assert abs(kt_potential(2, 2.0) - 1.5) <= 1e-9
    worst = 0.0
    for t in range(1, 10001):
        for z in {0.0, float(t // 2), float(t - 1), float(-(t - 1))}:
            gap = abs(betting_fraction_from_potential(t, z) - kt_betting_fraction(z, t))
            worst = max(worst, gap)
    assert worst <= 1e-9, f"worst closed-form gap {worst}"
    report(f"KT potential values and closed-form fraction agree (worst gap {worst:.2e})")


# -- interval schedules ------------------------------------------------------


def test_active_set_size_formula_to_2_16():
    for t in range(1, 2**16 + 1):
        assert len(gc_active(t)) == t.bit_length()
    report("|active set| = floor(log2 t) + 1 for every t up to 65536")


def _is_gc_member(iv: Interval) -> bool:
    size = len(iv)
    return size & (size - 1) == 0 and iv.start % size == 0 and iv.start // size >= 1


def _exact_cover(pieces, iv) -> bool:
    pos = iv.start
    for piece in pieces:
        if piece.start != pos:
            return False
        pos = piece.end + 1
    return pos == iv.end + 1


def _two_run_shape(lengths) -> bool:
    for m in range(1, len(lengths) + 1):
        left, right = lengths[:m], lengths[m:]
        if all(left[i + 1] >= 2 * left[i] for i in range(len(left) - 1)) and all(
            2 * right[i + 1] <= right[i] for i in range(len(right) - 1)
        ):
            return True
    return False


def test_partition_laws_full_grid():
    for start in range(1, 257):
        for end in range(start, 257):
            iv = Interval(start, end)
            pieces = gc_partition(iv)
            assert _exact_cover(pieces, iv)
            assert all(_is_gc_member(p) for p in pieces)
            assert _two_run_shape([len(p) for p in pieces])
    for g in (1, 2):
        for start in range(1, 257):
            for end in range(start, 257):
                iv = Interval(start, end)
                pieces = ds_partition(iv, g)
                assert _exact_cover(pieces, iv)
                for piece in pieces:
                    family = ds_interval_starting_at(piece.start, g)
                    assert piece.start == family.start and piece.end <= family.end
                lengths = [len(p) for p in pieces]
                assert all(
                    lengths[i + 1] >= 2 * lengths[i] for i in range(len(lengths) - 2)
                )
    report("partition laws hold for every interval within [1..256], both families")


# -- regret decomposition ----------------------------------------------------


def test_regret_decomposition_identity_hundred_runs():
    rng = np.random.default_rng(77)
    for trial in range(100):
        schedule = DataStreaming(2) if trial % 2 == 0 else GeometricCovering()
        horizon = int(rng.integers(16, 257))
        env = LeaEnvironment.generate(5000 + trial, horizon=horizon, n_experts=5)
        algo = Cbce(schedule, lambda: CoinBettingLea(env.n_experts))
        trace = simulate(algo, env).trace(env.losses)
        for _ in range(20):
            start = int(rng.integers(1, horizon + 1))
            end = int(rng.integers(start, horizon + 1))
            comparator = int(rng.integers(env.n_experts))
            total, meta, base = decompose_regret(
                trace, Interval(start, end), comparator, schedule
            )
            assert abs(total - (meta + base)) <= 1e-9
    report("regret decomposition identity exact on 100 runs x 20 intervals")


# -- sleeping regret bound ---------------------------------------------------


def test_sleeping_regret_bound_hundred_instances():
    rng = np.random.default_rng(99)
    violations = 0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        horizon = int(rng.integers(32, 513))
        masks = rng.random((horizon, n)) < rng.uniform(0.25, 0.9)
        for t in range(horizon):
            if not masks[t].any():
                masks[t, rng.integers(n)] = True
        for i in range(n):
            if not masks[:, i].any():
                masks[rng.integers(horizon), i] = True
        losses = rng.random((horizon, n))
        engine = SleepingCoinBetting(n_experts=n)
        regrets = np.zeros(n)
        awake_before_last = np.zeros(n)
        for t in range(horizon):
            p = engine.decide(awake=masks[t])
            learner_loss = float(p @ losses[t])
            regrets += masks[t] * (learner_loss - losses[t])
            if t < horizon - 1:
                awake_before_last += masks[t]
            engine.update(losses[t], learner_loss=learner_loss, awake=masks[t])
        prior = {i: 1.0 for i in range(n)}
        for j in range(n):
            bound = sleeping_regret_bound(
                {j: 1.0}, {j: int(1 + awake_before_last[j])}, prior, horizon
            )
            if regrets[j] > bound:
                violations += 1
    assert violations == 0
    report("sleeping regret stays within its bound on 100 random instances")


# -- meta regret bound -------------------------------------------------------


def test_meta_regret_bound_twenty_seeds():
    config = ExperimentConfig(
        experiment="lea", prior="paper", reps=20, base_seed=0, horizon=512
    )
    report_obj = verify_bounds(config)
    counts = report_obj.counts()
    assert counts["meta_violations"] == 0, report_obj.violations[:3]
    assert counts["sa_violations"] == 0, report_obj.violations[:3]
    report(
        "per-interval meta regret bound and window bounds hold over 20 seeds "
        f"({counts['meta_checks']} interval checks, {counts['sa_checks']} window checks)"
    )


# -- shifting comparator oracle ----------------------------------------------


def test_shifting_dp_matches_enumeration_full_grid():
    rng = np.random.default_rng(13)
    for n in (1, 2, 3):
        for horizon in range(1, 9):
            for draw in range(2):
                losses = rng.random((horizon, n))
                by_switches = {}
                for seq in itertools.product(range(n), repeat=horizon):
                    used = sum(seq[i] != seq[i + 1] for i in range(horizon - 1))
                    value = sum(losses[t, seq[t]] for t in range(horizon))
                    by_switches[used] = min(by_switches.get(used, math.inf), value)
                for budget in (0, 1, 2):
                    brute = min(
                        value for used, value in by_switches.items() if used <= budget
                    )
                    assert abs(best_shifting_loss(losses, budget) - brute) <= 1e-12
    report("shifting comparator oracle equals exhaustive enumeration on the full grid")


# -- experiments -------------------------------------------------------------


@pytest.fixture(scope="module")
def lea_result():
    config = ExperimentConfig(
        experiment="lea",
        metas=("cbce", "saol", "fixedshare"),
        schedule="ds",
        g=2,
        reps=50,
        base_seed=1,
        out_dir=str(OUT_DIR / "lea"),
    )
    started = time.perf_counter()
    result = run_experiment(config)
    return result, time.perf_counter() - started


@pytest.fixture(scope="module")
def metric_result():
    config = ExperimentConfig(
        experiment="metric",
        metas=("cbce", "saol"),
        schedule="ds",
        g=2,
        reps=50,
        base_seed=1,
        out_dir=str(OUT_DIR / "metric"),
    )
    started = time.perf_counter()
    result = run_experiment(config)
    return result, time.perf_counter() - started


def test_lea_experiment_ordering_and_adaptation(lea_result):
    result, elapsed = lea_result
    assert elapsed < 300.0, f"took {elapsed:.0f}s"
    algos = result.summary["algos"]
    assert algos["cbce"]["mean_total_loss"] < algos["saol"]["mean_total_loss"]
    favored = result.summary["segment_favored_tail_mean"]
    tails = algos["cbce"]["segment_tail_mean_loss"]
    gaps = [tail - fav for tail, fav in zip(tails, favored)]
    assert all(gap <= 0.1 for gap in gaps), f"tail gaps {gaps}"
    report(
        "expert-advice experiment: ordering and segment adaptation hold "
        f"({elapsed:.0f}s, gaps {['%.3f' % g for g in gaps]})"
    )


def test_metric_experiment_ordering_and_loss_range(metric_result):
    result, elapsed = metric_result
    assert elapsed < 600.0, f"took {elapsed:.0f}s"
    for (rep, name), sim in result.sims.items():
        assert sim.learner_losses.min() >= 0.0
        assert sim.learner_losses.max() <= 1.0
    algos = result.summary["algos"]
    assert algos["cbce"]["mean_total_loss"] < algos["saol"]["mean_total_loss"]
    report(f"metric experiment: losses in range and ordering holds ({elapsed:.0f}s)")


def test_determinism_byte_identical_csv(tmp_path):
    blobs = []
    for name in ("first", "second"):
        config = ExperimentConfig(
            experiment="lea",
            metas=("cbce", "saol"),
            reps=2,
            horizon=120,
            n_experts=40,
            base_seed=9,
            out_dir=str(tmp_path / name),
        )
        result = run_experiment(config)
        blobs.append(result.csv_path.read_bytes())
    assert blobs[0] == blobs[1]
    report("identical configurations produce byte-identical CSV traces")
