"""Benchmark harness: drive (meta, base learner, schedule) combinations on
the synthetic environments, write CSV traces and a JSON summary, and replay
runs to check the regret bounds as runtime properties.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .blackbox import CoinBettingLea, MahalanobisMetric
from .envs import LeaEnvironment, MetricEnvironment
from .intervals import Interval, make_schedule
from .meta import Cbce, FixedShare, Saol, meta_regret_bound, sa_regret_bound
from .regret import Trace, m_shift_regret, moving_mean, sa_regret

MOVING_MEAN_WINDOW = {"lea": 10, "metric": 20}
SEGMENT_TAIL = 50
SA_WINDOWS = (50, 100, 200)
MSHIFT_BUDGET = 2
CSV_HEADER = "rep,t,algo,loss,movmean_loss,best_expert_loss,n_active_runs"


@dataclass
class ExperimentConfig:
    experiment: str = "lea"  # "lea" | "metric"
    metas: tuple[str, ...] = ("cbce",)
    schedule: str = "ds"
    g: int = 2
    prior: str = "uniform"  # "uniform" | "paper"
    reps: int = 1
    base_seed: int = 0
    horizon: int | None = None
    n_experts: int | None = None
    out_dir: str | None = None
    fs_switches: int = 2
    fs_horizon: int | None = None
    warm_start: bool = True

    def __post_init__(self):
        if self.experiment not in ("lea", "metric"):
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if isinstance(self.metas, str):
            self.metas = tuple(self.metas.split(","))
        known = {"cbce", "saol", "fixedshare"}
        for name in self.metas:
            if name not in known:
                raise ValueError(f"unknown meta algorithm {name!r}")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if "fixedshare" in self.metas:
            if self.experiment != "lea":
                raise ValueError("fixedshare plays over experts and needs the lea experiment")
            if self.fs_horizon is None and self.horizon is None:
                self.fs_horizon = 600
        if self.experiment == "metric" and self.n_experts is not None:
            raise ValueError("n_experts only applies to the lea experiment")

    @property
    def effective_horizon(self) -> int:
        if self.horizon is not None:
            return self.horizon
        return 600 if self.experiment == "lea" else 1500


def make_environment(config: ExperimentConfig, seed: int):
    if config.experiment == "lea":
        return LeaEnvironment.generate(
            seed, horizon=config.effective_horizon, n_experts=config.n_experts or 1000
        )
    return MetricEnvironment.generate(seed, horizon=config.effective_horizon)


def make_algorithm(name: str, config: ExperimentConfig, env):
    schedule = make_schedule(config.schedule, config.g)
    if config.experiment == "lea":
        def make_learner():
            return CoinBettingLea(env.n_experts)
    else:
        def make_learner():
            return MahalanobisMetric(env.dim, trace_penalty=env.trace_penalty)
    if name == "cbce":
        return Cbce(schedule, make_learner, prior=config.prior, warm_start=config.warm_start)
    if name == "saol":
        return Saol(schedule, make_learner, warm_start=config.warm_start)
    if name == "fixedshare":
        horizon = config.fs_horizon or config.effective_horizon
        return FixedShare.tuned(env.n_experts, horizon, config.fs_switches)
    raise ValueError(f"unknown meta algorithm {name!r}")


@dataclass
class SimResult:
    """One algorithm's trajectory on one environment instance."""

    learner_losses: np.ndarray
    n_active: np.ndarray
    run_losses: dict[Interval, np.ndarray]
    segment_end_decisions: list
    decisions: list | None = None

    def trace(self, comparator_losses=None) -> Trace:
        return Trace(
            learner_losses=self.learner_losses,
            comparator_losses=comparator_losses,
            run_losses=self.run_losses,
            n_active=self.n_active,
            decisions=self.decisions,
        )


def simulate(
    algo, env, snapshot_rounds: set[int] | None = None, record_decisions: bool = False
) -> SimResult:
    horizon = env.horizon
    learner_losses = np.zeros(horizon)
    n_active = np.zeros(horizon, dtype=np.int64)
    run_losses: dict[Interval, list[float]] = {}
    snapshots = []
    decisions = [] if record_decisions else None
    for t in range(1, horizon + 1):
        outcome = algo.step(env, t)
        learner_losses[t - 1] = outcome.loss
        n_active[t - 1] = outcome.n_active
        for interval, value in outcome.run_losses.items():
            run_losses.setdefault(interval, []).append(value)
        if snapshot_rounds and t in snapshot_rounds:
            snapshots.append(_copy_decision(outcome.decision))
        if decisions is not None:
            decisions.append(_copy_decision(outcome.decision))
    return SimResult(
        learner_losses=learner_losses,
        n_active=n_active,
        run_losses={iv: np.asarray(v) for iv, v in run_losses.items()},
        segment_end_decisions=snapshots,
        decisions=decisions,
    )


def _copy_decision(decision):
    if isinstance(decision, tuple):
        matrix, bias = decision
        return matrix.copy(), float(bias)
    return np.asarray(decision).copy()


def _format(value: float) -> str:
    return format(float(value), ".12g")


@dataclass
class RunResult:
    config: ExperimentConfig
    summary: dict
    csv_path: Path | None
    summary_path: Path | None
    sims: dict  # (rep, algo name) -> SimResult


def run_experiment(config: ExperimentConfig) -> RunResult:
    """Run every configured meta algorithm for every repetition.

    Writes the per-round CSV and summary JSON when an output directory is
    configured.  Identical configs produce byte-identical outputs.
    """
    window = min(MOVING_MEAN_WINDOW[config.experiment], config.effective_horizon)
    rows: list[str] = [CSV_HEADER]
    sims: dict = {}
    totals = {name: [] for name in config.metas}
    tail_means = {name: [] for name in config.metas}
    sa_values = {name: {tau: [] for tau in SA_WINDOWS} for name in config.metas}
    mshift_values = {name: [] for name in config.metas}
    favored_tails = []
    segment_bounds = None

    for rep in range(config.reps):
        env = make_environment(config, config.base_seed + rep)
        bounds = env.segment_bounds
        segment_bounds = bounds
        snapshot_rounds = set(bounds[1:]) if config.experiment == "metric" else None
        rep_sims = {}
        for name in config.metas:
            algo = make_algorithm(name, config, env)
            sim = simulate(algo, env, snapshot_rounds)
            rep_sims[name] = sim
            sims[(rep, name)] = sim
        comparator_losses = _comparator_losses(config, env, rep_sims)
        if config.experiment == "lea":
            favored_tails.append(_favored_tail_means(env))
        for name in config.metas:
            sim = rep_sims[name]
            smooth = moving_mean(sim.learner_losses, window)
            best = _best_column(config, env, sim)
            for t in range(1, env.horizon + 1):
                rows.append(
                    f"{rep},{t},{name},{_format(sim.learner_losses[t - 1])},"
                    f"{_format(smooth[t - 1])},{_format(best[t - 1])},{sim.n_active[t - 1]}"
                )
            totals[name].append(float(sim.learner_losses.sum()))
            tail_means[name].append(_segment_tail_means(sim.learner_losses, bounds))
            trace = sim.trace(comparator_losses)
            for tau in SA_WINDOWS:
                if tau <= env.horizon:
                    sa_values[name][tau].append(sa_regret(trace, tau))
            mshift_values[name].append(m_shift_regret(trace, MSHIFT_BUDGET))

    summary = {
        "experiment": config.experiment,
        "horizon": config.effective_horizon,
        "reps": config.reps,
        "schedule": config.schedule,
        "g": config.g,
        "prior": config.prior,
        "warm_start": config.warm_start,
        "base_seed": config.base_seed,
        "segment_bounds": segment_bounds,
        "moving_mean_window": window,
        "algos": {},
    }
    if favored_tails:
        summary["segment_favored_tail_mean"] = [
            float(np.mean([tails[k] for tails in favored_tails]))
            for k in range(len(favored_tails[0]))
        ]
    for name in config.metas:
        summary["algos"][name] = {
            "mean_total_loss": float(np.mean(totals[name])),
            "segment_tail_mean_loss": [
                float(np.mean([tails[k] for tails in tail_means[name]]))
                for k in range(len(tail_means[name][0]))
            ],
            "sa_regret": {
                str(tau): float(np.mean(values))
                for tau, values in sa_values[name].items()
                if values
            },
            f"m_shift_regret_m{MSHIFT_BUDGET}": float(np.mean(mshift_values[name])),
        }

    csv_path = summary_path = None
    if config.out_dir is not None:
        out_dir = Path(config.out_dir)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            csv_path = out_dir / "trace.csv"
            csv_path.write_text("\n".join(rows) + "\n", encoding="utf-8")
            summary_path = out_dir / "summary.json"
            summary_path.write_text(
                json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
        except OSError as exc:
            raise OSError(f"cannot write results under {out_dir}: {exc}") from exc
    return RunResult(config, summary, csv_path, summary_path, sims)


def _comparator_losses(config: ExperimentConfig, env, rep_sims: dict) -> np.ndarray:
    if config.experiment == "lea":
        return env.losses
    # Metric traces have no expert grid; compare against each algorithm's
    # segment-end models evaluated over the whole horizon (a harness
    # convention, the task has no canonical comparator set).
    models = []
    for name in sorted(rep_sims):
        models.extend(rep_sims[name].segment_end_decisions)
    columns = np.empty((env.horizon, len(models)))
    for k, model in enumerate(models):
        for t in range(1, env.horizon + 1):
            columns[t - 1, k] = env.loss(t, model)
    return columns


def _best_column(config: ExperimentConfig, env, sim: SimResult) -> np.ndarray:
    if config.experiment == "lea":
        return env.losses.min(axis=1)
    best = np.ones(env.horizon)
    for interval, values in sim.run_losses.items():
        for offset, value in enumerate(values):
            t = interval.start + offset
            if value < best[t - 1]:
                best[t - 1] = value
    return best


def _segment_tail_means(losses: np.ndarray, bounds: list[int]) -> list[float]:
    out = []
    for k in range(len(bounds) - 1):
        lo, hi = bounds[k], bounds[k + 1]
        tail = max(lo, hi - SEGMENT_TAIL)
        out.append(float(losses[tail:hi].mean()))
    return out


def _favored_tail_means(env: LeaEnvironment) -> list[float]:
    out = []
    for k in range(len(env.segment_bounds) - 1):
        lo, hi = env.segment_bounds[k], env.segment_bounds[k + 1]
        tail = max(lo, hi - SEGMENT_TAIL)
        out.append(float(env.losses[tail:hi, env.favored[k]].mean()))
    return out


@dataclass
class BoundCheck:
    seed: int
    kind: str  # "meta" or "sa"
    subject: str
    realized: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.realized <= self.bound + 1e-9


@dataclass
class BoundReport:
    checks: list[BoundCheck] = field(default_factory=list)

    @property
    def violations(self) -> list[BoundCheck]:
        return [c for c in self.checks if not c.ok]

    @property
    def all_ok(self) -> bool:
        return not self.violations

    def counts(self) -> dict:
        meta = [c for c in self.checks if c.kind == "meta"]
        sa = [c for c in self.checks if c.kind == "sa"]
        return {
            "meta_checks": len(meta),
            "meta_violations": sum(not c.ok for c in meta),
            "sa_checks": len(sa),
            "sa_violations": sum(not c.ok for c in sa),
        }


def verify_bounds(config: ExperimentConfig) -> BoundReport:
    """Replay runs and assert the regret bounds hold pointwise.

    Requires the start-time-weighted run prior; the uniform experiment prior
    carries no bound.  Warm starting is disabled for the replay: the base
    learner's regret constant used in the window checks is the cold-start
    one.  Checks, per seed: every run's realized meta regret against its
    bound, and every window's realized regret against the combined bound for
    a sqrt-horizon base learner.
    """
    if config.prior != "paper":
        raise ValueError("bound verification requires the paper run prior (got uniform)")
    if config.experiment != "lea":
        raise ValueError("bound verification is defined for the lea experiment only")
    horizon = config.horizon or 512
    n_experts = config.n_experts or 1000
    schedule = make_schedule(config.schedule, config.g)
    report = BoundReport()
    c_base = math.sqrt(2.0 * (math.log(n_experts) + 0.5 * math.log(horizon) + 2.0))
    for rep in range(config.reps):
        seed = config.base_seed + rep
        env = LeaEnvironment.generate(seed, horizon=horizon, n_experts=n_experts)
        algo = Cbce(
            schedule,
            lambda: CoinBettingLea(env.n_experts),
            prior="paper",
            warm_start=False,
        )
        sim = simulate(algo, env)
        for interval, values in sim.run_losses.items():
            lived = Interval(interval.start, interval.start + len(values) - 1)
            realized = float(
                sim.learner_losses[lived.start - 1 : lived.end].sum() - values.sum()
            )
            report.checks.append(
                BoundCheck(seed, "meta", repr(lived), realized, meta_regret_bound(lived))
            )
        learner_prefix = np.concatenate(([0.0], np.cumsum(sim.learner_losses)))
        expert_prefix = np.vstack([np.zeros(env.n_experts), np.cumsum(env.losses, axis=0)])
        tau = 1
        taus = []
        while tau < horizon:
            taus.append(tau)
            tau *= 2
        taus.append(horizon)
        for tau in taus:
            learner_windows = learner_prefix[tau:] - learner_prefix[:-tau]
            best_windows = (expert_prefix[tau:] - expert_prefix[:-tau]).min(axis=1)
            regrets = learner_windows - best_windows
            ends = np.arange(tau, horizon + 1)
            log_ends = np.log(ends)
            bounds = (4.0 / (2.0**0.5 - 1.0)) * c_base * tau**0.5 + 8.0 * np.sqrt(
                tau * (7.0 * log_ends + 5.0)
            )
            worst = int(np.argmax(regrets - bounds))
            report.checks.append(
                BoundCheck(
                    seed,
                    "sa",
                    f"window [{worst + 1}..{worst + tau}]",
                    float(regrets[worst]),
                    float(bounds[worst]),
                )
            )
    return report
