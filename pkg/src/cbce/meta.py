"""Meta algorithms that hedge over restarted base learners.

A schedule assigns each base-learner run a lifetime interval; runs are
spawned when their interval opens and retired when it closes, and the meta
layer combines the decisions of whichever runs are alive.  The coin-betting
meta (Cbce) treats runs as sleeping experts; Saol is the multiplicative
weights baseline with per-interval rates; FixedShare is the classic shifting
experts baseline, which plays directly over the environment's experts and
needs the horizon and switch budget up front.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .intervals import Interval
from .sleeping import SleepingCoinBetting


def paper_prior_weight(interval: Interval) -> float:
    """Unnormalized run prior 1 / (start^2 * (1 + floor(log2 start))).

    Summed over all runs this is bounded by pi^2/6 because at most
    1 + floor(log2 start) runs open at any start time.
    """
    start = interval.start
    return 1.0 / (start * start * (1 + (start.bit_length() - 1)))


def meta_regret_bound(interval: Interval) -> float:
    """Bound on the meta layer's regret against the run living on ``interval``:
    sqrt(|J| * (7 ln(end) + 5))."""
    return math.sqrt(len(interval) * (7.0 * math.log(interval.end) + 5.0))


def sa_regret_bound(interval: Interval, c: float, alpha: float) -> float:
    """Bound on regret over ``interval`` for a base learner with regret
    c * T^alpha: 4/(2^alpha - 1) * c * |I|^alpha + 8 sqrt(|I| (7 ln(end) + 5))."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"exponent must lie in (0, 1), got {alpha}")
    size = len(interval)
    return (4.0 / (2.0**alpha - 1.0)) * c * size**alpha + 8.0 * math.sqrt(
        size * (7.0 * math.log(interval.end) + 5.0)
    )


@dataclass
class BlackBoxRun:
    """A base-learner instance bound to one scheduling interval."""

    interval: Interval
    learner: Any


@dataclass
class StepOutcome:
    """What one meta round produced."""

    t: int
    decision: Any
    loss: float
    run_losses: dict[Interval, float]
    weights: dict[Interval, float]
    n_active: int


class _RestartMeta:
    """Shared run bookkeeping for schedule-driven meta algorithms."""

    def __init__(self, schedule, make_learner: Callable[[], Any], warm_start: bool = True):
        self.schedule = schedule
        self.make_learner = make_learner
        self.warm_start = warm_start
        self.runs: dict[Interval, BlackBoxRun] = {}
        self.t = 0
        self.prev_decision = None

    def _spawn(self, interval: Interval) -> None:
        raise NotImplementedError

    def _retire(self, interval: Interval) -> None:
        raise NotImplementedError

    def _weights(self) -> dict[Interval, float]:
        raise NotImplementedError

    def _update_weights(self, run_losses: dict[Interval, float], loss: float) -> None:
        raise NotImplementedError

    def step(self, env, t: int) -> StepOutcome:
        if t != self.t + 1:
            raise ValueError(f"rounds must be consecutive; expected {self.t + 1}, got {t}")
        self.t = t
        for interval in [iv for iv in self.runs if iv.end < t]:
            del self.runs[interval]
            self._retire(interval)
        for interval in self.schedule.active(t):
            if interval.start != t:
                continue
            learner = self.make_learner()
            if self.warm_start and self.prev_decision is not None:
                learner.warm_start(self.prev_decision)
            self.runs[interval] = BlackBoxRun(interval, learner)
            self._spawn(interval)
        decisions = {iv: run.learner.decide() for iv, run in self.runs.items()}
        weights = self._weights()
        decision = env.combine(weights, decisions)
        run_losses = {iv: _unit_loss(env.loss(t, d)) for iv, d in decisions.items()}
        loss = _unit_loss(env.loss(t, decision))
        self._update_weights(run_losses, loss)
        revealed = env.feedback(t)
        for run in self.runs.values():
            run.learner.update(revealed)
        self.prev_decision = decision
        return StepOutcome(t, decision, loss, run_losses, weights, len(self.runs))


def _unit_loss(value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"loss {value} outside [0, 1]")
    return float(value)


class Cbce(_RestartMeta):
    """Coin betting over black-box runs treated as sleeping experts.

    ``prior`` selects the run prior: "uniform" gives every run unnormalized
    weight 1 (the experiment default), "paper" uses the start-time weight of
    :func:`paper_prior_weight` (the bound-check default).

    Losses must be convex on the decision space and land in [0, 1]; the
    combined decision is the weighted average of the live runs' decisions.
    For nonconvex losses the theory instead calls for sampling a single run
    with probability equal to its weight (same guarantee, in expectation);
    that mode is not implemented here, weighted averaging is always used.
    """

    def __init__(self, schedule, make_learner, prior: str = "uniform",
                 warm_start: bool = True, delta: float = 0.0):
        super().__init__(schedule, make_learner, warm_start)
        if prior not in ("uniform", "paper"):
            raise ValueError(f"unknown prior mode {prior!r}")
        self.prior = prior
        self.engine = SleepingCoinBetting(delta=delta)

    def _spawn(self, interval: Interval) -> None:
        weight = paper_prior_weight(interval) if self.prior == "paper" else 1.0
        self.engine.add_expert(interval, weight)

    def _retire(self, interval: Interval) -> None:
        self.engine.remove_expert(interval)

    def _weights(self) -> dict[Interval, float]:
        # Live runs are exactly the awake experts, so no mask is needed.
        return self.engine.as_dict(self.engine.decide())

    def _update_weights(self, run_losses: dict[Interval, float], loss: float) -> None:
        self.engine.update(run_losses, loss)


class Saol(_RestartMeta):
    """Multiplicative weights over runs with per-interval rates.

    A run over interval J uses rate eta_J = min(1/2, 1/sqrt(|J|)), is born
    with weight eta_J, and after each round multiplies its weight by
    1 + eta_J * (meta loss - run loss), clipped at zero.
    """

    def __init__(self, schedule, make_learner, warm_start: bool = True):
        super().__init__(schedule, make_learner, warm_start)
        self.w: dict[Interval, float] = {}

    @staticmethod
    def rate(interval: Interval) -> float:
        return min(0.5, 1.0 / math.sqrt(len(interval)))

    def _spawn(self, interval: Interval) -> None:
        self.w[interval] = self.rate(interval)

    def _retire(self, interval: Interval) -> None:
        del self.w[interval]

    def _weights(self) -> dict[Interval, float]:
        total = sum(self.w.values())
        if total <= 0.0:
            return {iv: 1.0 / len(self.w) for iv in self.w}
        return {iv: weight / total for iv, weight in self.w.items()}

    def _update_weights(self, run_losses: dict[Interval, float], loss: float) -> None:
        for interval in self.w:
            regret = loss - run_losses[interval]
            self.w[interval] = max(
                0.0, self.w[interval] * (1.0 + self.rate(interval) * regret)
            )


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log(1.0 - p)


class FixedShare:
    """Exponential weights with uniform sharing at rate ``share_rate``.

    With share_rate 0 this is plain exponential weights.  ``tuned`` picks the
    textbook rates for a known horizon and switch budget, which is exactly
    the prior knowledge the schedule-driven algorithms avoid.
    """

    def __init__(self, n_experts: int, learning_rate: float, share_rate: float = 0.0):
        if learning_rate <= 0:
            raise ValueError(f"learning rate must be positive, got {learning_rate}")
        if not 0.0 <= share_rate < 1.0:
            raise ValueError(f"share rate must lie in [0, 1), got {share_rate}")
        self.n_experts = n_experts
        self.learning_rate = float(learning_rate)
        self.share_rate = float(share_rate)
        self.weights = np.full(n_experts, 1.0 / n_experts)
        self.t = 0

    @classmethod
    def tuned(cls, n_experts: int, horizon: int, switches: int) -> "FixedShare":
        if horizon < 2:
            raise ValueError("tuning requires a horizon of at least 2")
        share = switches / (horizon - 1)
        rate = math.sqrt(
            (2.0 / horizon)
            * (switches * math.log(n_experts) + (horizon - 1) * binary_entropy(share))
        )
        return cls(n_experts, learning_rate=rate, share_rate=share)

    def decide(self) -> np.ndarray:
        return self.weights / self.weights.sum()

    def update(self, losses: np.ndarray) -> None:
        losses = np.asarray(losses, dtype=float)
        w = self.weights * np.exp(-self.learning_rate * losses)
        if self.n_experts > 1 and self.share_rate > 0.0:
            total = w.sum()
            w = (1.0 - self.share_rate) * w + self.share_rate * (total - w) / (
                self.n_experts - 1
            )
        self.weights = w / w.sum()
        self.t += 1

    def step(self, env, t: int) -> StepOutcome:
        decision = self.decide()
        loss = _unit_loss(env.loss(t, decision))
        self.update(env.feedback(t))
        return StepOutcome(t, decision, loss, {}, {}, 0)
