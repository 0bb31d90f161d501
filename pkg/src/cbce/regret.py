"""Regret evaluation over recorded traces.

A trace holds the learner's per-round losses, optional per-round comparator
losses (expert losses in the expert-advice setting, or a finite comparator
grid elsewhere), and optional per-run losses from a restart meta algorithm.
Everything here is pure post-processing of those arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .intervals import Interval


@dataclass
class Trace:
    """Per-round record of a finished run.

    run_losses maps each run's lifetime interval to that run's losses, one
    entry per round the run was alive (aligned from interval.start; the
    array may be shorter than the interval when the horizon cut it off).
    decisions, when recorded, holds one combined-decision snapshot per round.
    """

    learner_losses: np.ndarray
    comparator_losses: np.ndarray | None = None  # shape (T, K)
    run_losses: dict[Interval, np.ndarray] | None = None
    n_active: np.ndarray | None = None
    decisions: list | None = None

    @property
    def horizon(self) -> int:
        return len(self.learner_losses)

    def comparator_column(self, comparator) -> np.ndarray:
        """Per-round losses of a comparator: a column index or a (T,) array."""
        if isinstance(comparator, (int, np.integer)):
            if self.comparator_losses is None:
                raise ValueError("trace has no comparator losses")
            return self.comparator_losses[:, comparator]
        arr = np.asarray(comparator, dtype=float)
        if arr.shape != (self.horizon,):
            raise ValueError("comparator loss array length does not match the trace")
        return arr


def static_regret(trace: Trace, comparator) -> float:
    """Total learner loss minus total loss of one fixed comparator."""
    return float(trace.learner_losses.sum() - trace.comparator_column(comparator).sum())


def sa_regret(trace: Trace, tau: int) -> float:
    """Worst regret over all contiguous windows of length tau.

    Per window, the comparator is the best single column of the trace's
    comparator losses (ties go to the lowest index, which cannot change the
    value).
    """
    horizon = trace.horizon
    if not 1 <= tau <= horizon:
        raise ValueError(f"window length {tau} outside [1, {horizon}]")
    if trace.comparator_losses is None:
        raise ValueError("trace has no comparator losses")
    learner_prefix = np.concatenate(([0.0], np.cumsum(trace.learner_losses)))
    comp_prefix = np.vstack(
        [np.zeros(trace.comparator_losses.shape[1]), np.cumsum(trace.comparator_losses, axis=0)]
    )
    learner_windows = learner_prefix[tau:] - learner_prefix[:-tau]
    comp_windows = (comp_prefix[tau:] - comp_prefix[:-tau]).min(axis=1)
    return float((learner_windows - comp_windows).max())


def best_shifting_loss(comparator_losses: np.ndarray, switches: int) -> float:
    """Minimum total loss of a comparator sequence with at most ``switches``
    switches, by dynamic programming over (round, comparator, switches used).
    """
    if switches < 0:
        raise ValueError(f"switch budget must be >= 0, got {switches}")
    losses = np.asarray(comparator_losses, dtype=float)
    horizon, n = losses.shape
    # dp[j, k]: cheapest sequence over the rounds so far ending at comparator
    # k with at most j switches.  The prefix minimum over dp[j-1] makes each
    # round O(n * switches).
    dp = np.tile(losses[0], (switches + 1, 1))
    for t in range(1, horizon):
        stay = dp
        best_prev = stay.min(axis=1)
        moved = np.empty_like(stay)
        moved[0] = stay[0]
        moved[1:] = np.minimum(stay[1:], best_prev[:-1, None])
        dp = moved + losses[t]
    return float(dp[switches].min())


def m_shift_regret(trace: Trace, switches: int) -> float:
    """Learner loss minus the best comparator sequence with at most
    ``switches`` switches."""
    if trace.comparator_losses is None:
        raise ValueError("trace has no comparator losses")
    best = best_shifting_loss(trace.comparator_losses, switches)
    return float(trace.learner_losses.sum() - best)


def sa_to_mshift_bound(c: float, switches: int, horizon: int) -> float:
    """Turn a per-interval bound c*sqrt(|I| ln end) into a shifting bound:
    c * sqrt((switches + 1) * horizon * ln horizon)."""
    if c <= 0:
        raise ValueError(f"bound constant must be positive, got {c}")
    return c * math.sqrt((switches + 1) * horizon * math.log(horizon))


def moving_mean(series, window: int) -> np.ndarray:
    """Centered moving average; windows are truncated at both ends."""
    x = np.asarray(series, dtype=float)
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if window > len(x):
        raise ValueError(f"window {window} exceeds series length {len(x)}")
    if window == 1:
        return x.copy()
    half_lo = (window - 1) // 2
    half_hi = window // 2
    prefix = np.concatenate(([0.0], np.cumsum(x)))
    n = len(x)
    idx = np.arange(n)
    lo = np.maximum(idx - half_lo, 0)
    hi = np.minimum(idx + half_hi, n - 1)
    return (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1)


def interval_regret(trace: Trace, interval: Interval, comparator) -> float:
    """Regret against one fixed comparator restricted to an interval."""
    sl = slice(interval.start - 1, interval.end)
    column = trace.comparator_column(comparator)
    return float(trace.learner_losses[sl].sum() - column[sl].sum())


def run_loss_slice(trace: Trace, piece: Interval) -> np.ndarray:
    """Losses of the recorded run that covers ``piece`` from its own start.

    The piece either is a run's full interval or a prefix of the unique run
    spawned at the piece's start.
    """
    if trace.run_losses is None:
        raise ValueError("trace has no per-run losses")
    if piece in trace.run_losses:
        run_interval, values = piece, trace.run_losses[piece]
    else:
        matches = [
            iv for iv in trace.run_losses if iv.start == piece.start and iv.end >= piece.end
        ]
        if not matches:
            raise KeyError(f"no recorded run covers {piece}")
        run_interval = min(matches, key=len)
        values = trace.run_losses[run_interval]
    offset = piece.start - run_interval.start
    length = len(piece)
    if offset + length > len(values):
        raise KeyError(f"run on {run_interval} was not alive through {piece}")
    return values[offset : offset + length]


def meta_regret_on(trace: Trace, piece: Interval) -> float:
    """Learner loss minus covering run's loss, summed over ``piece``."""
    sl = slice(piece.start - 1, piece.end)
    return float(trace.learner_losses[sl].sum() - run_loss_slice(trace, piece).sum())


def decompose_regret(
    trace: Trace, interval: Interval, comparator, schedule
) -> tuple[float, float, float]:
    """Split regret on an interval into meta and base-learner parts.

    Returns (total, meta, base) where total is the plain interval regret and
    meta + base recovers it exactly: per schedule piece, meta compares the
    learner to the piece's run and base compares that run to the comparator.
    """
    total = interval_regret(trace, interval, comparator)
    column = trace.comparator_column(comparator)
    meta = 0.0
    base = 0.0
    for piece in schedule.partition(interval):
        run_part = run_loss_slice(trace, piece).sum()
        sl = slice(piece.start - 1, piece.end)
        meta += trace.learner_losses[sl].sum() - run_part
        base += run_part - column[sl].sum()
    return total, float(meta), float(base)
