"""Coin betting over sleeping experts.

Each expert owns an independent bettor whose clock only advances on rounds
where the expert is awake.  A decision places mass proportional to
prior * positive part of the expert's bet, restricted to awake experts; when
no awake expert bets a positive amount the decision falls back to the prior
restricted to the awake set.  There is no learning rate anywhere.

The expert set may grow and shrink online: a newly registered expert starts
with clock 1, coin sum 0 and wealth 1, which is what lets this engine drive
restart-based meta algorithms where experts are born and retired over time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

import numpy as np


@dataclass
class BettorState:
    """Snapshot of one expert's betting state."""

    s: int  # awake-round clock, 1 at registration
    z: float  # cumulative signed coin
    wealth: float  # 1 plus cumulative winnings
    w: float  # current bet amount (fraction times wealth)


class SleepingCoinBetting:
    """Sleeping-experts coin betting over a dynamic expert set.

    Prior weights are stored unnormalized; decisions normalize over the
    awake support, so registering new experts never requires rescaling the
    old ones.
    """

    def __init__(self, n_experts: int | None = None, prior=None, delta: float = 0.0):
        if delta < 0:
            raise ValueError(f"delta must be >= 0, got {delta}")
        self.delta = float(delta)
        self.round = 0
        self._ids: list[Hashable] = []
        self._index: dict[Hashable, int] = {}
        self._prior = np.zeros(0)
        self._s = np.zeros(0)
        self._z = np.zeros(0)
        self._wealth = np.zeros(0)
        if n_experts is not None:
            if prior is None:
                weights = np.ones(n_experts)
            else:
                weights = np.asarray(prior, dtype=float).copy()
                if weights.shape != (n_experts,):
                    raise ValueError("prior length does not match expert count")
            if np.any(weights <= 0):
                raise ValueError("prior weights must be strictly positive")
            self._ids = list(range(n_experts))
            self._index = {i: i for i in range(n_experts)}
            self._prior = weights
            self._s = np.ones(n_experts)
            self._z = np.zeros(n_experts)
            self._wealth = np.ones(n_experts)
        elif isinstance(prior, Mapping):
            for expert_id, weight in prior.items():
                self.add_expert(expert_id, weight)

    @property
    def n_experts(self) -> int:
        return len(self._ids)

    @property
    def expert_ids(self) -> tuple:
        return tuple(self._ids)

    def add_expert(self, expert_id: Hashable, weight: float = 1.0) -> None:
        if expert_id in self._index:
            raise ValueError(f"expert {expert_id!r} already registered")
        if weight <= 0:
            raise ValueError(f"prior weight must be positive, got {weight}")
        self._index[expert_id] = len(self._ids)
        self._ids.append(expert_id)
        self._prior = np.append(self._prior, weight)
        self._s = np.append(self._s, 1.0)
        self._z = np.append(self._z, 0.0)
        self._wealth = np.append(self._wealth, 1.0)

    def remove_expert(self, expert_id: Hashable) -> None:
        i = self._index.pop(expert_id)
        del self._ids[i]
        for name in ("_prior", "_s", "_z", "_wealth"):
            setattr(self, name, np.delete(getattr(self, name), i))
        for other, j in self._index.items():
            if j > i:
                self._index[other] = j - 1

    def bettor(self, expert_id: Hashable) -> BettorState:
        i = self._index[expert_id]
        bet = self._z[i] / (self._s[i] + self.delta) * self._wealth[i]
        return BettorState(
            s=int(self._s[i]), z=float(self._z[i]), wealth=float(self._wealth[i]), w=float(bet)
        )

    def _bets(self) -> np.ndarray:
        return self._z / (self._s + self.delta) * self._wealth

    def _as_mask(self, awake) -> np.ndarray:
        if isinstance(awake, np.ndarray) and awake.dtype == bool:
            if awake.shape != (self.n_experts,):
                raise ValueError("awake mask length does not match expert count")
            return awake
        mask = np.zeros(self.n_experts, dtype=bool)
        for expert_id in awake:
            mask[self._index[expert_id]] = True
        return mask

    def decide(self, awake: Iterable[Hashable] | np.ndarray | None = None) -> np.ndarray:
        """Probability vector over the current experts, in registration order.

        Sleeping experts get exactly zero mass.  ``awake=None`` means all
        experts are awake.
        """
        if self.n_experts == 0:
            raise ValueError("no experts registered")
        bets = self._bets()
        if awake is None:
            scores = self._prior * np.maximum(bets, 0.0)
            awake_prior = self._prior
        else:
            mask = self._as_mask(awake)
            if not mask.any():
                raise ValueError("awake set is empty")
            scores = np.where(mask, self._prior * np.maximum(bets, 0.0), 0.0)
            awake_prior = np.where(mask, self._prior, 0.0)
        total = float(scores.sum())
        if total > 0.0:
            return scores / total
        return awake_prior / awake_prior.sum()

    def as_dict(self, probs: np.ndarray) -> dict:
        return dict(zip(self._ids, probs.tolist()))

    def update(
        self,
        losses,
        learner_loss: float,
        awake: Iterable[Hashable] | np.ndarray | None = None,
    ) -> None:
        """Feed one round of losses to the awake experts.

        ``losses`` is an array in registration order or a mapping from
        expert id to loss; every awake expert needs a loss in [0, 1].  The
        coin for an awake expert is learner_loss minus its loss, clamped to
        its positive part when the expert's current bet is not positive.
        Sleeping experts are untouched.
        """
        mask = None if awake is None else self._as_mask(awake)
        if isinstance(losses, Mapping):
            arr = np.zeros(self.n_experts)
            seen = np.zeros(self.n_experts, dtype=bool)
            for expert_id, value in losses.items():
                i = self._index[expert_id]
                arr[i] = value
                seen[i] = True
            required = np.ones(self.n_experts, dtype=bool) if mask is None else mask
            if not seen[required].all():
                raise ValueError("a loss is required for every awake expert")
            losses = arr
        else:
            losses = np.asarray(losses, dtype=float)
            if losses.shape != (self.n_experts,):
                raise ValueError("loss vector length does not match expert count")
        active = losses if mask is None else losses[mask]
        if active.size and (active.min() < 0.0 or active.max() > 1.0):
            raise ValueError("losses must lie in [0, 1]")
        if not 0.0 <= learner_loss <= 1.0:
            raise ValueError(f"learner loss {learner_loss} outside [0, 1]")
        bets = self._bets()
        coins = learner_loss - losses
        coins = np.where(bets > 0.0, coins, np.maximum(coins, 0.0))
        if mask is not None:
            coins = np.where(mask, coins, 0.0)
        self._z += coins
        self._wealth += coins * bets
        if mask is None:
            self._s += 1.0
        else:
            self._s += mask
        self.round += 1


def sleeping_regret_bound(
    u: Mapping[Hashable, float],
    awake_counts: Mapping[Hashable, int],
    prior: Mapping[Hashable, float],
    horizon: int,
) -> float:
    """Regret bound for the KT sleeping bettor against comparator u.

    sqrt(2 * (sum_i u_i S_i) * (KL(u || prior) + ln(horizon)/2 + 2)), with the
    prior normalized over all registered experts.  Comparator mass on an
    expert with zero prior weight is rejected (the KL term would be infinite).
    """
    total = float(sum(prior.values()))
    if total <= 0:
        raise ValueError("prior weights must sum to a positive value")
    kl = 0.0
    weighted_s = 0.0
    for expert_id, mass in u.items():
        if mass == 0.0:
            continue
        if mass < 0.0:
            raise ValueError("comparator masses must be nonnegative")
        pi = prior.get(expert_id, 0.0) / total
        if pi <= 0.0:
            raise ValueError(f"comparator puts mass on expert {expert_id!r} with zero prior")
        kl += mass * math.log(mass / pi)
        weighted_s += mass * awake_counts[expert_id]
    return math.sqrt(2.0 * weighted_s * (kl + 0.5 * math.log(horizon) + 2.0))
