"""Synthetic changing environments for the two benchmark tasks.

Both generators are deterministic functions of a 64-bit seed through
numpy's PCG64 generator, so traces are reproducible bit for bit within this
implementation.
"""

from __future__ import annotations

import numpy as np

from .blackbox import scale_and_cap_loss


class LeaEnvironment:
    """Expert advice with a favored expert per time segment.

    All expert losses are drawn i.i.d. Uniform(0,1); within segment k the
    loss of expert k is replaced by max(loss - 1/2, 0), making that expert
    the clear winner there.  Decisions are probability vectors over the
    experts and the round loss is the weighted average expert loss.
    """

    def __init__(self, losses: np.ndarray, segment_bounds: list[int], favored: list[int]):
        self.losses = losses
        self.segment_bounds = segment_bounds  # segment k covers (bounds[k], bounds[k+1]]
        self.favored = favored
        self.horizon, self.n_experts = losses.shape

    @classmethod
    def generate(cls, seed: int, horizon: int = 600, n_experts: int = 1000) -> "LeaEnvironment":
        rng = np.random.Generator(np.random.PCG64(seed))
        losses = rng.random((horizon, n_experts))
        n_segments = min(3, n_experts)
        bounds = [round(k * horizon / n_segments) for k in range(n_segments + 1)]
        favored = list(range(n_segments))
        for k in range(n_segments):
            seg = slice(bounds[k], bounds[k + 1])
            losses[seg, favored[k]] = np.maximum(losses[seg, favored[k]] - 0.5, 0.0)
        return cls(losses, bounds, favored)

    def loss(self, t: int, decision: np.ndarray) -> float:
        value = float(np.dot(self.losses[t - 1], decision))
        return min(max(value, 0.0), 1.0)

    def feedback(self, t: int) -> np.ndarray:
        return self.losses[t - 1]

    def combine(self, weights: dict, decisions: dict) -> np.ndarray:
        combined = np.zeros(self.n_experts)
        for key, weight in weights.items():
            combined += weight * decisions[key]
        return combined

    def best_loss(self, t: int) -> float:
        return float(self.losses[t - 1].min())

    def segment_of(self, t: int) -> int:
        for k in range(len(self.segment_bounds) - 1):
            if self.segment_bounds[k] < t <= self.segment_bounds[k + 1]:
                return k
        raise ValueError(f"round {t} outside the horizon")


class MetricEnvironment:
    """Pairwise-comparison metric learning with shifting cluster structure.

    Points carry three independent cluster memberships (one per coordinate
    block of a 9-dimensional signal) plus pure-noise coordinates.  Each third
    of the horizon labels random point pairs by a different membership, so
    the relevant low-dimensional subspace shifts twice.  Raw losses are
    scaled by 1/5 and capped at 1.
    """

    signal_blocks = 3
    block_dim = 3

    def __init__(self, points, memberships, pairs, segment_bounds, trace_penalty=0.01,
                 loss_scale=5.0):
        self.points = points
        self.memberships = memberships
        self.pairs = pairs  # rows of (first index, second index, label)
        self.segment_bounds = segment_bounds
        self.trace_penalty = float(trace_penalty)
        self.loss_scale = float(loss_scale)
        self.horizon = len(pairs)
        self.dim = points.shape[1]

    @classmethod
    def generate(
        cls,
        seed: int,
        horizon: int = 1500,
        n_points: int = 2000,
        noise_dim: int = 16,
        mixture_weights=(0.5, 0.3, 0.2),
        mean_scale: float = 5.0,
        trace_penalty: float = 0.01,
    ) -> "MetricEnvironment":
        rng = np.random.Generator(np.random.PCG64(seed))
        weights = np.asarray(mixture_weights, dtype=float)
        means = mean_scale * np.eye(len(weights))[:, : cls.block_dim]
        blocks = []
        memberships = []
        for _ in range(cls.signal_blocks):
            labels = rng.choice(len(weights), size=n_points, p=weights)
            coords = means[labels] + rng.standard_normal((n_points, cls.block_dim))
            blocks.append(coords)
            memberships.append(labels)
        noise = rng.standard_normal((n_points, noise_dim))
        points = np.hstack(blocks + [noise])
        bounds = [round(k * horizon / cls.signal_blocks) for k in range(cls.signal_blocks + 1)]
        pairs = np.empty((horizon, 3), dtype=np.int64)
        for t in range(horizon):
            clustering = next(k for k in range(cls.signal_blocks) if bounds[k] <= t < bounds[k + 1])
            i, j = rng.choice(n_points, size=2, replace=False)
            same = memberships[clustering][i] == memberships[clustering][j]
            pairs[t] = (i, j, 1 if same else -1)
        return cls(points, np.asarray(memberships), pairs, bounds, trace_penalty)

    def raw_loss(self, t: int, decision) -> float:
        matrix, bias = decision
        i, j, label = self.pairs[t - 1]
        diff = self.points[i] - self.points[j]
        margin = label * (bias - float(diff @ matrix @ diff))
        # Decisions reaching this environment stay PSD (base learners project,
        # and convex mixing preserves the cone), so trace equals trace norm.
        return max(0.0, 1.0 - margin) + self.trace_penalty * float(np.trace(matrix))

    def loss(self, t: int, decision) -> float:
        return scale_and_cap_loss(self.raw_loss(t, decision), self.loss_scale)

    def feedback(self, t: int):
        i, j, label = self.pairs[t - 1]
        return self.points[i], self.points[j], int(label)

    def combine(self, weights: dict, decisions: dict):
        matrix = np.zeros((self.dim, self.dim))
        bias = 0.0
        for key, weight in weights.items():
            m, b = decisions[key]
            matrix += weight * m
            bias += weight * b
        return matrix, bias

    def segment_of(self, t: int) -> int:
        for k in range(len(self.segment_bounds) - 1):
            if self.segment_bounds[k] < t <= self.segment_bounds[k + 1]:
                return k
        raise ValueError(f"round {t} outside the horizon")


def gen_lea_environment(seed: int, horizon: int = 600, n_experts: int = 1000) -> LeaEnvironment:
    return LeaEnvironment.generate(seed, horizon=horizon, n_experts=n_experts)


def gen_metric_environment(seed: int, horizon: int = 1500, **kwargs) -> MetricEnvironment:
    return MetricEnvironment.generate(seed, horizon=horizon, **kwargs)
