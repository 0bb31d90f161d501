"""Base learners run under the meta algorithms.

Every learner exposes the same small surface: ``decide()`` returns the
current decision, ``update(revealed)`` consumes what the environment reveals
at the end of a round, and ``warm_start(hint)`` seeds a fresh instance from a
decision in the same space.  The meta layer never looks inside.
"""

from __future__ import annotations

import warnings

import numpy as np

from .sleeping import SleepingCoinBetting

WARM_START_FLOOR = 1e-12


def scale_and_cap_loss(loss_raw: float, scale: float = 5.0) -> float:
    """Map a nonnegative raw loss into [0, 1]: divide by ``scale``, cap at 1."""
    if loss_raw < 0:
        raise ValueError(f"raw loss must be nonnegative, got {loss_raw}")
    return min(loss_raw / scale, 1.0)


class CoinBettingLea:
    """Coin-betting learner for expert advice: all experts awake every round.

    This is the sleeping engine with a full awake mask, so it is parameter
    free and its decisions coincide with the engine's on identical inputs.
    """

    def __init__(self, n_experts: int, prior=None, delta: float = 0.0):
        self.n_experts = n_experts
        self._engine = SleepingCoinBetting(n_experts=n_experts, prior=prior, delta=delta)

    def warm_start(self, hint: np.ndarray) -> "CoinBettingLea":
        """Replace the prior with a hint distribution, flooring zero entries.

        The floor keeps every expert reachable (and every comparator's KL
        term finite) even when the hint put no mass on it.
        """
        hint = np.maximum(np.asarray(hint, dtype=float), WARM_START_FLOOR)
        self._engine = SleepingCoinBetting(
            n_experts=self.n_experts, prior=hint / hint.sum(), delta=self._engine.delta
        )
        return self

    def decide(self) -> np.ndarray:
        return self._engine.decide()

    def step(self, losses: np.ndarray) -> tuple[np.ndarray, float]:
        """Play one round: return (decision, incurred loss) and update."""
        decision = self.decide()
        incurred = float(np.dot(decision, losses))
        incurred = min(max(incurred, 0.0), 1.0)
        self._engine.update(losses, incurred)
        return decision, incurred

    def update(self, losses: np.ndarray) -> None:
        self.step(losses)

    def bettor(self, expert_id):
        return self._engine.bettor(expert_id)


def project_box(lo: float, hi: float):
    def project(x: np.ndarray) -> np.ndarray:
        return np.clip(x, lo, hi)

    return project


def project_ball(radius: float, center: np.ndarray | None = None):
    def project(x: np.ndarray) -> np.ndarray:
        c = 0.0 if center is None else center
        offset = x - c
        norm = float(np.linalg.norm(offset))
        if norm <= radius:
            return x
        return c + offset * (radius / norm)

    return project


class OnlineGradientDescent:
    """Projected gradient descent with the step schedule B / (G * sqrt(t)).

    t is the learner's own round count, so a restarted instance decays its
    steps from scratch.  Gradients larger than the declared Lipschitz bound
    trigger a warning and the step shrinks as if the bound were the observed
    norm.
    """

    def __init__(self, x0: np.ndarray, diameter: float, lipschitz: float, project=None):
        if diameter <= 0 or lipschitz <= 0:
            raise ValueError("diameter and Lipschitz bound must be positive")
        self.project = project if project is not None else (lambda x: x)
        self.x = np.asarray(self.project(np.asarray(x0, dtype=float)), dtype=float)
        self.diameter = float(diameter)
        self.lipschitz = float(lipschitz)
        self.t_local = 0

    def warm_start(self, hint: np.ndarray) -> "OnlineGradientDescent":
        self.x = np.asarray(self.project(np.asarray(hint, dtype=float)), dtype=float)
        return self

    def decide(self) -> np.ndarray:
        return self.x.copy()

    def step(self, gradient: np.ndarray) -> np.ndarray:
        gradient = np.asarray(gradient, dtype=float)
        self.t_local += 1
        norm = float(np.linalg.norm(gradient))
        effective = self.lipschitz
        if norm > self.lipschitz:
            warnings.warn(
                f"gradient norm {norm:.3g} exceeds declared bound {self.lipschitz:.3g}; "
                "shrinking the step accordingly",
                stacklevel=2,
            )
            effective = norm
        eta = self.diameter / (effective * np.sqrt(self.t_local))
        self.x = np.asarray(self.project(self.x - eta * gradient), dtype=float)
        return self.x.copy()

    def update(self, revealed) -> None:
        # The environment reveals a gradient oracle; evaluate it at our point.
        gradient = revealed(self.x) if callable(revealed) else revealed
        self.step(gradient)


def psd_project(m: np.ndarray) -> np.ndarray:
    """Nearest (Frobenius) positive semidefinite matrix: clip eigenvalues at 0."""
    sym = (m + m.T) / 2.0
    vals, vecs = np.linalg.eigh(sym)
    return (vecs * np.maximum(vals, 0.0)) @ vecs.T


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values; for a symmetric matrix, sum of |eigenvalues|."""
    sym = (m + m.T) / 2.0
    return float(np.abs(np.linalg.eigvalsh(sym)).sum())


class MahalanobisMetric:
    """Online squared-Mahalanobis metric learner from labeled point pairs.

    State is a PSD matrix and a bias threshold.  A round's raw loss is a
    margin hinge plus a trace-norm penalty encouraging low rank:

        max(0, 1 - y * (bias - diff' M diff)) + penalty * ||M||_*

    with diff the difference of the pair.  The update is a hinge subgradient
    step followed by the trace-norm proximal map (eigenvalue soft threshold)
    and a projection onto the PSD cone; both act on the same eigensystem, so
    each eigenvalue simply becomes max(eigenvalue - step * penalty, 0).
    Because the matrix therefore stays PSD, its trace norm equals its trace,
    which the hot paths use.
    """

    def __init__(self, dim: int, trace_penalty: float = 0.01, step_size: float = 0.5):
        if trace_penalty < 0:
            raise ValueError(f"trace penalty must be >= 0, got {trace_penalty}")
        if step_size <= 0:
            raise ValueError(f"step size must be positive, got {step_size}")
        self.dim = dim
        self.trace_penalty = float(trace_penalty)
        self.step_size = float(step_size)
        self.m = np.zeros((dim, dim))
        self.bias = 0.0
        self.t_local = 0

    def warm_start(self, hint: tuple[np.ndarray, float]) -> "MahalanobisMetric":
        matrix, bias = hint
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (self.dim, self.dim):
            raise ValueError("warm-start matrix has the wrong shape")
        self.m = psd_project(matrix)
        self.bias = float(bias)
        return self

    def decide(self) -> tuple[np.ndarray, float]:
        return self.m.copy(), self.bias

    def raw_loss(self, pair) -> float:
        z1, z2, y = pair
        diff = np.asarray(z1, dtype=float) - np.asarray(z2, dtype=float)
        margin = y * (self.bias - float(diff @ self.m @ diff))
        return max(0.0, 1.0 - margin) + self.trace_penalty * float(np.trace(self.m))

    def step(self, pair) -> float:
        """Suffer the raw loss at the current state, then update. Returns it."""
        z1, z2, y = pair
        diff = np.asarray(z1, dtype=float) - np.asarray(z2, dtype=float)
        if diff.shape != (self.dim,):
            raise ValueError(f"pair dimension {diff.shape} does not match d={self.dim}")
        self.t_local += 1
        margin = y * (self.bias - float(diff @ self.m @ diff))
        loss_raw = max(0.0, 1.0 - margin) + self.trace_penalty * float(np.trace(self.m))
        eta = self.step_size / np.sqrt(self.t_local)
        if margin < 1.0:
            # Hinge subgradient: d/dM = y * diff diff', d/dbias = -y.
            # At the kink (margin exactly 1) the zero subgradient is used.
            self.m -= eta * y * np.outer(diff, diff)
            self.bias += eta * y
        vals, vecs = np.linalg.eigh((self.m + self.m.T) / 2.0)
        vals = np.maximum(vals - eta * self.trace_penalty, 0.0)
        self.m = (vecs * vals) @ vecs.T
        return loss_raw

    def update(self, pair) -> None:
        self.step(pair)
