"""Coin-betting potentials and the wealth recursion they certify.

A bettor starts with wealth 1 and at each round bets a signed fraction of its
current wealth on a coin outcome in [-1, 1].  The Krichevsky-Trofimov (KT)
potential

    F_t(x) = 2^t * Gamma(d+1) * Gamma((t+d+1)/2 + x/2) * Gamma((t+d+1)/2 - x/2)
             / (Gamma((d+1)/2)^2 * Gamma(t+d+1))

(d is a time-shift parameter, 0 by default) certifies a lower bound on the
wealth of any bettor that follows the fraction it induces.  The induced
fraction has the closed form z / (t + d), with z the running coin sum, so the
potential itself is only ever needed for diagnostics and bound evaluation.
All potential arithmetic is done in log space: the raw value grows like 2^t
and would overflow long before the horizons of interest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


def kt_log_potential(t: int, x: float, delta: float = 0.0) -> float:
    """log F_t(x) for the KT potential, stable up to t of order 10^6.

    Even in x.  Raises ValueError when a gamma argument lands on a pole
    (a nonpositive integer), which happens once |x| reaches t + delta + 1.
    """
    if t < 0:
        raise ValueError(f"round count must be >= 0, got {t}")
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    a = (t + delta + 1.0) / 2.0
    x = abs(x)  # the potential is even; evaluating at |x| makes that exact
    for arg in (a + x / 2.0, a - x / 2.0):
        if arg <= 0.0 and arg == math.floor(arg):
            raise ValueError(f"gamma argument {arg} is a nonpositive integer")
    return (
        t * math.log(2.0)
        + math.lgamma(delta + 1.0)
        + math.lgamma(a + x / 2.0)
        + math.lgamma(a - x / 2.0)
        - 2.0 * math.lgamma((delta + 1.0) / 2.0)
        - math.lgamma(t + delta + 1.0)
    )


def kt_potential(t: int, x: float, delta: float = 0.0) -> float:
    """F_t(x) evaluated through the log-space form."""
    return math.exp(kt_log_potential(t, x, delta))


def betting_fraction_from_potential(t: int, z: float, delta: float = 0.0) -> float:
    """Betting fraction (F_t(z+1) - F_t(z-1)) / (F_t(z+1) + F_t(z-1)).

    Computed as tanh of half the log-potential difference, which keeps the
    ratio finite even where the raw potential would overflow.
    """
    hi = kt_log_potential(t, z + 1.0, delta)
    lo = kt_log_potential(t, z - 1.0, delta)
    return math.tanh(0.5 * (hi - lo))


def kt_betting_fraction(z: float, s: float, delta: float = 0.0) -> float:
    """Closed-form KT betting fraction z / (s + delta).

    s is the bettor's round clock (total rounds for a standard bettor, awake
    rounds for a sleeping one).  Agrees with the potential-ratio form.
    """
    if s + delta <= 0:
        raise ValueError(f"round clock plus delta must be positive, got {s + delta}")
    return z / (s + delta)


@dataclass
class WealthCheck:
    """Outcome of a wealth lower-bound simulation."""

    ok: bool
    rounds: int
    final_wealth: float
    max_violation: float  # max over rounds of F_t(sum of coins) - wealth
    worst_round: int

    def __bool__(self) -> bool:
        return self.ok


def wealth_lower_bound_holds(
    coins: Sequence[float], delta: float = 0.0, tol: float = 1e-9
) -> WealthCheck:
    """Simulate the KT bettor on a coin sequence and check the wealth bound.

    At every prefix the potential evaluated at the running coin sum must not
    exceed the accumulated wealth by more than ``tol`` (absolute; wealth is
    of order 1 to 1e3 for the coin ranges of interest).  A small relative
    slack (1e-12 of the wealth) is allowed on top: on extreme coin sequences
    the bound is tight while the wealth grows like 2^t, and the two sides are
    then equal only up to double-precision rounding.
    """
    wealth = 1.0
    z = 0.0
    ok = True
    max_violation = kt_potential(0, 0.0, delta) - wealth
    worst = 0
    for t, coin in enumerate(coins, start=1):
        if not -1.0 <= coin <= 1.0:
            raise ValueError(f"coin at round {t} is {coin}, outside [-1, 1]")
        beta = kt_betting_fraction(z, t, delta)
        bet = beta * wealth
        wealth += coin * bet
        z += coin
        violation = kt_potential(t, z, delta) - wealth
        if violation > max_violation:
            max_violation = violation
            worst = t
        if violation > tol + 1e-12 * abs(wealth):
            ok = False
    return WealthCheck(
        ok=ok,
        rounds=len(coins),
        final_wealth=wealth,
        max_violation=max_violation,
        worst_round=worst,
    )
