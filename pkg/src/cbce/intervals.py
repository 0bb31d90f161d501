"""Dyadic interval families used to schedule black-box restarts.

Two families are provided. The geometric covering (GC) family tiles time with
blocks of every power-of-two length: level k consists of the intervals
[i*2^k .. (i+1)*2^k - 1] for i = 1, 2, ...  The data streaming (DS) family
spawns exactly one interval per time step t, of length g * 2^u(t) where
2^u(t) is the largest power of two dividing t.

Both families admit a partition result: any interval can be covered exactly
by family members (GC) or by prefixes of family members (DS) whose lengths
roughly double and then halve, which is what makes restart schedules built on
them adaptive at every scale.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class Interval:
    """Closed integer time range [start..end], 1-based."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 1:
            raise ValueError(f"interval start must be >= 1, got {self.start}")
        if self.end < self.start:
            raise ValueError(f"interval end {self.end} precedes start {self.start}")

    def __len__(self) -> int:
        return self.end - self.start + 1

    def __contains__(self, t: int) -> bool:
        return self.start <= t <= self.end

    def __repr__(self) -> str:
        return f"[{self.start}..{self.end}]"


def _valuation(t: int) -> int:
    """Exponent of the largest power of two dividing t (t >= 1)."""
    return (t & -t).bit_length() - 1


def _floor_log2(n: int) -> int:
    return n.bit_length() - 1


def gc_active(t: int) -> list[Interval]:
    """All geometric covering intervals containing time t, shortest first.

    The result has exactly floor(log2 t) + 1 entries: one per level k with
    2^k <= t.
    """
    if t < 1:
        raise ValueError(f"time index must be >= 1, got {t}")
    out = []
    for k in range(_floor_log2(t) + 1):
        i = t >> k
        out.append(Interval(i << k, ((i + 1) << k) - 1))
    return out


def ds_interval_starting_at(t: int, g: int = 1) -> Interval:
    """The data streaming interval spawned at time t: [t .. t + g*2^u(t) - 1]."""
    if t < 1:
        raise ValueError(f"time index must be >= 1, got {t}")
    if g < 1:
        raise ValueError(f"length multiplier g must be >= 1, got {g}")
    return Interval(t, t + g * (1 << _valuation(t)) - 1)


def ds_active(t: int, g: int = 1) -> list[Interval]:
    """All data streaming intervals containing time t, by start ascending.

    Exactly one of the returned intervals starts at t (a fresh spawn).
    """
    if t < 1:
        raise ValueError(f"time index must be >= 1, got {t}")
    if g < 1:
        raise ValueError(f"length multiplier g must be >= 1, got {g}")
    out = []
    v = 0
    while (1 << v) <= t:
        base = 1 << v
        # Starts s <= t with valuation exactly v whose interval reaches t.
        lo = max(base, t - g * base + 1)
        s = ((lo + base - 1) // base) * base
        while s <= t:
            if (s // base) % 2 == 1:
                out.append(Interval(s, s + g * base - 1))
            s += base
        v += 1
    out.sort(key=lambda iv: iv.start)
    return out


def gc_partition(interval: Interval) -> list[Interval]:
    """Partition an interval into consecutive geometric covering members.

    Greedy from the left: at each position take the longest family member
    that starts there and still fits.  The resulting lengths at least double
    while limited by the start's dyadic alignment, then at least halve once
    limited by the space remaining, which is the shape the restart-schedule
    analysis requires.
    """
    out = []
    pos = interval.start
    while pos <= interval.end:
        remaining = interval.end - pos + 1
        k = min(_valuation(pos), _floor_log2(remaining))
        out.append(Interval(pos, pos + (1 << k) - 1))
        pos += 1 << k
    return out


def ds_partition(interval: Interval, g: int = 1) -> list[Interval]:
    """Partition an interval into prefixes of data streaming members.

    Pieces are taken greedily with the g=1 lengths (2^u(start)); the final
    piece is truncated at the interval end.  Every piece is then a prefix of
    the DS interval spawned at its own start for any g >= 1, since larger g
    only lengthens family members.  Successive piece lengths at least double,
    except possibly the truncated last one.
    """
    if g < 1:
        raise ValueError(f"length multiplier g must be >= 1, got {g}")
    out = []
    pos = interval.start
    while pos <= interval.end:
        end = min(pos + (1 << _valuation(pos)) - 1, interval.end)
        out.append(Interval(pos, end))
        pos = end + 1
    return out


class GeometricCovering:
    """Schedule backed by the geometric covering family."""

    name = "gc"

    def active(self, t: int) -> list[Interval]:
        return gc_active(t)

    def partition(self, interval: Interval) -> list[Interval]:
        return gc_partition(interval)

    def __repr__(self) -> str:
        return "GeometricCovering()"


class DataStreaming:
    """Schedule backed by the data streaming family with multiplier g."""

    name = "ds"

    def __init__(self, g: int = 1):
        if g < 1:
            raise ValueError(f"length multiplier g must be >= 1, got {g}")
        self.g = g

    def active(self, t: int) -> list[Interval]:
        return ds_active(t, self.g)

    def partition(self, interval: Interval) -> list[Interval]:
        return ds_partition(interval, self.g)

    def __repr__(self) -> str:
        return f"DataStreaming(g={self.g})"


def make_schedule(kind: str, g: int = 1):
    if kind == "gc":
        return GeometricCovering()
    if kind == "ds":
        return DataStreaming(g)
    raise ValueError(f"unknown schedule kind {kind!r} (expected 'gc' or 'ds')")
