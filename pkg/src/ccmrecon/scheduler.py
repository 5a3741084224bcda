"""Angle-division multiple access (ADMA) grouping.

Users whose cosine-space AOA intervals do not overlap may share one pilot.
Grouping is greedy first-fit coloring of the conflict graph with users taken
in order of their interval's lower edge, which is optimal for plain interval
overlap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .angles import AngleEstimate, interval_gap
from .array import ArrayConfig


@dataclass(frozen=True)
class GroupAssignment:
    groups: tuple[tuple[int, ...], ...]
    guard: float = 0.0

    def group_of(self, user: int) -> tuple[int, ...]:
        for g in self.groups:
            if user in g:
                return g
        raise KeyError(user)

    def pairs(self):
        for g in self.groups:
            for i, a in enumerate(g):
                for b in g[i + 1:]:
                    yield a, b


def conflicts(a: tuple[float, float], b: tuple[float, float], guard: float = 0.0) -> bool:
    overlap = max(a[0], b[0]) < min(a[1], b[1])
    return overlap or interval_gap(a, b) < guard


def default_threshold(cfg: ArrayConfig) -> float:
    """One uplink beamspace bin in cosine space."""
    return cfg.bin_width()


def adma_group(estimates: Sequence[AngleEstimate], guard: float = 0.0) -> GroupAssignment:
    if guard < 0:
        raise ValueError("guard must be >= 0")
    ivs = [e.u_interval for e in estimates]
    order = sorted(range(len(ivs)), key=lambda k: (ivs[k][0], k))
    groups: list[list[int]] = []
    for k in order:
        for g in groups:
            if not any(conflicts(ivs[k], ivs[j], guard) for j in g):
                g.append(k)
                break
        else:
            groups.append([k])
    return GroupAssignment(tuple(tuple(sorted(g)) for g in groups), guard)


def needs_reschedule(
    current: GroupAssignment, estimates: Sequence[AngleEstimate], threshold: float = 0.0
) -> bool:
    """True when two users sharing a pilot now overlap or sit closer than ``threshold``."""
    for a, b in current.pairs():
        ia, ib = estimates[a].u_interval, estimates[b].u_interval
        if max(ia[0], ib[0]) < min(ia[1], ib[1]) or interval_gap(ia, ib) < threshold:
            return True
    return False
