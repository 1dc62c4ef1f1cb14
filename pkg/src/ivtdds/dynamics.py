"""Orbits, attractors and Collatz-like classification under iteration."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional

from .errors import DivergedOrbit, ValueOverflow
from .ivt_core import apply, rule, rule_count

Step = Callable[[int], int]

DEFAULT_MAX_ITER = 10_000
DEFAULT_VALUE_CAP = 10**9


def default_scan_limit(p: int) -> int:
    return p**5 - 1


class OrbitStatus(str, Enum):
    CONVERGED = "converged-to-cycle"
    DIVERGED = "diverged"
    CAP_HIT = "iteration-cap-hit"


@dataclass(frozen=True)
class Orbit:
    start: int
    transient: tuple[int, ...]
    cycle: tuple[int, ...]
    status: OrbitStatus

    @property
    def converged(self) -> bool:
        return self.status is OrbitStatus.CONVERGED

    def values(self) -> tuple[int, ...]:
        return self.transient + self.cycle


@dataclass(frozen=True)
class AttractorInfo:
    representative: int
    cycle_length: int
    cycle: tuple[int, ...] = ()
    basin_checked: Optional[tuple[int, int]] = None


@dataclass(frozen=True)
class CollatzVerdict:
    p: int
    j: int
    is_collatz_like: bool
    attractor: Optional[AttractorInfo]
    witness: Optional[int] = None
    witness_reason: Optional[str] = None
    horizon: tuple[int, int] = (0, 0)
    strict: bool = False


def iterate_orbit(step: Step, start: int, max_iter: int = DEFAULT_MAX_ITER,
                  value_cap: int = DEFAULT_VALUE_CAP) -> Orbit:
    """Iterate ``step`` from ``start`` until the first repeated value.

    The trajectory is split at the first repeat into transient and cycle.
    Exceeding ``value_cap`` (or the fixed integer width) marks the orbit
    diverged; running out of ``max_iter`` applications marks it capped.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    seen: dict[int, int] = {}
    path: list[int] = []
    x = start
    for _ in range(max_iter + 1):
        if x > value_cap:
            path.append(x)
            return Orbit(start, tuple(path), (), OrbitStatus.DIVERGED)
        if x in seen:
            i = seen[x]
            return Orbit(start, tuple(path[:i]), tuple(path[i:]), OrbitStatus.CONVERGED)
        seen[x] = len(path)
        path.append(x)
        try:
            x = step(x)
        except ValueOverflow:
            return Orbit(start, tuple(path), (), OrbitStatus.DIVERGED)
    return Orbit(start, tuple(path), (), OrbitStatus.CAP_HIT)


def ivt_step(p: int, j: int) -> Step:
    r = rule(p, j)
    return lambda x: apply(r, x)


def attractor_of(orbit: Orbit) -> AttractorInfo:
    if not orbit.converged:
        raise DivergedOrbit(f"orbit from {orbit.start} has status {orbit.status.value}")
    return AttractorInfo(min(orbit.cycle), len(orbit.cycle), orbit.cycle)


def canonical_cycle(cycle: Iterable[int]) -> tuple[int, ...]:
    """Rotate a cycle so that it starts at its minimum element."""
    c = tuple(cycle)
    i = c.index(min(c))
    return c[i:] + c[:i]


@dataclass
class BasinSweep:
    """Terminal cycle (canonical rotation) reached from each start."""

    cycles: dict[int, tuple[int, ...]] = field(default_factory=dict)
    failures: dict[int, OrbitStatus] = field(default_factory=dict)


def _walk(step: Step, s: int, known: dict[int, tuple[int, ...]], max_iter: int,
          value_cap: int) -> tuple[Optional[tuple[int, ...]], Optional[OrbitStatus]]:
    """Follow one orbit, reusing and extending the ``known`` value->cycle memo."""
    path: list[int] = []
    index: dict[int, int] = {}
    x = s
    cyc: Optional[tuple[int, ...]] = None
    for _ in range(max_iter + 1):
        if x in known:
            cyc = known[x]
            break
        if x > value_cap:
            return None, OrbitStatus.DIVERGED
        if x in index:
            cyc = canonical_cycle(path[index[x]:])
            break
        index[x] = len(path)
        path.append(x)
        try:
            x = step(x)
        except ValueOverflow:
            return None, OrbitStatus.DIVERGED
    else:
        return None, OrbitStatus.CAP_HIT
    for v in path:
        known[v] = cyc
    return cyc, None


def sweep_basins(step: Step, starts: Iterable[int], max_iter: int = DEFAULT_MAX_ITER,
                 value_cap: int = DEFAULT_VALUE_CAP) -> BasinSweep:
    """Map each start to its terminal cycle, sharing work between orbits."""
    known: dict[int, tuple[int, ...]] = {}
    out = BasinSweep()
    for s in starts:
        cyc, status = _walk(step, s, known, max_iter, value_cap)
        if cyc is None:
            out.failures[s] = status
        else:
            out.cycles[s] = cyc
    return out


def classify_map(step: Step, scan_limit: int, max_iter: int = DEFAULT_MAX_ITER,
                 value_cap: int = DEFAULT_VALUE_CAP, strict: bool = False,
                 p: int = 0, j: int = -1) -> CollatzVerdict:
    """Single-attractor test of an arbitrary step map over ``[0, scan_limit]``.

    Stops at the first start that diverges or lands on a second cycle.
    """
    horizon = (0, scan_limit)
    known: dict[int, tuple[int, ...]] = {}
    first: Optional[tuple[int, ...]] = None
    for s in range(scan_limit + 1):
        cyc, status = _walk(step, s, known, max_iter, value_cap)
        if cyc is None:
            return CollatzVerdict(p, j, False, None, s, status.value, horizon, strict)
        if first is None:
            first = cyc
        elif cyc != first:
            return CollatzVerdict(p, j, False, None, s, "second-attractor", horizon, strict)
    assert first is not None
    info = AttractorInfo(first[0], len(first), first, horizon)
    if strict and len(first) != 1:
        return CollatzVerdict(p, j, False, info, 0, "attractor-not-fixed-point", horizon, strict)
    return CollatzVerdict(p, j, True, info, None, None, horizon, strict)


def classify_collatz_like(p: int, j: int, scan_limit: Optional[int] = None,
                          max_iter: int = DEFAULT_MAX_ITER, strict: bool = False) -> CollatzVerdict:
    """Collatz-like iff every start in ``[0, scan_limit]`` reaches one cycle.

    With ``strict=True`` the common attractor must also be a fixed point.
    """
    if scan_limit is None:
        scan_limit = default_scan_limit(p)
    if scan_limit < p * p:
        raise ValueError(f"scan_limit must be >= p^2 = {p * p}")
    return classify_map(ivt_step(p, j), scan_limit, max_iter, strict=strict, p=p, j=j)


@dataclass(frozen=True)
class CollatzCensus:
    p: int
    rules: tuple[int, ...]
    horizon: tuple[int, int]
    strict: bool = False

    @property
    def count(self) -> int:
        return len(self.rules)

    @property
    def claimed_count(self) -> int:
        """p^(p-1), the count used by the unique-steady-state argument."""
        return self.p ** (self.p - 1)

    @property
    def claimed_count_minus_one(self) -> int:
        """p^(p-1) - 1, the count quoted alongside the IVT definition."""
        return self.p ** (self.p - 1) - 1

    def consistency(self) -> dict[str, bool]:
        return {
            "p^(p-1)": self.count == self.claimed_count,
            "p^(p-1)-1": self.count == self.claimed_count_minus_one,
        }


def enumerate_collatz_like(p: int, scan_limit: Optional[int] = None,
                           max_iter: int = DEFAULT_MAX_ITER, strict: bool = False) -> CollatzCensus:
    if scan_limit is None:
        scan_limit = default_scan_limit(p)
    found = [
        j for j in range(rule_count(p))
        if classify_collatz_like(p, j, scan_limit, max_iter, strict).is_collatz_like
    ]
    return CollatzCensus(p, tuple(found), (0, scan_limit), strict)
