"""Affine discrete dynamical systems built on a one-dimensional IVT.

Type I steps ``Y -> A*IVT(Y) + B``; type II steps ``y -> IVT(a*y + b)``.

Stability is decided from pairwise difference quotients of the whole step
map, ``|step(x) - step(y)| / |x - y|``, kept as exact fractions:

* local: every distinct pair inside ``[y* - r, y* + r]``;
* global: every pair at distance ``<= p**2`` inside the scan range, plus the
  extremal pairs straddling each digit-length boundary.

A verdict is stable when the largest quotient is strictly below 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Optional, Sequence

from . import _parallel
from .dynamics import (
    DEFAULT_MAX_ITER,
    DEFAULT_VALUE_CAP,
    CollatzVerdict,
    Orbit,
    classify_map,
    default_scan_limit,
    iterate_orbit,
)
from .errors import IvtError, NotCollatzLike, NotFixedPoint
from .ivt_core import LocalRule, apply, check_width, rule, rule_count


class Variant(str, Enum):
    TYPE_I = "I"
    TYPE_II = "II"

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, cls):
            return value
        s = str(value).upper().replace("TYPE_", "").replace("TYPE-", "")
        try:
            return cls(s)
        except ValueError:
            raise IvtError(f"unknown variant {value!r}; expected I or II") from None


@dataclass(frozen=True)
class AddsSpec:
    """One affine system. ``mul``/``add`` are A/B for type I and a/b for type II."""

    variant: Variant
    p: int
    j: int
    mul: int
    add: int
    rule: LocalRule = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if not 0 <= self.mul < self.p:
            raise IvtError(f"multiplier {self.mul} outside [0, {self.p})")
        if not 0 <= self.add < self.p:
            raise IvtError(f"offset {self.add} outside [0, {self.p})")
        object.__setattr__(self, "rule", rule(self.p, self.j))

    @property
    def degenerate(self) -> bool:
        """mul = 0 collapses the system to a constant map."""
        return self.mul == 0

    def __call__(self, y: int) -> int:
        return step(self, y)

    def label(self) -> str:
        if self.variant is Variant.TYPE_I:
            return f"Y <- {self.mul}*IVT_{self.j}^({self.p},1)(Y) + {self.add}"
        return f"y <- IVT_{self.j}^({self.p},1)({self.mul}*y + {self.add})"


def type_one(p: int, j: int, A: int, B: int) -> AddsSpec:
    return AddsSpec(Variant.TYPE_I, p, j, A, B)


def type_two(p: int, j: int, a: int, b: int) -> AddsSpec:
    return AddsSpec(Variant.TYPE_II, p, j, a, b)


def step(spec: AddsSpec, y: int) -> int:
    if spec.variant is Variant.TYPE_I:
        return check_width(spec.mul * apply(spec.rule, y) + spec.add)
    return apply(spec.rule, check_width(spec.mul * y + spec.add))


def adds_orbit(spec: AddsSpec, start: int, max_iter: int = DEFAULT_MAX_ITER,
               value_cap: int = DEFAULT_VALUE_CAP) -> Orbit:
    return iterate_orbit(spec, start, max_iter, value_cap)


def classify_adds(spec: AddsSpec, scan_limit: Optional[int] = None,
                  max_iter: int = DEFAULT_MAX_ITER, value_cap: int = DEFAULT_VALUE_CAP,
                  strict: bool = False) -> CollatzVerdict:
    if scan_limit is None:
        scan_limit = default_scan_limit(spec.p)
    return classify_map(spec, scan_limit, max_iter, value_cap, strict, p=spec.p, j=spec.j)


# -- steady states -----------------------------------------------------------

@dataclass(frozen=True)
class SteadyStateReport:
    spec: AddsSpec
    search_bound: int
    steady_points: tuple[int, ...]

    @property
    def unique(self) -> bool:
        return len(self.steady_points) == 1


def _min_bound(p: int) -> int:
    return p**3 - 1


def steady_states(spec: AddsSpec, search_bound: Optional[int] = None) -> SteadyStateReport:
    if search_bound is None:
        search_bound = default_scan_limit(spec.p)
    if search_bound < _min_bound(spec.p):
        raise ValueError(f"search_bound must be >= p^3 - 1 = {_min_bound(spec.p)}")
    pts = tuple(y for y in range(search_bound + 1) if step(spec, y) == y)
    return SteadyStateReport(spec, search_bound, pts)


# -- difference quotients ------------------------------------------------------

Pair = tuple[int, int]


def quotient(f, x: int, y: int) -> Fraction:
    return Fraction(abs(f(x) - f(y)), abs(x - y))


def _length_classes(p: int, bound: int) -> list[Pair]:
    """Inclusive [lo, hi] ranges of numbers with 1, 2, ... digits, cut at bound."""
    out = []
    lo, hi = 0, p - 1
    while lo <= bound:
        out.append((lo, min(hi, bound)))
        lo, hi = hi + 1, hi * p + p - 1
    return out


def sample_pairs(p: int, bound: int) -> Iterator[Pair]:
    """Pairs ordered by distance then left end, then cross-length extremes."""
    seen = set()
    for d in range(1, p * p + 1):
        for x in range(0, bound - d + 1):
            seen.add((x, x + d))
            yield x, x + d
    classes = _length_classes(p, bound)
    for (lo1, hi1), (lo2, hi2) in combinations(classes, 2):
        for pair in ((lo1, lo2), (lo1, hi2), (hi1, lo2), (hi1, hi2)):
            if pair[0] != pair[1] and pair not in seen:
                seen.add(pair)
                yield pair


@dataclass(frozen=True)
class QuotientScan:
    max_quotient: Fraction
    max_pair: Optional[Pair]
    first_violation: Optional[Pair]
    pairs_checked: int

    @property
    def below_one(self) -> bool:
        return self.max_quotient < 1


def scan_quotients(f, pairs) -> QuotientScan:
    best, best_pair, first, n = Fraction(0), None, None, 0
    for x, y in pairs:
        q = quotient(f, x, y)
        n += 1
        if first is None and q >= 1:
            first = (x, y)
        if best_pair is None or q > best:
            best, best_pair = q, (x, y)
    return QuotientScan(best, best_pair, first, n)


@dataclass(frozen=True)
class LocalStability:
    steady_point: int
    radius: int
    max_quotient: Fraction
    witness: Optional[Pair]

    @property
    def stable(self) -> bool:
        return self.max_quotient < 1


@dataclass(frozen=True)
class GlobalStability:
    scan_bound: int
    max_quotient: Fraction
    max_pair: Optional[Pair]
    first_violation: Optional[Pair]

    @property
    def stable(self) -> bool:
        return self.max_quotient < 1


def local_stability(spec: AddsSpec, steady_point: int, radius: int = 2) -> LocalStability:
    if step(spec, steady_point) != steady_point:
        raise NotFixedPoint(f"{steady_point} is not a steady state of {spec.label()}")
    window = range(max(0, steady_point - radius), steady_point + radius + 1)
    scan = scan_quotients(spec, combinations(window, 2))
    return LocalStability(steady_point, radius, scan.max_quotient, scan.max_pair)


def global_stability(spec: AddsSpec, scan_bound: Optional[int] = None) -> GlobalStability:
    if scan_bound is None:
        scan_bound = default_scan_limit(spec.p)
    if scan_bound < _min_bound(spec.p):
        raise ValueError(f"scan_bound must be >= p^3 - 1 = {_min_bound(spec.p)}")
    scan = scan_quotients(spec, sample_pairs(spec.p, scan_bound))
    return GlobalStability(scan_bound, scan.max_quotient, scan.max_pair, scan.first_violation)


@dataclass(frozen=True)
class StabilityReport:
    spec: AddsSpec
    steady_point: int
    local: LocalStability
    global_: GlobalStability

    @property
    def locally_stable(self) -> bool:
        return self.local.stable

    @property
    def globally_stable(self) -> bool:
        return self.global_.stable


def stability_report(spec: AddsSpec, steady_point: int, radius: int = 2,
                     scan_bound: Optional[int] = None) -> StabilityReport:
    return StabilityReport(spec, steady_point, local_stability(spec, steady_point, radius),
                           global_stability(spec, scan_bound))


@dataclass(frozen=True)
class ContractionResult:
    p: int
    j: int
    scan_bound: int
    is_contraction: bool
    max_quotient: Fraction
    max_pair: Optional[Pair]
    witness: Optional[Pair]
    witness_quotient: Optional[Fraction]


def is_contraction(p: int, j: int, scan_bound: Optional[int] = None) -> ContractionResult:
    """Contraction test of the bare IVT with the usual metric |x - y|.

    On failure the witness is the first offending pair in sampling order
    (shortest distance first), which is the most local counterexample.
    """
    if scan_bound is None:
        scan_bound = default_scan_limit(p)
    if scan_bound < _min_bound(p):
        raise ValueError(f"scan_bound must be >= p^3 - 1 = {_min_bound(p)}")
    r = rule(p, j)
    f = lambda x: apply(r, x)  # noqa: E731
    scan = scan_quotients(f, sample_pairs(p, scan_bound))
    wq = quotient(f, *scan.first_violation) if scan.first_violation else None
    return ContractionResult(p, j, scan_bound, scan.below_one, scan.max_quotient,
                             scan.max_pair, scan.first_violation, wq)


# -- simulation tables ---------------------------------------------------------

@dataclass(frozen=True)
class TableCell:
    j: int
    attractor: Optional[int]
    cycle_length: Optional[int]
    steady_points: tuple[int, ...]
    unique_steady: Optional[int]
    locally_stable: Optional[int]
    globally_stable: Optional[int]
    diverged: bool
    witness_reason: Optional[str]


@dataclass(frozen=True)
class TableRow:
    mul: int
    add: int
    cells: tuple[TableCell, ...]

    def _pick(self, name: str) -> list[tuple[int, int]]:
        return [(c.j, getattr(c, name)) for c in self.cells if getattr(c, name) is not None]

    @property
    def attractors(self) -> list[tuple[int, int]]:
        return self._pick("attractor")

    @property
    def unique_steady(self) -> list[tuple[int, int]]:
        return self._pick("unique_steady")

    @property
    def locally_stable(self) -> list[tuple[int, int]]:
        return self._pick("locally_stable")

    @property
    def globally_stable(self) -> list[tuple[int, int]]:
        return self._pick("globally_stable")

    @property
    def diverged(self) -> list[int]:
        return [c.j for c in self.cells if c.diverged]


@dataclass(frozen=True)
class AttractorTable:
    p: int
    variant: Variant
    scan_limit: int
    max_iter: int
    value_cap: int
    radius: int
    rows: tuple[TableRow, ...]

    def row(self, mul: int, add: int) -> TableRow:
        for r in self.rows:
            if (r.mul, r.add) == (mul, add):
                return r
        raise KeyError((mul, add))


def _table_cell(args) -> TableCell:
    variant, p, j, mul, add, scan_limit, max_iter, value_cap, radius = args
    spec = AddsSpec(variant, p, j, mul, add)
    verdict = classify_adds(spec, scan_limit, max_iter, value_cap)
    steady = steady_states(spec, scan_limit).steady_points
    attractor = cycle_length = unique = loc = glob = None
    diverged = verdict.witness_reason == "diverged"
    if verdict.is_collatz_like:
        attractor = verdict.attractor.representative
        cycle_length = verdict.attractor.cycle_length
        if len(steady) == 1:
            unique = steady[0]
            if local_stability(spec, unique, radius).stable:
                loc = unique
            if global_stability(spec, scan_limit).stable:
                glob = unique
    return TableCell(j, attractor, cycle_length, steady, unique, loc, glob, diverged,
                     verdict.witness_reason)


def attractor_table(p: int, variant, coefficients: Sequence[tuple[int, int]],
                    scan_limit: Optional[int] = None, max_iter: int = DEFAULT_MAX_ITER,
                    value_cap: int = DEFAULT_VALUE_CAP, radius: int = 2,
                    workers: Optional[int] = None) -> AttractorTable:
    """Classify every rule of base ``p`` under each (mul, add) pair.

    Only Collatz-like rules enter the steady-state and stability columns.
    Steady states and global quotients are scanned over ``[0, scan_limit]``.
    """
    variant = Variant.parse(variant)
    if scan_limit is None:
        scan_limit = default_scan_limit(p)
    for mul, add in coefficients:
        if not (1 <= mul < p and 0 <= add < p):
            raise IvtError(f"coefficient row ({mul},{add}) outside [1,p) x [0,p)")
    jobs = [(variant, p, j, mul, add, scan_limit, max_iter, value_cap, radius)
            for mul, add in coefficients for j in range(rule_count(p))]
    cells = _parallel.pmap(_table_cell, jobs, workers)
    n = rule_count(p)
    rows = tuple(
        TableRow(mul, add, tuple(cells[i * n:(i + 1) * n]))
        for i, (mul, add) in enumerate(coefficients)
    )
    return AttractorTable(p, variant, scan_limit, max_iter, value_cap, radius, rows)


def default_coefficients(p: int) -> list[tuple[int, int]]:
    if p == 3:
        # row order of the published 3-adic tables
        return [(1, 0), (1, 1), (1, 2), (2, 2), (2, 0), (2, 1)]
    return [(m, a) for m in range(1, p) for a in range(p)]


# -- attractor correspondence between the two variants -----------------------

@dataclass(frozen=True)
class CorrespondenceRecord:
    p: int
    j: int
    mul: int
    add: int
    type1_attractor: int
    type1_cycle: tuple[int, ...]
    type2_attractor: Optional[int]
    type2_cycle: Optional[tuple[int, ...]]

    @property
    def predicted_type2(self) -> Optional[int]:
        """(A^ - B) / A when it is a non-negative integer."""
        if self.mul == 0:
            return None
        q, r = divmod(self.type1_attractor - self.add, self.mul)
        return q if r == 0 and q >= 0 else None

    @property
    def relation_holds(self) -> bool:
        pred = self.predicted_type2
        return pred is not None and pred == self.type2_attractor


def verify_type_correspondence(p: int, j: int, A: int, B: int,
                               scan_limit: Optional[int] = None,
                               max_iter: int = DEFAULT_MAX_ITER,
                               value_cap: int = DEFAULT_VALUE_CAP) -> CorrespondenceRecord:
    one = classify_adds(type_one(p, j, A, B), scan_limit, max_iter, value_cap)
    if not one.is_collatz_like:
        raise NotCollatzLike(f"rule {j} with A={A}, B={B} is not Collatz-like as type I "
                             f"(witness {one.witness}: {one.witness_reason})")
    two = classify_adds(type_two(p, j, A, B), scan_limit, max_iter, value_cap)
    t2 = two.attractor if two.is_collatz_like else None
    return CorrespondenceRecord(p, j, A, B, one.attractor.representative, one.attractor.cycle,
                                t2.representative if t2 else None, t2.cycle if t2 else None)


@dataclass(frozen=True)
class ConverseWitness:
    p: int
    j: int
    mul: int
    add: int
    type2_attractor: int
    type1_verdict: CollatzVerdict
    reason: str

    @property
    def degenerate(self) -> bool:
        return self.mul == 0


@dataclass(frozen=True)
class ConverseSweep:
    p: int
    scan_limit: int
    checked: int
    witnesses: tuple[ConverseWitness, ...]

    @property
    def non_degenerate(self) -> tuple[ConverseWitness, ...]:
        return tuple(w for w in self.witnesses if not w.degenerate)

    @property
    def first(self) -> Optional[ConverseWitness]:
        nd = self.non_degenerate
        if nd:
            return nd[0]
        return self.witnesses[0] if self.witnesses else None


def converse_sweep(p: int, scan_limit: Optional[int] = None, max_iter: int = DEFAULT_MAX_ITER,
                   value_cap: int = DEFAULT_VALUE_CAP,
                   include_degenerate: bool = True) -> ConverseSweep:
    """Look for type-II Collatz-like systems whose type-I twin fails.

    Every (j, a, b) with a in [1, p) is swept; the constant systems a = 0
    are included on request.
    """
    if scan_limit is None:
        scan_limit = default_scan_limit(p)
    muls = list(range(1, p)) + ([0] if include_degenerate else [])
    found, checked = [], 0
    for mul in muls:
        for add in range(p):
            for j in range(rule_count(p)):
                two = classify_adds(type_two(p, j, mul, add), scan_limit, max_iter, value_cap)
                if not two.is_collatz_like:
                    continue
                checked += 1
                one = classify_adds(type_one(p, j, mul, add), scan_limit, max_iter, value_cap)
                g = two.attractor.representative
                if not one.is_collatz_like:
                    reason = f"type I not Collatz-like ({one.witness_reason})"
                elif mul == 0:
                    reason = "type I attractor does not determine the type II attractor (A = 0)"
                elif one.attractor.representative != mul * g + add:
                    reason = "attractor mismatch"
                else:
                    continue
                found.append(ConverseWitness(p, j, mul, add, g, one, reason))
    return ConverseSweep(p, scan_limit, checked, tuple(found))


@dataclass(frozen=True)
class UniqueZeroCount:
    p: int
    rules: tuple[int, ...]
    scan_limit: int

    @property
    def count(self) -> int:
        return len(self.rules)

    @property
    def expected(self) -> int:
        return self.p ** (self.p - 2)


def count_unique_zero_steady(p: int, scan_limit: Optional[int] = None,
                             max_iter: int = DEFAULT_MAX_ITER) -> UniqueZeroCount:
    """Collatz-like rules of the linear system (A=1, B=0) whose only steady state is 0."""
    if scan_limit is None:
        scan_limit = default_scan_limit(p)
    hits = []
    for j in range(rule_count(p)):
        spec = type_one(p, j, 1, 0)
        if not classify_adds(spec, scan_limit, max_iter).is_collatz_like:
            continue
        if steady_states(spec, scan_limit).steady_points == (0,):
            hits.append(j)
    return UniqueZeroCount(p, tuple(hits), scan_limit)
