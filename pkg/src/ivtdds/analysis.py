"""Graph sampling, box-counting dimension and ratio tests of ADDS sequences."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .adds import AddsSpec, Variant, step
from .errors import DegenerateSample
from .ivt_core import rule_count

DEFAULT_SCALE_LEVELS = (1, 2, 3, 4, 5, 6)
RATIO_SPREAD_TOL = 1e-3
RADIUS_ONE_TOL = 1e-2


@dataclass(frozen=True)
class GraphSample:
    spec: AddsSpec
    points: tuple[tuple[int, int], ...]
    # (x_min, x_max, y_min, y_max) used to map points into the unit square
    normalization: tuple[int, int, int, int]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=np.int64)

    def unit_square(self) -> np.ndarray:
        pts = self.as_array().astype(float)
        x0, x1, y0, y1 = self.normalization
        out = np.zeros_like(pts)
        if x1 > x0:
            out[:, 0] = (pts[:, 0] - x0) / (x1 - x0)
        if y1 > y0:
            out[:, 1] = (pts[:, 1] - y0) / (y1 - y0)
        return out


def graph_points(spec: AddsSpec, n_points: Optional[int] = None) -> GraphSample:
    """Exact samples ``(Y0, step(Y0))`` for ``Y0`` in ``[0, n_points)``."""
    if n_points is None:
        n_points = spec.p**6
    if n_points < spec.p**3:
        raise ValueError(f"n_points must be >= p^3 = {spec.p ** 3}")
    pts = tuple((y, step(spec, y)) for y in range(n_points))
    ys = [b for _, b in pts]
    return GraphSample(spec, pts, (0, n_points - 1, min(ys), max(ys)))


@dataclass(frozen=True)
class BoxCountFit:
    scales: tuple[float, ...]
    counts: tuple[int, ...]
    dimension: float
    fit_residual: float
    levels: tuple[int, ...] = ()


def box_counts(unit_pts: np.ndarray, base: int, levels: Sequence[int]) -> list[int]:
    counts = []
    for lvl in levels:
        k = base**lvl
        idx = np.minimum((unit_pts * k).astype(np.int64), k - 1)
        counts.append(len(np.unique(idx[:, 0] * k + idx[:, 1])))
    return counts


def box_dimension(sample: GraphSample, scale_levels: Sequence[int] = DEFAULT_SCALE_LEVELS) -> BoxCountFit:
    """Box-counting dimension on a base-p grid over the sample's bounding box.

    Boxes at level ``l`` have side ``p**-l``; the dimension is minus the
    least-squares slope of log(count) against log(side).
    """
    levels = tuple(scale_levels)
    if len(levels) < 4:
        raise ValueError("need at least 4 scale levels")
    pts = sample.as_array()
    if len(np.unique(pts, axis=0)) < 2:
        raise DegenerateSample("all sample points coincide")
    p = sample.spec.p
    counts = box_counts(sample.unit_square(), p, levels)
    scales = [float(p) ** -lvl for lvl in levels]
    x, y = np.log(scales), np.log(counts)
    (slope, icept), res, *_ = np.polyfit(x, y, 1, full=True)
    resid = float(np.sqrt(res[0] / len(x))) if len(res) else 0.0
    return BoxCountFit(tuple(scales), tuple(counts), float(-slope), resid, levels)


class SeriesVerdict(str, Enum):
    RADIUS_ONE = "radius-one"
    RADIUS_OTHER = "radius-other"
    NON_CONVERGENT = "non-convergent"
    DEGENERATE = "degenerate-zero-terms"


@dataclass(frozen=True)
class RatioSeries:
    spec: AddsSpec
    terms: tuple[int, ...]
    # ratios[n] = |a_n / a_{n+1}|, None where a_{n+1} == 0
    ratios: tuple[Optional[float], ...]
    zero_terms: tuple[int, ...]
    limit_estimate: Optional[float]
    tail_spread: Optional[float]
    verdict: SeriesVerdict

    def spread(self, lo: int, hi: int) -> float:
        vals = [r for r in self.ratios[lo:hi + 1] if r is not None]
        return max(vals) - min(vals)


def series_terms(spec: AddsSpec, n_max: int) -> list[int]:
    """a_n = A*IVT(n) + B (type I) or IVT(a*n + b) (type II), n = 0..n_max."""
    return [step(spec, n) for n in range(n_max + 1)]


def ratio_sequence(spec: AddsSpec, n_max: int = 1000) -> RatioSeries:
    """Ratio test on the power series whose coefficients are the ADDS images of n.

    The limit is estimated from the last tenth of the ratios, and only
    when their spread stays below ``RATIO_SPREAD_TOL``.
    """
    if n_max < 100:
        raise ValueError("n_max must be >= 100")
    a = series_terms(spec, n_max + 1)
    zeros = tuple(n for n, v in enumerate(a) if v == 0)
    ratios = tuple(abs(a[n] / a[n + 1]) if a[n + 1] else None for n in range(n_max + 1))
    if len(zeros) == len(a):
        return RatioSeries(spec, tuple(a), ratios, zeros, None, None, SeriesVerdict.DEGENERATE)
    tail = [r for r in ratios[n_max - n_max // 10:] if r is not None]
    limit = spread = None
    if tail:
        spread = max(tail) - min(tail)
        if spread < RATIO_SPREAD_TOL:
            limit = float(np.mean(tail))
    if limit is None:
        verdict = SeriesVerdict.NON_CONVERGENT
    elif abs(limit - 1.0) <= RADIUS_ONE_TOL:
        verdict = SeriesVerdict.RADIUS_ONE
    else:
        verdict = SeriesVerdict.RADIUS_OTHER
    return RatioSeries(spec, tuple(a), ratios, zeros, limit, spread, verdict)


def radius_one_rules(p: int, mul: int, add: int, variant=Variant.TYPE_I, n_max: int = 1000) -> list[int]:
    """All rules whose coefficient series has a ratio limit of 1."""
    return [
        j for j in range(rule_count(p))
        if ratio_sequence(AddsSpec(variant, p, j, mul, add), n_max).verdict is SeriesVerdict.RADIUS_ONE
    ]
