"""Decisions derived from indicator rows and summaries.

* ``detect_peaks`` finds prominent interior maxima of a row over time.
* ``detect_oscillation`` checks whether extrema recur at a candidate cadence.
* ``recommend_horizon`` picks short/medium/long depths from a depth summary.
* ``classify_components`` labels parameters by the sign of their cells.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .acf_core import AcfCell, DepthSummary
from .errors import EmptySummary, SeriesTooShort

DEFAULT_TIERS = (0.5, 0.8, 0.95)
DEFAULT_THRESHOLDS = (0.35, 0.65)
DEFAULT_PROMINENCE_FRACTION = 0.1


@dataclass(frozen=True)
class PeakReport:
    k: int | None
    peak_times: tuple[int, ...]
    dominant_period: float | None
    prominence_used: float
    prominences: tuple[float, ...] = ()


@dataclass(frozen=True)
class OscillationReport:
    period: int
    hit_times: tuple[int, ...]
    coverage: float
    expected_hits: int
    extremum: str


@dataclass(frozen=True)
class HorizonRecommendation:
    short_k: int
    medium_k: int
    long_k: int
    tiers: tuple[float, float, float]
    rationale: tuple[float, float, float]


@dataclass(frozen=True)
class ComponentClass:
    i: int
    label: str
    positive_fraction: float | None
    n_cells: int


def _times(n: int, times) -> np.ndarray:
    if times is None:
        return np.arange(n)
    times = np.asarray(times)
    if times.size != n:
        raise ValueError(f"{times.size} time labels for a series of length {n}")
    return times


def _local_maxima(y: np.ndarray) -> list[int]:
    """Interior strict maxima; a flat top resolves to its leftmost index."""
    peaks = []
    i = 1
    L = y.size
    while i < L - 1:
        if y[i] > y[i - 1]:
            j = i
            while j + 1 < L and y[j + 1] == y[i]:
                j += 1
            if j + 1 < L and y[j + 1] < y[i]:
                peaks.append(i)
            i = j + 1
        else:
            i += 1
    return peaks


def _prominence(y: np.ndarray, i: int) -> float:
    h = y[i]
    left = i
    left_min = h
    while left > 0 and y[left - 1] <= h:
        left -= 1
        left_min = min(left_min, y[left])
    right = i
    right_min = h
    while right < y.size - 1 and y[right + 1] <= h:
        right += 1
        right_min = min(right_min, y[right])
    return float(h - max(left_min, right_min))


def detect_peaks(series_over_t, prominence: float | None = None, *, times=None, k: int | None = None) -> PeakReport:
    """Interior local maxima whose prominence reaches ``prominence``.

    Prominence is the height above the higher of the two minima found
    walking left and right until a strictly higher sample (or the edge).
    ``prominence=None`` uses 10% of the series range.
    """
    y = np.asarray(series_over_t, dtype=float)
    if y.size < 3:
        raise SeriesTooShort(f"peak detection needs at least 3 samples, got {y.size}")
    ts = _times(y.size, times)
    if prominence is None:
        prominence = DEFAULT_PROMINENCE_FRACTION * float(y.max() - y.min())
    if prominence < 0:
        raise ValueError(f"prominence must be >= 0, got {prominence}")

    kept = []
    proms = []
    for i in _local_maxima(y):
        p = _prominence(y, i)
        if p >= prominence:
            kept.append(int(ts[i]))
            proms.append(p)
    dominant = None
    if len(kept) >= 2:
        dominant = float(statistics.median(np.diff(kept)))
    return PeakReport(k=k, peak_times=tuple(kept), dominant_period=dominant,
                      prominence_used=float(prominence), prominences=tuple(proms))


def detect_oscillation(series_over_t, candidate_period: int, *, times=None) -> OscillationReport:
    """How regularly extrema recur every ``candidate_period`` samples.

    An extremum is a hit when its gap to the neighbouring extremum of the
    same kind (maximum to maximum, minimum to minimum) is within one sample
    of the candidate period. Coverage is hits over the number of cadence
    points that fit in the interior of the series, capped at 1; the better
    of the two extremum kinds is reported.
    """
    P = int(candidate_period)
    if P < 2:
        raise ValueError(f"candidate period must be >= 2, got {candidate_period}")
    y = np.asarray(series_over_t, dtype=float)
    if y.size < 2 * P:
        raise SeriesTooShort(f"series of length {y.size} is shorter than two periods of {P}")
    ts = _times(y.size, times)
    expected = (y.size - 3) // P + 1

    best = None
    for kind, z in (("max", y), ("min", -y)):
        ext = _local_maxima(z)
        hits = set()
        for a, b in zip(ext, ext[1:]):
            if P - 1 <= b - a <= P + 1:
                hits.update((a, b))
        coverage = min(1.0, len(hits) / expected)
        if best is None or coverage > best[0]:
            best = (coverage, kind, sorted(hits))
    coverage, kind, hits = best
    return OscillationReport(period=P, hit_times=tuple(int(ts[i]) for i in hits),
                             coverage=float(coverage), expected_hits=expected, extremum=kind)


def recommend_horizon(summary: DepthSummary, tiers: Sequence[float] = DEFAULT_TIERS) -> HorizonRecommendation:
    """Depths that capture the given fractions of the summary's total variation.

    The variation at depth ``k`` is ``|W[k] - W[k-1]|`` (``|W[2]|`` at the
    first depth). Each tier is the smallest depth whose cumulative variation
    reaches ``tier * total``. A summary with no variation maps every tier
    to depth 2.
    """
    if len(summary) == 0:
        raise EmptySummary("depth summary has no entries")
    tiers = tuple(float(f) for f in tiers)
    if len(tiers) != 3 or not 0 < tiers[0] < tiers[1] < tiers[2] <= 1:
        raise ValueError(f"tiers must satisfy 0 < t1 < t2 < t3 <= 1, got {tiers}")

    W = summary.W
    cumulative = []
    acc = 0.0
    prev = 0.0
    for w in W:
        acc += abs(w - prev)
        cumulative.append(acc)
        prev = w
    total = cumulative[-1]
    if total == 0.0:
        return HorizonRecommendation(2, 2, 2, tiers, (0.0, 0.0, 0.0))

    chosen = []
    fractions = []
    for f in tiers:
        idx = next(j for j, cum in enumerate(cumulative) if cum >= f * total)
        chosen.append(idx + 2)
        fractions.append(cumulative[idx] / total)
    return HorizonRecommendation(chosen[0], chosen[1], chosen[2], tiers, tuple(fractions))


def classify_components(
    cells: Iterable[AcfCell | None],
    thresholds: tuple[float, float] = DEFAULT_THRESHOLDS,
    n_params: int | None = None,
) -> list[ComponentClass]:
    """Label each parameter developing / decaying / mixed / undefined.

    ``developing`` when the share of positive cells is at least the high
    threshold, ``decaying`` at or below the low one. Parameters without a
    defined cell are ``undefined``; pass ``n_params`` to list those too.
    """
    low, high = thresholds
    if not 0 <= low < high <= 1:
        raise ValueError(f"thresholds must satisfy 0 <= low < high <= 1, got {thresholds}")
    positive: dict[int, int] = {}
    total: dict[int, int] = {}
    for cell in cells:
        if cell is None:
            continue
        total[cell.i] = total.get(cell.i, 0) + 1
        positive[cell.i] = positive.get(cell.i, 0) + (cell.value > 0)
    indices = set(total)
    if n_params is not None:
        indices |= set(range(n_params))

    out = []
    for i in sorted(indices):
        count = total.get(i, 0)
        if count == 0:
            out.append(ComponentClass(i, "undefined", None, 0))
            continue
        frac = positive[i] / count
        if frac >= high:
            label = "developing"
        elif frac <= low:
            label = "decaying"
        else:
            label = "mixed"
        out.append(ComponentClass(i, label, frac, count))
    return out
