"""Depth-parameterized autocorrelation indicators.

For a parameter ``i``, time ``t``, depth ``k`` and lag ``c`` the cell value is

    w = 1/(k-1) * sum_{l=1..k} a_l * b_l

where ``a`` is the window ``x_i(t-1), ..., x_i(t-k)`` and ``b`` the window
anchored at ``t + c``, each shifted to zero mean and scaled to unit sample
standard deviation. That makes ``w`` the Pearson correlation of the two
windows. Windows with (numerically) zero variance give an absent cell.

Cells are summed over parameters into ``W_k(t)`` and split into strictly
positive and strictly negative parts. ``depth_time_matrix`` builds the grid
of those sums for ``k = 2..K`` and ``depth_summary`` adds each row over t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .dyn_system import Trajectory
from .errors import (
    DegenerateBase,
    IndexOutOfRange,
    InsufficientHistory,
    SeriesTooShort,
    ZeroVariance,
)

VARIANCE_EPS = 1e-12
BASE_EPS = 1e-12


@dataclass(frozen=True)
class WindowSpec:
    k: int
    c: int = 1

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise ValueError(f"depth k must be an integer >= 2, got {self.k}")
        if int(self.c) != self.c or self.c < 0:
            raise ValueError(f"lag c must be an integer >= 0, got {self.c}")


@dataclass(frozen=True)
class AcfCell:
    i: int
    t: int
    k: int
    c: int
    value: float


@dataclass(frozen=True)
class IndicatorDecomposition:
    t: int
    k: int
    w_total: float
    w_plus: float
    w_minus: float
    n_valid: int


def extract_window(series: Trajectory, i: int, t: int, k: int) -> np.ndarray:
    """Return ``[x_i(t-1), x_i(t-2), ..., x_i(t-k)]``."""
    if not 0 <= i < series.n:
        raise IndexOutOfRange(f"parameter index {i} outside {series.n} columns")
    if k < 1:
        raise ValueError(f"window length must be positive, got {k}")
    if t - k < series.t0:
        raise InsufficientHistory(f"window of depth {k} at t={t} starts before t0={series.t0}")
    if t - 1 > series.t0 + series.T - 1:
        raise InsufficientHistory(f"window at t={t} needs x({t - 1}), series ends at {series.t0 + series.T - 1}")
    hi = t - series.t0
    return series.data[hi - k:hi, i][::-1].copy()


def center_normalize(window) -> np.ndarray:
    """Zero mean, unit sample standard deviation (divisor ``k - 1``)."""
    w = np.asarray(window, dtype=float)
    k = w.size
    if k < 2:
        raise ValueError("normalization needs at least two samples")
    mean = w.sum() / k
    dev = w - mean
    std = math.sqrt(float(dev @ dev) / (k - 1))
    if std < VARIANCE_EPS * max(1.0, abs(mean)):
        raise ZeroVariance(f"window has zero variance (std={std:.3g})")
    return dev / std


def acf_value(series: Trajectory, i: int, t: int, spec: WindowSpec) -> float:
    a = center_normalize(extract_window(series, i, t, spec.k))
    b = center_normalize(extract_window(series, i, t + spec.c, spec.k))
    return float(a @ b) / (spec.k - 1)


def acf_row(series: Trajectory, t: int, spec: WindowSpec) -> list[AcfCell | None]:
    """One cell per parameter at ``(t, k, c)``; ``None`` marks a zero-variance cell."""
    if t - spec.k < series.t0 or t + spec.c - 1 > series.t0 + series.T - 1:
        raise InsufficientHistory(f"no complete window pair at t={t} for k={spec.k}, c={spec.c}")
    row: list[AcfCell | None] = []
    for i in range(series.n):
        try:
            value = acf_value(series, i, t, spec)
        except ZeroVariance:
            row.append(None)
        else:
            row.append(AcfCell(i=i, t=t, k=spec.k, c=spec.c, value=value))
    return row


def decompose(row: Iterable[AcfCell | None], t: int | None = None, k: int | None = None) -> IndicatorDecomposition:
    """Split the row sum into strictly positive and strictly negative parts."""
    w_plus = 0.0
    w_minus = 0.0
    n_valid = 0
    for cell in row:
        if cell is None:
            continue
        n_valid += 1
        if t is None:
            t = cell.t
        if k is None:
            k = cell.k
        if cell.value > 0:
            w_plus += cell.value
        elif cell.value < 0:
            w_minus += cell.value
    return IndicatorDecomposition(
        t=-1 if t is None else t,
        k=-1 if k is None else k,
        w_total=w_plus + w_minus,
        w_plus=w_plus,
        w_minus=w_minus,
        n_valid=n_valid,
    )


def relative_to_base(row_over_t: Sequence[float], base_index: int = 0) -> np.ndarray:
    """Divide a row by its base element (the first valid period by default)."""
    values = np.asarray(row_over_t, dtype=float)
    if not 0 <= base_index < values.size:
        raise IndexOutOfRange(f"base index {base_index} outside row of length {values.size}")
    base = values[base_index]
    if abs(base) < BASE_EPS:
        raise DegenerateBase(f"base value {base!r} is too close to zero")
    out = values / base
    out[base_index] = 1.0
    return out


def valid_times(T: int, t0: int, k: int, c: int) -> np.ndarray:
    """Anchor times with both windows inside a series of ``T`` rows."""
    return np.arange(t0 + k, t0 + T - c + 1)


def acf_grid(data: np.ndarray, k: int, c: int) -> np.ndarray:
    """Every cell for one depth: array ``(n_times, n)``, NaN where absent.

    Row ``j`` corresponds to anchor time ``t0 + k + j``.
    """
    data = np.asarray(data, dtype=float)
    T, n = data.shape
    n_times = T - k - c + 1
    if n_times <= 0:
        return np.empty((0, n))
    # windows[s, i, :] = data[s:s+k, i]; the anchor of window s is s + k
    windows = sliding_window_view(data, k, axis=0)
    mean = windows.sum(axis=-1) / k
    dev = windows - mean[..., None]
    std = np.sqrt(np.einsum("sik,sik->si", dev, dev) / (k - 1))
    ok = std >= VARIANCE_EPS * np.maximum(1.0, np.abs(mean))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = dev / np.where(ok, std, 1.0)[..., None]
    a = z[:n_times]
    b = z[c:c + n_times]
    values = np.einsum("sik,sik->si", a, b) / (k - 1)
    values[~(ok[:n_times] & ok[c:c + n_times])] = np.nan
    return values


def _decompose_grid(values: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    n_times, n = values.shape
    w_plus = np.zeros(n_times)
    w_minus = np.zeros(n_times)
    n_valid = np.zeros(n_times, dtype=int)
    # parameter-by-parameter accumulation keeps the scalar left-to-right order
    for i in range(n):
        v = values[:, i]
        defined = ~np.isnan(v)
        w_plus += np.where(defined & (v > 0), v, 0.0)
        w_minus += np.where(defined & (v < 0), v, 0.0)
        n_valid += defined
    return w_plus + w_minus, w_plus, w_minus, n_valid


@dataclass
class DepthTimeMatrix:
    """Indicator sums for depths ``k = 2..K``.

    Arrays are ``(K - 1) x n_cols`` and aligned on absolute time:
    column ``j`` is time ``t_first + j``, with ``t_first = t0 + 2``. Entries
    outside a row's valid time range are NaN (``n_valid`` -1).
    """

    K: int
    c: int
    t0: int
    T: int
    w_total: np.ndarray
    w_plus: np.ndarray
    w_minus: np.ndarray
    n_valid: np.ndarray

    @property
    def depths(self) -> np.ndarray:
        return np.arange(2, self.K + 1)

    @property
    def t_first(self) -> int:
        return self.t0 + 2

    def times(self, k: int) -> np.ndarray:
        return valid_times(self.T, self.t0, k, self.c)

    def _cols(self, k: int) -> slice:
        if not 2 <= k <= self.K:
            raise IndexOutOfRange(f"depth {k} outside 2..{self.K}")
        ts = self.times(k)
        if ts.size == 0:
            return slice(0, 0)
        return slice(int(ts[0] - self.t_first), int(ts[-1] - self.t_first) + 1)

    def row(self, k: int, field: str = "w_total") -> np.ndarray:
        """Values of one depth row over its valid times."""
        return getattr(self, field)[k - 2, self._cols(k)]

    def entry(self, k: int, t: int) -> IndicatorDecomposition:
        ts = self.times(k)
        if ts.size == 0 or not ts[0] <= t <= ts[-1]:
            raise IndexOutOfRange(f"t={t} outside the valid range for depth {k}")
        j = t - self.t_first
        r = k - 2
        return IndicatorDecomposition(
            t=int(t),
            k=int(k),
            w_total=float(self.w_total[r, j]),
            w_plus=float(self.w_plus[r, j]),
            w_minus=float(self.w_minus[r, j]),
            n_valid=int(self.n_valid[r, j]),
        )

    def entries(self) -> Iterator[IndicatorDecomposition]:
        """All valid entries, ordered by depth then time."""
        for k in self.depths:
            for t in self.times(int(k)):
                yield self.entry(int(k), int(t))

    @property
    def size(self) -> int:
        return int(sum(self.times(int(k)).size for k in self.depths))


def default_max_depth(T: int) -> int:
    return T // 2


def depth_time_matrix(series: Trajectory, c: int = 1, K: int | None = None) -> DepthTimeMatrix:
    T = series.T
    if T < 4:
        raise SeriesTooShort(f"series has {T} rows; at least 4 are needed for depth 2")
    if int(c) != c or c < 0:
        raise ValueError(f"lag must be a non-negative integer, got {c}")
    if K is None:
        K = default_max_depth(T)
    if K < 2:
        raise ValueError(f"max depth must be >= 2, got {K}")
    if K + c > T:
        raise SeriesTooShort(f"depth {K} with lag {c} needs at least {K + c} rows, series has {T}")

    n_cols = T - 1 - c
    shape = (K - 1, n_cols)
    w_total = np.full(shape, np.nan)
    w_plus = np.full(shape, np.nan)
    w_minus = np.full(shape, np.nan)
    n_valid = np.full(shape, -1, dtype=int)
    for k in range(2, K + 1):
        values = acf_grid(series.data, k, c)
        tot, plus, minus, nv = _decompose_grid(values)
        j0 = k - 2
        sl = slice(j0, j0 + values.shape[0])
        w_total[k - 2, sl] = tot
        w_plus[k - 2, sl] = plus
        w_minus[k - 2, sl] = minus
        n_valid[k - 2, sl] = nv
    return DepthTimeMatrix(K=K, c=c, t0=series.t0, T=T, w_total=w_total, w_plus=w_plus, w_minus=w_minus, n_valid=n_valid)


def acf_cells(series: Trajectory, spec: WindowSpec) -> list[AcfCell]:
    """Every defined cell at one depth, ordered by time then parameter."""
    values = acf_grid(series.data, spec.k, spec.c)
    times = valid_times(series.T, series.t0, spec.k, spec.c)
    cells = []
    for j, t in enumerate(times):
        for i in range(series.n):
            v = values[j, i]
            if not np.isnan(v):
                cells.append(AcfCell(i=i, t=int(t), k=spec.k, c=spec.c, value=float(v)))
    return cells


@dataclass(frozen=True)
class DepthSummary:
    """Row sums ``W[k]`` for ``k = 2..K``. There is no ``W[1]``."""

    W: tuple[float, ...]

    @property
    def depths(self) -> tuple[int, ...]:
        return tuple(range(2, 2 + len(self.W)))

    @property
    def K(self) -> int:
        return 1 + len(self.W)

    def __getitem__(self, k: int) -> float:
        if not 2 <= k <= self.K:
            raise IndexOutOfRange(f"depth {k} outside 2..{self.K}")
        return self.W[k - 2]

    def __len__(self) -> int:
        return len(self.W)


def depth_summary(matrix: DepthTimeMatrix) -> DepthSummary:
    sums = []
    for k in matrix.depths:
        total = 0.0
        for v in matrix.row(int(k)):
            total += float(v)
        sums.append(total)
    return DepthSummary(tuple(sums))
