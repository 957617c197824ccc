"""Static and dynamic moving-window filters over a score series.

Both filters partition the time axis into disjoint, contiguous windows that
cover every index, then relabel each instance with the sign of the summed
scores of its window.  The static filter uses a fixed window width; the
dynamic filter grows each window until the accumulated score magnitude would
exceed a budget, so windows are narrow where the classifier is confident and
wide where it is not.

A window always contains at least one index: if a single score's magnitude
already exceeds the dynamic budget, that index forms a singleton window.
Consecutive windows share no endpoints; the next window starts one index
after the previous one ends, which keeps every label in {-1, +1}.

Tuning is exhaustive minimization of the mean squared label error over a
parameter grid; ties go to the smallest parameter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Literal

import numpy as np

from .svm import ScoreSeries


class DegenerateGridError(ValueError):
    """All score magnitudes are zero, so no positive threshold grid exists."""


def sgn(x: float) -> int:
    """Sign with the convention sgn(0) = +1."""
    return 1 if x >= 0 else -1


def _sgn_array(values: np.ndarray) -> np.ndarray:
    return np.where(np.asarray(values) >= 0, 1, -1)


@dataclass(frozen=True)
class WindowSizeGrid:
    """A set of candidate window widths, stored sorted and deduplicated."""

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        cleaned = tuple(sorted({int(s) for s in self.sizes}))
        if not cleaned:
            raise ValueError("window-size grid is empty")
        if cleaned[0] < 1:
            raise ValueError(f"window sizes must be >= 1, got {cleaned[0]}")
        object.__setattr__(self, "sizes", cleaned)

    @property
    def m(self) -> int:
        return len(self.sizes)


def default_size_grid(m: int = 100) -> WindowSizeGrid:
    """The canonical width grid {1, 2, ..., m}."""
    return WindowSizeGrid(tuple(range(1, m + 1)))


@dataclass(frozen=True, eq=False)
class ThresholdGrid:
    """A strictly increasing set of dynamic-window budgets and its scale factor."""

    thresholds: np.ndarray
    lam: float

    def __post_init__(self) -> None:
        thr = np.asarray(self.thresholds, dtype=float)
        if thr.ndim != 1 or thr.size == 0:
            raise ValueError("threshold grid must be a nonempty 1-d array")
        if not np.all(thr > 0):
            raise ValueError("thresholds must be positive")
        if not np.all(np.diff(thr) > 0):
            raise ValueError("thresholds must be strictly increasing")
        object.__setattr__(self, "thresholds", thr)

    @property
    def m(self) -> int:
        return self.thresholds.size


@dataclass(frozen=True)
class WindowPartition:
    """Disjoint, contiguous index intervals covering [1, n] (1-based, inclusive)."""

    spans: tuple[tuple[int, int], ...]
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("partition length must be >= 1")
        expected = 1
        for start, end in self.spans:
            if start != expected or end < start:
                raise ValueError(f"spans are not a contiguous cover of [1, {self.n}]")
            expected = end + 1
        if expected != self.n + 1:
            raise ValueError(f"spans are not a contiguous cover of [1, {self.n}]")

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.spans)

    def __len__(self) -> int:
        return len(self.spans)


@dataclass(frozen=True)
class TunedFilter:
    """Result of grid tuning: the filter kind, its parameter and training error."""

    kind: Literal["static", "dynamic"]
    parameter: float
    training_error: float

    def csv_row(self) -> str:
        return f"{self.kind},{self.parameter!r},{self.training_error!r}"


def static_partition(n: int, alpha: int) -> WindowPartition:
    """Fixed-width windows [1+(k-1)a, min(ka, n)]; the last may be short."""
    if n < 1:
        raise ValueError(f"series length must be >= 1, got {n}")
    if alpha < 1:
        raise ValueError(f"window size must be >= 1, got {alpha}")
    spans = tuple(
        (start, min(start + alpha - 1, n)) for start in range(1, n + 1, alpha)
    )
    return WindowPartition(spans, n)


def static_label(series: ScoreSeries, alpha: int) -> np.ndarray:
    """Label every instance with the sign of its fixed-width window's score sum."""
    n = len(series)
    if n == 0:
        raise ValueError("score series is empty")
    if alpha < 1:
        raise ValueError(f"window size must be >= 1, got {alpha}")
    starts = np.arange(0, n, alpha)
    sums = np.add.reduceat(series.scores, starts)
    lengths = np.diff(np.append(starts, n))
    return np.repeat(_sgn_array(sums), lengths)


def window_error(labels, truths) -> float:
    """Mean squared label disagreement; equals 4x the misclassified fraction."""
    labels = np.asarray(labels, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if labels.shape != truths.shape:
        raise ValueError(
            f"label/truth length mismatch: {labels.shape} vs {truths.shape}"
        )
    return float(np.mean((labels - truths) ** 2))


def tune_static(series: ScoreSeries, grid: WindowSizeGrid) -> TunedFilter:
    """Width in the grid minimizing training error; ties go to the smallest."""
    best_alpha, best_err = None, np.inf
    for alpha in grid.sizes:
        err = window_error(static_label(series, alpha), series.truths)
        if err < best_err:
            best_alpha, best_err = alpha, err
    return TunedFilter("static", float(best_alpha), best_err)


def make_threshold_grid(series: ScoreSeries, m: int, lam: float) -> ThresholdGrid:
    """Budgets b_l = max|score| * (l/m) * lam for l = 1..m."""
    if len(series) == 0:
        raise ValueError("score series is empty")
    if m < 1:
        raise ValueError(f"grid cardinality must be >= 1, got {m}")
    if not lam > 0:
        raise ValueError(f"scale factor must be > 0, got {lam}")
    peak = float(np.max(np.abs(series.scores)))
    if peak == 0.0:
        raise DegenerateGridError("all scores are zero; threshold grid would be degenerate")
    levels = np.arange(1, m + 1, dtype=float) / m
    return ThresholdGrid(peak * levels * lam, float(lam))


def _greedy_spans(cum_abs: np.ndarray, beta: float) -> Iterator[tuple[int, int]]:
    """0-based (start, end) windows: each extends while its |score| sum stays
    within ``beta``, with a one-index floor; the next starts at end+1."""
    n = cum_abs.shape[0]
    start = 0
    prev_total = 0.0
    while start < n:
        end = int(np.searchsorted(cum_abs, prev_total + beta, side="right")) - 1
        if end < start:
            end = start
        yield start, end
        prev_total = cum_abs[end]
        start = end + 1


def dynamic_partition(series: ScoreSeries, beta: float) -> WindowPartition:
    """Budget-driven windows over the series' absolute scores."""
    n = len(series)
    if n == 0:
        raise ValueError("score series is empty")
    if not beta > 0:
        raise ValueError(f"threshold must be > 0, got {beta}")
    cum_abs = np.cumsum(np.abs(series.scores))
    spans = tuple((s + 1, e + 1) for s, e in _greedy_spans(cum_abs, beta))
    return WindowPartition(spans, n)


def dynamic_label(series: ScoreSeries, beta: float) -> np.ndarray:
    """Label every instance with the sign of its dynamic window's score sum."""
    n = len(series)
    if n == 0:
        raise ValueError("score series is empty")
    if not beta > 0:
        raise ValueError(f"threshold must be > 0, got {beta}")
    cum_abs = np.cumsum(np.abs(series.scores))
    cum = np.concatenate([[0.0], np.cumsum(series.scores)])
    labels = np.empty(n, dtype=int)
    for start, end in _greedy_spans(cum_abs, beta):
        labels[start : end + 1] = 1 if cum[end + 1] - cum[start] >= 0 else -1
    return labels


def tune_dynamic(series: ScoreSeries, grid: ThresholdGrid) -> TunedFilter:
    """Budget in the grid minimizing training error; ties go to the smallest."""
    best_beta, best_err = None, np.inf
    for beta in grid.thresholds:
        err = window_error(dynamic_label(series, float(beta)), series.truths)
        if err < best_err:
            best_beta, best_err = float(beta), err
    return TunedFilter("dynamic", best_beta, best_err)


def apply(tuned: TunedFilter, series: ScoreSeries) -> np.ndarray:
    """Run a tuned filter on a (typically held-out) score series."""
    if tuned.kind == "static":
        return static_label(series, int(tuned.parameter))
    if tuned.kind == "dynamic":
        return dynamic_label(series, tuned.parameter)
    raise ValueError(f"unknown filter kind {tuned.kind!r}")
