"""Deterministic dendritic-cell detector: preprocessing, cells, and labeling.

The detector is a population of accumulating agents ("cells") that all watch
the same two environmental signals.  Preprocessing turns the two raw features
of a labeled block into those signals: each feature is min-max normalized to
[0, 1] over the block, the feature more correlated with the anomalous class
becomes the danger signal, and the other becomes the safe signal, flipped
(s <- 1 - s) when it rises with anomalies so that a high safe value always
means "looks normal".

Each step every cell adds the instance's signal strength csm = safe + danger
to its running total and the signed evidence k = danger - safe to its tally.
When the running total reaches the cell's lifespan, the cell presents: every
instance seen since its last reset receives the tally as a vote, and the cell
resets.  Cells differ only in lifespan, so the population observes the series
over a ladder of time scales; leftover partial windows are flushed as a final
presentation so every instance is voted on by every cell.  An instance is
anomalous when the mean of its received votes is >= 0.

Their accumulate-and-reset behaviour gives each cell the same disjoint,
contiguous, covering window structure as the dynamic moving-window filter,
with csm playing the role of the score magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datagen import ANOMALOUS_LABEL, InstanceSeries


class NormalizationError(ValueError):
    """A feature is constant over the block, so min-max normalization is undefined."""


class DegenerateSignalError(ValueError):
    """All signal strengths are zero, so no lifespan ladder can be built."""


@dataclass(frozen=True, eq=False)
class SignalMapping:
    """How raw features were turned into safe/danger signals."""

    feature_min: np.ndarray
    feature_max: np.ndarray
    correlations: np.ndarray
    danger_feature: int
    safe_feature: int
    safe_inverted: bool


@dataclass(frozen=True, eq=False)
class SignalSeries:
    """Per-instance safe and danger signals, in time order, each in [0, 1]."""

    safe: np.ndarray
    danger: np.ndarray
    mapping: SignalMapping

    def __len__(self) -> int:
        return self.safe.shape[0]


@dataclass
class DendriticCell:
    """One agent: a fixed lifespan plus its within-run accumulation state."""

    lifespan: float
    csm_sum: float = 0.0
    k_sum: float = 0.0
    window_start: int = 1


@dataclass(frozen=True, eq=False)
class DCAPopulation:
    """Cells ordered by strictly increasing lifespan."""

    cells: tuple[DendriticCell, ...]

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("population is empty")
        spans = [cell.lifespan for cell in self.cells]
        if spans[0] <= 0 or any(b <= a for a, b in zip(spans, spans[1:])):
            raise ValueError("lifespans must be positive and strictly increasing")

    @classmethod
    def from_lifespans(cls, lifespans) -> "DCAPopulation":
        return cls(tuple(DendriticCell(float(v)) for v in np.asarray(lifespans, dtype=float)))

    @property
    def size(self) -> int:
        return len(self.cells)


@dataclass(frozen=True, eq=False)
class AntigenScores:
    """Per-instance vote tallies and the resulting labels."""

    vote_sums: np.ndarray
    vote_counts: np.ndarray
    mean_votes: np.ndarray
    labels: np.ndarray


def preprocess(test_set) -> SignalSeries:
    """Build safe/danger signals from a two-feature labeled block."""
    series = InstanceSeries.coerce(test_set)
    if len(series) == 0:
        raise ValueError("instance block is empty")
    if series.n_features != 2:
        raise ValueError(f"expected exactly 2 features, got {series.n_features}")
    feats = series.features
    lo = feats.min(axis=0)
    hi = feats.max(axis=0)
    span = hi - lo
    if np.any(span == 0):
        flat = int(np.flatnonzero(span == 0)[0])
        raise NormalizationError(f"feature {flat + 1} is constant; cannot normalize")
    norm = (feats - lo) / span

    anomalous = np.where(series.labels == ANOMALOUS_LABEL, 1.0, -1.0)
    if np.all(anomalous == anomalous[0]):
        raise ValueError("block contains a single class; correlations are undefined")
    correlations = np.array(
        [float(np.corrcoef(norm[:, j], anomalous)[0, 1]) for j in range(2)]
    )

    danger_idx = int(np.argmax(correlations))
    safe_idx = 1 - danger_idx
    danger = norm[:, danger_idx]
    safe = norm[:, safe_idx]
    invert = correlations[safe_idx] > 0
    if invert:
        safe = 1.0 - safe
    mapping = SignalMapping(
        feature_min=lo,
        feature_max=hi,
        correlations=correlations,
        danger_feature=danger_idx,
        safe_feature=safe_idx,
        safe_inverted=bool(invert),
    )
    return SignalSeries(safe=safe, danger=danger, mapping=mapping)


def signal_transform(safe, danger):
    """Per-step strength and evidence: csm = safe + danger, k = danger - safe."""
    safe = np.asarray(safe, dtype=float)
    danger = np.asarray(danger, dtype=float)
    csm = safe + danger
    k = danger - safe
    if csm.ndim == 0:
        return float(csm), float(k)
    return csm, k


def init_lifespans(signals: SignalSeries, m: int, lam: float) -> np.ndarray:
    """Lifespan ladder max(csm) * (l/m) * lam for l = 1..m."""
    if m < 1:
        raise ValueError(f"population size must be >= 1, got {m}")
    if not lam > 0:
        raise ValueError(f"scale factor must be > 0, got {lam}")
    csm, _ = signal_transform(signals.safe, signals.danger)
    peak = float(np.max(csm)) if len(signals) else 0.0
    if peak <= 0.0:
        raise DegenerateSignalError("all signal strengths are zero; lifespans undefined")
    return peak * (np.arange(1, m + 1, dtype=float) / m) * lam


def _presentation_spans(cum_csm: np.ndarray, lifespan: float) -> list[tuple[int, int]]:
    """0-based (start, end) windows: each ends at the first index where the
    accumulated csm since the last reset reaches the lifespan; the remainder
    is flushed as a final window."""
    n = cum_csm.shape[0]
    spans = []
    start = 0
    prev_total = 0.0
    while start < n:
        end = int(np.searchsorted(cum_csm, prev_total + lifespan, side="left"))
        if end >= n:
            end = n - 1  # end of input: flush the partial window
        spans.append((start, end))
        prev_total = cum_csm[end]
        start = end + 1
    return spans


def run_dca_scores(signals: SignalSeries, population: DCAPopulation) -> AntigenScores:
    """Process the full series with every cell and tally per-instance votes."""
    n = len(signals)
    if n == 0:
        raise ValueError("signal series is empty")
    csm, k = signal_transform(signals.safe, signals.danger)
    cum_csm = np.cumsum(csm)
    cum_k = np.concatenate([[0.0], np.cumsum(k)])

    # Range-add votes via difference arrays; one window per cell per instance.
    vote_diff = np.zeros(n + 1)
    count_diff = np.zeros(n + 1)
    for cell in population.cells:
        for start, end in _presentation_spans(cum_csm, cell.lifespan):
            vote = cum_k[end + 1] - cum_k[start]
            vote_diff[start] += vote
            vote_diff[end + 1] -= vote
            count_diff[start] += 1
            count_diff[end + 1] -= 1

    vote_sums = np.cumsum(vote_diff[:-1])
    vote_counts = np.cumsum(count_diff[:-1])
    mean_votes = vote_sums / vote_counts
    labels = np.where(mean_votes >= 0, 1, -1)
    return AntigenScores(vote_sums, vote_counts, mean_votes, labels)


def run_dca(signals: SignalSeries, population: DCAPopulation) -> np.ndarray:
    """Anomaly labels (+1 anomalous, -1 normal) for every instance."""
    return run_dca_scores(signals, population).labels


def write_score_dump(scores: AntigenScores, path) -> None:
    """Debug CSV: time_index, mean vote and label per instance."""
    from pathlib import Path

    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write("time_index,mean_vote,label\n")
        for i, (vote, label) in enumerate(zip(scores.mean_votes, scores.labels), start=1):
            fh.write(f"{i},{float(vote)!r},{int(label)}\n")
