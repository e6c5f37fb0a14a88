"""Pearson and Spearman correlation between metric columns."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import ConstantInput, LengthMismatch, NonFiniteInput, TooFew, UnknownMetric
from .signal_io import ScoreTable

__all__ = ["CorrelationMatrix", "pcc", "srcc", "average_ranks", "correlation_matrix"]

log = logging.getLogger(__name__)


@dataclass
class CorrelationMatrix:
    metric_names: list[str]
    pcc: np.ndarray
    srcc: np.ndarray
    n_samples: int
    n_dropped: int = 0

    def to_dict(self) -> dict:
        return {
            "metric_names": list(self.metric_names),
            "n_samples": self.n_samples,
            "n_dropped": self.n_dropped,
            "pcc": self.pcc.tolist(),
            "srcc": self.srcc.tolist(),
        }

    def long_rows(self):
        """Yield ``(metric_a, metric_b, pcc, srcc)`` for every ordered pair."""
        for i, a in enumerate(self.metric_names):
            for j, b in enumerate(self.metric_names):
                yield a, b, float(self.pcc[i, j]), float(self.srcc[i, j])


def _check(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise LengthMismatch(f"sequences must be 1-D of equal length, got {x.shape} and {y.shape}")
    if x.shape[0] < 3:
        raise TooFew(f"need at least 3 samples, got {x.shape[0]}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise NonFiniteInput("correlation inputs must be finite")
    return x, y


def pcc(x, y) -> float:
    """Sample Pearson correlation, two-pass mean-centered."""
    x, y = _check(x, y)
    dx = x - math.fsum(x) / x.shape[0]
    dy = y - math.fsum(y) / y.shape[0]
    sxx = math.fsum(dx * dx)
    syy = math.fsum(dy * dy)
    if sxx == 0.0 or syy == 0.0:
        raise ConstantInput("correlation undefined for a constant sequence")
    r = math.fsum(dx * dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def average_ranks(x) -> np.ndarray:
    """1-based ranks, ties sharing the mean of the ranks they span."""
    return rankdata(x, method="average")


def srcc(x, y) -> float:
    """Spearman rank correlation (Pearson correlation of average ranks)."""
    x, y = _check(x, y)
    return pcc(average_ranks(x), average_ranks(y))


def correlation_matrix(table: ScoreTable, targets: Sequence[str] | None = None) -> CorrelationMatrix:
    """Pairwise PCC/SRCC over the rows where every requested metric is finite.

    Rows holding ``inf`` or missing values in any target column are dropped
    (and counted), never clamped.
    """
    targets = list(targets) if targets else list(table.metric_names)
    unknown = [t for t in targets if t not in table.values]
    if unknown:
        raise UnknownMetric(f"unknown metric(s): {', '.join(unknown)}")
    cols = np.stack([table.values[t] for t in targets], axis=1) if targets else np.empty((len(table), 0))
    keep = np.all(np.isfinite(cols), axis=1)
    n_dropped = int((~keep).sum())
    if n_dropped:
        log.info("dropped %d of %d rows with non-finite or missing scores", n_dropped, len(keep))
    cols = cols[keep]
    if cols.shape[0] < 3:
        raise TooFew(f"only {cols.shape[0]} usable rows after dropping {n_dropped}")
    n = len(targets)
    p = np.eye(n)
    s = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            p[i, j] = p[j, i] = pcc(cols[:, i], cols[:, j])
            s[i, j] = s[j, i] = srcc(cols[:, i], cols[:, j])
    return CorrelationMatrix(targets, p, s, int(cols.shape[0]), n_dropped)
