"""Accuracy, covariate-binned accuracy, and paired method comparison."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import stats

__all__ = [
    "accuracy",
    "BinnedAccuracy",
    "binned_accuracy",
    "ComparisonResult",
    "paired_comparison",
    "write_binned",
]


def accuracy(predicted: np.ndarray, truth: np.ndarray, threshold: float = 0.5) -> float:
    """Fraction of correct predictions.

    Float input is read as positive-class probabilities and thresholded
    with a strict ``> threshold`` (so an exact 0.5 predicts class 0);
    integer input is compared to ``truth`` directly, which also covers
    multi-class hard labels.
    """
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise ValueError("predicted and truth must have equal length")
    if predicted.size == 0:
        raise ValueError("empty input")
    if np.issubdtype(predicted.dtype, np.floating):
        predicted = (predicted > threshold).astype(np.int64)
    return float(np.mean(predicted == truth))


@dataclass(frozen=True)
class BinnedAccuracy:
    """Per-bin correctness over a covariate; empty bins have NaN accuracy."""

    bin_lo: np.ndarray
    bin_hi: np.ndarray
    counts: np.ndarray
    accuracies: np.ndarray
    correct: np.ndarray

    @property
    def n_bins(self) -> int:
        return len(self.counts)


def binned_accuracy(
    predicted: np.ndarray,
    truth: np.ndarray,
    values: np.ndarray,
    bins: int = 100,
    integer_bins: bool = False,
    threshold: float = 0.5,
    value_range: tuple[float, float] | None = None,
) -> BinnedAccuracy:
    """Classification accuracy inside equal-width covariate bins.

    Bins are half-open with the last one closed, and a value landing
    exactly on an interior edge goes to the right-hand bin. With
    ``integer_bins`` (degree-like covariates) there is one bin per
    integer value instead. ``value_range`` fixes the binned range so
    different samples can share edges; values outside it clamp into the
    end bins.
    """
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    values = np.asarray(values, dtype=float)
    if not (len(predicted) == len(truth) == len(values)):
        raise ValueError("inputs must be aligned")
    if np.issubdtype(predicted.dtype, np.floating):
        predicted = (predicted > threshold).astype(np.int64)
    correct = (predicted == truth).astype(float)

    if integer_bins:
        ints = np.rint(values).astype(np.int64)
        imin, imax = (
            (ints.min(), ints.max())
            if value_range is None
            else (int(value_range[0]), int(value_range[1]))
        )
        uniq = np.arange(imin, imax + 1)
        idx = np.clip(ints, imin, imax) - imin
        n_bins = len(uniq)
        lo = uniq.astype(float)
        hi = uniq.astype(float)
    else:
        if bins < 1:
            raise ValueError("need at least one bin")
        n_bins = bins
        vmin, vmax = (values.min(), values.max()) if value_range is None else value_range
        if vmin == vmax:
            edges = np.array([vmin, vmax])
            n_bins = 1
        else:
            edges = np.linspace(vmin, vmax, n_bins + 1)
        idx = np.digitize(values, edges) - 1
        idx = np.clip(idx, 0, n_bins - 1)  # closes the last bin
        lo = edges[:-1]
        hi = edges[1:]

    counts = np.bincount(idx, minlength=n_bins).astype(np.int64)
    hits = np.bincount(idx, weights=correct, minlength=n_bins)
    with np.errstate(invalid="ignore"):
        accs = np.where(counts > 0, hits / np.maximum(counts, 1), np.nan)
    return BinnedAccuracy(lo, hi, counts, accs, hits)


@dataclass(frozen=True)
class ComparisonResult:
    mean_diff: float
    p_value: float
    degenerate: bool  # zero-variance differences; p reported at the limit


def paired_comparison(acc_a: np.ndarray, acc_b: np.ndarray) -> ComparisonResult:
    """Paired one-sided test that method A is no better than method B.

    Computes the mean of per-repetition differences A - B and a paired
    t-test p-value under a normality assumption on the differences; a
    small p is evidence that A is more accurate. Constant differences
    have no variance, so the p-value collapses to 0.5 (all-zero), 0
    (positive, reported as < 1e-12), or 1 and is flagged degenerate.
    """
    a = np.asarray(acc_a, dtype=float)
    b = np.asarray(acc_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("paired comparison needs equal repetition counts")
    n = len(a)
    if n < 2:
        raise ValueError("need at least two repetitions")
    d = a - b
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return ComparisonResult(mean, 0.5, True)
        return ComparisonResult(mean, 0.0 if mean > 0 else 1.0, True)
    t = mean / (sd / np.sqrt(n))
    p = float(stats.t.sf(t, df=n - 1))
    return ComparisonResult(mean, p, False)


def write_binned(path, binned: BinnedAccuracy) -> None:
    """CSV export: ``bin_lo,bin_hi,count,accuracy`` (blank for empty bins)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_lo", "bin_hi", "count", "accuracy"])
        for lo, hi, c, acc in zip(binned.bin_lo, binned.bin_hi, binned.counts, binned.accuracies):
            acc_str = "" if np.isnan(acc) else repr(float(acc))
            w.writerow([repr(float(lo)), repr(float(hi)), int(c), acc_str])
