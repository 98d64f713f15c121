"""Multinomial naive Bayes over sparse bag-of-words node features.

Works in log space throughout, accepts real-valued term weights (counts
or TF-IDF), and smooths term likelihoods additively so unseen terms
never zero out a class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.special import logsumexp

from .graph import GraphParseError

__all__ = ["SparseFeatures", "NaiveBayesModel", "parse_feature_file", "fit_nb", "predict_nb"]


@dataclass(frozen=True)
class SparseFeatures:
    """Node-by-term weight matrix plus the interned vocabulary."""

    matrix: csr_matrix
    vocabulary: list[str]

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)


@dataclass(frozen=True)
class NaiveBayesModel:
    log_priors: np.ndarray  # (C,)
    log_likelihoods: np.ndarray  # (C, V)
    alpha: float

    @property
    def n_classes(self) -> int:
        return len(self.log_priors)

    @property
    def vocab_size(self) -> int:
        return self.log_likelihoods.shape[1]


def parse_feature_file(lines, node_ids, vocabulary: list[str] | None = None) -> SparseFeatures:
    """Parse ``node_id term:weight term:weight ...`` lines.

    Rows align with ``node_ids``; nodes absent from the file get empty
    feature vectors. Without a ``vocabulary``, terms are interned in
    first-seen order; with one, unknown terms are dropped (they carry no
    evidence for a model fitted on that vocabulary).
    """
    index = {nid: i for i, nid in enumerate(node_ids)}
    vocab: dict[str, int] = (
        {t: i for i, t in enumerate(vocabulary)} if vocabulary is not None else {}
    )
    extend = vocabulary is None
    rows, cols, vals = [], [], []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        node_id = parts[0]
        if node_id not in index:
            raise GraphParseError(f"line {lineno}: features for unknown node {node_id!r}")
        for tok in parts[1:]:
            term, sep, weight = tok.rpartition(":")
            if not sep or not term:
                raise GraphParseError(f"line {lineno}: expected term:weight, got {tok!r}")
            try:
                w = float(weight)
            except ValueError:
                raise GraphParseError(f"line {lineno}: non-numeric weight in {tok!r}") from None
            if w < 0 or not np.isfinite(w):
                raise GraphParseError(f"line {lineno}: invalid weight in {tok!r}")
            if term not in vocab:
                if not extend:
                    continue
                vocab[term] = len(vocab)
            rows.append(index[node_id])
            cols.append(vocab[term])
            vals.append(w)
    matrix = csr_matrix(
        (np.asarray(vals, dtype=float), (rows, cols)), shape=(len(node_ids), len(vocab))
    )
    matrix.sum_duplicates()
    return SparseFeatures(matrix, list(vocab))


def fit_nb(
    features: csr_matrix, labels: np.ndarray, n_classes: int, alpha: float = 1.0
) -> NaiveBayesModel:
    """Fit class priors and smoothed term likelihoods on training rows.

    ``features`` holds one row per training node. Every class index in
    ``0..n_classes-1`` must occur in ``labels``; a class with no training
    node cannot be estimated and raises, which is the signal upstream
    cross-validation uses to ask for larger folds.
    """
    if alpha <= 0:
        raise ValueError("smoothing alpha must be > 0")
    labels = np.asarray(labels, dtype=np.int64)
    n, v = features.shape
    if n == 0:
        raise ValueError("empty training set")
    if labels.shape != (n,):
        raise ValueError("labels length must match feature rows")
    counts = np.bincount(labels, minlength=n_classes)
    if np.any(counts == 0):
        missing = np.flatnonzero(counts == 0).tolist()
        raise ValueError(f"no training node for class(es) {missing}")

    log_priors = np.log(counts / n)
    term_counts = np.zeros((n_classes, v))
    for c in range(n_classes):
        rows = features[np.flatnonzero(labels == c)]
        term_counts[c] = np.asarray(rows.sum(axis=0)).ravel()
    smoothed = term_counts + alpha
    log_lik = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
    return NaiveBayesModel(log_priors, log_lik, alpha)


def predict_nb(model: NaiveBayesModel, features: csr_matrix) -> np.ndarray:
    """Per-row class probabilities; empty rows fall back to the priors."""
    if features.shape[1] != model.vocab_size:
        raise ValueError(
            f"feature width {features.shape[1]} does not match vocabulary "
            f"size {model.vocab_size}"
        )
    scores = model.log_priors[None, :] + (features @ model.log_likelihoods.T)
    return np.exp(scores - logsumexp(scores, axis=1, keepdims=True))
