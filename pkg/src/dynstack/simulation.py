"""Synthetic comparison of level-1 generalizers on three generative cases.

Each case draws two classifier scores and a covariate uniformly on
[0, 1], puts a standard normal disturbance inside the logit, and flips a
Bernoulli coin: case 1 weights the scores independently of the
covariate, case 2 scales the first score's weight linearly in it, and
case 3 uses a sine-shaped weight the static stackers cannot represent.
The runner repeats fresh-data experiments, scoring every method by test
AUC, and aggregates means and standard deviations across repetitions.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .stacking import (
    FitConfig,
    Level1Data,
    default_basis,
    fit_dynamic,
    fit_static,
    predict_dynamic,
    predict_static,
    select_lambda,
    sigmoid,
)

__all__ = ["SimDataset", "SimCell", "SimReport", "METHODS", "generate_case", "auc", "run_simulation"]

log = logging.getLogger(__name__)

METHODS = (
    "random",
    "z1_only",
    "z2_only",
    "logistic_m1",
    "lasso_m1",
    "ridge_m1",
    "logistic_m2",
    "lasso_m2",
    "ridge_m2",
    "logistic_m3",
    "lasso_m3",
    "ridge_m3",
    "dynamic",
)


@dataclass(frozen=True)
class SimDataset:
    y: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    u: np.ndarray
    case: int
    seed: int
    n: int

    def to_level1(self) -> Level1Data:
        return Level1Data(self.y, np.column_stack([self.z1, self.z2]), self.u, ["z1", "z2"])


def generate_case(case: int, n: int, seed) -> SimDataset:
    """Draw one synthetic dataset for the given case.

    Draw order is fixed (z1, z2, u, disturbance, response), so a given
    seed always yields the identical dataset.
    """
    if case not in (1, 2, 3):
        raise ValueError(f"unknown case {case}; expected 1, 2, or 3")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    z1 = rng.uniform(0.0, 1.0, n)
    z2 = rng.uniform(0.0, 1.0, n)
    u = rng.uniform(0.0, 1.0, n)
    w = rng.normal(0.0, 1.0, n)
    if case == 1:
        logit = -3.0 + 3.0 * z1 + 3.0 * z2 + w
    elif case == 2:
        logit = -3.0 + 3.0 * u * z1 + 3.0 * z2 + w
    else:
        logit = -3.0 + 3.0 * np.sin(6.0 * u) * z1 + 3.0 * z2 + w
    y = (rng.uniform(0.0, 1.0, n) < sigmoid(logit)).astype(np.int64)
    seed_int = int(seed) if np.isscalar(seed) and not isinstance(seed, np.random.Generator) else -1
    return SimDataset(y, z1, z2, u, case, seed_int, n)


def auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Area under the ROC curve via the rank statistic, midranks for ties."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must be aligned")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes present")
    ranks = rankdata(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


@dataclass(frozen=True)
class SimCell:
    case: int
    method: str
    mean_auc: float
    sd_auc: float
    n_reps: int  # repetitions that completed for this cell


@dataclass(frozen=True)
class SimReport:
    cells: list[SimCell]
    raw: dict[tuple[int, str], np.ndarray]  # per-repetition AUC, NaN = failed

    @property
    def complete(self) -> bool:
        return all(not np.isnan(v).any() for v in self.raw.values())

    def cell(self, case: int, method: str) -> SimCell:
        for c in self.cells:
            if c.case == case and c.method == method:
                return c
        raise KeyError((case, method))


def _method_scores(name, train, test, config, method_seed, cv_seed):
    if name == "random":
        return np.random.default_rng(method_seed).uniform(0.0, 1.0, test.n)
    if name == "z1_only":
        return test.z[:, 0]
    if name == "z2_only":
        return test.z[:, 1]
    if name == "dynamic":
        basis = default_basis(train.u)
        lam, _ = select_lambda(train, config, basis, seed=cv_seed)
        model = fit_dynamic(train, lam, basis, config)
        return predict_dynamic(model, test.z, test.u)
    kind, _, design = name.partition("_")
    if kind in ("logistic", "lasso", "ridge") and design in ("m1", "m2", "m3"):
        penalty = "none" if kind == "logistic" else kind
        model = fit_static(train, design, penalty, config=config, cv_seed=cv_seed)
        return predict_static(model, test.z, test.u)
    raise ValueError(f"unknown method {name!r}")


def _run_repetition(case, n, rep_seed, methods, config):
    """One fresh-data experiment; returns per-method AUC (NaN on failure)."""
    data_seed, split_seed, rand_seed, cv_seed = (
        int(s) for s in np.random.SeedSequence(rep_seed).generate_state(4, np.uint64)
    )
    data = generate_case(case, n, data_seed).to_level1()
    perm = np.random.default_rng(split_seed).permutation(data.n)
    train = data.subset(np.sort(perm[: data.n // 2]))
    test = data.subset(np.sort(perm[data.n // 2 :]))

    out = {}
    for name in methods:
        try:
            scores = _method_scores(name, train, test, config, rand_seed, cv_seed)
            out[name] = auc(scores, test.y)
        except Exception as err:  # keep the repetition alive for other methods
            log.warning("case %d seed %d method %s failed: %s", case, rep_seed, name, err)
            out[name] = float("nan")
    return out


def run_simulation(
    cases=(1, 2, 3),
    methods=METHODS,
    n: int = 2000,
    reps: int = 50,
    seed: int = 0,
    threads: int = 1,
    config: FitConfig = FitConfig(),
) -> SimReport:
    """Repeat the train/test experiment and aggregate AUC per method.

    Repetition seeds come from ``numpy.random.SeedSequence(seed)``
    expanded case-major, so every method inside a repetition sees the
    same data (paired comparisons) and the whole run is reproducible for
    a fixed master seed regardless of ``threads``.
    """
    cases = tuple(cases)
    methods = tuple(methods)
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
    rep_seeds = (
        np.random.SeedSequence(seed)
        .generate_state(len(cases) * reps, np.uint64)
        .reshape(len(cases), reps)
    )

    results: dict[int, list[dict[str, float]]] = {}
    jobs = [
        (case, n, int(rep_seeds[ci, r]), methods, config)
        for ci, case in enumerate(cases)
        for r in range(reps)
    ]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for (case, _, _, _, _), res in zip(jobs, pool.map(_rep_star, jobs, chunksize=1)):
                results.setdefault(case, [])
                results[case].append(res)
    else:
        for job in jobs:
            results.setdefault(job[0], [])
            results[job[0]].append(_rep_star(job))

    cells = []
    raw = {}
    for case in cases:
        per_rep = results[case]
        for m in methods:
            vals = np.array([rep[m] for rep in per_rep])
            ok = vals[~np.isnan(vals)]
            mean = float(ok.mean()) if len(ok) else float("nan")
            sd = float(ok.std(ddof=1)) if len(ok) > 1 else float("nan")
            cells.append(SimCell(case, m, mean, sd, len(ok)))
            raw[(case, m)] = vals
    return SimReport(cells, raw)


def _rep_star(job):
    return _run_repetition(*job)
