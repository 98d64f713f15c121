"""Level-1 stacking: dataset assembly, dynamic and static generalizers.

The dynamic generalizer is a binary varying-coefficient logistic model:
the logit is ``b0 + sum_j Z_j * beta_j(u)`` where each classifier weight
``beta_j`` is a B-spline expansion over a node covariate ``u``. Fitting
minimizes the negative Bernoulli log-likelihood plus a curvature penalty
``lam * eta' H eta`` (H block-diagonal, intercept unpenalized) by damped
Newton iteration; ``lam`` is picked by cross-validation. Static
baselines share the same data with constant weights and optional ridge
or lasso shrinkage.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .splines import BSplineBasis, assemble_block_penalty, basis_matrix, curvature_penalty, make_basis

__all__ = [
    "Level1Data",
    "FitConfig",
    "DynamicStackModel",
    "StaticStackModel",
    "ConvergenceError",
    "build_level1",
    "fit_dynamic",
    "predict_dynamic",
    "coefficient_curves",
    "select_lambda",
    "fit_static",
    "predict_static",
    "select_strength",
    "write_level1",
    "read_level1",
    "save_model",
    "load_model",
    "sigmoid",
    "STATIC_DESIGNS",
]

STATIC_DESIGNS = ("m1", "m2", "m3")
STATIC_PENALTIES = ("none", "ridge", "lasso")


class ConvergenceError(RuntimeError):
    """Optimizer failed to converge."""


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=float)))


def _neg_loglik(eta: np.ndarray, y: np.ndarray) -> float:
    # log(1 + exp(eta)) - y*eta, stable for large |eta|
    return float(np.sum(np.logaddexp(0.0, eta) - y * eta))


@dataclass(frozen=True)
class Level1Data:
    """Rows ``(y, Z, u)`` for the level-1 generalizers.

    ``z`` holds, per level-0 classifier, its predicted class probabilities
    with the last class dropped, so the columns are linearly independent
    of the all-ones intercept. ``columns`` records which classifier and
    class each column came from.
    """

    y: np.ndarray
    z: np.ndarray
    u: np.ndarray
    columns: list[str]

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.int64)
        z = np.atleast_2d(np.asarray(self.z, dtype=float))
        u = np.asarray(self.u, dtype=float)
        if not np.isin(y, (0, 1)).all():
            raise ValueError("y must be binary 0/1")
        if z.shape[0] != len(y) or len(u) != len(y):
            raise ValueError("y, z, u must be aligned")
        if z.min(initial=0.0) < -1e-9 or z.max(initial=0.0) > 1 + 1e-9:
            raise ValueError("z entries must be probabilities in [0, 1]")
        if not np.all(np.isfinite(u)):
            raise ValueError("u must be finite")
        if len(self.columns) != z.shape[1]:
            raise ValueError("one provenance entry per z column required")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", np.clip(z, 0.0, 1.0))
        object.__setattr__(self, "u", u)

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def p(self) -> int:
        return self.z.shape[1]

    def subset(self, idx) -> "Level1Data":
        return Level1Data(self.y[idx], self.z[idx], self.u[idx], self.columns)


@dataclass(frozen=True)
class FitConfig:
    """Knobs for penalized fitting and penalty-strength selection."""

    lambda_grid: np.ndarray = field(
        default_factory=lambda: np.logspace(-4.0, 4.0, 21)
    )
    cv_folds: int = 10
    newton_tol: float = 1e-8
    max_newton_iter: int = 100
    hessian_jitter: float = 1e-10

    def __post_init__(self):
        grid = np.sort(np.asarray(self.lambda_grid, dtype=float))
        if grid.size == 0:
            raise ValueError("lambda grid must be nonempty")
        if np.any(grid < 0):
            raise ValueError("lambda grid must be nonnegative")
        if self.cv_folds < 2:
            raise ValueError("cross-validation needs at least 2 folds")
        object.__setattr__(self, "lambda_grid", grid)


# ---------------------------------------------------------------------------
# level-1 dataset assembly


def _cv_fold_indices(n: int, folds: int, seed: int) -> list[np.ndarray]:
    """Seeded shuffle cut into contiguous blocks."""
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(part) for part in np.array_split(perm, folds)]


def build_level1(y, classifiers, u, folds: int = 10, seed: int = 0) -> Level1Data:
    """Assemble held-out level-0 probabilities into level-1 rows.

    Each classifier is an object with ``name``, ``n_classes`` and
    ``heldout_probs(fit_idx, heldout_idx) -> (len(heldout), n_classes)``
    giving predictions for the held-out instances after training without
    them. Instance indices run 0..n-1 in the order of ``y`` and ``u``.
    Every row's Z block is the classifier's prediction from the fold that
    held that row out, minus the last class column.
    """
    y = np.asarray(y, dtype=np.int64)
    u = np.asarray(u, dtype=float)
    n = len(y)
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if len(u) != n:
        raise ValueError("y and u must be aligned")
    fold_idx = _cv_fold_indices(n, folds, seed)

    blocks = []
    columns: list[str] = []
    for clf in classifiers:
        width = clf.n_classes - 1
        out = np.full((n, width), np.nan)
        for j, heldout in enumerate(fold_idx):
            fit_idx = np.setdiff1d(np.arange(n), heldout)
            try:
                probs = clf.heldout_probs(fit_idx, heldout)
            except ValueError as err:
                raise ValueError(
                    f"fold {j + 1} cannot train classifier {clf.name!r} ({err}); "
                    "use larger training folds (a higher fold count) so no "
                    "held-out block swallows a whole class"
                ) from err
            out[heldout] = np.asarray(probs)[:, :width]
        blocks.append(out)
        columns += [f"{clf.name}:class{c}" for c in range(width)]
    z = np.hstack(blocks) if blocks else np.empty((n, 0))
    return Level1Data(y, z, u, columns)


# ---------------------------------------------------------------------------
# shared damped-Newton core


def _solve_spd(a: np.ndarray, g: np.ndarray, jitter: float) -> np.ndarray:
    """Solve ``a x = g`` for symmetric positive (semi)definite ``a``.

    Jacobi-equilibrated Cholesky keeps huge penalty scales solvable; on
    failure the diagonal jitter escalates before falling back to lstsq.
    """
    d = np.sqrt(np.clip(np.diag(a), 1e-300, None))
    scaled = a / d[:, None] / d[None, :]
    rhs = g / d
    bump = jitter
    eye = np.eye(len(g))
    for _ in range(6):
        try:
            c = cho_factor(scaled + bump * eye, lower=True)
            return cho_solve(c, rhs) / d
        except np.linalg.LinAlgError:
            bump = max(bump * 100.0, 1e-14)
    x, *_ = np.linalg.lstsq(scaled + bump * eye, rhs, rcond=None)
    return x / d


def _newton_penalized(
    x: np.ndarray,
    y: np.ndarray,
    penalty: np.ndarray | None,
    config: FitConfig,
    coef0: np.ndarray | None = None,
):
    """Minimize ``-loglik(X beta) + beta' P beta`` by damped Newton.

    Returns ``(coef, objective_path, converged)``. Step halving enforces
    a non-increasing objective; convergence is a relative objective
    change below ``config.newton_tol``.

    The quadratic penalty is applied in its own eigenbasis. That keeps
    the Hessian's penalty null space (intercept and, for curvature
    penalties, the linear weight curves) numerically clean even when the
    penalty scale dwarfs the likelihood curvature, e.g. in the
    lambda -> infinity linearization limit.
    """
    if penalty is None:
        return _newton_diag(x, y, None, config, coef0)
    s, rot = np.linalg.eigh((penalty + penalty.T) / 2.0)
    # snap the null space to exactly zero so no penalty round-off bleeds in
    s = np.where(s > 1e-9 * max(float(s[-1]), 0.0), s, 0.0)
    start = None if coef0 is None else rot.T @ np.asarray(coef0, dtype=float)
    gamma, path, converged = _newton_diag(x @ rot, y, s, config, start)
    return rot @ gamma, path, converged


def _newton_diag(
    x: np.ndarray,
    y: np.ndarray,
    pen_diag: np.ndarray | None,
    config: FitConfig,
    coef0: np.ndarray | None = None,
):
    """Damped Newton for ``-loglik + sum_k pen_diag[k] * beta_k^2``."""
    d = x.shape[1]
    beta = np.zeros(d) if coef0 is None else np.asarray(coef0, dtype=float).copy()

    def objective(b, eta):
        val = _neg_loglik(eta, y)
        if pen_diag is not None:
            val += float(pen_diag @ (b * b))
        return val

    eta = x @ beta
    f = objective(beta, eta)
    if not np.isfinite(f):
        raise ConvergenceError("non-finite objective at the starting point")
    path = [f]
    converged = False
    for _ in range(config.max_newton_iter):
        mu = sigmoid(eta)
        grad = -(x.T @ (y - mu))
        w = mu * (1.0 - mu)
        hess = (x * w[:, None]).T @ x
        if pen_diag is not None:
            grad += 2.0 * pen_diag * beta
            hess = hess + np.diag(2.0 * pen_diag)
        step = _solve_spd(hess, -grad, config.hessian_jitter)

        t = 1.0
        for _ in range(60):
            cand = beta + t * step
            eta_cand = x @ cand
            f_cand = objective(cand, eta_cand)
            if np.isfinite(f_cand) and f_cand <= f:
                break
            t *= 0.5
        else:
            # no descent left at float precision: already at the optimum
            converged = True
            break
        beta, eta = cand, eta_cand
        path.append(f_cand)
        if abs(f - f_cand) <= config.newton_tol * (1.0 + abs(f)):
            f = f_cand
            converged = True
            break
        f = f_cand
    if not np.isfinite(f):
        raise ConvergenceError("objective diverged to a non-finite value")
    return beta, path, converged


# ---------------------------------------------------------------------------
# dynamic (varying-coefficient) generalizer


@dataclass
class DynamicStackModel:
    """Fitted functional-weight stacking model.

    ``coef`` holds the intercept followed by ``p * K`` spline
    coefficients (classifier-major). Prediction clamps the covariate into
    the basis domain, so weight curves stay bounded off the training
    range.
    """

    coef: np.ndarray
    basis: BSplineBasis
    lam: float
    p: int
    columns: list[str]
    converged: bool = True
    objective_path: list[float] = field(default_factory=list, repr=False, compare=False)


def dynamic_design(z: np.ndarray, u: np.ndarray, basis: BSplineBasis) -> np.ndarray:
    """Rows ``(1, Z_1 * B(u), ..., Z_p * B(u))`` of width ``1 + p*K``."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    b = basis_matrix(basis, u)
    n, p = z.shape
    cross = (z[:, :, None] * b[:, None, :]).reshape(n, p * basis.size)
    return np.hstack([np.ones((n, 1)), cross])


def default_basis(u: np.ndarray, interior_knots: int = 6, degree: int = 3) -> BSplineBasis:
    """Cubic basis with uniform interior knots over the training u range."""
    u = np.asarray(u, dtype=float)
    lo, hi = float(u.min()), float(u.max())
    if lo == hi:
        # degenerate covariate: widen so the basis has a real domain
        lo, hi = lo - 0.5, hi + 0.5
    return make_basis(lo, hi, interior_knots, degree)


def fit_dynamic(
    data: Level1Data,
    lam: float,
    basis: BSplineBasis,
    config: FitConfig = FitConfig(),
    coef0: np.ndarray | None = None,
) -> DynamicStackModel:
    """Fit the varying-coefficient model at a fixed penalty strength."""
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    x = dynamic_design(data.z, data.u, basis)
    if data.n < x.shape[1]:
        warnings.warn(
            f"{data.n} observations for {x.shape[1]} coefficients; "
            "expect an unstable fit",
            stacklevel=2,
        )
    penalty = None
    if lam > 0:
        penalty = lam * assemble_block_penalty(curvature_penalty(basis), data.p)
    coef, path, converged = _newton_penalized(x, data.y, penalty, config, coef0)
    unpenalized = penalty is None or basis.degree <= 1
    if unpenalized and (not converged or np.abs(coef).max() > 1e2):
        raise ConvergenceError(
            "the unpenalized fit diverged; the data may be separable -- "
            "add curvature penalty or use ridge"
        )
    if not converged:
        warnings.warn("Newton reached the iteration cap before converging", stacklevel=2)
    return DynamicStackModel(
        coef=coef,
        basis=basis,
        lam=float(lam),
        p=data.p,
        columns=list(data.columns),
        converged=converged,
        objective_path=path,
    )


def predict_dynamic(model: DynamicStackModel, z, u) -> np.ndarray:
    """Positive-class probability for rows ``(Z, u)``."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if z.shape[1] != model.p:
        raise ValueError(f"expected {model.p} z columns, got {z.shape[1]}")
    x = dynamic_design(z, u, model.basis)
    return sigmoid(x @ model.coef)


def coefficient_curves(model: DynamicStackModel, u_grid) -> np.ndarray:
    """Evaluate every weight curve ``beta_j`` on ``u_grid``; (n, p)."""
    b = basis_matrix(model.basis, u_grid)
    eta = model.coef[1:].reshape(model.p, model.basis.size)
    return b @ eta.T


def _assert_valid_folds(y: np.ndarray, fold_idx: list[np.ndarray]) -> None:
    n = len(y)
    for j, heldout in enumerate(fold_idx):
        if len(heldout) == 0 or len(heldout) == n:
            raise ValueError(f"degenerate folds: fold {j + 1} is empty or everything")
        train_y = np.delete(y, heldout)
        if len(np.unique(train_y)) < 2:
            raise ValueError(
                f"degenerate folds: fold {j + 1} leaves a single-class training set"
            )


def select_lambda(
    data: Level1Data,
    config: FitConfig = FitConfig(),
    basis: BSplineBasis | None = None,
    seed: int = 0,
):
    """Pick the penalty strength by J-fold cross-validation.

    Scores each grid value by the total held-out negative log-likelihood
    over shared folds; ties go to the larger (smoother) lambda. Returns
    ``(lam_star, report)`` with the full ``(lam, score)`` profile.
    """
    if basis is None:
        basis = default_basis(data.u)
    fold_idx = _cv_fold_indices(data.n, config.cv_folds, seed)
    _assert_valid_folds(data.y, fold_idx)
    x = dynamic_design(data.z, data.u, basis)
    block = curvature_penalty(basis)
    assembled = assemble_block_penalty(block, data.p)

    scores = np.zeros(len(config.lambda_grid))
    all_rows = np.arange(data.n)
    for heldout in fold_idx:
        fit_rows = np.setdiff1d(all_rows, heldout)
        coef = None
        for gi, lam in enumerate(config.lambda_grid):
            penalty = lam * assembled if lam > 0 else None
            coef, _, _ = _newton_penalized(x[fit_rows], data.y[fit_rows], penalty, config, coef)
            scores[gi] += _neg_loglik(x[heldout] @ coef, data.y[heldout])

    best = 0
    for gi in range(len(scores)):
        if scores[gi] <= scores[best]:
            best = gi
    report = list(zip(config.lambda_grid.tolist(), scores.tolist()))
    return float(config.lambda_grid[best]), report


# ---------------------------------------------------------------------------
# static generalizers


@dataclass
class StaticStackModel:
    """Constant-weight stacking model on one of the three designs.

    m1 uses (1, Z); m2 adds the covariate; m3 adds the covariate and its
    interactions with every Z column.
    """

    design: str
    penalty: str
    strength: float
    coef: np.ndarray
    p: int
    columns: list[str]
    converged: bool = True
    objective_path: list[float] = field(default_factory=list, repr=False, compare=False)


def static_design(z: np.ndarray, u: np.ndarray, design: str) -> np.ndarray:
    z = np.atleast_2d(np.asarray(z, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    n = z.shape[0]
    ones = np.ones((n, 1))
    if design == "m1":
        return np.hstack([ones, z])
    if design == "m2":
        return np.hstack([ones, z, u[:, None]])
    if design == "m3":
        return np.hstack([ones, z, u[:, None], z * u[:, None]])
    raise ValueError(f"unknown design {design!r}; expected one of {STATIC_DESIGNS}")


def _soft_threshold(x: float, t: float) -> float:
    if x > t:
        return x - t
    if x < -t:
        return x + t
    return 0.0


def _lasso_logistic(x, y, strength, config: FitConfig, coef0=None):
    """L1-penalized logistic fit (intercept free).

    Proximal Newton: each outer step solves the weighted least-squares
    working problem with the L1 term by coordinate descent (cycling the
    active set, glmnet style), backtracks along the resulting direction
    until the true objective does not increase, and stops when the exact
    subgradient optimality conditions hold.
    """
    n, d = x.shape
    ybar = min(max(y.mean(), 1e-12), 1 - 1e-12)
    intercept_only = np.r_[np.log(ybar / (1 - ybar)), np.zeros(d - 1)]
    kkt_tol = 1e-8

    def objective(b):
        return _neg_loglik(x @ b, y) + strength * np.abs(b[1:]).sum()

    # above the critical strength the intercept-only fit is already optimal
    mu0 = sigmoid(x @ intercept_only)
    if np.abs(x[:, 1:].T @ (y - mu0)).max(initial=0.0) <= strength + kkt_tol:
        return intercept_only, [objective(intercept_only)], True

    beta = intercept_only if coef0 is None else np.asarray(coef0, dtype=float).copy()
    path = [objective(beta)]
    converged = False
    for _ in range(config.max_newton_iter):
        eta = x @ beta
        mu = sigmoid(eta)
        grad = -(x.T @ (y - mu))
        active = beta[1:] != 0.0
        stat = np.abs(grad[1:] + strength * np.sign(beta[1:]))
        if (
            abs(grad[0]) <= kkt_tol
            and np.all(stat[active] <= kkt_tol)
            and np.all(np.abs(grad[1:][~active]) <= strength + kkt_tol)
        ):
            converged = True
            break

        # working least-squares problem, solved on its Gram matrix so each
        # coordinate update costs O(d) rather than O(n)
        w = np.clip(mu * (1.0 - mu), 1e-8, None)
        gram = (x * w[:, None]).T @ x
        target = gram @ beta + (x.T @ (y - mu))  # X'W z_work
        q = gram @ beta
        prev = beta.copy()
        for sweep in range(200):
            full = sweep % 5 == 0
            coords = (
                range(d) if full else [0] + [j for j in range(1, d) if beta[j] != 0.0]
            )
            max_delta = 0.0
            for j in coords:
                old = beta[j]
                rho = target[j] - q[j] + gram[j, j] * old
                new = rho / gram[j, j] if j == 0 else _soft_threshold(rho, strength) / gram[j, j]
                if new != old:
                    q += gram[:, j] * (new - old)
                    beta[j] = new
                    max_delta = max(max_delta, abs(new - old))
            if max_delta < 1e-10 and full:
                break

        # damp the proximal step if the true objective would rise
        direction = beta - prev
        t = 1.0
        f_prev = path[-1]
        for _ in range(60):
            cand = prev + t * direction
            f_cand = objective(cand)
            if np.isfinite(f_cand) and f_cand <= f_prev + 1e-12 * (1 + abs(f_prev)):
                break
            t *= 0.5
        beta = prev + t * direction
        path.append(objective(beta))
    return beta, path, converged


def fit_static(
    data: Level1Data,
    design: str = "m1",
    penalty: str = "none",
    strength: float | None = None,
    config: FitConfig = FitConfig(),
    cv_seed: int = 0,
) -> StaticStackModel:
    """Fit a constant-weight generalizer.

    ``penalty`` is "none" (plain logistic MLE), "ridge", or "lasso"; the
    intercept is never penalized. Leaving ``strength`` unset with a
    penalty selects it by cross-validation over ``config.lambda_grid``.
    """
    if penalty not in STATIC_PENALTIES:
        raise ValueError(f"unknown penalty {penalty!r}; expected one of {STATIC_PENALTIES}")
    x = static_design(data.z, data.u, design)
    if penalty == "none":
        strength = 0.0
    elif strength is None:
        strength, _ = select_strength(data, design, penalty, config, cv_seed)
    elif strength < 0:
        raise ValueError("penalty strength must be >= 0")

    coef, path, converged = _fit_static_design(x, data.y, penalty, strength, config)
    diverged = penalty == "none" and (not converged or np.abs(coef).max() > 1e2)
    if diverged:
        raise ConvergenceError(
            "the logistic fit diverged; the classes may be separable on "
            "this design -- use ridge regularization"
        )
    if not converged:
        warnings.warn("penalized fit reached the iteration cap", stacklevel=2)
    return StaticStackModel(
        design=design,
        penalty=penalty,
        strength=float(strength),
        coef=coef,
        p=data.p,
        columns=list(data.columns),
        converged=converged,
        objective_path=path,
    )


def _fit_static_design(x, y, penalty, strength, config, coef0=None):
    if penalty == "lasso" and strength > 0:
        return _lasso_logistic(x, y, strength, config, coef0)
    pen = None
    if penalty in ("ridge", "lasso") and strength > 0:
        pen = strength * np.diag(np.r_[0.0, np.ones(x.shape[1] - 1)])
    return _newton_penalized(x, y, pen, config, coef0)


def select_strength(
    data: Level1Data,
    design: str,
    penalty: str,
    config: FitConfig = FitConfig(),
    seed: int = 0,
):
    """Cross-validated penalty strength for a static design; mirrors
    :func:`select_lambda` (shared folds, held-out likelihood, ties to the
    larger value)."""
    fold_idx = _cv_fold_indices(data.n, config.cv_folds, seed)
    _assert_valid_folds(data.y, fold_idx)
    x = static_design(data.z, data.u, design)
    scores = np.zeros(len(config.lambda_grid))
    all_rows = np.arange(data.n)
    for heldout in fold_idx:
        fit_rows = np.setdiff1d(all_rows, heldout)
        coef = None
        for gi, s in enumerate(config.lambda_grid):
            coef, _, _ = _fit_static_design(
                x[fit_rows], data.y[fit_rows], penalty, s, config, coef0=coef
            )
            scores[gi] += _neg_loglik(x[heldout] @ coef, data.y[heldout])
    best = 0
    for gi in range(len(scores)):
        if scores[gi] <= scores[best]:
            best = gi
    report = list(zip(config.lambda_grid.tolist(), scores.tolist()))
    return float(config.lambda_grid[best]), report


def predict_static(model: StaticStackModel, z, u) -> np.ndarray:
    """Positive-class probability under the model's design expansion."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if z.shape[1] != model.p:
        raise ValueError(f"expected {model.p} z columns, got {z.shape[1]}")
    x = static_design(z, u, model.design)
    if x.shape[1] != len(model.coef):
        raise ValueError(
            f"design {model.design!r} produces {x.shape[1]} columns but the "
            f"model has {len(model.coef)} coefficients"
        )
    return sigmoid(x @ model.coef)


# ---------------------------------------------------------------------------
# file formats


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_level1(path, data: Level1Data) -> None:
    """Write ``y,z_1..z_p,u`` CSV plus a ``.provenance.txt`` sidecar."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y"] + [f"z_{j + 1}" for j in range(data.p)] + ["u"])
        for i in range(data.n):
            w.writerow(
                [int(data.y[i])] + [_fmt(v) for v in data.z[i]] + [_fmt(data.u[i])]
            )
    with open(path.with_name(path.name + ".provenance.txt"), "w") as fh:
        for j, name in enumerate(data.columns):
            fh.write(f"z_{j + 1} = {name}\n")


def read_level1(path, require_y: bool = True) -> Level1Data:
    """Read a level-1 CSV; picks up the provenance sidecar when present."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[-1] != "u" or (require_y and header[0] != "y"):
            raise ValueError(f"unexpected level-1 header {header!r}")
        rows = [rec for rec in reader if rec]
    has_y = header[0] == "y"
    zcols = len(header) - 1 - int(has_y)
    body = np.asarray(rows, dtype=float)
    y = body[:, 0].astype(np.int64) if has_y else np.zeros(len(body), dtype=np.int64)
    z = body[:, int(has_y) : int(has_y) + zcols]
    u = body[:, -1]
    columns = [f"z_{j + 1}" for j in range(zcols)]
    sidecar = path.with_name(path.name + ".provenance.txt")
    if sidecar.exists():
        names = []
        for line in sidecar.read_text().splitlines():
            if "=" in line:
                names.append(line.split("=", 1)[1].strip())
        if len(names) == zcols:
            columns = names
    return Level1Data(y, z, u, columns)


def save_model(path, model: DynamicStackModel | StaticStackModel) -> None:
    """Serialize a fitted model to a self-describing text file.

    Reals are written with 17 significant digits so loading reproduces
    the coefficients bit for bit.
    """
    lines = ["dynstack-model 1"]
    if isinstance(model, DynamicStackModel):
        lines += [
            "kind = dynamic",
            f"p = {model.p}",
            f"lambda = {_fmt(model.lam)}",
            f"degree = {model.basis.degree}",
            f"u_lo = {_fmt(model.basis.u_lo)}",
            f"u_hi = {_fmt(model.basis.u_hi)}",
            "knots = " + " ".join(_fmt(v) for v in model.basis.knots),
        ]
    elif isinstance(model, StaticStackModel):
        lines += [
            "kind = static",
            f"p = {model.p}",
            f"design = {model.design}",
            f"penalty = {model.penalty}",
            f"strength = {_fmt(model.strength)}",
        ]
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    for name in model.columns:
        lines.append(f"column = {name}")
    lines.append("coef = " + " ".join(_fmt(v) for v in model.coef))
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path) -> DynamicStackModel | StaticStackModel:
    text = Path(path).read_text().splitlines()
    if not text or text[0].strip() != "dynstack-model 1":
        raise ValueError(f"{path}: not a dynstack model file")
    fields: dict[str, str] = {}
    columns: list[str] = []
    for line in text[1:]:
        if not line.strip():
            continue
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "column":
            columns.append(value)
        else:
            fields[key] = value
    coef = np.array([float(v) for v in fields["coef"].split()])
    p = int(fields["p"])
    if fields["kind"] == "dynamic":
        basis = BSplineBasis(
            degree=int(fields["degree"]),
            knots=np.array([float(v) for v in fields["knots"].split()]),
            u_lo=float(fields["u_lo"]),
            u_hi=float(fields["u_hi"]),
        )
        return DynamicStackModel(
            coef=coef, basis=basis, lam=float(fields["lambda"]), p=p, columns=columns
        )
    if fields["kind"] == "static":
        return StaticStackModel(
            design=fields["design"],
            penalty=fields["penalty"],
            strength=float(fields["strength"]),
            coef=coef,
            p=p,
            columns=columns,
        )
    raise ValueError(f"unknown model kind {fields['kind']!r}")
