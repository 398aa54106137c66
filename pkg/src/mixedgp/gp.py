"""Gaussian-process core: correlation assembly, likelihood, fitting, prediction.

The model is noiseless kriging with a constant trend.  For hyperparameters
Theta the correlation matrix R(Theta) couples all training points through
the mixed product kernel; the trend and process variance are profiled out
of the likelihood in closed form:

    mu_hat    = (1' R^-1 y) / (1' R^-1 1)
    sigma2    = (y - mu_hat)' R^-1 (y - mu_hat) / n_t
    log L     = -(n_t/2) log sigma2 - (1/2) log |R| - (n_t/2)(1 + log 2 pi)

All solves go through one Cholesky factor of R + jitter*I; the jitter
escalates by factors of 10 (up to 1e-4) when factorization fails, which
makes duplicate design points survivable.  Internally the GP always sees
continuous/integer coordinates normalized to [0, 1] and targets
standardized to zero mean and unit variance; reported trend, variance and
predictions are in original units.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import scipy.linalg

from . import kernels as kr
from .errors import NumericalFailure, ParseError, ShapeMismatch
from .optimize import BoxBounds, MultistartResult, SearchConfig, multistart
from .space import (
    Categorical,
    Continuous,
    Dataset,
    DesignSpace,
    Integer,
    MixedPoint,
    normalized_coordinate_arrays,
    validate_point,
)

__all__ = [
    "JITTER_DEFAULT",
    "JITTER_MAX",
    "FitConfig",
    "GpModel",
    "correlation_matrix",
    "correlation_vector",
    "concentrated_log_likelihood",
    "standardize_targets",
    "build_model",
    "fit",
    "predict",
    "predict_mean",
    "predict_variance",
    "save_model",
    "load_model",
]

JITTER_DEFAULT = 1e-10
JITTER_MAX = 1e-4


def solve_triangular(a, b, lower=False, trans=0):
    return scipy.linalg.solve_triangular(a, b, lower=lower, trans=trans, check_finite=False)


@dataclass(frozen=True)
class FitConfig:
    """Multistart fitting configuration.

    ``max_evals`` is the optimizer budget per start (500 * dim when None).
    ``extra_starts`` may carry :class:`~mixedgp.kernels.HyperparameterSet`
    warm starts appended after the evenly spaced diagonal starts.
    """

    n_starts: int = 10
    max_evals: int | None = None
    jitter: float = JITTER_DEFAULT
    seed: int = 0
    extra_starts: tuple = ()
    theta_log_bounds: tuple[float, float] = kr.THETA_LOG_BOUNDS

    def __post_init__(self):
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")
        if not self.jitter > 0:
            raise ValueError("jitter must be positive")


# ---------------------------------------------------------------------------
# kernel workspace: precomputed distance/indexing structures
# ---------------------------------------------------------------------------

class _Workspace:
    """Per-dataset caches making one likelihood evaluation cheap.

    Holds |x_r - x_s|^p per continuous/integer dimension and the 0-based
    level index column per categorical variable, all on normalized
    coordinates.
    """

    def __init__(self, space: DesignSpace, points, p: int):
        self.space = space
        self.p = kr.check_exponent(p)
        X, Z, C = normalized_coordinate_arrays(space, points)
        XZ = np.hstack([X, Z])
        self.n_points = XZ.shape[0]
        self.n_numeric = XZ.shape[1]
        self.numeric = XZ
        if self.n_numeric:
            diffs = np.abs(XZ[:, None, :] - XZ[None, :, :]) ** self.p
            self.pair_powers = np.ascontiguousarray(np.moveaxis(diffs, 2, 0))
        else:
            self.pair_powers = np.zeros((0, self.n_points, self.n_points))
        self.levels = C - 1

    def correlation(self, theta: kr.HyperparameterSet) -> np.ndarray:
        """R(Theta) with exact unit diagonal, no jitter."""
        rates = np.concatenate([theta.theta_cont, theta.theta_int])
        if rates.size != self.n_numeric:
            raise ShapeMismatch(
                f"{rates.size} numeric rates for {self.n_numeric} numeric dimensions"
            )
        if rates.size:
            R = np.exp(-np.tensordot(rates, self.pair_powers, axes=1))
        else:
            R = np.ones((self.n_points, self.n_points))
        for i, theta_i in enumerate(theta.theta_cat):
            Ri = kr.categorical_matrix(theta.kind, theta_i, theta.epsilon)
            idx = self.levels[:, i]
            R *= Ri[np.ix_(idx, idx)]
        np.fill_diagonal(R, 1.0)
        return R

    def cross_correlation(self, theta: kr.HyperparameterSet, points) -> np.ndarray:
        """k(new, train) matrix of shape (n_new, n_train)."""
        X, Z, C = normalized_coordinate_arrays(self.space, points)
        XZ = np.hstack([X, Z])
        rates = np.concatenate([theta.theta_cont, theta.theta_int])
        if rates.size:
            diffs = np.abs(XZ[:, None, :] - self.numeric[None, :, :]) ** self.p
            K = np.exp(-(diffs @ rates))
        else:
            K = np.ones((XZ.shape[0], self.n_points))
        for i, theta_i in enumerate(theta.theta_cat):
            Ri = kr.categorical_matrix(theta.kind, theta_i, theta.epsilon)
            K *= Ri[np.ix_(C[:, i] - 1, self.levels[:, i])]
        return K


def _cholesky_with_escalation(R: np.ndarray, jitter: float) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of R + j*I, escalating j by 10 up to JITTER_MAX."""
    j = float(jitter)
    work = R.copy()
    base_diag = R.diagonal().copy()
    diag = np.einsum("ii->i", work)
    while True:
        diag[:] = base_diag + j
        try:
            return scipy.linalg.cholesky(work, lower=True, check_finite=False), j
        except scipy.linalg.LinAlgError:
            if j >= JITTER_MAX:
                raise NumericalFailure(
                    f"Cholesky failed even with jitter {j:g}"
                ) from None
            j = min(j * 10.0, JITTER_MAX) if j > 0 else JITTER_DEFAULT


def _profiled_terms(chol: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """(log-likelihood, mu_hat, sigma2_hat) given the Cholesky factor of R."""
    n = y.size
    a = solve_triangular(chol, y, lower=True)
    b = solve_triangular(chol, np.ones(n), lower=True)
    mu = float((b @ a) / (b @ b))
    resid = a - mu * b
    sigma2 = float(resid @ resid) / n
    var_y = float(np.var(y))
    floor = 1e-12 * var_y if var_y > 0 else 1e-12
    sigma2 = max(sigma2, floor)
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    ll = -0.5 * n * math.log(sigma2) - 0.5 * log_det - 0.5 * n * (1.0 + math.log(2.0 * math.pi))
    return ll, mu, sigma2


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def correlation_matrix(dataset: Dataset, theta: kr.HyperparameterSet, p: int = 2) -> np.ndarray:
    """Training correlation matrix: mixed kernel on normalized coordinates.

    Symmetric with exact unit diagonal; no jitter is added here.
    """
    return _Workspace(dataset.space, dataset.points, p).correlation(theta)


def concentrated_log_likelihood(
    dataset: Dataset,
    theta: kr.HyperparameterSet,
    p: int = 2,
    jitter: float = JITTER_DEFAULT,
) -> float:
    """Profiled log-likelihood of the dataset's targets under Theta.

    Raises NumericalFailure when R + jitter*I cannot be factored even after
    jitter escalation.
    """
    ws = _Workspace(dataset.space, dataset.points, p)
    chol, _ = _cholesky_with_escalation(ws.correlation(theta), jitter)
    ll, _, _ = _profiled_terms(chol, dataset.targets)
    return ll


def standardize_targets(dataset: Dataset) -> tuple[Dataset, float, float]:
    """Zero-mean unit-variance copy of the dataset plus (mean, scale)."""
    y = dataset.targets
    mean = float(np.mean(y))
    scale = float(np.std(y))
    if scale == 0.0:
        scale = 1.0
    return dataset.with_targets((y - mean) / scale), mean, scale


# ---------------------------------------------------------------------------
# fitted model
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GpModel:
    """Fitted surrogate; immutable and safe for concurrent prediction.

    ``mu_hat`` and ``sigma2_hat`` are in original target units;
    ``log_likelihood`` is the profiled value on standardized targets, i.e.
    exactly what :func:`fit` maximized.
    """

    dataset: Dataset
    kind: kr.CategoricalKernelKind
    p: int
    theta_star: kr.HyperparameterSet
    chol: np.ndarray = field(repr=False)
    mu_hat: float
    sigma2_hat: float
    jitter: float
    log_likelihood: float
    y_mean: float
    y_scale: float
    fit_seconds: float = 0.0
    start_log: tuple = ()
    _workspace: _Workspace = field(repr=False, default=None)
    _alpha: np.ndarray = field(repr=False, default=None)
    _r_inv_ones: np.ndarray = field(repr=False, default=None)

    @property
    def epsilon(self) -> float:
        return self.theta_star.epsilon

    @property
    def mu_std(self) -> float:
        return (self.mu_hat - self.y_mean) / self.y_scale

    @property
    def sigma2_std(self) -> float:
        return self.sigma2_hat / (self.y_scale ** 2)

    def standardized_dataset(self) -> Dataset:
        return standardize_targets(self.dataset)[0]


def _refined_weights(R_raw: np.ndarray, chol: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Solve R_raw alpha = target by refinement with the jittered factor.

    Plain use of the jittered factor leaves an O(jitter * ||alpha||)
    residual that shows up verbatim as a training-point prediction error;
    a few preconditioned Richardson steps push it to rounding level.  The
    iteration stops early if it stalls (inconsistent duplicate targets).
    """
    def solve(v):
        return solve_triangular(chol, solve_triangular(chol, v, lower=True),
                                lower=True, trans="T")

    alpha = solve(target)
    best_alpha, best_norm = alpha, math.inf
    previous = math.inf
    tol = 1e-15 * max(1.0, float(np.max(np.abs(target))))
    for _ in range(50):
        residual = target - R_raw @ alpha
        norm = float(np.max(np.abs(residual)))
        if norm < best_norm:
            best_alpha, best_norm = alpha, norm
        if norm <= tol or norm > 0.9 * previous:
            break
        previous = norm
        alpha = alpha + solve(residual)
    return best_alpha


def build_model(
    dataset: Dataset,
    theta: kr.HyperparameterSet,
    p: int = 2,
    jitter: float = JITTER_DEFAULT,
    fit_seconds: float = 0.0,
) -> GpModel:
    """Assemble a GpModel at fixed hyperparameters (no optimization)."""
    ds_std, y_mean, y_scale = standardize_targets(dataset)
    ws = _Workspace(dataset.space, dataset.points, p)
    R_raw = ws.correlation(theta)
    chol, jitter_used = _cholesky_with_escalation(R_raw, jitter)
    ll, mu_std, sigma2_std = _profiled_terms(chol, ds_std.targets)
    n = len(dataset)
    b = solve_triangular(chol, np.ones(n), lower=True)
    alpha = _refined_weights(R_raw, chol, ds_std.targets - mu_std)
    r_inv_ones = solve_triangular(chol, b, lower=True, trans="T")
    return GpModel(
        dataset=dataset,
        kind=theta.kind,
        p=kr.check_exponent(p),
        theta_star=theta,
        chol=chol,
        mu_hat=y_mean + y_scale * mu_std,
        sigma2_hat=y_scale ** 2 * sigma2_std,
        jitter=jitter_used,
        log_likelihood=ll,
        y_mean=y_mean,
        y_scale=y_scale,
        fit_seconds=fit_seconds,
        _workspace=ws,
        _alpha=alpha,
        _r_inv_ones=r_inv_ones,
    )


def fit(
    dataset: Dataset,
    kind: kr.CategoricalKernelKind,
    p: int = 2,
    config: FitConfig = FitConfig(),
    epsilon: float = kr.EPSILON,
) -> GpModel:
    """Maximum-likelihood fit via deterministic multistart derivative-free search.

    Starts are evenly spaced along the diagonal of the flat hyperparameter
    box (log-theta and angle coordinates); ``config.extra_starts`` adds warm
    starts.  The best hyperparameters over all searches define the model.
    """
    t0 = time.perf_counter()
    space = dataset.space
    p = kr.check_exponent(p)
    ds_std, _, _ = standardize_targets(dataset)
    ws = _Workspace(space, dataset.points, p)
    y_std = ds_std.targets

    lower, upper, _ = kr.search_bounds(space, kind, config.theta_log_bounds)
    bounds = BoxBounds(lower, upper)

    def objective(v: np.ndarray) -> float:
        theta = kr.set_from_search_vector(space, kind, v, epsilon)
        try:
            chol, _ = _cholesky_with_escalation(ws.correlation(theta), config.jitter)
        except NumericalFailure:
            return -math.inf
        return _profiled_terms(chol, y_std)[0]

    extra = []
    for hp in config.extra_starts:
        if hp.kind is not kind:
            raise ShapeMismatch(
                f"warm start kind {hp.kind.value} does not match fit kind {kind.value}"
            )
        extra.append(kr.search_vector_from_set(space, hp))

    search_cfg = SearchConfig(max_evals=config.max_evals, seed=config.seed)
    result: MultistartResult = multistart(
        objective, bounds, config.n_starts, search_cfg, extra_starts=tuple(extra)
    )
    theta_star = kr.set_from_search_vector(space, kind, result.point, epsilon)
    model = build_model(dataset, theta_star, p, config.jitter,
                        fit_seconds=time.perf_counter() - t0)
    # sanity: the model stores exactly the value the optimizer maximized
    if model.log_likelihood != result.value:
        raise NumericalFailure(
            "likelihood at the returned optimum does not reproduce the search value"
        )
    return replace(model, start_log=result.starts)


# ---------------------------------------------------------------------------
# prediction
# ---------------------------------------------------------------------------

def predict(model: GpModel, points) -> tuple[np.ndarray, np.ndarray]:
    """Batch posterior mean and variance (original units, variance >= 0)."""
    pts = list(points)
    for w in pts:
        validate_point(model.dataset.space, w)
    if not pts:
        return np.zeros(0), np.zeros(0)
    K = model._workspace.cross_correlation(model.theta_star, pts)
    mean_std = model.mu_std + K @ model._alpha
    means = model.y_mean + model.y_scale * mean_std
    v = solve_triangular(model.chol, K.T, lower=True)
    quad = np.sum(v * v, axis=0)
    ones_r_ones = float(model._r_inv_ones.sum())
    shortfall = 1.0 - K @ model._r_inv_ones
    var_std = model.sigma2_std * (1.0 - quad + shortfall ** 2 / ones_r_ones)
    variances = model.y_scale ** 2 * np.maximum(var_std, 0.0)
    return means, variances


def predict_mean(model: GpModel, w: MixedPoint) -> float:
    """Posterior mean at one point."""
    means, _ = predict(model, [w])
    return float(means[0])


def predict_variance(model: GpModel, w: MixedPoint) -> float:
    """Posterior variance at one point, clamped at zero from below."""
    _, variances = predict(model, [w])
    return float(variances[0])


def correlation_vector(model: GpModel, w: MixedPoint) -> np.ndarray:
    """Correlations k(w, w_j) against every training point."""
    validate_point(model.dataset.space, w)
    return model._workspace.cross_correlation(model.theta_star, [w])[0]


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _space_to_json(space: DesignSpace) -> list[dict]:
    out = []
    for v in space.variables:
        if isinstance(v, Continuous):
            out.append({"kind": "continuous", "name": v.name, "lower": v.lower, "upper": v.upper})
        elif isinstance(v, Integer):
            out.append({"kind": "integer", "name": v.name, "lower": v.lower, "upper": v.upper})
        else:
            out.append({"kind": "categorical", "name": v.name, "levels": list(v.levels)})
    return out


def _space_from_json(items) -> DesignSpace:
    variables = []
    for item in items:
        kind = item["kind"]
        if kind == "continuous":
            variables.append(Continuous(item["name"], item["lower"], item["upper"]))
        elif kind == "integer":
            variables.append(Integer(item["name"], item["lower"], item["upper"]))
        elif kind == "categorical":
            variables.append(Categorical(item["name"], tuple(item["levels"])))
        else:
            raise ParseError(f"unknown variable kind {kind!r} in model file")
    return DesignSpace(tuple(variables))


def save_model(model: GpModel, path) -> None:
    """Serialize everything needed to rebuild the model deterministically."""
    doc = {
        "format": "mixedgp-model",
        "version": 1,
        "kernel": model.kind.value,
        "p": model.p,
        "epsilon": model.epsilon,
        "jitter": model.jitter,
        "theta_flat": model.theta_star.flat().tolist(),
        "mu_hat": model.mu_hat,
        "sigma2_hat": model.sigma2_hat,
        "log_likelihood": model.log_likelihood,
        "y_mean": model.y_mean,
        "y_scale": model.y_scale,
        "fit_seconds": model.fit_seconds,
        "space": _space_to_json(model.dataset.space),
        "points": {
            "continuous": [list(p.continuous) for p in model.dataset.points],
            "integer": [list(p.integer) for p in model.dataset.points],
            "categorical": [list(p.categorical) for p in model.dataset.points],
        },
        "targets": model.dataset.targets.tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=1))


def load_model(path) -> GpModel:
    """Rebuild a model saved by :func:`save_model` (bit-identical predictions)."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read model file {path}: {exc}") from exc
    if doc.get("format") != "mixedgp-model":
        raise ParseError(f"{path} is not a mixedgp model file")
    space = _space_from_json(doc["space"])
    pts = doc["points"]
    points = tuple(
        MixedPoint(tuple(c), tuple(z), tuple(l))
        for c, z, l in zip(pts["continuous"], pts["integer"], pts["categorical"])
    )
    dataset = Dataset(space, points, np.array(doc["targets"], dtype=float))
    kind = kr.CategoricalKernelKind.parse(doc["kernel"])
    theta = kr.HyperparameterSet.from_flat(space, kind, doc["theta_flat"], doc["epsilon"])
    model = build_model(dataset, theta, int(doc["p"]), float(doc["jitter"]),
                        fit_seconds=float(doc.get("fit_seconds", 0.0)))
    return model
