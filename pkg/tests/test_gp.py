import math

import numpy as np
import pytest

from mixedgp.doe import lhs
from mixedgp.errors import NumericalFailure
from mixedgp.gp import (
    FitConfig,
    build_model,
    concentrated_log_likelihood,
    correlation_matrix,
    correlation_vector,
    fit,
    load_model,
    predict,
    predict_mean,
    predict_variance,
    save_model,
    standardize_targets,
)
from mixedgp.kernels import (
    CategoricalKernelKind,
    HyperparameterSet,
    SymmetricHyperMatrix,
    mixed_kernel,
)
from mixedgp.space import (
    Categorical,
    Continuous,
    Dataset,
    DesignSpace,
    Integer,
    MixedPoint,
    normalize,
)

from conftest import random_hyper

K = CategoricalKernelKind


def mixed_space():
    return DesignSpace((
        Continuous("x", 0.0, 1.0),
        Integer("z", 1, 5),
        Categorical("c", ("a", "b", "c", "d", "e")),
    ))


def mixed_truth(w):
    x = w.continuous[0]
    z = w.integer[0]
    c = w.categorical[0]
    bumps = (0.0, 1.0, -0.5, 2.0, 0.7)
    return math.sin(2 * math.pi * x) + 0.3 * z + bumps[c - 1] * math.cos(3 * x)


def mixed_dataset(n=30, seed=42):
    space = mixed_space()
    points = lhs(space, n, seed)
    y = np.array([mixed_truth(w) for w in points])
    return Dataset(space, points, y)


def random_theta(space, kind, rng):
    mats = tuple(random_hyper(kind, L, rng) for L in space.level_counts)
    return HyperparameterSet(
        kind,
        rng.uniform(0.1, 5.0, space.n_continuous),
        rng.uniform(0.1, 5.0, space.n_integer),
        mats,
    )


# ---------------------------------------------------------------------------
# correlation matrix / vector
# ---------------------------------------------------------------------------

def test_correlation_matrix_single_point():
    space = DesignSpace((Continuous("x", 0.0, 1.0),))
    ds = Dataset(space, (MixedPoint((0.4,)),), np.array([1.0]))
    theta = HyperparameterSet(K.GD, [1.0], [], ())
    assert correlation_matrix(ds, theta).tolist() == [[1.0]]


def test_correlation_matrix_duplicates_and_jitter():
    space = DesignSpace((Continuous("x", 0.0, 1.0),))
    ds = Dataset(space, (MixedPoint((0.4,)), MixedPoint((0.4,))), np.array([1.0, 1.0]))
    theta = HyperparameterSet(K.GD, [1.0], [], ())
    R = correlation_matrix(ds, theta)
    assert np.array_equal(R, np.ones((2, 2)))
    # rank-deficient but factorable thanks to escalation
    value = concentrated_log_likelihood(ds, theta)
    assert math.isfinite(value)


def test_correlation_matrix_matches_mixed_kernel_on_normalized_points():
    rng = np.random.default_rng(0)
    ds = mixed_dataset(8)
    theta = random_theta(ds.space, K.EHH, rng)
    R = correlation_matrix(ds, theta, 2)
    assert np.allclose(np.diag(R), 1.0)
    assert np.allclose(R, R.T)
    normalized = [normalize(ds.space, w) for w in ds.points]
    for i in (0, 3):
        for j in (1, 5):
            expected = mixed_kernel(normalized[i], normalized[j], theta, 2)
            assert R[i, j] == pytest.approx(expected, rel=1e-12)


def test_correlation_matrix_ehh_single_level_difference():
    space = DesignSpace((Categorical("c", ("a", "b", "c")),))
    ds = Dataset(space, (MixedPoint(categorical=(1,)), MixedPoint(categorical=(2,))),
                 np.array([0.0, 1.0]))
    theta = HyperparameterSet(
        K.EHH, [], [], (SymmetricHyperMatrix(K.EHH, 3, [math.pi / 2] * 3),)
    )
    R = correlation_matrix(ds, theta)
    assert R[0, 1] == pytest.approx(theta.epsilon, rel=1e-9)


def test_correlation_vector_against_training_point():
    ds = mixed_dataset(12)
    model = build_model(ds, random_theta(ds.space, K.CR, np.random.default_rng(1)))
    r = correlation_vector(model, ds.points[3])
    assert r.shape == (12,)
    assert r[3] == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# concentrated likelihood
# ---------------------------------------------------------------------------

def test_likelihood_identity_matrix_closed_form():
    # far-apart points with huge theta decorrelate: R ~ I
    space = DesignSpace((Continuous("x", 0.0, 1.0),))
    xs = np.linspace(0.05, 0.95, 6)
    y = np.array([1.2, -0.3, 0.0, 0.8, -1.7, 0.0])
    y -= y.mean()
    ds = Dataset(space, tuple(MixedPoint((float(v),)) for v in xs), y)
    theta = HyperparameterSet(K.GD, [3000.0], [], ())
    n = len(y)
    expected = -0.5 * n * math.log(y @ y / n) - 0.5 * n * (1 + math.log(2 * math.pi))
    value = concentrated_log_likelihood(ds, theta, 2, jitter=1e-300)
    assert value == pytest.approx(expected, rel=1e-9)


def test_likelihood_matches_dense_inverse_oracle():
    rng = np.random.default_rng(5)
    ds_full = mixed_dataset(8, seed=7)
    for kind in (K.GD, K.CR, K.EHH, K.FE, K.HH):
        theta = random_theta(ds_full.space, kind, rng)
        jitter = 1e-10
        value = concentrated_log_likelihood(ds_full, theta, 2, jitter)
        R = correlation_matrix(ds_full, theta, 2) + jitter * np.eye(8)
        Rinv = np.linalg.inv(R)
        y = ds_full.targets
        ones = np.ones(8)
        mu = (ones @ Rinv @ y) / (ones @ Rinv @ ones)
        sigma2 = (y - mu) @ Rinv @ (y - mu) / 8
        sign, logdet = np.linalg.slogdet(R)
        oracle = -4 * math.log(sigma2) - 0.5 * logdet - 4 * (1 + math.log(2 * math.pi))
        assert value == pytest.approx(oracle, abs=1e-8)


def test_likelihood_single_point_floored():
    space = DesignSpace((Continuous("x", 0.0, 1.0),))
    ds = Dataset(space, (MixedPoint((0.5,)),), np.array([3.0]))
    theta = HyperparameterSet(K.GD, [1.0], [], ())
    value = concentrated_log_likelihood(ds, theta)
    assert math.isfinite(value)


def test_cholesky_escalation_raises_on_indefinite():
    from mixedgp.gp import _cholesky_with_escalation

    indefinite = np.array([[1.0, 2.0], [2.0, 1.0]])  # eigenvalues 3, -1
    with pytest.raises(NumericalFailure):
        _cholesky_with_escalation(indefinite, 1e-10)


def test_cholesky_escalation_reports_jitter_used():
    from mixedgp.gp import _cholesky_with_escalation

    # exact duplicate rows: singular, factorable only after escalation
    R = np.ones((2, 2))
    chol, used = _cholesky_with_escalation(R, 1e-10)
    assert used >= 1e-10
    assert np.allclose(chol @ chol.T, R + used * np.eye(2))


def test_log_det_identity_on_random_matrices():
    rng = np.random.default_rng(9)
    for _ in range(20):
        A = rng.normal(size=(5, 5))
        spd = A @ A.T + 5 * np.eye(5)
        chol = np.linalg.cholesky(spd)
        log_det = 2 * np.sum(np.log(np.diag(chol)))
        assert log_det == pytest.approx(math.log(np.linalg.det(spd)), abs=1e-8)


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------

def test_fit_interpolates_every_kind():
    ds = mixed_dataset(30)
    for kind in K:
        model = fit(ds, kind, 2, FitConfig(n_starts=2, max_evals=1500))
        means, variances = predict(model, ds.points)
        rel = np.abs(means - ds.targets) / (1.0 + np.abs(ds.targets))
        assert np.max(rel) <= 1e-6
        assert np.max(variances) <= 10.0 * model.jitter * model.sigma2_hat


def test_fit_likelihood_consistency_exact():
    ds = mixed_dataset(20)
    model = fit(ds, K.CR, 2, FitConfig(n_starts=2, max_evals=800))
    again = concentrated_log_likelihood(
        model.standardized_dataset(), model.theta_star, model.p, model.jitter
    )
    assert again == model.log_likelihood


def test_fit_multistart_monotone_on_nested_starts():
    ds = mixed_dataset(18)
    base = fit(ds, K.GD, 2, FitConfig(n_starts=1, max_evals=600))
    richer = fit(
        ds, K.GD, 2,
        FitConfig(n_starts=1, max_evals=600, extra_starts=(base.theta_star,)),
    )
    assert richer.log_likelihood >= base.log_likelihood


def test_fit_chol_reproduces_correlation():
    ds = mixed_dataset(15)
    model = fit(ds, K.EHH, 2, FitConfig(n_starts=1, max_evals=500))
    R = correlation_matrix(ds, model.theta_star, 2) + model.jitter * np.eye(15)
    rebuilt = model.chol @ model.chol.T
    assert np.linalg.norm(rebuilt - R) / np.linalg.norm(R) < 1e-10


def test_fit_smooth_1d_recovery():
    space = DesignSpace((Continuous("x", 0.0, 1.0),))
    xs = np.linspace(0.0, 1.0, 20)
    ds = Dataset(space, tuple(MixedPoint((float(x),)) for x in xs), np.sin(2 * np.pi * xs))
    model = fit(ds, K.EHH, 2, FitConfig(n_starts=5))
    grid = np.linspace(0.0, 1.0, 257)
    means, _ = predict(model, tuple(MixedPoint((float(x),)) for x in grid))
    assert math.sqrt(np.mean((means - np.sin(2 * np.pi * grid)) ** 2)) < 1e-2


def test_fit_warm_start_kind_mismatch():
    ds = mixed_dataset(10)
    gd_model = fit(ds, K.GD, 2, FitConfig(n_starts=1, max_evals=300))
    from mixedgp.errors import ShapeMismatch

    with pytest.raises(ShapeMismatch):
        fit(ds, K.CR, 2, FitConfig(n_starts=1, extra_starts=(gd_model.theta_star,)))


# ---------------------------------------------------------------------------
# prediction
# ---------------------------------------------------------------------------

def test_predict_constant_dataset():
    space = DesignSpace((Continuous("x", 0.0, 1.0),))
    xs = np.linspace(0.1, 0.9, 7)
    ds = Dataset(space, tuple(MixedPoint((float(x),)) for x in xs), np.full(7, 4.25))
    model = build_model(ds, HyperparameterSet(K.GD, [2.0], [], ()))
    means, _ = predict(model, (MixedPoint((0.33,)), MixedPoint((0.77,))))
    assert np.allclose(means, 4.25, atol=1e-9)


def test_predict_far_point_variance_limit():
    space = DesignSpace((Continuous("x", 0.0, 1000.0),))
    xs = [0.0, 1.0, 2.0]
    ds = Dataset(space, tuple(MixedPoint((float(x),)) for x in xs), np.array([0.1, 0.5, -0.2]))
    theta = HyperparameterSet(K.GD, [3e3], [], ())
    model = build_model(ds, theta)
    far = MixedPoint((1000.0,))
    # r(w) ~ 0: variance tends to sigma2 * (1 + 1/(1' R^-1 1))
    R = correlation_matrix(ds, theta) + model.jitter * np.eye(3)
    expected = model.sigma2_hat * (1.0 + 1.0 / np.sum(np.linalg.inv(R)))
    assert predict_variance(model, far) == pytest.approx(expected, rel=1e-6)
    assert predict_mean(model, far) == pytest.approx(model.mu_hat, abs=1e-9)


def test_predict_variance_nonnegative():
    ds = mixed_dataset(25)
    model = fit(ds, K.GD, 2, FitConfig(n_starts=2, max_evals=500))
    pts = lhs(ds.space, 60, seed=123)
    _, variances = predict(model, pts)
    assert np.all(variances >= 0.0)


def test_prediction_affine_equivariance():
    ds = mixed_dataset(16)
    rng = np.random.default_rng(3)
    theta = random_theta(ds.space, K.CR, rng)
    a, b = 3.7, -11.0
    scaled = ds.with_targets(a * ds.targets + b)
    m1 = build_model(ds, theta)
    m2 = build_model(scaled, theta)
    pts = lhs(ds.space, 20, seed=9)
    mean1, var1 = predict(m1, pts)
    mean2, var2 = predict(m2, pts)
    assert np.allclose(mean2, a * mean1 + b, rtol=1e-9, atol=1e-9)
    assert np.allclose(var2, a * a * var1, rtol=1e-9, atol=1e-12)


def test_predict_empty_points():
    ds = mixed_dataset(10)
    model = build_model(ds, random_theta(ds.space, K.GD, np.random.default_rng(2)))
    means, variances = predict(model, ())
    assert means.size == 0 and variances.size == 0


def test_standardize_targets():
    ds = mixed_dataset(12)
    std, mean, scale = standardize_targets(ds)
    assert mean == pytest.approx(float(np.mean(ds.targets)))
    assert np.mean(std.targets) == pytest.approx(0.0, abs=1e-12)
    assert np.std(std.targets) == pytest.approx(1.0, rel=1e-12)
    flat = ds.with_targets(np.zeros(len(ds)))
    std2, _, scale2 = standardize_targets(flat)
    assert scale2 == 1.0 and np.all(std2.targets == 0.0)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_model_roundtrip_bit_identical(tmp_path):
    ds = mixed_dataset(22)
    model = fit(ds, K.EHH, 2, FitConfig(n_starts=2, max_evals=800))
    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)
    pts = lhs(ds.space, 40, seed=77)
    m1, v1 = predict(model, pts)
    m2, v2 = predict(loaded, pts)
    assert np.array_equal(m1, m2)
    assert np.array_equal(v1, v2)
    assert loaded.log_likelihood == model.log_likelihood
    assert loaded.jitter == model.jitter


def test_load_model_rejects_other_files(tmp_path):
    from mixedgp.errors import ParseError

    path = tmp_path / "bogus.json"
    path.write_text("{}")
    with pytest.raises(ParseError):
        load_model(path)
    path2 = tmp_path / "not_json.json"
    path2.write_text("hello")
    with pytest.raises(ParseError):
        load_model(path2)
