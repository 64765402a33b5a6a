"""Tests for the kernel-weighted robust mean and its Monte Carlo wrappers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from copulamix import (
    PI,
    DegenerateSampleError,
    DomainError,
    Fgm,
    Normal,
    Uniform01,
    bandwidth,
    coverage_experiment,
    derive_seed,
    marginal_mean,
    population_bandwidth,
    replicate_robust_means,
    results_to_csv,
    robust_mean,
    sample_iid_normal,
    uniform_chain_matrix,
    variance_diagnostic,
)


# ---------------------------------------------------------------------------
# bandwidth
# ---------------------------------------------------------------------------

def test_singleton_bandwidth_closed_form():
    # n=1, y=2: (4 / (1 * sqrt(2) * 4))^(1/5) = 2^(-1/10)
    assert bandwidth([2.0]) == pytest.approx(2.0 ** -0.1, abs=1e-15)
    assert bandwidth([2.0]) == pytest.approx(0.9330329915368074, abs=1e-15)


def test_bandwidth_is_scale_free():
    y = [1.0, 2.0, 3.5, 0.25]
    assert bandwidth([7.0 * v for v in y]) == pytest.approx(bandwidth(y), rel=1e-14)
    assert bandwidth([-7.0 * v for v in y]) == pytest.approx(bandwidth(y), rel=1e-14)


def test_bandwidth_shrinks_with_n():
    rng = np.random.default_rng(5)
    y = rng.normal(30.0, 1.0, size=4000)
    assert bandwidth(y[:100]) > bandwidth(y[:1000]) > bandwidth(y)


def test_bandwidth_rejects_bad_samples():
    with pytest.raises(DomainError):
        bandwidth([])
    with pytest.raises(DomainError):
        bandwidth([[1.0, 2.0]])
    with pytest.raises(DegenerateSampleError):
        bandwidth([0.0, 0.0, 0.0])
    with pytest.raises(DegenerateSampleError):
        bandwidth([-1.0, 1.0])


def test_population_bandwidth_matches_moment_formula():
    expect = ((1.0 + 900.0) / (20000 * math.sqrt(2.0) * 900.0)) ** 0.2
    assert population_bandwidth(Normal(30.0, 1.0), 20000) == pytest.approx(expect, rel=1e-15)
    expect_u = ((1.0 / 3.0) / (100 * math.sqrt(2.0) * 0.25)) ** 0.2
    assert population_bandwidth(Uniform01(), 100) == pytest.approx(expect_u, rel=1e-15)


def test_population_bandwidth_approximates_large_sample_bandwidth():
    rng = np.random.default_rng(11)
    y = rng.normal(30.0, 1.0, size=200000)
    assert bandwidth(y) == pytest.approx(population_bandwidth(Normal(30.0, 1.0), y.size), rel=1e-3)


# ---------------------------------------------------------------------------
# the estimator itself
# ---------------------------------------------------------------------------

def test_single_point_estimate_closed_form():
    # y=2 at x=0: r_tilde = 2/h, mu_hat = 2 sqrt(1+h^2)/h with h = 2^(-1/10)
    res = robust_mean([2.0], [0.0])
    h = 2.0 ** -0.1
    assert res.h == pytest.approx(h, abs=1e-15)
    assert res.r_tilde == pytest.approx(2.0 / h, rel=1e-15)
    assert res.mu_hat == pytest.approx(2.0 * math.sqrt(1.0 + h * h) / h, rel=1e-15)
    assert res.mu_hat == pytest.approx(2.9316878107991204, abs=1e-13)


def test_interval_is_symmetric_with_the_stated_half_width():
    rng = np.random.default_rng(3)
    y = rng.normal(30.0, 1.0, size=500)
    x = rng.normal(size=500)
    res = robust_mean(y, x, level=0.95)
    half = res.z * math.sqrt(res.mean_y_sq / (res.n * res.h * math.sqrt(2.0)))
    assert res.half_width == pytest.approx(half, rel=1e-15)
    assert res.ci_hi - res.mu_hat == pytest.approx(half, rel=1e-12)
    assert res.mu_hat - res.ci_lo == pytest.approx(half, rel=1e-12)
    assert res.z == pytest.approx(1.959963984540054, abs=1e-12)


def test_zero_kernel_argument_recovers_weighted_average():
    # x identically zero turns the kernel into a constant weight
    y = np.array([1.0, 2.0, 3.0, 4.0])
    res = robust_mean(y, np.zeros(4))
    assert res.r_tilde == pytest.approx(float(y.mean()) / res.h, rel=1e-14)


def test_estimator_is_scale_equivariant():
    rng = np.random.default_rng(8)
    y = rng.normal(5.0, 1.0, size=200)
    x = rng.normal(size=200)
    base = robust_mean(y, x)
    scaled = robust_mean(3.5 * y, x)
    assert scaled.h == pytest.approx(base.h, rel=1e-14)
    assert scaled.mu_hat == pytest.approx(3.5 * base.mu_hat, rel=1e-12)
    assert scaled.half_width == pytest.approx(3.5 * base.half_width, rel=1e-12)


def test_estimator_tracks_the_mean_on_iid_data():
    rng = np.random.default_rng(21)
    y = rng.normal(30.0, 1.0, size=20000)
    x = rng.normal(size=20000)
    res = robust_mean(y, x)
    assert res.mu_hat == pytest.approx(30.0, abs=1.5)
    assert res.covers(30.0)


def test_covers_is_an_inclusive_interval_check():
    res = robust_mean([2.0], [0.0])
    assert res.covers(res.ci_lo)
    assert res.covers(res.ci_hi)
    assert not res.covers(res.ci_hi + 1e-9)


def test_estimator_input_validation():
    with pytest.raises(DomainError):
        robust_mean([1.0, 2.0], [0.0])
    with pytest.raises(DomainError):
        robust_mean([[1.0]], [[0.0]])
    with pytest.raises(DomainError):
        robust_mean([1.0], [0.0], level=1.0)
    with pytest.raises(DomainError):
        robust_mean([1.0], [0.0], level=0.0)
    with pytest.raises(DegenerateSampleError):
        robust_mean([0.0, 0.0], [0.1, 0.2])


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(min_value=1.0, max_value=100.0), min_size=2, max_size=40),
    st.floats(min_value=0.1, max_value=10.0),
)
def test_scale_equivariance_property(y, k):
    x = np.linspace(-1.0, 1.0, len(y))
    base = robust_mean(y, x)
    scaled = robust_mean([k * v for v in y], x)
    assert scaled.mu_hat == pytest.approx(k * base.mu_hat, rel=1e-9)
    assert scaled.h == pytest.approx(base.h, rel=1e-9)


# ---------------------------------------------------------------------------
# replication harness
# ---------------------------------------------------------------------------

def test_replications_are_deterministic():
    a = replicate_robust_means(Fgm(0.6), Normal(30.0, 1.0), 200, 5, 0.95, seed=7)
    b = replicate_robust_means(Fgm(0.6), Normal(30.0, 1.0), 200, 5, 0.95, seed=7)
    assert a == b
    c = replicate_robust_means(Fgm(0.6), Normal(30.0, 1.0), 200, 5, 0.95, seed=8)
    assert a != c


def test_replication_results_do_not_depend_on_batching():
    # n=100 puts the batch cap at 5243 rows, so 5246 replications span two
    # batches; replications on either side of the boundary must equal their
    # standalone single-seed reconstruction
    reps, n, seed = 5246, 100, 424242
    results = replicate_robust_means(PI, Uniform01(), n, reps, 0.95, seed)
    assert len(results) == reps
    for r in (0, 5242, 5243, 5245):
        s = derive_seed(seed, r)
        y = uniform_chain_matrix(PI, n, [s])[0]
        x = sample_iid_normal(n, s)
        assert results[r] == robust_mean(y, x, 0.95)


def test_replication_count_validation():
    with pytest.raises(DomainError):
        replicate_robust_means(PI, Uniform01(), 10, 0, 0.95, seed=1)


def test_iid_coverage_is_near_nominal():
    cov = coverage_experiment(PI, Normal(30.0, 1.0), 400, 150, 0.95, seed=9)
    assert 0.90 <= cov <= 1.0


# ---------------------------------------------------------------------------
# variance diagnostic
# ---------------------------------------------------------------------------

def test_variance_diagnostic_relates_its_two_columns():
    diag = variance_diagnostic(Fgm(0.6), Normal(30.0, 1.0), (100, 400), 40, seed=3)
    assert diag.sizes == (100, 400)
    assert diag.replications == 40
    for n, nv, nhv in zip(diag.sizes, diag.nvar, diag.nhvar):
        assert nv > 0.0
        assert nhv == pytest.approx(nv * population_bandwidth(Normal(30.0, 1.0), n), rel=1e-14)


def test_dependent_chain_inflates_n_var_above_the_marginal_variance():
    # positively dependent steps push n*var(Y_bar) above sigma^2 = 1
    diag = variance_diagnostic(Fgm(0.6), Normal(30.0, 1.0), (400,), 120, seed=12)
    assert diag.nvar[0] > 1.05
    ind = variance_diagnostic(PI, Normal(30.0, 1.0), (400,), 120, seed=12)
    assert ind.nvar[0] == pytest.approx(1.0, abs=0.35)
    assert diag.nvar[0] > ind.nvar[0]


def test_variance_diagnostic_validation():
    with pytest.raises(DomainError):
        variance_diagnostic(PI, Uniform01(), (100, 100), 40, seed=1)
    with pytest.raises(DomainError):
        variance_diagnostic(PI, Uniform01(), (400, 100), 40, seed=1)
    with pytest.raises(DomainError):
        variance_diagnostic(PI, Uniform01(), (100, 400), 29, seed=1)


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------

def test_marginal_means():
    assert marginal_mean(Uniform01()) == 0.5
    assert marginal_mean(Normal(30.0, 1.0)) == 30.0


def test_results_csv_round_trip(tmp_path):
    res = robust_mean([2.0], [0.0])
    path = tmp_path / "rows.csv"
    results_to_csv([("fgm", 7, res, True)], path)
    lines = path.read_text().splitlines()
    assert lines[0] == "copula,n,seed,h,r_tilde,mu_hat,ci_lo,ci_hi,covered"
    fields = lines[1].split(",")
    assert fields[0] == "fgm"
    assert int(fields[1]) == 1
    assert int(fields[2]) == 7
    assert float(fields[5]) == pytest.approx(res.mu_hat, rel=1e-15)
    assert fields[8] == "1"
