import numpy as np
import pytest

from reflectfbm import fbm as fbm_mod
from reflectfbm.fbm import (
    FactorizationError, FbmSpec, derive_seed, estimate_exponent, fbm_covariance, measure_regularity,
    sample_fbm, sample_fbm_batch,
)
from reflectfbm.paths import DiscretePath, UniformGrid


def test_covariance_examples():
    for h in (0.3, 0.5, 0.75, 0.9):
        assert fbm_covariance(1.0, 1.0, h) == pytest.approx(1.0)
    s, t = np.meshgrid(np.linspace(0, 2, 7), np.linspace(0, 2, 7))
    assert np.allclose(fbm_covariance(s, t, 0.5), np.minimum(s, t))
    assert fbm_covariance(0.5, 1.0, 0.75) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(ValueError):
        fbm_covariance(-0.1, 1.0, 0.7)


def test_spec_validation():
    grid = UniformGrid(0.0, 1.0, 8)
    with pytest.raises(ValueError):
        FbmSpec(1.0, 1, grid)
    with pytest.raises(ValueError):
        FbmSpec(0.7, 0, grid)
    with pytest.raises(ValueError):
        FbmSpec(0.7, 1, UniformGrid(0.5, 1.0, 8))


def test_sample_starts_at_zero_and_is_deterministic():
    spec = FbmSpec(0.7, 3, UniformGrid(0.0, 2.0, 100), seed=2**63 + 5)
    a, b = sample_fbm(spec), sample_fbm(spec)
    assert np.all(a.values[0] == 0)
    assert np.array_equal(a.values, b.values)
    # components use distinct substreams
    assert not np.allclose(a.values[:, 0], a.values[:, 1])
    other = sample_fbm(FbmSpec(0.7, 3, spec.grid, seed=spec.seed + 1))
    assert not np.allclose(a.values, other.values)


def test_component_substreams_are_stable_under_dim():
    grid = UniformGrid(0.0, 1.0, 32)
    one = sample_fbm(FbmSpec(0.8, 1, grid, 7))
    three = sample_fbm(FbmSpec(0.8, 3, grid, 7))
    assert np.allclose(one.values[:, 0], three.values[:, 0], rtol=0, atol=1e-12)


@pytest.mark.parametrize("hurst", [0.55, 0.75, 0.95])
def test_levinson_matches_cholesky(hurst):
    spec = FbmSpec(hurst, 2, UniformGrid(0.0, 3.0, 300), seed=11)
    a = sample_fbm(spec, method="cholesky")
    b = sample_fbm(spec, method="levinson")
    assert np.max(np.abs(a.values - b.values)) < 1e-10


def test_cap_and_method_errors():
    spec = FbmSpec(0.7, 1, UniformGrid(0.0, 1.0, 64))
    with pytest.raises(ValueError, match="cap"):
        sample_fbm(spec, cap=32)
    with pytest.raises(ValueError):
        sample_fbm(spec, method="fft")


def test_factorization_failure_names_grid_size(monkeypatch):
    fbm_mod._cholesky_factor.cache_clear()
    monkeypatch.setattr(fbm_mod, "fbm_covariance", lambda s, t, h: -np.ones(np.broadcast(s, t).shape))
    with pytest.raises(FactorizationError, match="n_steps=16"):
        sample_fbm(FbmSpec(0.7, 1, UniformGrid(0.0, 1.0, 16), 0))
    fbm_mod._cholesky_factor.cache_clear()


def test_derive_seed():
    assert derive_seed(5, 3) == derive_seed(5, 3)
    seeds = {derive_seed(5, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert all(0 <= s < 2**64 for s in seeds)


def test_empirical_covariance_monte_carlo():
    grid = UniformGrid(0.0, 1.0, 64)
    w = sample_fbm_batch(grid, 0.75, 10_000, seed=1)
    emp = np.mean(w[:, 32] * w[:, 64])
    assert abs(emp - 0.5) <= 0.05


def test_stationary_increments():
    hurst = 0.7
    grid = UniformGrid(0.0, 1.0, 64)
    w = sample_fbm_batch(grid, hurst, 10_000, seed=2)
    for t_idx, lag in [(0, 16), (20, 8), (40, 24)]:
        tau = lag * grid.dt
        var = np.var(w[:, t_idx + lag] - w[:, t_idx])
        assert var == pytest.approx(tau ** (2 * hurst), rel=0.10)


def test_cholesky_exactness_full_covariance():
    grid = UniformGrid(0.0, 1.0, 16)
    hurst = 0.8
    w = sample_fbm_batch(grid, hurst, 100_000, seed=3)[:, 1:]
    emp = w.T @ w / w.shape[0]
    t = grid.times[1:]
    exact = fbm_covariance(t[:, None], t[None, :], hurst)
    assert np.max(np.abs(emp - exact)) <= 0.03


def test_measure_regularity_examples():
    grid = UniformGrid(0.0, 1.0, 256)
    lin = DiscretePath.from_function(grid, lambda t: t)
    assert estimate_exponent(lin) == pytest.approx(1.0, abs=1e-6)
    flat = measure_regularity(DiscretePath(grid, np.full(257, 2.0)), 0.7)
    assert flat.eta_proxy == 0.0
    with pytest.raises(ValueError, match="coarse"):
        measure_regularity(DiscretePath(UniformGrid(0.0, 1.0, 16), np.zeros(17)), 0.7)
    with pytest.raises(ValueError):
        measure_regularity(lin, 0.7, epsilon=0.8)


def test_eta_proxy_is_holder_norm_at_reduced_exponent():
    w = sample_fbm(FbmSpec(0.75, 1, UniformGrid(0.0, 1.0, 256), 4))
    rep = measure_regularity(w, 0.75, 0.05)
    times = w.times
    dv = np.abs(w.values[:, 0][None, :] - w.values[:, 0][:, None])
    dt = np.abs(times[None, :] - times[:, None])
    np.fill_diagonal(dt, 1.0)
    assert rep.eta_proxy == pytest.approx(np.max(dv / dt**0.7), rel=1e-12)
    assert rep.lam == pytest.approx(0.7)


def test_eta_proxy_moments_stable():
    # finite-moment proxy: moments of the Hölder constant settle as the sample doubles
    grid = UniformGrid(0.0, 1.0, 1024)
    eta = np.array([
        measure_regularity(sample_fbm(FbmSpec(0.75, 1, grid, derive_seed(99, i))), 0.75, 0.05).eta_proxy
        for i in range(1000)
    ])
    for p in (1, 2, 4):
        half, full = np.mean(eta[:500] ** p), np.mean(eta**p)
        assert np.isfinite(full)
        assert abs(full - half) / half < 0.15
