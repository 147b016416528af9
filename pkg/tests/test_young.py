from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from reflectfbm.experiments import fbm_pair, young_corpus
from reflectfbm.paths import DiscretePath, UniformGrid
from reflectfbm.young import (
    YoungBoundParams, defect_decay_rate, refinement_defect, young_bound, young_integral,
)

unit = lambda n: UniformGrid(0.0, 1.0, n)  # noqa: E731


def exact_left_sum_t_dt2(n):
    """Left-point sum of t d(t^2) on n cells, in exact rational arithmetic."""
    return sum(Fraction(k, n) * (Fraction(k + 1, n) ** 2 - Fraction(k, n) ** 2) for k in range(n))


def test_closed_form_oracle_agrees_with_rationals():
    for n in (1, 2, 7, 64):
        assert exact_left_sum_t_dt2(n) == Fraction(2, 3) - Fraction(1, 2 * n) - Fraction(1, 6 * n * n)


def test_constant_integrand_is_exact():
    grid = unit(50)
    g = DiscretePath(grid, np.column_stack([np.sin(5 * grid.times), grid.times**3]))
    f = DiscretePath(grid, np.full(51, 2.5))
    val = young_integral(f, g, (0.2, 0.9))
    assert np.allclose(val, 2.5 * (g.values[45] - g.values[10]), rtol=1e-13)


@pytest.mark.parametrize("k", [2, 5, 10, 14])
def test_t_dt2_converges_first_order(k):
    n = 2**k
    grid = unit(n)
    val = young_integral(DiscretePath.from_function(grid, lambda t: t), DiscretePath.from_function(grid, lambda t: t**2))[0]
    assert val == pytest.approx(float(exact_left_sum_t_dt2(n)) if n <= 1024 else 2 / 3 - 1 / (2 * n) - 1 / (6 * n * n), abs=1e-12)
    assert abs(val - 2 / 3) <= 2 / n


def test_f_equals_g_error_halves():
    errs = []
    for n in (64, 128, 256, 512, 1024):
        g = DiscretePath.from_function(unit(n), lambda t: np.sin(3 * t) + t)
        exact = (g.values[-1, 0] ** 2 - g.values[0, 0] ** 2) / 2
        errs.append(abs(young_integral(g, g)[0] - exact))
    ratios = np.array(errs[1:]) / np.array(errs[:-1])
    assert np.all(np.abs(ratios - 0.5) < 0.02)


def test_matrix_integrand_matches_loop(rng):
    grid = unit(30)
    g = DiscretePath(grid, rng.normal(size=(31, 3)).cumsum(axis=0))
    f = rng.normal(size=(31, 2, 3))
    expected = sum(f[k] @ (g.values[k + 1] - g.values[k]) for k in range(6, 24))
    assert np.allclose(young_integral(f, g, (0.2, 0.8)), expected, rtol=1e-13)
    row = DiscretePath(grid, f[:, 0, :])
    assert np.allclose(young_integral(row, g), sum(f[k, 0] @ (g.values[k + 1] - g.values[k]) for k in range(30)))
    with pytest.raises(ValueError):
        young_integral(DiscretePath(grid, np.zeros((31, 2))), g)
    with pytest.raises(ValueError):
        young_integral(DiscretePath(unit(10), np.zeros(11)), g)


def test_additivity_and_linearity(rng):
    grid = unit(64)
    f1, g = fbm_pair(0.8, grid, 5)
    f2 = DiscretePath.from_function(grid, np.cos)
    whole = young_integral(f1, g, (0.125, 0.875))
    split = young_integral(f1, g, (0.125, 0.5)) + young_integral(f1, g, (0.5, 0.875))
    assert np.allclose(whole, split, rtol=1e-12, atol=1e-15)
    a, b = 1.7, -0.3
    lin = young_integral(f1 * a + f2 * b, g)
    assert np.allclose(lin, a * young_integral(f1, g) + b * young_integral(f2, g), rtol=1e-12)
    g2 = DiscretePath.from_function(grid, lambda t: t**2)
    assert np.allclose(young_integral(f1, g * a + g2 * b), a * young_integral(f1, g) + b * young_integral(f1, g2), rtol=1e-12)


def test_refinement_defect_examples():
    n = 256
    grid = unit(n)
    g = DiscretePath.from_function(grid, lambda t: t**2)
    assert refinement_defect(DiscretePath(grid, np.full(n + 1, 3.0)), g, levels=4) == pytest.approx([0, 0, 0, 0], abs=1e-14)
    f = DiscretePath.from_function(grid, lambda t: t)
    defects = refinement_defect(f, g, levels=5)
    err = lambda m: 1 / (2 * m) + 1 / (6 * m * m)  # noqa: E731
    expected = [err(n // 2**lev) - err(n // 2 ** (lev - 1)) for lev in range(1, 6)]
    assert defects == pytest.approx(expected, rel=1e-9)
    ratios = np.array(defects[:-1]) / np.array(defects[1:])
    assert np.allclose(ratios, 0.5, atol=0.02)
    assert defect_decay_rate(defects) == pytest.approx(1.0, abs=0.03)
    with pytest.raises(ValueError):
        refinement_defect(f, g, window=(0.0, 0.5), levels=8)


def test_bound_params():
    p = YoungBoundParams(0.8, 0.8, 0.0)
    assert p.c_coeff == pytest.approx(1 / (2**1.6 - 1))
    q = YoungBoundParams(0.8, 0.6, 0.5)
    assert q.mu_beta == pytest.approx(1.1)
    assert q.c_coeff == pytest.approx(np.sqrt(2) / (2**1.1 - 1))
    with pytest.raises(ValueError, match="mu_beta"):
        YoungBoundParams(0.7, 0.5, 0.7)
    with pytest.raises(ValueError):
        YoungBoundParams(0.4, 0.5, 0.0)


def test_bound_zero_integrand():
    grid = unit(32)
    g = DiscretePath.from_function(grid, np.sin)
    assert young_bound(DiscretePath(grid, np.zeros(33)), g, None, YoungBoundParams(1, 1, 0.3)) == 0.0


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.0, 0.3, 0.7]))
def test_bound_dominates_integral(seed, beta):
    rng = np.random.default_rng(seed)
    f, g = fbm_pair(0.85, unit(64), seed)
    i, j = sorted(rng.choice(65, size=2, replace=False))
    win = (i / 64, j / 64)
    p = YoungBoundParams(0.8, 0.8, beta)
    assert abs(young_integral(f, g, win)[0]) <= young_bound(f, g, win, p)


def test_small_corpus_has_no_violations():
    recs = young_corpus(seed=3, n_smooth=4, n_fbm=4, n_steps=64, windows_per_pair=3, levels=3)
    assert len(recs) == 8 * 3 * 3
    assert all(r.ok for r in recs)
