import math

import numpy as np
import pytest
import scipy.integrate
import scipy.stats

from gaussreg.errors import DimensionError
from gaussreg.evaluation import (
    chi1_cdf,
    chi2_over_sqrt2_cdf,
    ecdf_curve,
    evaluate,
    ks_statistic,
    monte_carlo_lemma_check,
    spatial_ks,
    spectral_ks,
    standard_normal_cdf,
)
from gaussreg.latent import make_checkerboard, random_permutation, raw_words, sample_standard_gaussian
from gaussreg.prno import BlockView

G = sample_standard_gaussian(65536, 0)


def test_normal_cdf():
    assert standard_normal_cdf(0.0) == 0.5
    assert standard_normal_cdf(1.959964) == pytest.approx(0.975, abs=1e-6)
    t = np.random.default_rng(0).normal(size=100) * 3
    assert np.allclose(standard_normal_cdf(t) + standard_normal_cdf(-t), 1.0, atol=1e-15)
    assert np.allclose(standard_normal_cdf(t), scipy.stats.norm.cdf(t), atol=1e-10)


def test_chi2_cdf():
    assert chi2_over_sqrt2_cdf(0.0) == 0
    assert chi2_over_sqrt2_cdf(-1.0) == 0
    assert chi2_over_sqrt2_cdf(math.sqrt(math.log(2))) == pytest.approx(0.5, abs=1e-15)
    assert chi2_over_sqrt2_cdf(40.0) == 1.0


def test_chi2_cdf_integrates_density():
    grid = np.linspace(0, 4, 1000)
    numeric = [scipy.integrate.quad(lambda r: 2 * r * math.exp(-r * r), 0, g, epsabs=1e-13)[0] for g in grid]
    assert np.max(np.abs(chi2_over_sqrt2_cdf(grid) - numeric)) < 1e-8


def test_chi1_cdf():
    assert chi1_cdf(0.0) == 0
    assert chi1_cdf(1.0) == pytest.approx(0.682689, abs=1e-6)
    grid = np.linspace(-1, 6, 500)
    vals = chi1_cdf(grid)
    assert np.all(np.diff(vals) >= 0)
    assert np.allclose(vals[grid > 0], scipy.stats.chi.cdf(grid[grid > 0], 1), atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_ks_matches_scipy(seed):
    x = sample_standard_gaussian(500, seed) * 1.1 + 0.05
    assert ks_statistic(x, standard_normal_cdf) == pytest.approx(scipy.stats.kstest(x, "norm").statistic, abs=1e-12)


def test_ks_empty():
    with pytest.raises(DimensionError):
        ks_statistic([], standard_normal_cdf)


def test_ecdf_curve_peak_is_ks():
    x = sample_standard_gaussian(300, 3)
    t, emp, tgt = ecdf_curve(x, standard_normal_cdf)
    assert np.max(np.abs(emp - tgt)) == pytest.approx(ks_statistic(x, standard_normal_cdf), abs=1e-15)
    assert np.all(np.diff(t) >= 0)


def test_spatial_ks_examples():
    assert spatial_ks(np.zeros(10)) == 0.5
    assert spatial_ks(G) < 0.02
    q = scipy.stats.norm.ppf((np.arange(1, 101) - 0.5) / 100)
    assert spatial_ks(q) <= 0.005 + 1e-12


def test_spectral_ks_examples():
    assert spectral_ks(G) < 0.02
    assert spectral_ks(make_checkerboard(64, 2)) > 0.5
    assert spectral_ks(np.ones(64)) > 0.5
    with pytest.raises(DimensionError):
        spectral_ks(np.ones(9))


def test_permutation_behaviour():
    perm = random_permutation(65536, 1)
    assert spatial_ks(G[perm]) == spatial_ks(G)
    worst = max(spectral_ks(G[random_permutation(65536, s)]) for s in range(100))
    assert worst < 0.03


def test_quadrants_separate():
    x = sample_standard_gaussian(4096, 9)
    rademacher = np.where(raw_words(3, 4096) >> np.uint64(63), 1.0, -1.0)
    cases = {
        "gaussian": (x, False, False),
        "sorted": (np.sort(x), False, True),
        "rademacher": (rademacher, True, False),
        "checkerboard": (make_checkerboard(4096, 2), True, True),
    }
    for name, (z, spatial_bad, spectral_bad) in cases.items():
        r = evaluate(z)
        assert (r.spatial_ks > 0.2) == spatial_bad, name
        assert (r.spectral_ks > 0.2) == spectral_bad, name
        if not spatial_bad:
            assert r.spatial_ks < 0.05, name
        if not spectral_bad:
            assert r.spectral_ks < 0.05, name


def test_report_examples():
    r = evaluate(G, BlockView.for_dim(65536, 4))
    assert r.spatial_ks < 0.02 and r.spectral_ks < 0.02 and r.m2 < 0.1
    assert 0 < r.p1 <= 1 and r.p2 == 1
    assert r.spatial_count == 65536 and r.spectral_count == 65534
    cb = evaluate(make_checkerboard(64, 2))
    assert cb.spectral_ks > 0.5 and cb.autocorr_peak_offdiag == pytest.approx(1.0)
    z = evaluate(np.zeros(16))
    assert z.spatial_ks == 0.5 and z.moment_errors[2] == 1.0
    d = r.to_dict()
    assert set(d["moment_errors"]) == {"1", "2", "3", "4"}
    assert 0 < d["p1"] <= 1 and 0 <= d["spectral_ks"] <= 1


def test_p1_cap_frequency_under_gaussian_null():
    # m * M1^2 ~ chi^2_k, so p1 = 1 exactly when chi^2_4 <= 8 ln 2 (probability ~0.764)
    v = BlockView.for_dim(1024, 4)
    draws = [evaluate(sample_standard_gaussian(1024, s), v) for s in range(1500)]
    stat = [v.block_count * r.m1**2 for r in draws]
    assert scipy.stats.kstest(stat, scipy.stats.chi2(4).cdf).pvalue > 1e-3
    p = scipy.stats.chi2(4).cdf(8 * math.log(2))
    freq = np.mean([r.p1 == 1.0 for r in draws])
    assert abs(freq - p) < 4 * math.sqrt(p * (1 - p) / len(draws))


@pytest.mark.parametrize("k", [3, 0, 256])
def test_magnitude_law_monte_carlo(k):
    assert monte_carlo_lemma_check(512, 20000, k, seed=0) < 0.015


def test_lemma_check_subset_reproducible():
    a = monte_carlo_lemma_check(16, 100, 3, seed=5, chunk=7)
    b = monte_carlo_lemma_check(16, 100, 3, seed=5, chunk=100)
    assert a == b


def test_magnitude_law_errors():
    with pytest.raises(DimensionError):
        monte_carlo_lemma_check(512, 10, 512, 0)
    with pytest.raises(DimensionError):
        monte_carlo_lemma_check(7, 10, 1, 0)
