"""Statistical Gaussianity checks: exact KS distances, moments, autocorrelation, M1/M2."""

from dataclasses import asdict, dataclass
import math

import numpy as np
import scipy.fft
import scipy.special

from .errors import DimensionError
from .latent import check_latent, derive_seed, standard_normal
from .prno import (
    BlockView,
    circular_autocorrelation,
    covariance_deviation_m2,
    mean_deviation_m1,
    prob_bound_p1,
    prob_bound_p2,
)
from .spatial import moment_loss
from .spectral import power_spectrum

REPORT_MOMENT_ORDERS = (1, 2, 3, 4)


def standard_normal_cdf(t):
    return scipy.special.ndtr(t)


def chi2_over_sqrt2_cdf(r):
    """CDF of chi_2 / sqrt(2): 1 - exp(-r^2) for r > 0."""
    r = np.asarray(r, dtype=np.float64)
    out = -np.expm1(-np.square(np.maximum(r, 0.0)))
    return out if out.ndim else float(out)


def chi1_cdf(r):
    r = np.asarray(r, dtype=np.float64)
    out = scipy.special.erf(np.maximum(r, 0.0) / math.sqrt(2.0))
    return out if out.ndim else float(out)


def ks_statistic(sample, cdf):
    """Two-sided sup |F_emp - F| over the sorted sample (exact, no binning)."""
    xs = np.sort(np.asarray(sample, dtype=np.float64))
    n = xs.shape[0]
    if n == 0:
        raise DimensionError("KS statistic of an empty sample")
    f = np.asarray(cdf(xs), dtype=np.float64)
    i = np.arange(1, n + 1)
    upper = np.max(i / n - f)
    lower = np.max(f - (i - 1) / n)
    return float(max(upper, lower))


def ecdf_curve(sample, cdf):
    """Step-curve points ``(t, F_emp, F_target)`` tracing both sides of each jump.

    The largest |F_emp - F_target| over the returned rows equals the exact
    KS statistic.
    """
    xs = np.sort(np.asarray(sample, dtype=np.float64))
    n = xs.shape[0]
    if n == 0:
        raise DimensionError("empirical CDF of an empty sample")
    f = np.asarray(cdf(xs), dtype=np.float64)
    t = np.repeat(xs, 2)
    emp = np.empty(2 * n)
    emp[0::2] = np.arange(n) / n
    emp[1::2] = np.arange(1, n + 1) / n
    return t, emp, np.repeat(f, 2)


def spatial_ks(x):
    x = check_latent(x)
    return ks_statistic(x, standard_normal_cdf)


def nonedge_magnitudes(x):
    """Normalized magnitudes excluding k = 0 and k = D/2."""
    mags = power_spectrum(x)
    d = mags.shape[0]
    return np.delete(mags, [0, d // 2])


def spectral_ks(x):
    x = check_latent(x, even=True, min_dim=8)
    return ks_statistic(nonedge_magnitudes(x), chi2_over_sqrt2_cdf)


@dataclass
class GaussianityReport:
    spatial_ks: float
    spectral_ks: float
    moment_errors: dict
    autocorr_peak_offdiag: float
    m1: float
    m2: float
    p1: float
    p2: float
    spatial_count: int = 0
    spectral_count: int = 0

    def to_dict(self):
        out = asdict(self)
        out["moment_errors"] = {str(k): v for k, v in self.moment_errors.items()}
        return out


def evaluate(x, view=None):
    x = check_latent(x, even=True, min_dim=8)
    d = x.shape[0]
    view = view or BlockView.for_dim(d)
    moment_errors = {n: moment_loss(x, n, grad=False).value for n in REPORT_MOMENT_ORDERS}
    acf = circular_autocorrelation(x)
    m1 = mean_deviation_m1(x, view)
    m2 = covariance_deviation_m2(x, view)
    return GaussianityReport(
        spatial_ks=spatial_ks(x),
        spectral_ks=spectral_ks(x),
        moment_errors=moment_errors,
        autocorr_peak_offdiag=float(np.max(np.abs(acf[1:]))),
        m1=m1,
        m2=m2,
        p1=prob_bound_p1(m1, view),
        p2=prob_bound_p2(m2, view),
        spatial_count=d,
        spectral_count=d - 2,
    )


def magnitude_target_cdf(dim, freq_index):
    """chi_1 at DC and Nyquist, chi_2 / sqrt(2) elsewhere."""
    if freq_index in (0, dim // 2):
        return chi1_cdf
    return chi2_over_sqrt2_cdf


def monte_carlo_lemma_check(dim, trials, freq_index, seed, chunk=2048):
    """KS distance of one normalized DFT magnitude over independent Gaussian latents.

    Trial ``t`` draws its latent from ``derive_seed(seed, t)``, so any
    subset of trials can be reproduced on its own.
    """
    dim, trials, freq_index = int(dim), int(trials), int(freq_index)
    if dim < 4 or dim % 2:
        raise DimensionError(f"dim must be even and >= 4, got {dim}")
    if not 0 <= freq_index < dim:
        raise DimensionError(f"freq_index {freq_index} outside [0, {dim})")
    if trials < 1:
        raise ValueError("trials must be positive")
    half_index = min(freq_index, dim - freq_index)
    values = np.empty(trials)
    for start in range(0, trials, chunk):
        stop = min(start + chunk, trials)
        batch = np.stack([standard_normal(dim, derive_seed(seed, t)) for t in range(start, stop)])
        coeffs = scipy.fft.rfft(batch, axis=1)[:, half_index]
        values[start:stop] = np.abs(coeffs) / math.sqrt(dim)
    return ks_statistic(values, magnitude_target_cdf(dim, freq_index))
