"""DFT magnitudes, the spectral NLL loss and the batched power-spectrum loss.

Convention: the forward DFT is unnormalized, x_hat[k] = sum_n x[n] e^{-2 pi i k n / D},
and "magnitudes" always means |x_hat[k]| / sqrt(D). For i.i.d. N(0, 1) input
these follow chi_2 / sqrt(2) except at k = 0 and k = D/2 (chi_1).

Gradients of weighted magnitude sums are computed with one inverse real FFT:
d|x_hat_k|/dx is the real part of the adjoint DFT applied to the unit phasor
x_hat_k / |x_hat_k|. Since |x_hat_k| = |x_hat_{D-k}| share a gradient, a
weight vector over all D frequencies enters only through the pair averages
(w_k + w_{D-k}) / 2 on the D/2 + 1 half-spectrum slots.
"""

from dataclasses import dataclass
import math

import numpy as np
import scipy.fft

from . import kernels
from .errors import ConfigurationError, SpectralSingularityError
from .latent import check_latent, random_permutation
from .spatial import LossEval

EPS_MAG = 1e-12
PAPER_TARGET_MEAN = 0.875


@dataclass(frozen=True)
class SpectralBatchConfig:
    batch_size: int = 16
    target_mean: float = PAPER_TARGET_MEAN
    include_dc_nyquist: bool = True

    def __post_init__(self):
        if int(self.batch_size) < 1:
            raise ConfigurationError(f"batch_size must be >= 1, got {self.batch_size}")
        if not math.isfinite(self.target_mean):
            raise ConfigurationError("target_mean must be finite")


def half_spectrum(x):
    """rfft of a real latent of even length (D/2 + 1 coefficients)."""
    x = check_latent(x, even=True, min_dim=2)
    return scipy.fft.rfft(x)


def full_from_half(h, d):
    """Expand half-spectrum values to all D indices using conjugate symmetry."""
    return np.concatenate([h, h[d // 2 - 1:0:-1]])


def power_spectrum(x):
    """Normalized DFT magnitudes |x_hat[k]| / sqrt(D) for k = 0..D-1.

    >>> power_spectrum([1.0, 0.0, 0.0, 0.0])
    array([0.5, 0.5, 0.5, 0.5])
    """
    x = check_latent(x, even=True, min_dim=2)
    d = x.shape[0]
    return full_from_half(np.abs(half_spectrum(x)), d) / math.sqrt(d)


def pair_average(weights, d):
    """Average each weight with its conjugate partner: (w_k + w_{D-k}) / 2, k = 0..D/2."""
    half = d // 2
    out = weights[: half + 1].copy()
    out[1:half] = 0.5 * (out[1:half] + weights[d - 1:half:-1])
    return out


def magnitude_vjp(coeffs, half_weights, d, abs_coeffs=None):
    """Gradient of sum_k w_k |x_hat_k| with respect to x.

    ``coeffs`` is the half spectrum and ``half_weights`` the pair-averaged
    weights (see :func:`pair_average`). Frequencies with |x_hat_k| <= EPS_MAG
    enter through a damped phasor; exactly zero coefficients contribute nothing.
    """
    if abs_coeffs is None:
        abs_coeffs = np.abs(coeffs)
    scaled = coeffs * (half_weights / np.maximum(abs_coeffs, EPS_MAG))
    return d * scipy.fft.irfft(scaled, n=d)


def spectral_nll_loss(x, grad=True):
    """Sum over all D frequencies of -log f(r_k), f(r) = 2 r exp(-r^2)."""
    x = check_latent(x, even=True, min_dim=2)
    d = x.shape[0]
    coeffs = half_spectrum(x)
    mag = full_from_half(np.abs(coeffs), d)
    bad = np.flatnonzero(mag <= EPS_MAG)
    if bad.size:
        k = int(bad[0])
        raise SpectralSingularityError(f"DFT magnitude at k={k} is {mag[k]:.3g}; log undefined", index=k)
    r = mag / math.sqrt(d)
    value = float(np.sum(-np.log(2.0 * r) + r**2))
    if not grad:
        return LossEval(value, None, "spectral_nll")
    habs = mag[: d // 2 + 1]
    # per-frequency weights are symmetric, so they equal their pair averages
    weights = -1.0 / habs + 2.0 * habs / d
    return LossEval(value, magnitude_vjp(coeffs, weights, d, habs), "spectral_nll")


def frequency_order(d, config, seed):
    """Seeded shuffle of the frequencies used by the power loss.

    Consecutive runs of ``batch_size`` entries form the batches. With DC and
    Nyquist excluded, any tail shorter than a batch is dropped.
    """
    b = int(config.batch_size)
    if config.include_dc_nyquist:
        if d % b:
            raise ConfigurationError(f"batch_size {b} does not divide D={d}")
        return random_permutation(d, seed)
    pool = np.concatenate([np.arange(1, d // 2), np.arange(d // 2 + 1, d)])
    if len(pool) < b:
        raise ConfigurationError(f"batch_size {b} exceeds the {len(pool)} usable frequencies")
    order = pool[random_permutation(len(pool), seed)]
    return order[: len(order) - len(order) % b]


def power_loss(x, config=None, seed=0, grad=True):
    """Mean over random frequency batches of |batch mean magnitude - target|."""
    config = config or SpectralBatchConfig()
    x = check_latent(x, even=True, min_dim=2)
    d = x.shape[0]
    order = frequency_order(d, config, seed)
    coeffs = half_spectrum(x)
    habs = np.abs(coeffs)
    root_d = math.sqrt(d)
    value, folded = kernels.batch_abs_deviation(
        habs / root_d, order, int(config.batch_size), float(config.target_mean), d
    )
    if not grad:
        return LossEval(value, None, "power")
    half = d // 2
    folded[1:half] *= 0.5
    return LossEval(value, magnitude_vjp(coeffs, folded / root_d, d, habs), "power")


def expected_chi2_over_sqrt2_mean():
    """E[chi_2 / sqrt(2)] = sqrt(pi) / 2."""
    return math.sqrt(math.pi) / 2.0
