"""Block-covariance baseline and the statistics linking it to the spectral loss.

The latent is reshaped into m contiguous blocks of length k. M1 is the norm
of the mean block, M2 the operator norm of the block second-moment matrix
minus the identity; p1 and p2 are the matching concentration tail bounds,
capped at 1.
"""

from dataclasses import dataclass
import math

import numpy as np
import scipy.fft

from . import kernels
from .errors import ConfigurationError
from .latent import check_latent
from .spatial import LossEval

PRNO_DEFAULT_K = 4


@dataclass(frozen=True)
class BlockView:
    subvector_dim: int
    block_count: int

    def __post_init__(self):
        if self.subvector_dim < 1 or self.block_count < 1:
            raise ConfigurationError(f"invalid block view k={self.subvector_dim}, m={self.block_count}")

    @property
    def dim(self):
        return self.subvector_dim * self.block_count

    @classmethod
    def for_dim(cls, dim, k=PRNO_DEFAULT_K):
        k = int(k)
        if k < 1 or dim % k:
            raise ConfigurationError(f"block size k={k} does not divide D={dim}")
        return cls(k, dim // k)

    def blocks(self, x):
        x = check_latent(x)
        if x.shape[0] != self.dim:
            raise ConfigurationError(
                f"latent of dim {x.shape[0]} does not match m*k = {self.block_count}*{self.subvector_dim}"
            )
        return x.reshape(self.block_count, self.subvector_dim)


def _second_moment(blocks):
    m = blocks.shape[0]
    return blocks.T @ blocks / m


def mean_deviation_m1(x, view):
    return float(np.linalg.norm(view.blocks(x).mean(axis=0)))


def covariance_deviation_m2(x, view, norm="operator"):
    """|| (1/m) sum_i x_i x_i^T - I_k || in operator (default) or Frobenius norm."""
    blocks = view.blocks(x)
    dev = _second_moment(blocks) - np.eye(view.subvector_dim)
    if norm == "operator":
        return float(np.max(np.abs(np.linalg.eigvalsh(dev))))
    if norm == "frobenius":
        return float(np.linalg.norm(dev))
    raise ValueError(f"unknown norm {norm!r}")


def prob_bound_p1(m1, view):
    if m1 < 0:
        raise ValueError("m1 must be nonnegative")
    m, k = view.block_count, view.subvector_dim
    return min(2.0 * math.exp(-m * m1**2 / (2.0 * k)), 1.0)


def prob_bound_p2(m2, view):
    if m2 < 0:
        raise ValueError("m2 must be nonnegative")
    m, k = view.block_count, view.subvector_dim
    excess = max(math.sqrt(1.0 + m2) - 1.0 - math.sqrt(k / m), 0.0)
    return min(2.0 * math.exp(-0.5 * m * excess**2), 1.0)


def circular_autocorrelation(x, method="fft"):
    """C(r) / D with C(r) = sum_l x_l x_{(l + r) mod D}.

    ``method="fft"`` uses the Wiener-Khinchin route (any D),
    ``method="direct"`` the O(D^2) definition.
    """
    x = check_latent(x)
    d = x.shape[0]
    if method == "direct":
        return kernels.circular_autocorr_direct(np.ascontiguousarray(x))
    if method != "fft":
        raise ValueError(f"unknown method {method!r}")
    coef = scipy.fft.rfft(x)
    return scipy.fft.irfft(coef.real**2 + coef.imag**2, n=d) / d


def prno_loss(x, view=None, w1=1.0, w2=1.0, grad=True):
    """w1 * M1^2 + w2 * ||block second moment - I||_F^2 (PRNO-style baseline)."""
    x = check_latent(x)
    view = view or BlockView.for_dim(x.shape[0])
    blocks = view.blocks(x)
    m, k = blocks.shape
    mean = blocks.mean(axis=0)
    dev = _second_moment(blocks) - np.eye(k)
    value = w1 * float(mean @ mean) + w2 * float(np.sum(dev * dev))
    if not grad:
        return LossEval(value, None, "prno")
    g = (2.0 * w1 / m) * mean + (4.0 * w2 / m) * (blocks @ dev)
    return LossEval(value, g.ravel(), "prno")
