"""Moment-matching loss and the KL, kurtosis and norm baselines.

Each loss returns a :class:`LossEval` carrying the value and its exact
gradient with respect to the latent. Passing ``grad=False`` skips the
gradient (and the singularity checks that only the gradient needs).
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DegenerateVarianceError, SingularityError
from .latent import check_latent

EPS_VAR = 1e-12
EPS_MOM = 1e-12


@dataclass(frozen=True)
class LossEval:
    value: float
    gradient: np.ndarray | None
    name: str = ""
    terms: dict = field(default_factory=dict)

    @property
    def grad_norm(self):
        if self.gradient is None:
            return None
        return float(np.linalg.norm(self.gradient))

    def to_json(self):
        return {"loss_name": self.name, "value": self.value, "grad_norm": self.grad_norm}


def theoretical_moment(n):
    """E[X^n] for X ~ N(0, 1): zero for odd n, (2k)!/(2^k k!) for n = 2k."""
    n = int(n)
    if n < 0:
        raise ValueError(f"moment order must be nonnegative, got {n}")
    if n % 2:
        return 0.0
    k = n // 2
    return float(math.factorial(2 * k) // (2**k * math.factorial(k)))


def empirical_moment(x, n):
    x = np.asarray(x, dtype=np.float64)
    return float(np.mean(x**n))


def moment_loss(x, n, grad=True):
    """| |m_n|^(1/n) - mu_n^(1/n) | with m_n the empirical raw moment."""
    x = check_latent(x)
    n = int(n)
    if n < 1:
        raise ValueError(f"moment order must be >= 1, got {n}")
    d = x.shape[0]
    m = empirical_moment(x, n)
    diff = abs(m) ** (1.0 / n) - theoretical_moment(n) ** (1.0 / n)
    value = abs(diff)
    name = f"moment_{n}"
    if not grad:
        return LossEval(value, None, name)
    if n > 1 and abs(m) <= EPS_MOM:
        raise SingularityError(f"moment loss of order {n} has no gradient at |m_{n}| = {abs(m):.3g}", order=n)
    if diff == 0.0:
        # exact minimum: zero subgradient
        return LossEval(value, np.zeros(d), name)
    g = np.sign(diff) * np.sign(m) * abs(m) ** (1.0 / n - 1.0) * x ** (n - 1) / d
    return LossEval(value, g, name)


def _mean_var(x):
    mu = float(np.mean(x))
    centred = x - mu
    var = float(np.mean(centred**2))
    if var <= EPS_VAR:
        raise DegenerateVarianceError(f"empirical variance {var:.3g} is degenerate")
    return mu, centred, var


def kl_loss(x, grad=True):
    """KL(N(mu, var) || N(0, 1)) from the sample mean and population variance."""
    x = check_latent(x)
    mu, centred, var = _mean_var(x)
    value = 0.5 * (mu**2 + var - math.log(var) - 1.0)
    if not grad:
        return LossEval(value, None, "kl")
    d = x.shape[0]
    g = mu / d + (1.0 - 1.0 / var) * centred / d
    return LossEval(value, g, "kl")


def kurtosis_loss(x, grad=True):
    """(sample kurtosis - 3)^2, kurtosis normalized by population variance."""
    x = check_latent(x)
    _, centred, var = _mean_var(x)
    d = x.shape[0]
    m4 = float(np.mean(centred**4))
    kurt = m4 / var**2
    value = (kurt - 3.0) ** 2
    if not grad:
        return LossEval(value, None, "kurtosis")
    m3 = float(np.mean(centred**3))
    dm4 = 4.0 * (centred**3 - m3) / d
    dvar = 2.0 * centred / d
    dkurt = dm4 / var**2 - 2.0 * m4 / var**3 * dvar
    return LossEval(value, 2.0 * (kurt - 3.0) * dkurt, "kurtosis")


def norm_loss(x, grad=True):
    """Negative log-likelihood of ||x|| under chi_D, constant dropped."""
    x = check_latent(x)
    d = x.shape[0]
    sq = float(np.dot(x, x))
    if sq == 0.0:
        raise SingularityError("norm loss is undefined at the zero vector")
    value = 0.5 * sq - (d - 1) * 0.5 * math.log(sq)
    if not grad:
        return LossEval(value, None, "norm")
    return LossEval(value, x * (1.0 - (d - 1) / sq), "norm")
