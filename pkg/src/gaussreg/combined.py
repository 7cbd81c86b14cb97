"""The unified regularizer: moment losses plus weighted power loss on a shuffled latent."""

from dataclasses import dataclass, field
import json

import numpy as np

from .errors import ConfigurationError
from .latent import check_latent, derive_seed, random_permutation
from .spatial import LossEval, moment_loss
from .spectral import SpectralBatchConfig, power_loss

PAPER_LAMBDA_POWER = 25.0
PAPER_MOMENT_ORDERS = (1, 2)

_CONFIG_KEYS = (
    "moment_orders",
    "lambda_power",
    "batch_size",
    "target_mean",
    "include_dc_nyquist",
    "permute_each_eval",
)


@dataclass(frozen=True)
class RegConfig:
    moment_orders: tuple = PAPER_MOMENT_ORDERS
    lambda_power: float = PAPER_LAMBDA_POWER
    spectral: SpectralBatchConfig = field(default_factory=SpectralBatchConfig)
    permute_each_eval: bool = True

    def __post_init__(self):
        orders = tuple(sorted({int(n) for n in self.moment_orders}))
        if not orders or orders[0] < 1:
            raise ConfigurationError(f"moment_orders must be a nonempty set of positive integers, got {self.moment_orders}")
        object.__setattr__(self, "moment_orders", orders)
        if not self.lambda_power >= 0:
            raise ConfigurationError(f"lambda_power must be >= 0, got {self.lambda_power}")

    def to_dict(self):
        return {
            "moment_orders": list(self.moment_orders),
            "lambda_power": self.lambda_power,
            "batch_size": self.spectral.batch_size,
            "target_mean": self.spectral.target_mean,
            "include_dc_nyquist": self.spectral.include_dc_nyquist,
            "permute_each_eval": self.permute_each_eval,
        }

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - set(_CONFIG_KEYS)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        spectral = SpectralBatchConfig(
            batch_size=int(data.get("batch_size", 16)),
            target_mean=float(data.get("target_mean", 0.875)),
            include_dc_nyquist=bool(data.get("include_dc_nyquist", True)),
        )
        return cls(
            moment_orders=tuple(data.get("moment_orders", PAPER_MOMENT_ORDERS)),
            lambda_power=float(data.get("lambda_power", PAPER_LAMBDA_POWER)),
            spectral=spectral,
            permute_each_eval=bool(data.get("permute_each_eval", True)),
        )

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def gaussian_reg_loss(x, config=None, seed=0, grad=True):
    """sum_{n in K} L_n(x) + lambda_power * L_power(pi(x)).

    ``seed`` is split into two substreams: one draws the element permutation
    pi, the other the frequency batches. Moment terms use the unpermuted
    latent since they are permutation invariant.
    """
    config = config or RegConfig()
    x = check_latent(x, even=True, min_dim=2)
    terms = {}
    value = 0.0
    g = np.zeros(x.shape[0]) if grad else None
    for n in config.moment_orders:
        term = moment_loss(x, n, grad=grad)
        terms[term.name] = term.value
        value += term.value
        if grad:
            g += term.gradient
    if config.lambda_power > 0:
        if config.permute_each_eval:
            perm = random_permutation(x.shape[0], derive_seed(seed, 0))
            shuffled = x[perm]
        else:
            perm = None
            shuffled = x
        pw = power_loss(shuffled, config.spectral, derive_seed(seed, 1), grad=grad)
        terms["power"] = pw.value
        value += config.lambda_power * pw.value
        if grad:
            sg = pw.gradient
            if perm is not None:
                # pull back through the permutation: dL/dx[perm[i]] = dL/dy[i]
                sg = np.empty_like(sg)
                sg[perm] = pw.gradient
            g += config.lambda_power * sg
    return LossEval(value, g, "gaussian_reg", terms)


def seed_averaged_value(x, config=None, seed=0, n_seeds=10):
    """Mean loss value over ``n_seeds`` derived seeds (smooths the stochastic term)."""
    vals = [gaussian_reg_loss(x, config, derive_seed(seed, 2, i), grad=False).value for i in range(n_seeds)]
    return float(np.mean(vals))
