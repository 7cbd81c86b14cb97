"""Toy reward alignment: a linear smoothing generator, lightness/darkness rewards,
and regularized latent optimization with reward-hacking metrics."""

from dataclasses import dataclass, field
import csv
import math

import numpy as np

from . import kernels
from .combined import RegConfig, gaussian_reg_loss
from .errors import ConfigurationError, InsufficientDataError
from .evaluation import evaluate
from .latent import check_latent, side_of
from .optimizer import OptimizerConfig, run_loop, scale_reg_gradient
from .prno import BlockView, prno_loss
from .spatial import kl_loss, kurtosis_loss, norm_loss

REWARDS = ("lightness", "darkness")
REGULARIZERS = ("none", "kl", "kurtosis", "norm", "prno", "ours")


def toy_generator(x, side=None):
    """Row-major reshape to side x side, then circular 5-point smoothing.

    Kernel weights are 0.5 (centre) and 0.125 (each 4-neighbour), summing to 1.
    """
    x = check_latent(x)
    side = side or side_of(x.shape[0])
    if side * side != x.shape[0]:
        raise ConfigurationError(f"latent of dim {x.shape[0]} is not a {side}x{side} image")
    return kernels.smooth5(np.ascontiguousarray(x.reshape(side, side)))


def generator_transpose(pixel_grad):
    """Adjoint of :func:`toy_generator`, returned as a flat latent gradient.

    The stencil is symmetric with circular boundaries, so it is self-adjoint.
    """
    pixel_grad = np.ascontiguousarray(pixel_grad, dtype=np.float64)
    return kernels.smooth5(pixel_grad).ravel()


def lightness_reward(image):
    image = np.asarray(image, dtype=np.float64)
    return float(image.mean()), np.full(image.shape, 1.0 / image.size)


def darkness_reward(image):
    value, grad = lightness_reward(image)
    return -value, -grad


_REWARD_FNS = {"lightness": lightness_reward, "darkness": darkness_reward}


def reward_with_grad(name, x, side=None):
    """Reward of the generated image and its gradient with respect to the latent."""
    image = toy_generator(x, side)
    value, pixel_grad = _REWARD_FNS[name](image)
    return value, generator_transpose(pixel_grad)


def make_regularizer(name, reg_config=None, view=None):
    """Return ``fn(x, seed) -> LossEval`` for a named regularizer, or None for "none"."""
    if name == "none":
        return None
    if name == "kl":
        return lambda x, seed: kl_loss(x)
    if name == "kurtosis":
        return lambda x, seed: kurtosis_loss(x)
    if name == "norm":
        return lambda x, seed: norm_loss(x)
    if name == "prno":
        return lambda x, seed: prno_loss(x, view or BlockView.for_dim(x.shape[0]))
    if name == "ours":
        cfg = reg_config or RegConfig()
        return lambda x, seed: gaussian_reg_loss(x, cfg, seed)
    raise ConfigurationError(f"unknown regularizer {name!r}; choose from {REGULARIZERS}")


@dataclass(frozen=True)
class AlignmentConfig:
    reward_name: str = "lightness"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    regularizer: str = "ours"
    reg_config: RegConfig = field(default_factory=RegConfig)
    prno_k: int = 4

    def __post_init__(self):
        if self.reward_name not in REWARDS:
            raise ConfigurationError(f"unknown reward {self.reward_name!r}; choose from {REWARDS}")
        if self.regularizer not in REGULARIZERS:
            raise ConfigurationError(f"unknown regularizer {self.regularizer!r}; choose from {REGULARIZERS}")


def align_reward(config, init, seed=0, snapshot=None):
    """Maximize the reward of the generated image, optionally regularized.

    At each lookahead point the descent direction is
    ``-reward_grad + reg_coefficient * scale_reg_gradient(reg_grad, reward_grad)``,
    which is then clipped and applied with Nesterov momentum.
    ``snapshot(iteration, latent)``, if given, is called at every report.
    """
    init = check_latent(init, even=True, min_dim=8)
    side = side_of(init.shape[0])
    view = BlockView.for_dim(init.shape[0], config.prno_k)
    reg = make_regularizer(config.regularizer, config.reg_config, view)
    coeff = config.optimizer.reg_coefficient

    def direction(y, step_seed):
        reward, reward_grad = reward_with_grad(config.reward_name, y, side)
        fields = {"reward": reward, "reg": math.nan, "objective": -reward}
        total = -reward_grad
        if reg is not None:
            ev = reg(y, step_seed)
            fields["reg"] = ev.value
            fields["objective"] = -reward + coeff * ev.value
            total = total + coeff * scale_reg_gradient(ev.gradient, reward_grad)
        return total, fields

    def extra(iteration, position):
        snapshot(iteration, position)
        return {}

    return run_loop(direction, init, config.optimizer, seed, view, True, extra if snapshot else None)


def hacking_drift(traj):
    """Max over reports of (spatial_ks + spectral_ks) minus its value at the first report."""
    reports = traj.reports()
    if len(reports) < 2:
        raise InsufficientDataError(f"need at least 2 reports, trajectory has {len(reports)}")
    scores = [r.spatial_ks + r.spectral_ks for _, r in reports]
    return float(max(scores) - scores[0])


def no_opt_report(init, view=None):
    """The "No Opt." baseline: the report of the untouched initial latent."""
    return evaluate(init, view)


MATRIX_COLUMNS = ("regularizer", "iteration", "reward", "reg", "spatial_ks", "spectral_ks", "m2", "p2", "hacking_drift")


def comparison_matrix(reward_name, init, optimizer_config, seed, reg_config=None, prno_k=4, regularizers=REGULARIZERS):
    """Run every regularizer from the same init; one row per (regularizer, report)."""
    rows = []
    for name in regularizers:
        cfg = AlignmentConfig(reward_name, optimizer_config, name, reg_config or RegConfig(), prno_k)
        traj = align_reward(cfg, init, seed)
        base = None
        for rec in traj.records:
            if rec.report is None:
                continue
            score = rec.report.spatial_ks + rec.report.spectral_ks
            base = score if base is None else base
            rows.append({
                "regularizer": name,
                "iteration": rec.iteration,
                "reward": rec.reward_value,
                "reg": rec.reg_value,
                "spatial_ks": rec.report.spatial_ks,
                "spectral_ks": rec.report.spectral_ks,
                "m2": rec.report.m2,
                "p2": rec.report.p2,
                "hacking_drift": score - base,
            })
    return rows


def write_matrix_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=MATRIX_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def write_pgm16(image, path, lo=None, hi=None):
    """Write a 16-bit binary PGM, linearly mapping [lo, hi] to [0, 65535]."""
    image = np.asarray(image, dtype=np.float64)
    lo = float(image.min()) if lo is None else lo
    hi = float(image.max()) if hi is None else hi
    span = hi - lo if hi > lo else 1.0
    scaled = np.clip(np.round((image - lo) / span * 65535.0), 0, 65535).astype(">u2")
    h, w = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
        fh.write(scaled.tobytes())


def read_pgm16(path):
    data = open(path, "rb").read()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ConfigurationError(f"{path}: not a binary PGM")
    w, h = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=">u2").reshape(h, w).astype(np.int64)
