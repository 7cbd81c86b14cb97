"""Nesterov-momentum latent optimization with global-norm gradient clipping."""

from dataclasses import dataclass, field
import csv
import json
import math
import time

import numpy as np

from .errors import ConfigurationError, NumericalAbort
from .evaluation import evaluate
from .latent import check_latent, derive_seed

TRAJECTORY_COLUMNS = (
    "iteration",
    "objective",
    "reward",
    "reg",
    "spatial_ks",
    "spectral_ks",
    "m2",
    "wall_time_ms",
)


@dataclass(frozen=True)
class OptimizerConfig:
    learning_rate: float = 0.1
    momentum: float = 0.9
    clip_norm: float = 0.01
    iterations: int = 500
    reg_coefficient: float = 2.0
    eval_every: int = 100

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigurationError(f"learning_rate must be positive, got {self.learning_rate}")
        if not 0 <= self.momentum < 1:
            raise ConfigurationError(f"momentum must lie in [0, 1), got {self.momentum}")
        if not self.clip_norm > 0:
            raise ConfigurationError(f"clip_norm must be positive, got {self.clip_norm}")
        if int(self.iterations) < 0:
            raise ConfigurationError(f"iterations must be >= 0, got {self.iterations}")
        if not self.reg_coefficient >= 0:
            raise ConfigurationError(f"reg_coefficient must be >= 0, got {self.reg_coefficient}")
        if int(self.eval_every) < 1:
            raise ConfigurationError(f"eval_every must be >= 1, got {self.eval_every}")


@dataclass
class OptimizerState:
    position: np.ndarray
    velocity: np.ndarray
    iteration: int = 0

    @classmethod
    def start(cls, init):
        init = check_latent(init)
        return cls(init.copy(), np.zeros_like(init), 0)

    def lookahead(self, momentum):
        return self.position + momentum * self.velocity


@dataclass
class TrajectoryRecord:
    iteration: int
    objective_value: float
    reward_value: float = math.nan
    reg_value: float = math.nan
    report: object = None
    wall_time_ms: float = 0.0
    extra: dict = field(default_factory=dict)

    def row(self):
        rep = self.report
        return {
            "iteration": self.iteration,
            "objective": self.objective_value,
            "reward": self.reward_value,
            "reg": self.reg_value,
            "spatial_ks": rep.spatial_ks if rep else math.nan,
            "spectral_ks": rep.spectral_ks if rep else math.nan,
            "m2": rep.m2 if rep else math.nan,
            "wall_time_ms": self.wall_time_ms,
        }


@dataclass
class Trajectory:
    records: list = field(default_factory=list)
    final_position: np.ndarray | None = None

    def append(self, record):
        if self.records and record.iteration <= self.records[-1].iteration:
            raise ValueError("trajectory iterations must be strictly increasing")
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def reports(self):
        return [(r.iteration, r.report) for r in self.records if r.report is not None]

    def to_csv(self, path, include_timing=True):
        """One row per iteration. Timing columns make files run-dependent,
        so pass ``include_timing=False`` for byte-reproducible output."""
        cols = [c for c in TRAJECTORY_COLUMNS if include_timing or c != "wall_time_ms"]
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
            writer.writeheader()
            for rec in self.records:
                writer.writerow({k: _fmt(v) for k, v in rec.row().items()})

    def to_json(self, path, include_timing=True):
        out = []
        for rec in self.records:
            item = {
                "iteration": rec.iteration,
                "objective": _json_num(rec.objective_value),
                "reward": _json_num(rec.reward_value),
                "reg": _json_num(rec.reg_value),
                "report": rec.report.to_dict() if rec.report else None,
            }
            if rec.extra:
                item.update({k: _json_num(v) for k, v in rec.extra.items()})
            if include_timing:
                item["wall_time_ms"] = rec.wall_time_ms
            out.append(item)
        with open(path, "w") as fh:
            json.dump({"records": out}, fh, indent=1, sort_keys=True)
            fh.write("\n")


def _fmt(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return v


def _json_num(v):
    return None if isinstance(v, float) and math.isnan(v) else v


def clip_gradient(grad, clip_norm):
    grad = np.asarray(grad, dtype=np.float64)
    norm = float(np.linalg.norm(grad))
    if norm > clip_norm:
        return grad * (clip_norm / norm)
    return grad


def scale_reg_gradient(reg_grad, reward_grad):
    """Rescale ``reg_grad`` to the norm of ``reward_grad``.

    A zero regularization gradient stays zero; a zero reward gradient leaves
    ``reg_grad`` unscaled so regularization keeps acting when the reward is flat.
    """
    reg_grad = np.asarray(reg_grad, dtype=np.float64)
    reg_norm = float(np.linalg.norm(reg_grad))
    reward_norm = float(np.linalg.norm(reward_grad))
    if reg_norm == 0.0:
        return np.zeros_like(reg_grad)
    if reward_norm == 0.0:
        return reg_grad
    return reg_grad * (reward_norm / reg_norm)


def nesterov_step(state, grad_at_lookahead, config):
    """v' = momentum * v - lr * g(lookahead);  x' = x + v'."""
    velocity = config.momentum * state.velocity - config.learning_rate * np.asarray(grad_at_lookahead)
    return OptimizerState(state.position + velocity, velocity, state.iteration + 1)


def _check_finite(value, grad, iteration, trajectory, what="objective"):
    if math.isfinite(value) and np.all(np.isfinite(grad)):
        return
    diag = {
        "iteration": iteration,
        "what": what,
        "value": value,
        "nonfinite_gradient_entries": int(np.count_nonzero(~np.isfinite(grad))),
    }
    raise NumericalAbort(f"non-finite {what} at iteration {iteration}", trajectory, diag)


def run_loop(direction, init, config, seed, view=None, report=True, record_extra=None):
    """Shared optimization loop.

    ``direction(y, seed)`` returns ``(grad, fields)`` at the lookahead point
    ``y``: the descent gradient before clipping, and a dict with at least
    ``objective`` (plus optionally ``reward`` and ``reg``). Record ``t``
    holds the values at the lookahead point of step ``t``, and the last
    record those at the final position. A full report is attached every
    ``eval_every`` iterations and at the end.
    """
    iters = int(config.iterations)
    state = OptimizerState.start(init)
    traj = Trajectory()
    t0 = time.perf_counter()
    for t in range(iters + 1):
        y = state.lookahead(config.momentum) if t < iters else state.position
        step_seed = derive_seed(seed, t)
        grad, fields = direction(y, step_seed)
        _check_finite(fields["objective"], grad, t, traj)
        rec = TrajectoryRecord(
            iteration=t,
            objective_value=float(fields["objective"]),
            reward_value=float(fields.get("reward", math.nan)),
            reg_value=float(fields.get("reg", math.nan)),
        )
        if report and (t % config.eval_every == 0 or t == iters):
            rec.report = evaluate(state.position, view)
            if record_extra is not None:
                rec.extra = record_extra(t, state.position) or {}
        rec.wall_time_ms = (time.perf_counter() - t0) * 1e3
        traj.append(rec)
        if t < iters:
            state = nesterov_step(state, clip_gradient(grad, config.clip_norm), config)
    traj.final_position = state.position
    return traj


def optimize(objective, init, config=None, seed=0, view=None, report=True, record_extra=None):
    """Minimize ``objective(x, seed) -> LossEval`` from ``init``.

    Each step evaluates the objective at the Nesterov lookahead point with a
    per-iteration seed derived from ``seed``, clips the gradient to
    ``clip_norm`` and applies the momentum update. Raises
    :class:`NumericalAbort` (carrying the partial trajectory) on any
    non-finite value or gradient.
    """
    config = config or OptimizerConfig()

    def direction(y, step_seed):
        ev = objective(y, step_seed)
        return ev.gradient, {"objective": ev.value, "reg": ev.value}

    return run_loop(direction, init, config, seed, view, report, record_extra)
