import csv
import math

import numpy as np
import pytest

from gaussreg.errors import ConfigurationError, InsufficientDataError
from gaussreg.evaluation import evaluate
from gaussreg.harness import (
    REGULARIZERS,
    AlignmentConfig,
    align_reward,
    comparison_matrix,
    darkness_reward,
    generator_transpose,
    hacking_drift,
    lightness_reward,
    no_opt_report,
    read_pgm16,
    reward_with_grad,
    toy_generator,
    write_matrix_csv,
    write_pgm16,
)
from gaussreg.latent import derive_seed, sample_standard_gaussian
from gaussreg.optimizer import OptimizerConfig, Trajectory, TrajectoryRecord

from oracles import central_diff_gradient, rel_l2

X0 = sample_standard_gaussian(4096, derive_seed(0, 0))
RUN_SEED = derive_seed(0, 1)


def test_generator_basics(rng):
    assert np.array_equal(toy_generator(np.zeros(16)), np.zeros((4, 4)))
    assert np.allclose(toy_generator(np.full(16, 2.5)), 2.5)
    x, y = rng.normal(size=64), rng.normal(size=64)
    assert np.allclose(toy_generator(2 * x - 3 * y), 2 * toy_generator(x) - 3 * toy_generator(y))
    with pytest.raises(Exception):
        toy_generator(np.zeros(15))


def test_generator_transpose_is_adjoint(rng):
    x, p = rng.normal(size=256), rng.normal(size=(16, 16))
    assert np.dot(toy_generator(x).ravel(), p.ravel()) == pytest.approx(np.dot(x, generator_transpose(p)), rel=1e-12)


def test_rewards():
    img = np.full((4, 4), 0.5)
    assert lightness_reward(img)[0] == 0.5
    assert lightness_reward(np.zeros((4, 4)))[0] == 0
    assert np.all(lightness_reward(img)[1] == 1 / 16)
    assert darkness_reward(img)[0] == -0.5
    assert np.all(darkness_reward(img)[1] == -1 / 16)


@pytest.mark.parametrize("name", ["lightness", "darkness"])
def test_reward_gradient_matches_finite_differences(name):
    worst = 0.0
    for s in range(20):
        x = sample_standard_gaussian(256, 500 + s)
        g = reward_with_grad(name, x)[1]
        num = central_diff_gradient(lambda z: reward_with_grad(name, z)[0], x)
        worst = max(worst, rel_l2(g, num))
    assert worst < 1e-5


def test_config_validation():
    with pytest.raises(ConfigurationError):
        AlignmentConfig(reward_name="brightness")
    with pytest.raises(ConfigurationError):
        AlignmentConfig(regularizer="l2")


def test_zero_iterations_is_no_opt():
    cfg = AlignmentConfig(optimizer=OptimizerConfig(iterations=0))
    traj = align_reward(cfg, X0, RUN_SEED)
    assert len(traj) == 1
    assert traj[0].report == no_opt_report(X0) == evaluate(X0)


def test_regularized_run_stays_gaussian():
    cfg = AlignmentConfig("lightness", OptimizerConfig(learning_rate=0.1), "ours")
    traj = align_reward(cfg, X0, RUN_SEED)
    final = traj[-1]
    assert final.reward_value > traj[0].reward_value
    assert final.report.spatial_ks < 0.05 and final.report.spectral_ks < 0.05
    assert hacking_drift(traj) < 0.05


def test_unregularized_run_hacks_at_high_lr():
    cfg = AlignmentConfig("lightness", OptimizerConfig(learning_rate=1.0), "none")
    traj = align_reward(cfg, X0, RUN_SEED)
    assert traj[-1].reward_value > traj[0].reward_value + 0.5
    assert traj[-1].report.spatial_ks > 0.1
    assert hacking_drift(traj) > 0.1


@pytest.mark.xfail(strict=True, reason="clip 0.01 caps the mean shift at 500*0.1*0.01/0.1/64 ~ 0.078; see ledger")
def test_unregularized_run_hacks_at_low_lr():
    cfg = AlignmentConfig("lightness", OptimizerConfig(learning_rate=0.1), "none")
    traj = align_reward(cfg, X0, RUN_SEED)
    assert traj[-1].reward_value > traj[0].reward_value + 0.5
    assert traj[-1].report.spatial_ks > 0.1


@pytest.mark.slow
@pytest.mark.parametrize("lr", [0.1, 1.0])
@pytest.mark.xfail(strict=True, reason="reward is the latent mean, so 90% reward forces spatial drift; see ledger")
def test_ordering_property(lr):
    opt = OptimizerConfig(learning_rate=lr)
    runs = {name: align_reward(AlignmentConfig("lightness", opt, name), X0, RUN_SEED) for name in REGULARIZERS}
    ours = hacking_drift(runs["ours"])
    for name in ("none", "kl", "kurtosis", "norm"):
        assert ours < hacking_drift(runs[name]), name
    assert runs["ours"][-1].reward_value >= 0.9 * runs["none"][-1].reward_value


def test_hacking_drift():
    traj = Trajectory()
    rep = evaluate(X0)
    for t in (0, 100, 200):
        traj.append(TrajectoryRecord(t, 0.0, report=rep))
    assert hacking_drift(traj) == 0.0
    short = Trajectory()
    short.append(TrajectoryRecord(0, 0.0, report=rep))
    with pytest.raises(InsufficientDataError):
        hacking_drift(short)


def test_comparison_matrix(tmp_path):
    opt = OptimizerConfig(learning_rate=1.0, iterations=20, eval_every=10)
    x0 = sample_standard_gaussian(256, 3)
    rows = comparison_matrix("darkness", x0, opt, 4)
    assert len(rows) == len(REGULARIZERS) * 3
    assert sorted({(r["regularizer"], r["iteration"]) for r in rows}) == sorted(
        (n, t) for n in REGULARIZERS for t in (0, 10, 20)
    )
    write_matrix_csv(rows, tmp_path / "m.csv")
    back = list(csv.DictReader(open(tmp_path / "m.csv")))
    assert len(back) == len(rows)
    assert math.isnan(float(back[0]["reg"]))


def test_snapshots_called_at_reports():
    seen = []
    cfg = AlignmentConfig(optimizer=OptimizerConfig(iterations=20, eval_every=10))
    align_reward(cfg, sample_standard_gaussian(256, 1), 0, lambda t, x: seen.append(t))
    assert seen == [0, 10, 20]


def test_pgm_round_trip(tmp_path):
    img = np.arange(12, dtype=float).reshape(3, 4)
    write_pgm16(img, tmp_path / "a.pgm")
    back = read_pgm16(tmp_path / "a.pgm")
    assert back.shape == (3, 4)
    assert back[0, 0] == 0 and back[-1, -1] == 65535
    assert np.all(np.diff(back.ravel()) > 0)
