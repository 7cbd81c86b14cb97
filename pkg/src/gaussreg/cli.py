"""Command-line entry point: ``gaussreg <command> [options]``.

Commands
--------
gen          write a latent blob (Gaussian or checkerboard)
eval         Gaussianity report, CDF curves and plots, loss values
optimize     minimize a regularizer from a latent and record the trajectory
align        toy reward alignment with one regularizer
compare      toy reward alignment across every regularizer
lemma-check  Monte Carlo KS check of one DFT magnitude's distribution
plot         render a CDF curve CSV to SVG

Exit status: 0 success, 2 usage error, 3 validation error, 4 numerical abort.

Seeds: ``gen`` samples with ``--seed`` directly. Commands that both draw an
initial latent and run an optimizer split the seed: the latent comes from
``derive_seed(seed, 0)`` and the optimizer from ``derive_seed(seed, 1)``.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import evaluation, harness
from .combined import RegConfig, gaussian_reg_loss
from .errors import ConfigurationError, GaussRegError, NumericalAbort, SingularityError
from .latent import (
    derive_seed,
    make_checkerboard_2d,
    read_latent,
    sample_standard_gaussian,
    side_of,
    write_latent,
)
from .optimizer import OptimizerConfig, optimize
from .plotting import TARGET_LABELS, plot_cdf, write_cdf_csv, write_spectrum_csv
from .prno import BlockView, prno_loss
from .spatial import kl_loss, kurtosis_loss, moment_loss, norm_loss
from .spectral import power_loss, power_spectrum, spectral_nll_loss

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3, 4

# Defaults that differ between commands. The checkerboard toy needs a far
# larger step than the reward runs to move a +-1 pattern within 1000 steps.
_OPT_DEFAULTS = {"lr": 5.0, "clip": 1.0, "iters": 1000}
_ALIGN_DEFAULTS = {"lr": 1.0, "clip": 0.01, "iters": 500}


def _parse_moments(text):
    try:
        orders = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"--moments expects comma-separated integers, got {text!r}")
    if not orders:
        raise argparse.ArgumentTypeError("--moments needs at least one order")
    return orders


def _common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")


def _reg_flags(p):
    p.add_argument("--config", type=Path, help="JSON regularizer config; explicit flags override it")
    p.add_argument("--lambda-power", type=float)
    p.add_argument("--moments", type=_parse_moments)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--target-mean", type=float)
    p.add_argument("--prno-k", type=int, default=4)


def _opt_flags(p):
    p.add_argument("--iters", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--clip", type=float)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--eval-every", type=int, default=100)
    p.add_argument("--timing", action="store_true", help="add wall-clock columns (breaks byte reproducibility)")


def _init_flags(p, default_init):
    p.add_argument("--init", choices=("gaussian", "checkerboard"), default=default_init)
    p.add_argument("--latent", type=Path, help="start from a latent blob instead of --init")
    p.add_argument("--dim", type=int, default=4096)
    p.add_argument("--period", type=int, default=16)
    p.add_argument("--amplitude", type=float, default=1.0)


def build_parser():
    parser = argparse.ArgumentParser(prog="gaussreg", description="Standard-Gaussianity regularization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a latent blob")
    _common(p)
    p.add_argument("--kind", choices=("gaussian", "checkerboard"), default="gaussian")
    p.add_argument("--dim", type=int, default=4096)
    p.add_argument("--period", type=int, default=16, help="checkerboard period; cells are period/2 wide")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--name", default="latent.bin")

    p = sub.add_parser("eval", help="Gaussianity report of a latent")
    _common(p)
    _reg_flags(p)
    p.add_argument("--latent", type=Path, help="latent blob (default: OUT/latent.bin)")

    p = sub.add_parser("optimize", help="minimize a regularizer")
    _common(p)
    _reg_flags(p)
    _opt_flags(p)
    _init_flags(p, "checkerboard")
    p.add_argument("--reg", choices=harness.REGULARIZERS[1:], default="ours")

    p = sub.add_parser("align", help="toy reward alignment")
    _common(p)
    _reg_flags(p)
    _opt_flags(p)
    _init_flags(p, "gaussian")
    p.add_argument("--reward", choices=harness.REWARDS, default="lightness")
    p.add_argument("--reg", choices=harness.REGULARIZERS, default="ours")
    p.add_argument("--reg-coeff", type=float, default=2.0)

    p = sub.add_parser("compare", help="toy reward alignment over all regularizers")
    _common(p)
    _reg_flags(p)
    _opt_flags(p)
    _init_flags(p, "gaussian")
    p.add_argument("--reward", choices=harness.REWARDS, default="lightness")
    p.add_argument("--reg-coeff", type=float, default=2.0)

    p = sub.add_parser("lemma-check", help="Monte Carlo check of one DFT magnitude")
    _common(p)
    p.add_argument("--dim", type=int, default=512)
    p.add_argument("--trials", type=int, default=20000)
    p.add_argument("--freq", type=int, default=3)

    p = sub.add_parser("plot", help="render a CDF curve CSV as SVG")
    p.add_argument("curve", type=Path)
    p.add_argument("--target", choices=sorted(TARGET_LABELS), default="normal")
    p.add_argument("--svg", type=Path)
    p.add_argument("--title", default="")
    return parser


# -- helpers ----------------------------------------------------------------


def _reg_config(args):
    data = RegConfig.from_json(args.config).to_dict() if args.config else RegConfig().to_dict()
    overrides = {
        "lambda_power": args.lambda_power,
        "moment_orders": list(args.moments) if args.moments else None,
        "batch_size": args.batch_size,
        "target_mean": args.target_mean,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    return RegConfig.from_dict(data)


def _opt_config(args, defaults, reg_coeff=2.0):
    pick = lambda name: defaults[name] if getattr(args, name) is None else getattr(args, name)
    return OptimizerConfig(
        learning_rate=pick("lr"),
        momentum=args.momentum,
        clip_norm=pick("clip"),
        iterations=pick("iters"),
        reg_coefficient=reg_coeff,
        eval_every=args.eval_every,
    )


def _make_latent(kind, dim, seed, period=16, amplitude=1.0):
    if kind == "gaussian":
        return sample_standard_gaussian(dim, seed)
    if period < 2 or period % 2:
        raise ConfigurationError(f"--period must be an even integer >= 2, got {period}")
    return make_checkerboard_2d(side_of(dim), period // 2, amplitude)


def _initial_latent(args):
    if args.latent is not None:
        x, meta = read_latent(args.latent)
        return x, meta.get("kind", "file")
    x = _make_latent(args.init, args.dim, derive_seed(args.seed, 0), args.period, args.amplitude)
    return x, args.init


def _dump_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True, allow_nan=False) + "\n")


def _clean(obj):
    """Replace NaN with None so JSON stays standard."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _loss_table(x, reg_config, view):
    """Every loss at ``x`` as {loss_name, value, grad_norm}; failures are reported, not raised."""
    fns = [
        lambda: moment_loss(x, 1),
        lambda: moment_loss(x, 2),
        lambda: kl_loss(x),
        lambda: kurtosis_loss(x),
        lambda: norm_loss(x),
        lambda: spectral_nll_loss(x),
        lambda: power_loss(x, reg_config.spectral, derive_seed(0, 1)),
        lambda: gaussian_reg_loss(x, reg_config, 0),
        lambda: prno_loss(x, view),
    ]
    names = ["moment_1", "moment_2", "kl", "kurtosis", "norm", "spectral_nll", "power", "gaussian_reg", "prno"]
    out = []
    for name, fn in zip(names, fns):
        try:
            out.append(fn().to_json() | {"loss_name": name})
        except (SingularityError, GaussRegError) as exc:
            out.append({"loss_name": name, "value": None, "grad_norm": None, "error": str(exc)})
    return out


# -- commands ---------------------------------------------------------------


def cmd_gen(args):
    x = _make_latent(args.kind, args.dim, args.seed, args.period, args.amplitude)
    path = write_latent(args.out / args.name, x, args.seed, args.kind)
    print(path)


def cmd_eval(args):
    path = args.latent or args.out / "latent.bin"
    x, _ = read_latent(path)
    reg_config = _reg_config(args)
    view = BlockView.for_dim(x.shape[0], args.prno_k)
    report = evaluation.evaluate(x, view)
    _dump_json(args.out / "report.json", _clean(report.to_dict()))

    curves = [
        ("cdf_spatial", x, evaluation.standard_normal_cdf, "normal", "Spatial CDF"),
        ("cdf_spectral", evaluation.nonedge_magnitudes(x), evaluation.chi2_over_sqrt2_cdf, "chi2_sqrt2", "Spectral CDF"),
    ]
    for stem, sample, cdf, target, title in curves:
        csv_path = args.out / f"{stem}.csv"
        write_cdf_csv(csv_path, *evaluation.ecdf_curve(sample, cdf))
        plot_cdf(csv_path, target, title=title)
    write_spectrum_csv(args.out / "spectrum.csv", power_spectrum(x))
    _dump_json(args.out / "losses.json", _clean(_loss_table(x, reg_config, view)))
    print(f"spatial_ks={report.spatial_ks:.6f} spectral_ks={report.spectral_ks:.6f} m2={report.m2:.6f}")


def cmd_optimize(args):
    x0, _ = _initial_latent(args)
    config = _opt_config(args, _OPT_DEFAULTS)
    view = BlockView.for_dim(x0.shape[0], args.prno_k)
    objective = harness.make_regularizer(args.reg, _reg_config(args), view)
    traj = optimize(objective, x0, config, derive_seed(args.seed, 1), view)
    _write_trajectory(traj, args)
    write_latent(args.out / "final.bin", traj.final_position, args.seed, f"optimized-{args.reg}")
    last = traj.records[-1].report
    print(f"final spatial_ks={last.spatial_ks:.6f} spectral_ks={last.spectral_ks:.6f}")


def _write_trajectory(traj, args):
    traj.to_csv(args.out / "trajectory.csv", include_timing=args.timing)
    traj.to_json(args.out / "trajectory.json", include_timing=args.timing)


def cmd_align(args):
    x0, _ = _initial_latent(args)
    side = side_of(x0.shape[0])
    config = harness.AlignmentConfig(
        args.reward, _opt_config(args, _ALIGN_DEFAULTS, args.reg_coeff), args.reg, _reg_config(args), args.prno_k
    )
    snap_dir = args.out / "snapshots"
    snap_dir.mkdir(exist_ok=True)

    def snapshot(iteration, latent):
        image = harness.toy_generator(latent, side)
        harness.write_pgm16(image, snap_dir / f"image_{iteration:05d}.pgm", -3.0, 3.0)
        np.savetxt(snap_dir / f"image_{iteration:05d}.csv", image, delimiter=",", fmt="%.17g")

    traj = harness.align_reward(config, x0, derive_seed(args.seed, 1), snapshot)
    _write_trajectory(traj, args)
    print(f"final reward={traj.records[-1].reward_value:.6f} hacking_drift={harness.hacking_drift(traj):.6f}")


def cmd_compare(args):
    x0, _ = _initial_latent(args)
    rows = harness.comparison_matrix(
        args.reward,
        x0,
        _opt_config(args, _ALIGN_DEFAULTS, args.reg_coeff),
        derive_seed(args.seed, 1),
        _reg_config(args),
        args.prno_k,
    )
    harness.write_matrix_csv(rows, args.out / "matrix.csv")
    print(f"{len(rows)} rows written to {args.out / 'matrix.csv'}")


def cmd_lemma_check(args):
    ks = evaluation.monte_carlo_lemma_check(args.dim, args.trials, args.freq, args.seed)
    target = "chi1" if args.freq % (args.dim // 2) == 0 else "chi2_sqrt2"
    _dump_json(
        args.out / "ks.json",
        {"dim": args.dim, "trials": args.trials, "freq": args.freq, "seed": args.seed, "target": target, "ks": ks},
    )
    print(f"ks={ks:.6f}")


def cmd_plot(args):
    path, ks = plot_cdf(args.curve, args.target, args.svg, args.title)
    print(f"{path} ks={ks:.6f}")


COMMANDS = {
    "gen": cmd_gen,
    "eval": cmd_eval,
    "optimize": cmd_optimize,
    "align": cmd_align,
    "compare": cmd_compare,
    "lemma-check": cmd_lemma_check,
    "plot": cmd_plot,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if hasattr(args, "out"):
            args.out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](args)
    except (NumericalAbort, SingularityError, FloatingPointError) as exc:
        print(f"gaussreg: numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (GaussRegError, ValueError, OSError) as exc:
        print(f"gaussreg: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
