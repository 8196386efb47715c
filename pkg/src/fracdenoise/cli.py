"""Command-line interface: ``fracdenoise <command> [options]``.

Commands
--------
denoise       run the fractional diffusion solver on one PGM image
benchmark     compare noisy / Gaussian / median / Perona-Malik / fractional diffusion
feature-map   write |grad u| and |grad^beta u| as normalised PGM images
kernel        print GL weights and the two-sided stencil
response      CSV of the amplitude response omega^alpha

Exit status: 0 success, 1 usage error, 2 I/O or parse error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._validation import InvalidArgumentError, KernelConsistencyError, NumericalFailureError
from .benchmark import BenchmarkConfig, append_rows, run_benchmark, write_images, write_table
from .diffusion import DEFAULT_K_PERCENTILE, EdgeStopping, SolverConfig, denoise
from .field import central_gradient_magnitude, gradient_magnitude
from .fracops import amplitude_response, build_two_sided_kernel, format_gl_kernel, format_kernel, gl_coefficients
from .metrics import NoiseSpec, add_gaussian_noise, mse, psnr, ssim
from .pgm import PGMParseError, read_pgm, write_pgm

__all__ = ["main", "build_parser", "RunManifest"]

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; 2 is reserved for I/O here
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass(frozen=True)
class RunManifest:
    """Everything one command needs, validated before any computation."""

    command: str
    inputs: tuple = ()
    out: Optional[str] = None
    csv: Optional[str] = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    noise: Optional[NoiseSpec] = None
    sigmas: tuple = ()
    crop: Optional[tuple] = None
    ssim_window: str = "global"
    extra: dict = field(default_factory=dict)


def _crop(text: str) -> tuple:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"crop must be X,Y,W,H integers, got {text!r}") from None
    if len(parts) != 4 or parts[0] < 0 or parts[1] < 0 or parts[2] < 1 or parts[3] < 1:
        raise argparse.ArgumentTypeError(f"crop must be X,Y,W,H with W,H >= 1, got {text!r}")
    return parts


def _solver_flags(p: argparse.ArgumentParser, steps_default: int) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--alpha", type=float, default=1.67, help="flux order (default 1.67)")
    g.add_argument("--beta", type=float, default=1.55, help="edge-detection order (default 1.55)")
    g.add_argument("--h", type=float, default=1.0, help="spatial step")
    g.add_argument("--dt", type=float, default=0.5, help="time step")
    g.add_argument("--steps", type=int, default=steps_default, help=f"iterations (default {steps_default})")
    g.add_argument("--mem", type=int, default=15, help="memory length N")
    g.add_argument("--edge", choices=("rational", "exponential"), default="rational")
    g.add_argument("--gamma", type=int, choices=(1, 2), default=2)
    k = g.add_mutually_exclusive_group()
    k.add_argument("--K", type=float, dest="k_fixed", help="fixed edge threshold")
    k.add_argument(
        "--K-percentile",
        type=float,
        dest="k_percentile",
        default=DEFAULT_K_PERCENTILE,
        help=f"re-estimate K each step as this percentile of |grad^beta u| (default {DEFAULT_K_PERCENTILE:g})",
    )
    g.add_argument("--no-clamp", action="store_true", help="do not clamp the final image to [0, 255]")


def _common_io(p: argparse.ArgumentParser) -> None:
    p.add_argument("--crop", type=_crop, metavar="X,Y,W,H", help="process only this rectangle")
    p.add_argument("--ssim", choices=("global", "windowed"), default="global", help="SSIM statistics")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fracdenoise", description="Two-sided fractional anisotropic diffusion denoising.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("denoise", help="denoise one PGM image")
    d.add_argument("input", help="input PGM")
    d.add_argument("--out", required=True, help="output PGM")
    d.add_argument("--sigma", type=float, default=0.0, help="add seeded Gaussian noise first; the input is then the reference")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--reference", help="clean PGM to score against")
    d.add_argument("--csv", help="append a quality row to this CSV")
    d.add_argument("--noisy-out", help="also write the noisy input")
    _solver_flags(d, steps_default=20)
    _common_io(d)

    b = sub.add_parser("benchmark", help="compare methods on seeded noise")
    b.add_argument("inputs", nargs="+", help="clean PGM images")
    b.add_argument("--out", required=True, help="output directory for images and tables")
    b.add_argument("--sigma", type=float, nargs="+", default=[10.0, 25.0], help="noise levels")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--csv", help="per-method CSV (default OUT/results.csv)")
    b.add_argument("--table", help="table-layout CSV (default OUT/table.csv)")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--pm-dt", type=float, default=0.2)
    b.add_argument("--pm-steps", type=int, default=2000, help="Perona-Malik step budget")
    b.add_argument(
        "--patience", type=int, default=60, help="stop a method after this many steps without PSNR gain (0 = never)"
    )
    b.add_argument("--gaussian-sigmas", type=float, nargs="+", default=[0.5, 1.0, 1.5, 2.0])
    b.add_argument("--median-radii", type=int, nargs="+", default=[1, 2, 3])
    _solver_flags(b, steps_default=800)
    _common_io(b)

    f = sub.add_parser("feature-map", help="write |grad u| and |grad^beta u| maps")
    f.add_argument("input")
    f.add_argument("--out", required=True, help="output directory")
    f.add_argument("--beta", type=float, default=1.5)
    f.add_argument("--mem", type=int, default=15)
    f.add_argument("--h", type=float, default=1.0)
    f.add_argument("--crop", type=_crop, metavar="X,Y,W,H")

    k = sub.add_parser("kernel", help="print GL weights and the two-sided stencil")
    k.add_argument("--alpha", type=float, default=1.67)
    k.add_argument("--mem", type=int, default=15)
    k.add_argument("--h", type=float, default=1.0)
    k.add_argument("--out", help="write here instead of stdout")

    r = sub.add_parser("response", help="CSV of omega^alpha over [0.01, 10]")
    r.add_argument("--alpha", type=float, nargs="+", default=[0.5, 1.0, 1.5])
    r.add_argument("--points", type=int, default=200)
    r.add_argument("--out", help="CSV path (default stdout)")
    return parser


def _edge_from(args) -> EdgeStopping:
    if args.k_fixed is not None:
        return EdgeStopping(form=args.edge, gamma=args.gamma, k_policy="fixed", k_threshold=args.k_fixed)
    return EdgeStopping(form=args.edge, gamma=args.gamma, k_policy="percentile", percentile=args.k_percentile)


def _solver_from(args) -> SolverConfig:
    return SolverConfig(
        alpha=args.alpha,
        beta=args.beta,
        h=args.h,
        dt=args.dt,
        n_mem=args.mem,
        n_steps=args.steps,
        edge=_edge_from(args),
        clamp_output=not args.no_clamp,
    )


def _require_file(path: str) -> None:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"{path}: no such file")


def _require_parent(path: Optional[str]) -> None:
    if path is None:
        return
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise FileNotFoundError(f"{path}: directory {parent} does not exist")


def manifest_from_args(args) -> RunManifest:
    """Turn parsed arguments into a validated manifest (no computation yet)."""
    cmd = args.command
    if cmd == "denoise":
        _require_file(args.input)
        if args.reference:
            _require_file(args.reference)
        for p in (args.out, args.csv, args.noisy_out):
            _require_parent(p)
        noise = NoiseSpec(args.sigma, args.seed) if args.sigma > 0 else None
        extra = {"reference": args.reference, "noisy_out": args.noisy_out}
        return RunManifest(
            cmd, (args.input,), args.out, args.csv, _solver_from(args), noise, (), args.crop, args.ssim, extra
        )
    if cmd == "benchmark":
        for path in args.inputs:
            _require_file(path)
        if os.path.exists(args.out) and not os.path.isdir(args.out):
            raise NotADirectoryError(f"{args.out}: not a directory")
        _require_parent(args.out)
        for p in (args.csv, args.table):
            _require_parent(p)
        solver = _solver_from(args)
        bench = BenchmarkConfig(
            sigmas=tuple(args.sigma),
            seed=args.seed,
            solver=solver,
            pm_dt=args.pm_dt,
            pm_steps=args.pm_steps,
            patience=args.patience or None,
            gaussian_sigmas=tuple(args.gaussian_sigmas),
            median_radii=tuple(args.median_radii),
            ssim_window=args.ssim,
        )
        if args.workers < 1:
            raise InvalidArgumentError(f"workers must be >= 1, got {args.workers}")
        extra = {"bench": bench, "workers": args.workers, "table": args.table}
        return RunManifest(
            cmd, tuple(args.inputs), args.out, args.csv, solver, None, bench.sigmas, args.crop, args.ssim, extra
        )
    if cmd == "feature-map":
        _require_file(args.input)
        _require_parent(args.out)
        kernel = build_two_sided_kernel(args.beta, args.mem, args.h)
        return RunManifest(cmd, (args.input,), args.out, crop=args.crop, extra={"kernel": kernel})
    if cmd == "kernel":
        _require_parent(args.out)
        extra = {"alpha": args.alpha, "mem": args.mem, "h": args.h}
        return RunManifest(cmd, out=args.out, extra=extra)
    if cmd == "response":
        _require_parent(args.out)
        if args.points < 2:
            raise InvalidArgumentError("--points must be at least 2")
        for a in args.alpha:
            if not np.isfinite(a) or a <= 0:
                raise InvalidArgumentError(f"alpha must be positive, got {a}")
        return RunManifest(cmd, out=args.out, extra={"alphas": tuple(args.alpha), "points": args.points})
    raise UsageError(f"unknown command {cmd!r}")


def _load(path: str, crop) -> np.ndarray:
    u = read_pgm(path)
    if crop is None:
        return u
    x, y, w, h = crop
    if y + h > u.shape[0] or x + w > u.shape[1]:
        raise InvalidArgumentError(f"crop {crop} exceeds image size {u.shape[1]}x{u.shape[0]}")
    return u[y : y + h, x : x + w].copy()


def _stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_denoise(m: RunManifest) -> int:
    u = _load(m.inputs[0], m.crop)
    reference = None
    if m.noise is not None:
        reference, u = u, add_gaussian_noise(u, m.noise)
    elif m.extra["reference"]:
        reference = _load(m.extra["reference"], m.crop)
        if reference.shape != u.shape:
            raise InvalidArgumentError(f"reference shape {reference.shape} differs from input {u.shape}")
    if m.extra["noisy_out"]:
        write_pgm(u, m.extra["noisy_out"])
    out = denoise(u, m.solver)
    write_pgm(out, m.out)
    if reference is not None:
        sigma = m.noise.sigma if m.noise is not None else 0.0
        scored = np.clip(out, 0, 255)
        row = {
            "image": _stem(m.inputs[0]),
            "method": "proposed",
            "sigma": repr(float(sigma)),
            "param_note": f"alpha={m.solver.alpha!r} beta={m.solver.beta!r} dt={m.solver.dt!r}",
            "best_step": str(m.solver.n_steps),
            "psnr_db": repr(psnr(scored, reference)),
            "ssim": repr(ssim(scored, reference, m.ssim_window)),
            "mse": repr(mse(scored, reference)),
        }
        if m.csv:
            append_rows(m.csv, [row])
        print(f"PSNR {float(row['psnr_db']):.4f} dB  SSIM {float(row['ssim']):.4f}")
    return EXIT_OK


def cmd_benchmark(m: RunManifest) -> int:
    os.makedirs(m.out, exist_ok=True)
    images = [(_stem(p), _load(p, m.crop)) for p in m.inputs]
    results = run_benchmark(images, m.extra["bench"], workers=m.extra["workers"])
    append_rows(m.csv or os.path.join(m.out, "results.csv"), [r.row() for r in results])
    write_table(m.extra["table"] or os.path.join(m.out, "table.csv"), results)
    write_images(m.out, results)
    for r in results:
        print(f"{r.image:>12} sigma={r.sigma:<5g} {r.method:<9} PSNR {r.psnr_db:8.4f}  SSIM {r.ssim:.4f}  step {r.best_step}")
    return EXIT_OK


def _normalise(a: np.ndarray) -> np.ndarray:
    lo, hi = float(a.min()), float(a.max())
    if hi == lo:
        return np.zeros_like(a)
    return (a - lo) * (255.0 / (hi - lo))


def cmd_feature_map(m: RunManifest) -> int:
    u = _load(m.inputs[0], m.crop)
    kernel = m.extra["kernel"]
    os.makedirs(m.out, exist_ok=True)
    stem = _stem(m.inputs[0])
    write_pgm(_normalise(central_gradient_magnitude(u)), os.path.join(m.out, f"{stem}_grad.pgm"))
    write_pgm(
        _normalise(gradient_magnitude(u, kernel)), os.path.join(m.out, f"{stem}_grad_beta{kernel.alpha:g}.pgm")
    )
    return EXIT_OK


def cmd_kernel(m: RunManifest) -> int:
    alpha, mem, h = m.extra["alpha"], m.extra["mem"], m.extra["h"]
    two_sided = build_two_sided_kernel(alpha, mem, h)
    _emit(format_gl_kernel(gl_coefficients(alpha, mem)) + format_kernel(two_sided), m.out)
    return EXIT_OK


def cmd_response(m: RunManifest) -> int:
    alphas = m.extra["alphas"]
    omega = np.logspace(-2, 1, m.extra["points"])
    lines = ["omega," + ",".join(f"alpha={a!r}" for a in alphas)]
    columns = [amplitude_response(a, omega) for a in alphas]
    for i, w in enumerate(omega):
        lines.append(",".join([repr(float(w))] + [repr(float(c[i])) for c in columns]))
    _emit("\n".join(lines) + "\n", m.out)
    return EXIT_OK


COMMANDS = {
    "denoise": cmd_denoise,
    "benchmark": cmd_benchmark,
    "feature-map": cmd_feature_map,
    "kernel": cmd_kernel,
    "response": cmd_response,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        manifest = manifest_from_args(args)
        return COMMANDS[manifest.command](manifest)
    except (InvalidArgumentError, UsageError) as exc:
        print(f"fracdenoise: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailureError, KernelConsistencyError) as exc:
        print(f"fracdenoise: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (PGMParseError, OSError) as exc:
        print(f"fracdenoise: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
