"""Benchmark harness: seeded noise, baseline sweeps and best-step scoring.

Every (image, sigma, method) cell is independent. Cells are computed in any
order, possibly in worker processes, and then reported in a fixed order, so
the CSV files and images do not depend on the worker count.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._validation import InvalidArgumentError, check_image, check_int, check_real
from .baselines import FilterSpec, gaussian_filter, median_filter
from .diffusion import EdgeStopping, SolverConfig, denoise, perona_malik
from .metrics import NoiseSpec, add_gaussian_noise, mse, psnr, ssim
from .pgm import write_pgm

__all__ = [
    "CSV_FIELDS",
    "METHODS",
    "BenchmarkConfig",
    "CellResult",
    "BestTracker",
    "run_cell",
    "run_benchmark",
    "append_rows",
    "table_rows",
    "write_table",
    "write_images",
]

CSV_FIELDS = ("image", "method", "sigma", "param_note", "best_step", "psnr_db", "ssim", "mse")
METHODS = ("noisy", "gaussian", "median", "pm", "proposed")


@dataclass(frozen=True)
class BenchmarkConfig:
    """What to run for each (image, sigma) pair.

    ``solver.n_steps`` and ``pm_steps`` are step budgets; the reported
    figure is the best PSNR over all steps up to the budget. With
    ``patience`` set, an iterative method stops early once its PSNR has not
    improved for that many steps.
    """

    sigmas: tuple = (10.0, 25.0)
    seed: int = 0
    solver: SolverConfig = field(default_factory=lambda: SolverConfig(n_steps=800))
    pm_edge: Optional[EdgeStopping] = None
    pm_dt: float = 0.2
    pm_steps: int = 2000
    patience: Optional[int] = 60
    gaussian_sigmas: tuple = (0.5, 1.0, 1.5, 2.0)
    median_radii: tuple = (1, 2, 3)
    ssim_window: str = "global"

    def __post_init__(self):
        if not self.sigmas:
            raise InvalidArgumentError("at least one noise level is required")
        for s in self.sigmas:
            check_real(s, "sigma", low=0)
        check_int(self.seed, "seed")
        check_real(self.pm_dt, "pm_dt", low=0, high=0.25, low_open=True)
        check_int(self.pm_steps, "pm_steps", low=1)
        if self.patience is not None:
            check_int(self.patience, "patience", low=1)
        if self.solver.n_steps < 1:
            raise InvalidArgumentError("the proposed method needs at least one step")
        for s in self.gaussian_sigmas:
            check_real(s, "gaussian sigma", low=0, low_open=True)
        for r in self.median_radii:
            check_int(r, "median radius", low=1)
        if self.ssim_window not in ("global", "windowed"):
            raise InvalidArgumentError(f"unknown SSIM window {self.ssim_window!r}")

    @property
    def pm_edge_stopping(self):
        # PM shares the proposed method's edge-stopping settings unless overridden
        return self.solver.edge if self.pm_edge is None else self.pm_edge


@dataclass(frozen=True)
class CellResult:
    image: str
    method: str
    sigma: float
    param_note: str
    best_step: int
    psnr_db: float
    ssim: float
    mse: float
    output: np.ndarray = field(repr=False, compare=False)

    def row(self) -> dict:
        return {
            "image": self.image,
            "method": self.method,
            "sigma": repr(float(self.sigma)),
            "param_note": self.param_note,
            "best_step": str(self.best_step),
            "psnr_db": repr(float(self.psnr_db)),
            "ssim": repr(float(self.ssim)),
            "mse": repr(float(self.mse)),
        }


class _Plateau(Exception):
    pass


class BestTracker:
    """Observer that keeps the clamped iterate with the highest PSNR.

    With ``patience`` it aborts the run (via an exception caught by
    :meth:`run`) after that many steps without improvement.
    """

    def __init__(self, clean: np.ndarray, patience: Optional[int] = None):
        self.clean = clean
        self.patience = patience
        self.best_psnr = -math.inf
        self.best_step = 0
        self.best = None

    def __call__(self, step: int, grid: np.ndarray) -> None:
        clamped = np.clip(grid, 0.0, 255.0)
        value = psnr(clamped, self.clean)
        if value > self.best_psnr:
            self.best_psnr, self.best_step, self.best = value, step, clamped
        elif self.patience is not None and step - self.best_step >= self.patience:
            raise _Plateau

    def run(self, solver, *args, **kwargs) -> None:
        try:
            solver(*args, observer=self, **kwargs)
        except _Plateau:
            pass


def _result(image, method, sigma, note, step, out, clean, window) -> CellResult:
    return CellResult(
        image, method, sigma, note, step, psnr(out, clean), ssim(out, clean, window), mse(out, clean), out
    )


def _best_filter(clean, noisy, specs, apply):
    best = None
    for spec in specs:
        out = np.clip(apply(noisy, spec), 0.0, 255.0)
        value = psnr(out, clean)
        if best is None or value > best[0]:
            best = (value, spec, out)
    return best[1], best[2]


def run_cell(image: str, clean, sigma: float, method: str, cfg: BenchmarkConfig) -> CellResult:
    """Run one method on one noisy image and report its best configuration."""
    clean = check_image(clean, name="clean")
    noisy = add_gaussian_noise(clean, NoiseSpec(sigma, cfg.seed))
    window = cfg.ssim_window
    if method == "noisy":
        out = np.clip(noisy, 0.0, 255.0)
        return _result(image, method, sigma, f"seed={cfg.seed}", 0, out, clean, window)
    if method == "gaussian":
        specs = [FilterSpec("gaussian", max(1, math.ceil(3 * s)), s) for s in cfg.gaussian_sigmas]
        spec, out = _best_filter(clean, noisy, specs, gaussian_filter)
        return _result(image, method, sigma, f"sigma={spec.sigma!r} radius={spec.radius}", 1, out, clean, window)
    if method == "median":
        specs = [FilterSpec("median", r) for r in cfg.median_radii]
        spec, out = _best_filter(clean, noisy, specs, median_filter)
        return _result(image, method, sigma, f"radius={spec.radius}", 1, out, clean, window)
    tracker = BestTracker(clean, cfg.patience)
    if method == "pm":
        edge = cfg.pm_edge_stopping
        tracker.run(perona_malik, noisy, edge, cfg.pm_dt, cfg.pm_steps)
        note = f"dt={cfg.pm_dt!r} max_steps={cfg.pm_steps} {_edge_note(edge)}"
    elif method == "proposed":
        s = cfg.solver
        tracker.run(denoise, noisy, s)
        note = (
            f"alpha={s.alpha!r} beta={s.beta!r} dt={s.dt!r} N={s.n_mem} "
            f"max_steps={s.n_steps} {_edge_note(s.edge)}"
        )
    else:
        raise InvalidArgumentError(f"unknown method {method!r}")
    return _result(image, method, sigma, note, tracker.best_step, tracker.best, clean, window)


def _edge_note(edge) -> str:
    if not isinstance(edge, EdgeStopping):
        return f"g={edge!r}"
    k = f"K=p{edge.percentile!r}" if edge.k_policy == "percentile" else f"K={edge.k_threshold!r}"
    return f"g={edge.form} gamma={edge.gamma} {k}"


def _run_cell_args(args):
    return run_cell(*args)


def run_benchmark(
    images: Sequence[tuple[str, np.ndarray]], cfg: BenchmarkConfig, workers: int = 1
) -> list[CellResult]:
    """All cells for every image and noise level, in (image, sigma, method) order."""
    workers = check_int(workers, "workers", low=1)
    names = [name for name, _ in images]
    if len(set(names)) != len(names):
        raise InvalidArgumentError(f"image names must be unique, got {names}")
    jobs = [(name, img, s, m, cfg) for name, img in images for s in cfg.sigmas for m in METHODS]
    if workers == 1:
        return [_run_cell_args(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order whatever order the cells finish in
        return list(pool.map(_run_cell_args, jobs))


def _check_header(path, expected) -> None:
    with open(path, newline="") as fh:
        header = next(csv.reader(fh), None)
    if header is not None and tuple(header) != tuple(expected):
        raise OSError(f"{path}: existing CSV header {header} does not match {list(expected)}")


def append_rows(path, rows: Sequence[dict], fields: Sequence[str] = CSV_FIELDS) -> None:
    """Append rows to a CSV file, writing the header only if the file is new or empty."""
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    if not fresh:
        _check_header(path, fields)
    with open(path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(fields), lineterminator="\n")
        if fresh:
            writer.writeheader()
        writer.writerows(rows)


def table_rows(results: Sequence[CellResult]) -> list[dict]:
    """One row per (image, sigma, metric) with a column per method."""
    cells: dict = {}
    for r in results:
        key = (r.image, r.sigma)
        cells.setdefault(key, {})[r.method] = r
    rows = []
    for (image, sigma), by_method in cells.items():
        for metric in ("psnr_db", "ssim"):
            row = {"image": image, "sigma": repr(float(sigma)), "metric": metric}
            for m in METHODS:
                row[m] = repr(float(getattr(by_method[m], metric))) if m in by_method else ""
            rows.append(row)
    return rows


def write_table(path, results: Sequence[CellResult]) -> None:
    append_rows(path, table_rows(results), ("image", "sigma", "metric") + METHODS)


def write_images(directory, results: Sequence[CellResult]) -> list[str]:
    paths = []
    for r in results:
        path = os.path.join(directory, f"{r.image}_s{r.sigma:g}_{r.method}.pgm")
        write_pgm(r.output, path)
        paths.append(path)
    return paths
