"""Grid sweeps of the interleaved Bell tests over (gamma0, gamma1) in [0, pi]^2."""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CausalFracError
from .fractions import local_fraction, ns_fraction, ns_local_fraction, signalling_lower_bound
from .functions import DEFAULT_BUDGET
from .heatmap import write_heatmap
from .quantum import ScenarioParams, interleaved_distribution

logger = logging.getLogger(__name__)

WORKERS_ENV = "CAUSALFRAC_WORKERS"
COLUMNS = ("gamma0", "gamma1", "lf", "nslf", "nsf", "bound_raw", "bound")
QUANTITIES = ("lf", "nslf", "nsf", "bound")


@dataclass(frozen=True)
class SweepConfig:
    resolution: int = 100
    variant: str = "base"
    quantities: tuple[str, ...] = QUANTITIES
    method: str = "simplex"
    budget: int | None = DEFAULT_BUDGET
    workers: int | None = None

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("sweep resolution must be at least 2")
        bad = set(self.quantities) - set(QUANTITIES)
        if bad:
            raise ValueError(f"unknown quantities {sorted(bad)}; choose from {QUANTITIES}")


def grid_angles(resolution: int) -> np.ndarray:
    """Inclusive grid k * pi / (resolution - 1)."""
    return np.array([k * math.pi / (resolution - 1) for k in range(resolution)])


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def compute_cell(gamma0: float, gamma1: float, config: SweepConfig) -> dict[str, float]:
    """One CSV record; quantities not requested (or whose LP failed) are NaN."""
    row = dict.fromkeys(COLUMNS, math.nan)
    row["gamma0"], row["gamma1"] = gamma0, gamma1
    wanted = set(config.quantities)
    if "bound" in wanted:
        wanted |= {"lf", "nslf", "nsf"}
    try:
        d = interleaved_distribution(ScenarioParams(gamma0, gamma1, config.variant))
        opts = dict(budget=config.budget, method=config.method)
        if "lf" in wanted:
            row["lf"] = local_fraction(d, **opts).value
        if "nslf" in wanted:
            row["nslf"] = ns_local_fraction(d, **opts).value
        if "nsf" in wanted:
            row["nsf"] = ns_fraction(d, method=config.method).value
        if "bound" in wanted:
            row["bound_raw"], row["bound"] = signalling_lower_bound(row["lf"], row["nsf"], row["nslf"])
    except CausalFracError as exc:
        logger.warning("cell (%.6g, %.6g) failed: %s", gamma0, gamma1, exc)
    return row


def _cell(args):
    return compute_cell(*args)


def run_sweep(config: SweepConfig) -> list[dict[str, float]]:
    """Rows in row-major order: gamma0 is the outer loop, gamma1 the inner one."""
    gammas = grid_angles(config.resolution)
    jobs = [(float(g0), float(g1), config) for g0 in gammas for g1 in gammas]
    workers = config.workers or default_workers()
    if workers <= 1:
        return [_cell(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_cell, jobs, chunksize=max(1, len(jobs) // (8 * workers))))


def grid_of(rows: list[dict[str, float]], column: str, resolution: int) -> np.ndarray:
    return np.array([r[column] for r in rows], dtype=float).reshape(resolution, resolution)


def write_csv(rows: list[dict[str, float]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(float(r[k])) for k in COLUMNS})


def read_csv(path: str | Path) -> list[dict[str, float]]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in r.items()} for r in csv.DictReader(fh)]


def write_outputs(rows, config: SweepConfig, out_dir: str | Path, scale: int = 4) -> list[Path]:
    """CSV plus one heatmap per requested quantity; returns written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"interleaved-bell-{config.variant}-res{config.resolution}"
    written = [out / f"{stem}.csv"]
    write_csv(rows, written[0])
    gammas = grid_angles(config.resolution)
    for q in config.quantities:
        img = out / f"{stem}-{q}.ppm"
        side = write_heatmap(img, grid_of(rows, q, config.resolution), gammas, q, scale)
        written += [img, side]
    return written
