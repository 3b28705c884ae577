import math

import numpy as np
import pytest

from causalfrac.heatmap import colourize, read_ppm, write_heatmap
from causalfrac.sweep import COLUMNS, SweepConfig, compute_cell, grid_angles, grid_of, read_csv, run_sweep, write_csv


def test_grid_angles_inclusive():
    g = grid_angles(5)
    assert g[0] == 0.0 and g[-1] == math.pi
    assert np.allclose(np.diff(g), math.pi / 4)
    with pytest.raises(ValueError):
        SweepConfig(resolution=1)
    with pytest.raises(ValueError):
        SweepConfig(quantities=("lf", "entropy"))


def test_extended_cell_dominates_base():
    base = compute_cell(0.5, 2.5, SweepConfig(variant="base"))
    ext = compute_cell(0.5, 2.5, SweepConfig(variant="extended"))
    assert ext["lf"] >= base["lf"] - 1e-9
    assert ext["nslf"] == pytest.approx(base["nslf"], abs=1e-9)
    assert ext["nsf"] == pytest.approx(base["nsf"], abs=1e-9)
    assert base["bound"] == max(0.0, base["bound_raw"])


def test_failed_cell_is_nan():
    row = compute_cell(0.5, 2.5, SweepConfig(budget=10, quantities=("lf", "nsf")))
    assert math.isnan(row["lf"])
    assert row["gamma0"] == 0.5 and row["gamma1"] == 2.5


def test_sweep_rows_and_csv_roundtrip(tmp_path):
    cfg = SweepConfig(resolution=2, quantities=("nsf",), workers=1)
    rows = run_sweep(cfg)
    assert [(r["gamma0"], r["gamma1"]) for r in rows] == [(0, 0), (0, math.pi), (math.pi, 0), (math.pi, math.pi)]
    path = tmp_path / "s.csv"
    write_csv(rows, path)
    assert path.read_text().splitlines()[0] == ",".join(COLUMNS)
    back = read_csv(path)
    for a, b in zip(rows, back):
        for k in COLUMNS:
            assert (math.isnan(a[k]) and math.isnan(b[k])) or a[k] == b[k]
    assert grid_of(back, "nsf", 2).shape == (2, 2)


def test_parallel_matches_serial():
    cfg = SweepConfig(resolution=2, quantities=("nsf",), workers=1)
    par = run_sweep(SweepConfig(resolution=2, quantities=("nsf",), workers=2))
    assert [r["nsf"] for r in par] == [r["nsf"] for r in run_sweep(cfg)]


def test_colour_ramp():
    rgb = colourize(np.array([0.0, 1 / 3, 2 / 3, 1.0, 2.0, np.nan]))
    assert rgb.tolist() == [[0, 0, 0], [255, 0, 0], [255, 255, 0], [255, 255, 255], [255, 255, 255], [128, 128, 128]]


def test_heatmap_orientation(tmp_path):
    grid = np.zeros((3, 3))
    grid[2, 0] = 1.0  # largest gamma0, smallest gamma1: bottom right
    grid[0, 2] = np.nan  # smallest gamma0, largest gamma1: top left
    write_heatmap(tmp_path / "h.ppm", grid, grid_angles(3), "lf", scale=1)
    img = read_ppm(tmp_path / "h.ppm")
    assert img[2, 2].tolist() == [255, 255, 255]
    assert img[0, 0].tolist() == [128, 128, 128]
    assert img[2, 0].tolist() == [0, 0, 0]
