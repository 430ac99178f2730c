import math

import numpy as np
import pytest

from schwarz1d import Domain
from schwarz1d.experiments import (
    ALL_LINEAR,
    FIXED,
    FIXED_PC,
    P_GRID,
    TABLES,
    ExperimentRow,
    iteration_sweep,
    table_experiment,
)

COARSE = Domain(-16, 16, 1.0, 0.001, 0.004)


def test_reference_values_cover_grid():
    for spec in TABLES.values():
        for n in spec.n_subs:
            for row in spec.rows:
                assert len(spec.reference[n, row.label]) == len(P_GRID)
    assert TABLES["T2"].published(2, "Fixed point", 45.0) == 31
    assert TABLES["T5"].published(256, "Fixed point + PC", 45.0) == 4
    assert TABLES["T7"].published(2, "N_pc", 5.0) == 3


def test_sweep_counts_positive_and_seeded():
    a = iteration_sweep(COARSE, 2, "5tx", (5.0, 45.0), ALL_LINEAR, seed=1)
    b = iteration_sweep(COARSE, 2, "5tx", (5.0, 45.0), ALL_LINEAR, seed=1)
    assert [r.k_used for r in a] == [r.k_used for r in b]
    assert all(r.k_used >= 1 for r in a)
    assert all(r.residual < 1e-10 for r in a)


def test_failed_cell_is_nan():
    rows = iteration_sweep(COARSE, 2, "neg_x2", (0.0,), (FIXED_PC,), max_k=5)
    assert math.isnan(rows[0].k_used) and math.isnan(rows[0].residual)
    rows = iteration_sweep(COARSE, 2, "neg_x2", (5.0,), (FIXED,), max_k=3)
    assert math.isnan(rows[0].k_used)


def test_sweep_needs_two_subdomains():
    with pytest.raises(ValueError):
        iteration_sweep(COARSE, 1, "zero")


def test_workers_do_not_change_counts():
    a = iteration_sweep(COARSE, 4, "5tx", (20.0,), ALL_LINEAR, workers=1)
    b = iteration_sweep(COARSE, 4, "5tx", (20.0,), ALL_LINEAR, workers=4)
    assert [r.k_used for r in a] == [r.k_used for r in b]


def test_table_layout_and_files(tmp_path):
    res = table_experiment("T4", "coarse")
    paths = res.write(tmp_path)
    assert [p.name for p in paths] == ["T4.csv", "T4_reference.csv", "T4_cells.csv", "T4_timings.csv"]
    grid = (tmp_path / "T4.csv").read_text().splitlines()
    assert grid[0].split(",")[0] == "solver" and len(grid) == 7
    ref = (tmp_path / "T4_reference.csv").read_text().splitlines()
    assert ref[2] == "Fixed point + PC," + ",".join(["3"] * 10)
    assert "wall_time" not in (tmp_path / "T4_cells.csv").read_text().splitlines()[0]
    assert "wall_time" in (tmp_path / "T4_timings.csv").read_text().splitlines()[0]
    assert res.count(2, "Fixed point + PC", 45.0) == pytest.approx(3, abs=1)
    with pytest.raises(KeyError):
        res.count(3, "Fixed point", 45.0)


def test_unknown_scale():
    with pytest.raises(ValueError):
        table_experiment("T2", "huge")


def test_row_fields():
    row = ExperimentRow(5.0, 2, "classical", "fixed", "Fixed point", 3, 1e-13, 0.1)
    assert ExperimentRow.FIELDS[-1] == "wall_time" and row.k_used == 3
