import csv
import io

import pytest

from percpso import experiments as ex
from percpso.bench import BenchmarkId, Study
from percpso.geom import BoardSpec, degree_from_radius, radius_from_degree
from percpso.swarm import ParameterSet, VelocityInit, run

TABLE_RADII = [0.000, 6.515, 9.213, 11.284, 13.029, 14.567, 15.958, 17.236, 18.426, 19.544]


def test_dataset_a():
    spec = ex.dataset_a_spec(1)
    assert len(spec.grid) == 10
    assert spec.total_runs == 1000
    radii = [spec.cell_geometry(BenchmarkId.SPHERICAL, k)[1] for k in range(10)]
    assert radii == pytest.approx(TABLE_RADII, abs=1e-3)
    assert spec.parameter_set is ParameterSet.CLERC and spec.domain_mode is Study.UNIFORM


def test_dataset_b():
    spec = ex.dataset_b_spec(1)
    assert len(spec.grid) == 30 and spec.grid[0] == 1 and spec.grid[-1] == 30
    assert spec.cell_geometry(BenchmarkId.ROSENBROCK, 0)[1] == pytest.approx(20.601, abs=1e-3)
    assert spec.cell_geometry(BenchmarkId.ROSENBROCK, 29)[1] == pytest.approx(112.838, abs=1e-3)


def test_critical_sweep():
    spec = ex.critical_sweep_spec(1)
    assert len(spec.grid) == 146
    assert spec.grid[0] == 4.370 and spec.grid[-1] == 4.515
    assert spec.cell_geometry(BenchmarkId.GRIEWANK, 0)[1] == pytest.approx(43.066, abs=1e-3)
    assert spec.cell_geometry(BenchmarkId.GRIEWANK, 145)[1] == pytest.approx(43.775, abs=1e-3)


def test_small_r_sweep():
    spec = ex.small_r_sweep_spec(1)
    assert len(spec.grid) == 91 and spec.grid_kind == "radius"
    assert spec.grid[-1] == 0.9 and spec.grid[50] == 0.5
    assert spec.cell_geometry(BenchmarkId.SPHERICAL, 90)[0] == pytest.approx(0.001909, abs=1e-6)
    assert spec.total_runs == 9100


def test_cross_domain():
    spec = ex.cross_domain_spec(1)
    assert spec.grid == (0.00151, 0.8, 4.512, 29.0)
    assert spec.total_runs == 2000
    assert spec.cell_geometry(BenchmarkId.SPHERICAL, 0)[1] == pytest.approx(0.801, abs=1e-3)
    assert spec.cell_geometry(BenchmarkId.RASTRIGIN, 2)[1] == pytest.approx(2.241, abs=1e-3)
    cfg = spec.cell_config(BenchmarkId.GRIEWANK, 1)
    assert (cfg.inertia, cfg.personal_coeff, cfg.social_coeff) == (0.6, 0.7, 0.7)
    assert cfg.board_side == 1200.0 and cfg.v_max == 600.0 and cfg.goal == 0.1


def test_cell_config_defaults():
    cfg = ex.dataset_a_spec().cell_config(BenchmarkId.SCHAFFER, 3)
    assert cfg.max_steps == 900 and cfg.population == 30 and cfg.goal == 0.01
    assert cfg.radius == radius_from_degree(0.3, BoardSpec(200.0, 30))


def test_spec_validation():
    with pytest.raises(ValueError):
        ex.SweepSpec("x", ())
    with pytest.raises(ValueError):
        ex.SweepSpec("x", (-1.0,))
    with pytest.raises(ValueError):
        ex.SweepSpec("x", (1.0,), runs_per_cell=0)
    with pytest.raises(ValueError):
        ex.SweepSpec("x", (1.0,), overrides={"wmax": 1})


@pytest.mark.parametrize("name", sorted(ex.DATASETS))
def test_seeds_collision_free(name):
    spec = ex.DATASETS[name](123)
    seeds = {
        ex.stable_seed(spec.master_seed, fn, gi, ri)
        for fn in spec.functions for gi in range(len(spec.grid)) for ri in range(spec.runs_per_cell)
    }
    assert len(seeds) == spec.total_runs


def test_seed_is_stable_and_keyed():
    s = ex.stable_seed(1, BenchmarkId.SPHERICAL, 0, 0)
    assert s == ex.stable_seed(1, BenchmarkId.SPHERICAL, 0, 0)
    assert 0 <= s < 2**64
    assert s != ex.stable_seed(2, BenchmarkId.SPHERICAL, 0, 0)
    assert s != ex.stable_seed(1, BenchmarkId.ROSENBROCK, 0, 0)


def tiny(seed=5, **kw):
    base = dict(grid=(0.0, 0.5, 4.512), runs_per_cell=3, master_seed=seed)
    base.update(kw)
    return ex.SweepSpec("tiny", **base)


def test_single_run_sweep():
    spec = ex.SweepSpec("one", (0.3,), functions=(BenchmarkId.GRIEWANK,), runs_per_cell=1, master_seed=9)
    res = ex.run_sweep(spec, workers=1)
    assert len(res.records) == 1
    cfg = spec.cell_config(BenchmarkId.GRIEWANK, 0)
    assert res.records[0].result == run(cfg, ex.stable_seed(9, BenchmarkId.GRIEWANK, 0, 0))


def test_run_sweep_counts_and_determinism():
    spec = tiny()
    a = ex.run_sweep(spec, workers=1)
    b = ex.run_sweep(spec, workers=1)
    assert len(a.records) == spec.total_runs == 45
    assert a.records == b.records
    for fn in spec.functions:
        for gi in range(3):
            assert len(a.cell(fn, gi)) == 3


def test_parallel_matches_sequential():
    spec = tiny(seed=8)
    assert ex.run_sweep(spec, workers=1).records == ex.run_sweep(spec, workers=3).records


def test_adding_grid_points_keeps_other_cells():
    small = ex.run_sweep(tiny(grid=(0.0, 0.5)), workers=1)
    big = ex.run_sweep(tiny(grid=(0.0, 0.5, 9.0)), workers=1)
    keep = [r for r in big.records if r.grid_index < 2]
    assert [r.result for r in keep] == [r.result for r in small.records]


def test_overrides_reach_configs():
    spec = tiny(overrides={"velocity_init": VelocityInit.ZERO, "inertia": 0.5})
    cfg = spec.cell_config(BenchmarkId.SPHERICAL, 1)
    assert cfg.velocity_init is VelocityInit.ZERO and cfg.inertia == 0.5


def test_summaries():
    res = ex.run_sweep(tiny(), workers=1)
    cells = res.cell_summaries()
    assert len(cells) == 15 and all(s.run_count == 3 for s in cells)
    assert [s.run_count for s in res.function_totals()] == [9] * 5
    assert [s.run_count for s in res.grid_totals()] == [15] * 3
    total = res.total()
    assert total.run_count == 45
    assert total.goal_percent == pytest.approx(100 * sum(r.result.success for r in res.records) / 45)
    names, m = res.correlations()
    assert names == ["R", "social_best", "personal_best", "global_best", "goals", "steps"]


def test_interval_totals():
    spec = ex.SweepSpec("r", (0.0, 0.25, 0.26, 0.75, 0.9), grid_kind="radius", runs_per_cell=1, master_seed=1)
    res = ex.run_sweep(spec, workers=1)
    counts = [s.run_count for s in res.interval_totals()]
    # 0.75 belongs to both of the last two ranges
    assert counts == [10, 5, 5, 10]


def _read(text):
    lines = text.splitlines()
    assert lines[0].startswith("# percpso")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_csv_outputs(tmp_path):
    res = ex.run_sweep(tiny(), workers=1)
    written = ex.write_outputs(res, tmp_path / "out", "# percpso test header")
    names = {p.name for p in written}
    assert {"runs.csv", "summary.csv", "plotdata_all.csv", "plotdata_f0.csv", "plotdata_f6.csv"} <= names
    runs = _read((tmp_path / "out" / "runs.csv").read_text())
    assert len(runs) == 45
    assert list(runs[0]) == list(ex.RUN_COLUMNS)
    first = res.records[0]
    assert float(runs[0]["best_global_val"]) == first.result.best_global_val
    assert int(runs[0]["seed"]) == first.result.seed
    summary = _read((tmp_path / "out" / "summary.csv").read_text())
    assert len(summary) == 15 + 5 + 1
    assert summary[-1]["fn"] == "all"
    plot = _read((tmp_path / "out" / "plotdata_all.csv").read_text())
    assert [float(r["a"]) for r in plot] == [0.0, 0.5, 4.512]


def test_fmt_round_trip():
    for x in (0.1, 1 / 3, 1e-300, 123456789.123, 43.76001):
        assert float(ex.fmt(x)) == x
    assert ex.fmt(True) == "1" and ex.fmt(None) == "" and ex.fmt(7) == "7"


def test_resolve_workers(monkeypatch):
    monkeypatch.setenv(ex.THREADS_ENV, "3")
    assert ex.resolve_workers() == 3
    monkeypatch.setenv(ex.THREADS_ENV, "0")
    assert ex.resolve_workers() >= 1
    monkeypatch.delenv(ex.THREADS_ENV)
    assert ex.resolve_workers(2) == 2
    with pytest.raises(ValueError):
        ex.resolve_workers(-1)
