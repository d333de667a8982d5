import numpy as np
import pytest

from bgpwave import ModelParams, SolverConfig
from bgpwave.errors import OutputError, ParameterError
from bgpwave.grid import Grid
from bgpwave.sweep import (DEFAULT_OUTPUTS, PARAM_COLUMNS, RunRecord, SweepSpec, check_trends,
                           compare_kpp, emit_csv, level_slope, load_config, parse_config,
                           read_csv_columns, run_sweep, solver_config, sweep_columns)

P = ModelParams(1.0, 2.0, 10.0)


def small_spec(**kw):
    base = dict(params=P, a=12.0, h=0.1, axis="rho", values=(8.0, 10.0, 12.0))
    base.update(kw)
    return SweepSpec(**base)


class TestSpec:
    def test_values_must_increase(self):
        with pytest.raises(ParameterError):
            small_spec(values=(10.0, 8.0))
        with pytest.raises(ParameterError):
            small_spec(values=())

    def test_unknown_axis_and_output(self):
        with pytest.raises(ParameterError):
            small_spec(axis="h")
        with pytest.raises(ParameterError):
            small_spec(outputs=("c", "nonsense"))

    def test_invalid_point_rejected_up_front(self):
        with pytest.raises(ParameterError):
            small_spec(axis="rho", values=(0.5, 10.0))  # rho <= kappa
        with pytest.raises(ParameterError):
            small_spec(axis="a", values=(10.03, 12.0))

    def test_needs_rho(self):
        with pytest.raises(ParameterError):
            small_spec(params=ModelParams(1.0, 2.0))

    def test_point(self):
        spec = small_spec(axis="a", values=(8.0, 12.0))
        params, grid = spec.point(0)
        assert params == P and grid == Grid(8.0, 0.1)
        params, grid = small_spec().point(2)
        assert params.rho == 12.0 and grid.a == 12.0


@pytest.fixture(scope="module")
def warm_records():
    return run_sweep(small_spec())


def test_sweep_records(warm_records):
    assert [r.rho for r in warm_records] == [8.0, 10.0, 12.0]
    assert all(r.status == "ok" for r in warm_records)
    assert not warm_records[0].warm_started and warm_records[1].warm_started
    names, holds, _ = zip(*check_trends(warm_records, "rho"))
    assert all(holds)


def test_warm_and_cold_agree(warm_records):
    cold = run_sweep(small_spec(warm_start=False))
    for w, c in zip(warm_records, cold):
        assert abs(w.c - c.c) <= 10 * SolverConfig().tol_speed


def test_cold_sweep_independent_of_workers(tmp_path):
    spec = small_spec(warm_start=False, values=(9.0, 11.0))
    one, two = run_sweep(spec, workers=1), run_sweep(spec, workers=2)
    emit_csv(one, tmp_path / "one.csv", sweep_columns(spec))
    emit_csv(two, tmp_path / "two.csv", sweep_columns(spec))
    assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "two.csv").read_bytes()


def test_failed_point_recorded():
    spec = small_spec(values=(2.2, 10.0))
    recs = run_sweep(spec)
    assert recs[0].status == "regime" and "existence threshold" in recs[0].message
    assert recs[1].status == "ok"
    assert not all(h for _, h, _ in check_trends(recs, "rho"))


class TestTrends:
    def rec(self, i, **kw):
        return RunRecord(index=i, kappa=1.0, alpha=2.0, rho=10.0, a=40.0, h=0.02, **kw)

    def test_alpha_increasing(self):
        recs = [self.rec(i, c=c) for i, c in enumerate((2.0, 2.2, 2.5))]
        assert check_trends(recs, "alpha")[0][1]
        recs[2].c = 2.1
        assert not check_trends(recs, "alpha")[0][1]

    def test_kappa_needs_both(self):
        recs = [self.rec(i, c=c, x0=x) for i, (c, x) in enumerate(((1.4, -0.8), (2.4, 0.5)))]
        assert [h for _, h, _ in check_trends(recs, "kappa")] == [True, True]
        recs[1].x0 = -1.0
        assert [h for _, h, _ in check_trends(recs, "kappa")] == [True, False]

    def test_a_settles(self):
        recs = [RunRecord(index=i, kappa=1, alpha=2, rho=10, a=a, h=0.02, x0=x)
                for i, (a, x) in enumerate(((35.0, 0.43), (40.0, 0.45)))]
        assert check_trends(recs, "a")[0][1]
        recs[1].x0 = 0.6
        assert not check_trends(recs, "a")[0][1]


class TestCsv:
    def test_profile_round_trip(self, tmp_path, rng):
        cols = {"x": np.linspace(-1, 1, 9), "F": rng.uniform(0, 1, 9) * 1e-17,
                "Q": rng.normal(size=9) * 1e300}
        path = tmp_path / "p.csv"
        emit_csv(cols, path)
        back = read_csv_columns(path)
        assert list(back) == ["x", "F", "Q"]
        for k in cols:
            np.testing.assert_array_equal(back[k], cols[k])
        assert path.read_text(encoding="utf-8").splitlines()[0] == "x,F,Q"

    def test_record_columns(self, tmp_path, warm_records):
        path = tmp_path / "s.csv"
        spec = small_spec()
        emit_csv(warm_records, path, sweep_columns(spec))
        lines = path.read_text().splitlines()
        assert lines[0].split(",") == [*PARAM_COLUMNS, *DEFAULT_OUTPUTS, "status"]
        assert len(lines) == 4 and lines[1].endswith(",ok")
        assert float(lines[2].split(",")[len(PARAM_COLUMNS)]) == warm_records[1].c

    def test_dict_rows(self, tmp_path):
        path = tmp_path / "d.csv"
        emit_csv([{"level": 0.5, "slope": -0.25}], path)
        assert path.read_text() == "level,slope\n0.5,-0.25\n"

    def test_unequal_columns(self, tmp_path):
        with pytest.raises(ParameterError):
            emit_csv({"x": [1.0, 2.0], "F": [1.0]}, tmp_path / "bad.csv")

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OutputError, match="nope"):
            emit_csv({"x": [1.0]}, tmp_path / "nope" / "f.csv")


class TestConfig:
    def test_parse(self):
        text = """
        # reference run
        kappa = 1.5
        alpha=2   # trailing comment
        values = 1.2, 1.5 2
        check_regime = off
        tol = 1e-9
        tol_speed = 1e-7
        """
        cfg = parse_config(text)
        assert cfg == {"kappa": 1.5, "alpha": 2.0, "values": [1.2, 1.5, 2.0],
                       "check_regime": False, "tol_profile": 1e-9, "tol_speed": 1e-7}

    def test_later_tol_overrides(self):
        assert parse_config("tol_speed = 1e-7\ntol = 1e-9")["tol_speed"] == 1e-9

    @pytest.mark.parametrize("text", ["kappa 1", "colour = red", "kappa = one",
                                      "check_regime = maybe", "max_outer = 2.5"])
    def test_errors(self, text):
        with pytest.raises(ParameterError):
            parse_config(text)

    def test_error_names_line(self):
        with pytest.raises(ParameterError, match=r"run.cfg:2"):
            parse_config("kappa = 1\nbogus = 2", "run.cfg")

    def test_load_missing(self, tmp_path):
        with pytest.raises(OutputError):
            load_config(tmp_path / "missing.cfg")

    def test_solver_config(self):
        cfg = solver_config({"tol_profile": 1e-9, "kappa": 3.0, "relaxation": 0.5})
        assert cfg.tol_profile == 1e-9 and cfg.relaxation == 0.5
        assert cfg.tol_speed == SolverConfig().tol_speed


def test_level_slope_linear():
    g = Grid(2.0, 0.1)
    F = 0.5 - 0.2 * g.x
    assert level_slope(F, g, 0.4) == pytest.approx(-0.2, abs=1e-12)
    with pytest.raises(ParameterError):
        level_slope(F, g, 2.0)


def test_compare_kpp_small():
    g = Grid(12.0, 0.1)
    cmp_ = compare_kpp(P, g, levels=(0.25, 0.5, 0.75))
    assert cmp_.c_coupled < cmp_.c_kpp
    assert len(cmp_.slopes) == 3 and all(sc < 0 and sk < 0 for _, sc, sk in cmp_.slopes)
    assert list(cmp_.pair_columns()) == ["x", "F_coupled", "F_kpp"]
    assert cmp_.slope_rows()[1]["level"] == 0.5
