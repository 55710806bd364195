import json
import math

import pytest

from genbound.cli import (
    build_parser, emit, expand_grid, load_config, main, parse_config, parse_value, read_rows,
    resolve_config, run,
)
from genbound.exceptions import ConfigError, OutputError
from genbound.schemas.experiment import ExperimentConfig, ExperimentName, OutputFormat, ResultRow

BOUNDS_CONFIG = """\
experiment = bounds_eval
# two theorems at two ranks
mode = closed_form
theorem = thm1, thm2
r_w = 1, 2   # ranks
eps = 0.5
"""


def sample_rows():
    return [
        ResultRow.compare("bounds_eval", {"theorem": "thm1", "r_w": 2, "eps": 0.1}, 1.0 / 3, 2.5),
        ResultRow.compare("bounds_eval", {"theorem": "thm2", "r_w": 1, "eps": 0.5}, 3.0, 2.0),
    ]


class TestConfig:
    def test_parse_value(self):
        assert parse_value(" 3 ") == 3
        assert parse_value("0.25") == 0.25
        assert parse_value("1e-3") == 1e-3
        assert parse_value("thm1") == "thm1"

    def test_parse_config(self):
        config = parse_config(BOUNDS_CONFIG, ExperimentName.BOUNDS_EVAL)
        assert config.grid == {"mode": ["closed_form"], "theorem": ["thm1", "thm2"], "r_w": [1, 2],
                               "eps": [0.5]}
        assert config.seeds == [0]

    def test_settings_keys(self):
        text = "seeds = 1, 2\nformat = json\noutput_path = out/rows.json\neps = 1.0\n"
        config = parse_config(text, ExperimentName.BOUNDS_EVAL)
        assert config.seeds == [1, 2]
        assert config.format == OutputFormat.JSON
        assert config.output_path == "out/rows.json"

    @pytest.mark.parametrize("text", [
        "experiment = gap_study\neps = 1.0\n",
        "eps 1.0\n",
        "# nothing here\n",
        "eps = \n",
        "= 3\n",
        "eps = 1\nseeds = \n",
        "experiment = \neps = 1\n",
    ])
    def test_invalid_configs(self, text):
        with pytest.raises(ConfigError):
            parse_config(text, ExperimentName.BOUNDS_EVAL)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / "missing.cfg"), ExperimentName.BOUNDS_EVAL)

    def test_expand_grid(self):
        points = expand_grid(parse_config(BOUNDS_CONFIG, ExperimentName.BOUNDS_EVAL))
        assert len(points) == 4
        assert {(p["theorem"], p["r_w"]) for p in points} == {("thm1", 1), ("thm1", 2), ("thm2", 1), ("thm2", 2)}
        assert all(p["B_x"] == 1.0 for p in points)

    def test_unknown_parameter(self):
        config = ExperimentConfig(experiment=ExperimentName.BOUNDS_EVAL, grid={"gamma": [1]})
        with pytest.raises(ConfigError):
            expand_grid(config)


class TestRun:
    def test_rows_carry_point_and_seed(self):
        config = parse_config(BOUNDS_CONFIG + "seeds = 3, 4\n", ExperimentName.BOUNDS_EVAL)
        rows = run(config, emit_output=False)
        assert len(rows) == 8
        assert [row.params["seed"] for row in rows] == [3] * 4 + [4] * 4
        assert all(row.runtime_ms == 0.0 for row in rows)

    def test_deterministic(self):
        config = parse_config("mode = lemma_aux2\npoints = 50\nr_w = 4\nseeds = 1, 2\n",
                              ExperimentName.BOUNDS_EVAL)
        first = run(config, emit_output=False)
        second = run(config, emit_output=False)
        assert [r.measured for r in first] == [r.measured for r in second]

    def test_invalid_point_becomes_config_error(self):
        config = parse_config("mode = closed_form\ntheorem = thm9\n", ExperimentName.BOUNDS_EVAL)
        with pytest.raises(ConfigError):
            run(config, emit_output=False)

    def test_timing_when_enabled(self, settings_env):
        settings_env(emit_timing="true")
        config = parse_config(BOUNDS_CONFIG, ExperimentName.BOUNDS_EVAL)
        assert all(row.runtime_ms >= 0.0 for row in run(config, emit_output=False))


class TestEmit:
    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "rows.csv"
        rows = sample_rows()
        emit(rows, OutputFormat.CSV, str(path))
        header = path.read_text().splitlines()[0]
        assert header == "experiment,theorem,r_w,eps,measured,theoretical,pass,runtime_ms"
        back = read_rows(str(path), OutputFormat.CSV)
        assert [(r.measured, r.theoretical, r.passed) for r in back] == \
            [(r.measured, r.theoretical, r.passed) for r in rows]
        assert back[0].params["theorem"] == "thm1"
        assert back[0].params["r_w"] == 2

    def test_csv_booleans_lowercase(self, tmp_path):
        path = tmp_path / "rows.csv"
        emit(sample_rows(), OutputFormat.CSV, str(path))
        lines = path.read_text().splitlines()
        assert lines[1].split(",")[-2] == "true"
        assert lines[2].split(",")[-2] == "false"

    def test_empty_csv_has_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit([], OutputFormat.CSV, str(path))
        assert path.read_text().splitlines() == ["experiment,measured,theoretical,pass,runtime_ms"]

    def test_json_single_row(self, tmp_path):
        path = tmp_path / "rows.json"
        emit(sample_rows()[:1], OutputFormat.JSON, str(path))
        records = json.loads(path.read_text())
        assert len(records) == 1
        assert records[0]["pass"] is True
        assert records[0]["theorem"] == "thm1"
        back = read_rows(str(path), OutputFormat.JSON)
        assert back[0].measured == 1.0 / 3

    def test_non_finite_values_match_across_formats(self, tmp_path):
        rows = [ResultRow.compare("bounds_eval", {"eps": math.inf}, 1.0, math.inf),
                ResultRow.compare("bounds_eval", {"eps": 0.5}, math.nan, 2.0)]
        json_path, csv_path = tmp_path / "rows.json", tmp_path / "rows.csv"
        emit(rows, OutputFormat.JSON, str(json_path))
        emit(rows, OutputFormat.CSV, str(csv_path))

        def reject(token):
            raise ValueError(f"bare {token} in JSON output")

        records = json.loads(json_path.read_text(), parse_constant=reject)
        assert [(r["eps"], r["measured"], r["theoretical"]) for r in records] == \
            [("inf", 1.0, "inf"), (0.5, "nan", 2.0)]
        assert csv_path.read_text().splitlines()[1] == "bounds_eval,inf,1,inf,true,0"

        for fmt, path in ((OutputFormat.JSON, json_path), (OutputFormat.CSV, csv_path)):
            back = read_rows(str(path), fmt)
            assert back[0].params["eps"] == math.inf and back[0].theoretical == math.inf
            assert back[0].passed and not back[1].passed
            assert math.isnan(back[1].measured)

    def test_reserved_parameter_names(self, tmp_path):
        row = ResultRow.compare("bounds_eval", {"pass": 1}, 0.0, 1.0)
        with pytest.raises(OutputError):
            emit([row], OutputFormat.CSV, str(tmp_path / "rows.csv"))

    def test_unwritable_path(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(OutputError):
            emit(sample_rows(), OutputFormat.CSV, str(blocker / "rows.csv"))


class TestMain:
    def write_config(self, tmp_path, text):
        path = tmp_path / "experiment.cfg"
        path.write_text(text)
        return str(path)

    def test_passing_run(self, tmp_path):
        out = tmp_path / "bounds.csv"
        assert main(["bounds_eval", "--config", self.write_config(tmp_path, BOUNDS_CONFIG),
                     "--out", str(out)]) == 0
        assert len(read_rows(str(out), OutputFormat.CSV)) == 4

    def test_failing_rows(self, tmp_path):
        text = "mode = n_slope\nslope_tol = -1\n"
        out = tmp_path / "decay.json"
        code = main(["decay_study", "--config", self.write_config(tmp_path, text), "--out", str(out),
                     "--format", "json"])
        assert code == 1
        assert json.loads(out.read_text())[0]["pass"] is False

    @pytest.mark.parametrize("text", ["mode = bogus\n", "gamma = 1\n", "experiment = gap_study\n"])
    def test_errors_exit_two(self, tmp_path, capsys, text):
        code = main(["bounds_eval", "--config", self.write_config(tmp_path, text),
                     "--out", str(tmp_path / "x.csv")])
        assert code == 2
        assert "config-error" in capsys.readouterr().err

    def test_resolve_defaults(self):
        args = build_parser().parse_args(["gap_study", "--seed", "4", "--format", "json"])
        config = resolve_config(args)
        assert config.seeds == [4]
        assert config.output_path == "gap_study.json"
        assert config.format == OutputFormat.JSON

    def test_config_output_path_kept(self, tmp_path):
        path = self.write_config(tmp_path, "output_path = mine.csv\neps = 1.0\n")
        config = resolve_config(build_parser().parse_args(["bounds_eval", "--config", path]))
        assert config.output_path == "mine.csv"
