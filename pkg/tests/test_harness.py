import json

import numpy as np
import pytest

from hardylab import __version__
from hardylab.carleson import DiskMeasure
from hardylab.harness import cli
from hardylab.harness.config import ConfigError, ExperimentConfig, load_config, parse_config
from hardylab.harness.report import Check, Record, Report, to_jsonable

# default resolution, reduced counts
SMALL = """\
[run]
seed = 3
[hankel]
ladder = 16, 32
[carleson]
n_measures = 2
n_atoms = 6
corpus_size = 20
corpus_degree = 16
embedding_pairs = 2
"""

# too coarse to resolve the logarithmic symbol
COARSE = SMALL.replace("[run]", "[grid]\nn = 1024\n[arcs]\nj = 6\n[scan]\nkmax = 4\nn_angles = 32\n[run]")


class TestConfig:
    def test_defaults(self):
        cfg = parse_config("")
        assert cfg == ExperimentConfig()
        assert cfg.grid_n == 4096 and cfg.ladder == (16, 32, 64, 128)

    def test_values(self):
        cfg = parse_config(SMALL)
        assert cfg.seed == 3 and cfg.ladder == (16, 32) and cfg.corpus_degree == 16

    def test_unknown_key_line(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("[run]\nseed = 1\nsead = 2\n")
        assert exc.value.line == 3 and "sead" in str(exc.value)

    def test_unknown_section_line(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("[run]\nseed = 1\n\n[nope]\nx = 1\n")
        assert exc.value.line == 4

    def test_bad_value_line(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("[grid]\noffset = maybe\n")
        assert exc.value.line == 2

    def test_out_of_range_line(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("[run]\nseed = 1\n[grid]\nn = 1000\n")
        assert exc.value.line == 4 and "power of two" in str(exc.value)

    def test_unparseable(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("[run]\nno separator here\n")
        assert exc.value.line == 2

    @pytest.mark.parametrize("text", ["[hankel]\nladder = 32, 16\n", "[symbols]\nnames = zbar, foo\n",
                                      "[weights]\nalphas = 0.5, 1.0\n", "[scan]\nkmax = 20\n"])
    def test_bounds(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_overrides_validate(self):
        cfg = ExperimentConfig().with_overrides(seed=5, kmax=6)
        assert cfg.seed == 5 and cfg.kmax == 6
        with pytest.raises(ConfigError):
            ExperimentConfig().with_overrides(grid_n=100)

    def test_digest_tracks_values(self):
        a = ExperimentConfig()
        assert a.digest() == ExperimentConfig().digest()
        assert a.digest() != a.with_overrides(seed=1).digest()

    def test_relative_measure_file(self, tmp_path):
        (tmp_path / "c.ini").write_text("[carleson]\nmeasure_file = m.txt\n")
        assert load_config(tmp_path / "c.ini").measure_file == str(tmp_path / "m.txt")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.ini")


class TestReport:
    def test_check_relations(self):
        assert Check("a", 1.0, 1.0 + 1e-13, "==", 1e-12).passed
        assert not Check("b", 2.0, 1.0, "<=").passed
        assert Check("c", 2.0, 1.0, ">=").passed
        assert not Check("d", float("nan"), 1.0, "<=").passed
        assert Check("e", True, True, "is").passed
        with pytest.raises(ValueError):
            Check("f", 1, 1, "<")

    def test_jsonable(self):
        out = to_jsonable({"a": np.float64(1.5), "b": 1 + 2j, "c": np.arange(2), "d": np.bool_(True)})
        assert out == {"a": 1.5, "b": [1.0, 2.0], "c": [0, 1], "d": True}

    def test_round_trip(self, tmp_path):
        rep = Report("demo", __version__, "abc", 7)
        rec = rep.add(Record("r", {"x": 1}))
        rec.values = {"v": 0.1 + 0.2}
        rec.check("le", 0.1, 0.2)
        rep.add(Record("broken", error="ConsistencyError: mismatch"))
        rep.add_table("t", ["a", "b"], [[1, 0.1 + 0.2]])
        back = Report.from_json(rep.to_json())
        assert back.to_json() == rep.to_json()
        assert not back.passed and back.failures() == [("broken", "error")]
        paths = rep.write(tmp_path)
        assert [p.name for p in paths] == ["demo.json", "demo_t.csv"]
        assert (tmp_path / "demo_t.csv").read_text() == "a,b\n1,0.30000000000000004\n"


class TestCLI:
    def test_passing_run(self, tmp_path, capsys):
        cfg = tmp_path / "small.ini"
        cfg.write_text(SMALL)
        assert cli.main(["weights", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
        assert "PASS weights" in capsys.readouterr().out
        data = json.loads((tmp_path / "o" / "weights.json").read_text())
        assert data["passed"] and data["seed"] == 3 and data["version"] == __version__
        assert (tmp_path / "o" / "weights_a2.csv").exists()

    def test_failing_run(self, tmp_path, capsys):
        cfg = tmp_path / "coarse.ini"
        cfg.write_text(COARSE)
        assert cli.main(["norms", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
        assert "failed: symbol:log" in capsys.readouterr().out

    def test_config_error(self, tmp_path, capsys):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[run]\nseed = -1\n")
        assert cli.main(["weights", "--config", str(cfg), "--out", str(tmp_path)]) == 2
        assert "bad.ini:2" in capsys.readouterr().err

    def test_command_line_override(self, tmp_path):
        out = tmp_path / "o"
        assert cli.main(["weights", "--out", str(out), "--seed", "9", "--kmax", "6"]) == 0
        assert json.loads((out / "weights.json").read_text())["seed"] == 9

    def test_unknown_subcommand(self, tmp_path):
        with pytest.raises(SystemExit):
            cli.main(["bogus", "--out", str(tmp_path)])

    def test_measure_file(self, tmp_path):
        DiskMeasure([0.5, 0.3j], [0.1, 0.2], "handmade").save(tmp_path / "m.txt")
        cfg = tmp_path / "c.ini"
        cfg.write_text(SMALL + "measure_file = m.txt\n")
        assert cli.main(["carleson", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
        data = json.loads((tmp_path / "o" / "carleson.json").read_text())
        rec = next(r for r in data["records"] if r["name"] == "fixture:measure_file")
        assert rec["values"]["provenance"] == "handmade"

    def test_deterministic(self, tmp_path):
        for run in ("a", "b"):
            assert cli.main(["norms", "--out", str(tmp_path / run), "--seed", "4"]) == 0
        a = (tmp_path / "a" / "norms.json").read_bytes()
        assert a == (tmp_path / "b" / "norms.json").read_bytes()
        c = tmp_path / "c"
        cli.main(["norms", "--out", str(c), "--seed", "5"])
        assert (c / "norms.json").read_bytes() != a
