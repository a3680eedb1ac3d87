import csv
import json
import math

import pytest

from spinqrc import cli


def run_cli(argv):
    return cli.main(argv)


class TestRun:
    def test_emits_trace_and_negativity(self, tmp_path):
        out = tmp_path / "run"
        code = run_cli(["run", "--j-s", "1.0", "--gamma", "0.01", "--f", "0.2",
                        "--steps", "30", "--washout", "5", "--v-nodes", "4",
                        "--out", str(out), "--seed", "3"])
        assert code == 0
        with open(out / "trace.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 30
        assert set(rows[0]) == {"k", "t_k", "s_k"} | {
            f"sz_q{q}_v{v}" for q in range(1, 5) for v in range(1, 5)}
        assert float(rows[3]["t_k"]) == pytest.approx(3 * 2.5)
        assert 0.0 <= float(rows[0]["s_k"]) <= 1.0
        with open(out / "negativity.csv") as fh:
            neg = list(csv.DictReader(fh))
        assert len(neg) == 30 * 5  # injection instant + 4 substeps per step
        meta = json.loads((out / "run.meta.json").read_text())
        assert meta["parameters"]["j_s"] == 1.0

    def test_infinite_frequency(self, tmp_path):
        code = run_cli(["run", "--f", "inf", "--steps", "12", "--washout", "2",
                        "--v-nodes", "2", "--out", str(tmp_path)])
        assert code == 0
        meta = json.loads((tmp_path / "run.meta.json").read_text())
        assert meta["parameters"]["f"] == "inf"


class TestSweep:
    def _config(self, tmp_path, sweep):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"schema_version": 1, "sweep": sweep}))
        return path

    def test_sweep_and_report(self, tmp_path):
        cfg = self._config(tmp_path, {
            "j_s_grid": [1.0], "gammas": [0.01], "freqs": ["inf"],
            "tasks": ["delay"], "washout": 10, "disorder_realizations": 1,
            "train_sequences": 2, "train_injections": 60, "test_injections": 60,
            "diag_injections": 10, "tau_max": 1, "v_nodes": 5,
            "pca_d": 8, "pca_iterations": 10,
        })
        out = tmp_path / "sweep"
        assert run_cli(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        assert (out / "results.csv").exists()
        rep = tmp_path / "report"
        assert run_cli(["report", "--in", str(out / "results.csv"),
                        "--out", str(rep)]) == 0
        assert (rep / "max_entanglement.csv").exists()

    def test_empty_grid_is_usage_error(self, tmp_path):
        cfg = self._config(tmp_path, {"j_s_grid": []})
        assert run_cli(["sweep", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 2

    def test_missing_config_is_usage_error(self, tmp_path):
        assert run_cli(["sweep", "--config", str(tmp_path / "nope.json"),
                        "--out", str(tmp_path)]) == 2

    def test_wrong_schema_version(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"schema_version": 99, "sweep": {}}))
        assert run_cli(["sweep", "--config", str(path), "--out", str(tmp_path)]) == 2


class TestValidate:
    def test_exit_zero_on_pass(self, capsys):
        assert run_cli(["validate"]) == 0
        out = capsys.readouterr().out
        assert "[PASS]" in out
        assert "[FAIL]" not in out


class TestParser:
    def test_unknown_command_exits_2(self):
        with pytest.raises(SystemExit) as err:
            run_cli(["frobnicate"])
        assert err.value.code == 2
