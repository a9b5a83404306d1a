import json

import pytest

from indexbeat.cli import (EXIT_IO, EXIT_NON_VIABLE, EXIT_OK,
                           EXIT_VALIDATION, main)

MARKET = {"r": 0.02, "mu": [0.08, 0.05],
          "sigma": [[0.2, 0.0], [0.1, 0.3]], "labels": ["index", "acme"]}


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "market.json"
    path.write_text(json.dumps(MARKET))
    return str(path)


class TestAnalyze:
    def test_json_report(self, config_path, tmp_path):
        out = tmp_path / "report.json"
        rc = main(["analyze", "--config", config_path,
                   "--epsilon", "0.5", "--delta", "0.5",
                   "--horizon", "100", "--horizon", "200",
                   "--out", str(out)])
        assert rc == EXIT_OK
        report = json.loads(out.read_text())
        assert report["risk_profiles"][0]["theta"] == pytest.approx([0.3, 0.0])
        verdicts = [r["verdict"] for r in report["reports"]]
        assert verdicts == ["SCAPM_APPROX_HOLDS", "OUTPERFORMS_WHP"]

    def test_stdout(self, config_path, capsys):
        assert main(["analyze", "--config", config_path]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["viability_residual"] <= 1e-12


class TestSimulate:
    def run(self, config_path, out, extra=()):
        return main(["simulate", "--config", config_path,
                     "--paths", "20", "--steps", "16", "--horizon", "1.0",
                     "--seed", "7", "--out", str(out), *extra])

    def test_csv_byte_identical(self, config_path, tmp_path):
        a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
        assert self.run(config_path, a) == EXIT_OK
        assert self.run(config_path, b) == EXIT_OK
        assert self.run(config_path, c, extra=["--workers", "4"]) == EXIT_OK

        assert a.read_bytes() == b.read_bytes() == c.read_bytes()
        header = a.read_text().splitlines()
        data_start = next(i for i, ln in enumerate(header)
                          if not ln.startswith("#"))
        assert header[data_start] == ("path_id,log_S_index,log_S_acme,"
                                      "log_K,identity_residual")
        assert len(header) - data_start - 1 == 20

    def test_seed_env_override(self, config_path, tmp_path, monkeypatch):
        out_env = tmp_path / "env.csv"
        out_explicit = tmp_path / "explicit.csv"
        monkeypatch.setenv("INDEXBEAT_SEED", "7")
        rc = main(["simulate", "--config", config_path, "--paths", "20",
                   "--steps", "16", "--horizon", "1.0",
                   "--out", str(out_env)])
        assert rc == EXIT_OK
        monkeypatch.delenv("INDEXBEAT_SEED")
        assert self.run(config_path, out_explicit) == EXIT_OK

        def data(path):
            return [ln for ln in path.read_text().splitlines()
                    if not ln.startswith("#")]

        assert data(out_env) == data(out_explicit)
        # explicit --seed beats the environment
        monkeypatch.setenv("INDEXBEAT_SEED", "99")
        out_mixed = tmp_path / "mixed.csv"
        assert self.run(config_path, out_mixed) == EXIT_OK
        assert data(out_mixed) == data(out_explicit)

    def test_full_paths_csv(self, config_path, tmp_path):
        out = tmp_path / "terms.csv"
        full = tmp_path / "paths.csv"
        rc = main(["simulate", "--config", config_path, "--paths", "3",
                   "--steps", "4", "--horizon", "1.0", "--seed", "7",
                   "--out", str(out), "--full-paths", str(full)])
        assert rc == EXIT_OK
        lines = [ln for ln in full.read_text().splitlines()
                 if not ln.startswith("#")]
        assert lines[0] == "path_id,time,log_S_index,log_S_acme,log_K"
        assert len(lines) - 1 == 3 * 5


class TestExitCodes:
    def test_validation_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        rc = main(["analyze", "--config", str(bad)])
        assert rc == EXIT_VALIDATION
        assert "bad-json" in capsys.readouterr().err

    def test_non_viable(self, tmp_path, capsys):
        cfg = tmp_path / "nv.json"
        cfg.write_text(json.dumps({"r": 0.02, "mu": [0.06, 0.10],
                                   "sigma": [[0.2], [0.3]]}))
        rc = main(["analyze", "--config", str(cfg)])
        assert rc == EXIT_NON_VIABLE
        assert "non-viable" in capsys.readouterr().err

    def test_missing_config(self, capsys):
        rc = main(["analyze", "--config", "/nonexistent/market.json"])
        assert rc == EXIT_IO
        assert "cannot read config" in capsys.readouterr().err

    def test_unwritable_out(self, config_path, capsys):
        rc = main(["analyze", "--config", config_path,
                   "--out", "/nonexistent/dir/report.json"])
        assert rc == EXIT_IO


class TestVerify:
    def test_quick_pass(self, config_path, capsys):
        rc = main(["verify", "--config", config_path, "--level", "quick"])
        out = capsys.readouterr().out
        assert rc == EXIT_OK
        lines = [ln for ln in out.splitlines() if ln.startswith("PASS")]
        assert len(lines) == 9
        assert "all 9 checks passed" in out
