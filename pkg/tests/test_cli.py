"""End-to-end command-line behavior: run, list, verify, exit codes."""

import json

import pytest

from couplersim.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


class TestList:
    def test_lists_every_pipeline(self, capsys):
        assert main(["list"]) == EXIT_OK
        out = capsys.readouterr().out
        for name in ("fig3_rabi", "fig4_ipr", "fig5_zz", "fig6_pam",
                     "fig7_circuit", "app_dephasing", "app_ld",
                     "app_pam_ld", "metapotential"):
            assert name in out


class TestRun:
    def test_run_writes_bundle_and_passes(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"pipeline": "metapotential",
                                      "options": {"resolution": 41}})
        code = main(["run", cfg, "--out", str(tmp_path / "runs")])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "wrote" in out
        bundles = list((tmp_path / "runs" / "metapotential").iterdir())
        assert len(bundles) == 1
        assert (bundles[0] / "summary.json").is_file()

    def test_reruns_are_byte_identical(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"pipeline": "metapotential",
                                      "options": {"resolution": 41}})
        assert main(["run", cfg, "--out", str(tmp_path / "a")]) == EXIT_OK
        assert main(["run", cfg, "--out", str(tmp_path / "b")]) == EXIT_OK
        capsys.readouterr()
        da = next((tmp_path / "a" / "metapotential").iterdir())
        db = next((tmp_path / "b" / "metapotential").iterdir())
        assert da.name == db.name  # same config hash
        for fa in sorted(da.glob("*.csv")):
            assert fa.read_bytes() == (db / fa.name).read_bytes()

    def test_unknown_pipeline_exits_config_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"pipeline": "not_a_pipeline"})
        assert main(["run", cfg]) == EXIT_CONFIG

    def test_missing_config_exits_config_error(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "absent.json")]) == EXIT_CONFIG

    def test_malformed_json_exits_config_error(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["run", str(path)]) == EXIT_CONFIG

    def test_unknown_key_exits_config_error(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"pipeline": "metapotential",
                                      "params": {"bogus": 1}})
        assert main(["run", cfg]) == EXIT_CONFIG


class TestVerify:
    def run_once(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"pipeline": "metapotential",
                                      "options": {"resolution": 41}})
        assert main(["run", cfg, "--out", str(tmp_path / "runs")]) == EXIT_OK
        capsys.readouterr()
        return next((tmp_path / "runs" / "metapotential").iterdir())

    def test_clean_bundle_verifies(self, tmp_path, capsys):
        bundle_dir = self.run_once(tmp_path, capsys)
        assert main(["verify", str(bundle_dir)]) == EXIT_OK
        assert "PASS" in capsys.readouterr().out

    def test_tampered_bundle_fails(self, tmp_path, capsys):
        bundle_dir = self.run_once(tmp_path, capsys)
        csv = sorted(bundle_dir.glob("*.csv"))[0]
        csv.write_bytes(csv.read_bytes() + b"x")
        assert main(["verify", str(bundle_dir)]) == EXIT_NUMERICAL
        assert "FAIL" in capsys.readouterr().out

    def test_not_a_bundle_exits_config_error(self, tmp_path, capsys):
        assert main(["verify", str(tmp_path)]) == EXIT_CONFIG


class TestUsage:
    def test_no_command_is_config_error(self, capsys):
        assert main([]) == EXIT_CONFIG
