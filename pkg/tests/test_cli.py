import json
import math

import numpy as np
import pytest

from dqc1lab.channel import choi_closed_form
from dqc1lab.cli import main, parse_grid, stage_rng
from dqc1lab.linalg import matrix_from_json, matrix_to_json

from _oracles import haar

rng = np.random.default_rng(8)


def run(*argv) -> int:
    return main(list(argv))


def read_csv(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class TestParseGrid:
    def test_inclusive_linspace(self):
        grid = parse_grid("0:1:5")
        assert grid == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_pi_tokens(self):
        grid = parse_grid("0:2pi:3")
        assert grid == [0.0, math.pi, 2 * math.pi]

    def test_comma_list_and_scalar(self):
        assert parse_grid("0,0.25,1") == [0.0, 0.25, 1.0]
        assert parse_grid("0.5") == [0.5]

    def test_rejects_malformed(self):
        with pytest.raises(ValueError):
            parse_grid("0:1")
        with pytest.raises(ValueError):
            parse_grid("0:1:0")


def test_stage_rng_streams_are_independent():
    a1 = stage_rng(7, "alpha").random(4)
    a2 = stage_rng(7, "alpha").random(4)
    b = stage_rng(7, "beta").random(4)
    assert np.array_equal(a1, a2)
    assert not np.array_equal(a1, b)


class TestSample:
    def test_identity_is_exact(self, tmp_path):
        out = tmp_path / "est.json"
        code = run(
            "sample", "--family", "identity:3", "--alpha", "1", "--shots", "100",
            "--seed", "7", "-o", str(out),
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["estimate"] == 8.0
        assert payload["std_error"] == 0.0
        assert payload["basis"] == "z"
        assert payload["shots"] == 100

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["sample", "--family", "iswap:pi", "--alpha", "0.5", "--shots", "5000", "--seed", "3"]
        assert run(*args, "-o", str(a)) == 0
        assert run(*args, "-o", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()


class TestWorkDist:
    def test_iswap_sweep_rows_normalize(self, tmp_path):
        out = tmp_path / "wd.csv"
        code = run(
            "work-dist", "--family", "iswap", "--theta-grid", "0:2pi:8",
            "--alpha", "1.0", "--omega", "1", "--n", "2", "-o", str(out),
        )
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["alpha", "theta", "work", "probability"]
        by_theta = {}
        for alpha, theta, work, prob in rows:
            by_theta.setdefault(theta, 0.0)
            by_theta[theta] += float(prob)
            assert float(alpha) == 1.0
        assert len(by_theta) == 8
        assert all(abs(total - 1.0) <= 1e-12 for total in by_theta.values())

    def test_one_file_per_alpha(self, tmp_path):
        out = tmp_path / "wd.csv"
        code = run(
            "work-dist", "--family", "iswap", "--theta-grid", "0:pi:4",
            "--alpha-grid", "0,0.5,1", "-o", str(out),
        )
        assert code == 0
        for alpha in ("0", "0.5", "1"):
            assert (tmp_path / f"wd_alpha{alpha}.csv").exists()


class TestEntropySweep:
    def test_full_grid(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = run(
            "entropy-sweep", "--alpha-grid", "0:1:51", "--t-grid", "-1:1:101",
            "-o", str(out),
        )
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["alpha", "t", "delta_S_C"]
        assert len(rows) == 51 * 101
        values = np.array([float(r[2]) for r in rows])
        assert values.min() >= -1e-12


class TestChoiKraus:
    def test_choi_export_matches_closed_form(self, tmp_path):
        out = tmp_path / "choi.json"
        assert run("choi", "--family", "iswap:pi", "-o", str(out)) == 0
        m = matrix_from_json(json.loads(out.read_text()))
        t = math.cos(math.pi / 4) ** 2
        expected = choi_closed_form(4 * t, 0.0, 2).matrix
        assert np.abs(m - expected).max() <= 1e-11

    def test_kraus_export_with_labels(self, tmp_path):
        out = tmp_path / "kraus.json"
        assert run("kraus", "--family", "haar:2:5", "-o", str(out)) == 0
        payload = json.loads(out.read_text())
        assert len(payload) == 16
        labels = {tuple(item["label"]) for item in payload}
        assert labels == {(i, j) for i in range(4) for j in range(4)}
        total = np.zeros((2, 2), dtype=complex)
        for item in payload:
            k = matrix_from_json(item)
            total += k.conj().T @ k
        assert np.abs(total - np.eye(2)).max() <= 1e-10


class TestCrooksCommand:
    def test_report_passes(self, tmp_path):
        out = tmp_path / "crooks.json"
        code = run(
            "crooks-check", "--family", "iswap", "--theta-grid", "0:2pi:8",
            "--alpha-grid", "0.1,0.5,0.9", "-o", str(out),
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["pass"] is True
        assert payload["max_ratio_deviation"] <= 1e-10
        statuses = {rep["status"] for rep in payload["reports"]}
        assert statuses == {"ok"}
        sample = payload["reports"][0]
        for key in ("beta", "support", "max_ratio_deviation", "paper_form_values"):
            assert key in sample


class TestEnergeticsCommand:
    def test_single_instance_json(self, tmp_path):
        out = tmp_path / "report.json"
        code = run(
            "energetics", "--family", "iswap:pi", "--alpha", "0.5", "-o", str(out),
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert abs(payload["delta_E_C"] - 0.25) <= 1e-12
        assert payload["input"]["alpha"] == 0.5
        assert payload["landauer_split_status"] == "ok"

    def test_sweep_csv(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = run(
            "energetics", "--family", "iswap", "--theta-grid", "0:pi:3",
            "--alpha-grid", "0.25,0.75", "-o", str(out),
        )
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["alpha", "theta", "delta_S_C", "delta_E_C", "mutual_info", "sigma_A"]
        assert len(rows) == 6

    def test_infinite_sigma_serialized(self, tmp_path):
        out = tmp_path / "report.json"
        assert run("energetics", "--family", "iswap:pi", "--alpha", "1", "-o", str(out)) == 0
        payload = json.loads(out.read_text())
        assert payload["sigma_A"] == "inf"
        assert payload["beta"] == "inf"


class TestUnitalityScan:
    def test_json_stats_pass(self, tmp_path):
        out = tmp_path / "scan.json"
        code = run("unitality-scan", "--samples", "20", "--n", "3", "--seed", "1", "-o", str(out))
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["pass"] is True
        assert payload["max_defect"] <= 1e-10
        assert payload["samples"] == 20

    def test_csv_format(self, tmp_path):
        out = tmp_path / "scan.csv"
        code = run(
            "unitality-scan", "--samples", "5", "--n", "2", "--seed", "1",
            "--format", "csv", "-o", str(out),
        )
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["sample", "defect"]
        assert len(rows) == 5

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["unitality-scan", "--samples", "5", "--n", "2", "--seed", "11"]
        run(*args, "-o", str(a))
        run(*args, "-o", str(b))
        assert a.read_bytes() == b.read_bytes()


class TestErrors:
    def test_unknown_family_emits_json_error(self, tmp_path, capsys):
        code = run("simulate", "--family", "swap:1", "-o", str(tmp_path / "x.json"))
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "invalid_config"

    def test_dimension_cap(self, tmp_path, capsys):
        code = run("simulate", "--family", "identity:12", "-o", str(tmp_path / "x.json"))
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "dimension_cap"

    def test_missing_source(self, tmp_path, capsys):
        code = run("choi", "-o", str(tmp_path / "x.json"))
        assert code == 2
        assert json.loads(capsys.readouterr().err)["error"] == "invalid_config"


class TestConfigFile:
    def test_config_mirrors_flags_and_flags_win(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps({"family": "identity:2", "alpha": 1.0, "shots": 50, "seed": 3})
        )
        out1 = tmp_path / "a.json"
        assert run("sample", "--config", str(cfg), "-o", str(out1)) == 0
        assert json.loads(out1.read_text())["shots"] == 50
        out2 = tmp_path / "b.json"
        assert run("sample", "--config", str(cfg), "--shots", "10", "-o", str(out2)) == 0
        assert json.loads(out2.read_text())["shots"] == 10


class TestMatrixSource:
    def test_matrix_file_roundtrip(self, tmp_path):
        u = haar(4, rng)
        path = tmp_path / "u.json"
        path.write_text(json.dumps(matrix_to_json(u)))
        out = tmp_path / "sim.json"
        assert run("simulate", "--matrix", str(path), "-o", str(out)) == 0
        payload = json.loads(out.read_text())
        assert abs(payload["trace"]["re"] - np.trace(u).real) <= 1e-12
        assert abs(payload["mu"]["z"] - np.trace(u).real / 4) <= 1e-12
        assert abs(payload["mu"]["y"] - np.trace(u).imag / 4) <= 1e-12
        assert payload["mu_consistent"] is True


def test_outdir_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("DQC1LAB_OUTDIR", str(tmp_path / "artifacts"))
    assert run("simulate", "--family", "identity:1", "-o", "sim.json") == 0
    assert (tmp_path / "artifacts" / "sim.json").exists()
