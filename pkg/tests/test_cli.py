import json

import pytest

from senergy.cli import main


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture()
def sim_dir(tmp_path):
    out = tmp_path / "run"
    code = run_cli("simulate", "--n", "4", "--rho", "0.25", "--seed", "3",
                   "--out", str(out), "--s", "0.5", "1", "--eps", "0.01")
    assert code == 0
    return out


class TestSimulateVerify:
    def test_simulate_writes_trace_and_report(self, sim_dir):
        assert (sim_dir / "trace.jsonl").exists()
        assert (sim_dir / "report.csv").exists()

    def test_verify_valid_trace(self, sim_dir):
        assert run_cli("verify", "--trace", str(sim_dir / "trace.jsonl")) == 0

    def test_verify_corrupted_trace_exits_2(self, sim_dir, capsys):
        path = sim_dir / "trace.jsonl"
        lines = path.read_text().splitlines()
        obj = json.loads(lines[1])
        obj["after"][0] = 1.0 - obj["after"][0]  # break the step constraint
        lines[1] = json.dumps(obj, sort_keys=True)
        bad = sim_dir / "bad.jsonl"
        bad.write_text("\n".join(lines) + "\n")
        assert run_cli("verify", "--trace", str(bad)) == 2
        assert "violation at step" in capsys.readouterr().err

    def test_missing_file_is_usage_error(self):
        assert run_cli("verify", "--trace", "/no/such/file") == 1

    def test_config_file_with_overrides(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 3, "rho": 0.25, "policy": "midpoint",
                                   "steps_cap": 50}))
        out = tmp_path / "out"
        assert run_cli("simulate", "--config", str(cfg), "--seed", "9",
                       "--out", str(out)) == 0

    def test_unknown_config_key_is_usage_error(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 3, "rho": 0.25, "bogus": 1}))
        assert run_cli("simulate", "--config", str(cfg),
                       "--out", str(tmp_path / "o")) == 1


class TestReduceCertify:
    def test_reduce_then_certify(self, sim_dir):
        assert run_cli("reduce", "--trace", str(sim_dir / "trace.jsonl"),
                       "--out", str(sim_dir)) == 0
        assert (sim_dir / "twist.jsonl").exists()
        assert run_cli("certify", "--trace", str(sim_dir / "twist.jsonl"),
                       "--s", "0.5", "--out", str(sim_dir), "--format", "csv") == 0
        clearing = (sim_dir / "clearing.csv").read_text().splitlines()
        assert clearing[0] == "t,i,j,B,C,D,payment,energy_due"
        assert len(clearing) > 1

    def test_certify_accepts_averaging_trace_directly(self, sim_dir):
        assert run_cli("certify", "--trace", str(sim_dir / "trace.jsonl"),
                       "--s", "1") == 0


class TestBoundsAndApps:
    def test_bounds_prints_csv(self, capsys):
        assert run_cli("bounds", "--n", "4", "--rho", "0.25",
                       "--eps", "0.015625") == 0
        out = capsys.readouterr().out
        assert "energy_bound" in out and "comm_bound" in out

    def test_lowerbound_sandwich_row(self, tmp_path, capsys):
        out = tmp_path / "lb"
        assert run_cli("lowerbound", "--n", "3", "--rho", "0.2",
                       "--out", str(out)) == 0
        header, row = capsys.readouterr().out.strip().splitlines()
        assert header.startswith("n,rho,eps,lower_recurrence,measured,upper_bound")
        n, rho, eps, lower, measured, upper = row.split(",")
        assert float(lower) <= float(measured) <= float(upper)
        assert (out / "trace.jsonl").exists()

    def test_opinion_and_kuramoto_run(self, capsys):
        assert run_cli("opinion", "--n", "4", "--d", "2", "--alpha", "0.5",
                       "--seed", "1") == 0
        assert run_cli("kuramoto", "--n", "4", "--seed", "2") == 0

    def test_unknown_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            run_cli("frobnicate")
        assert err.value.code == 1
