import json
import math
import subprocess
import sys

import pytest

from irs_circuit import OperatingPoint, UnitCellParams, phase_shift, reflection_amplitude
from irs_circuit.cli import CONFIG_ENV, main

from conftest import GHz, nH, pF

LOW_LOSS = ["--l1", "2.3nH", "--l2", "0.56nH", "--r", "2"]
DIP = ["--l1", "2.5nH", "--l2", "0.4nH", "--r", "4"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def kv(text):
    """Parse ``key = value`` lines (last occurrence wins)."""
    out = {}
    for line in text.splitlines():
        key, sep, value = line.partition(" = ")
        if sep and "  " not in value:
            out[key.strip()] = value.strip()
    return out


def usage_exit(capsys, *argv):
    with pytest.raises(SystemExit) as exc:
        main(list(argv))
    return exc.value.code, capsys.readouterr().err


class TestForward:
    def test_text_output(self, capsys):
        code, out, _ = run(capsys, "forward", *LOW_LOSS, "--c", "1.6pF", "--f", "2.4GHz")
        assert code == 0
        vals = kv(out)
        expect = phase_shift(UnitCellParams(2.3 * nH, 0.56 * nH, 2.0), OperatingPoint(1.6 * pF, 2.4 * GHz))
        # printed numbers round-trip exactly
        assert float(vals["theta_rad"]) == expect
        assert abs(float(vals["theta_deg"])) == pytest.approx(75.6, abs=0.1)

    def test_json_output(self, capsys):
        code, out, _ = run(capsys, "forward", *DIP, "--c", "1.55pF", "--f", "2.4GHz", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["rho"] == reflection_amplitude(UnitCellParams(2.5 * nH, 0.4 * nH, 4.0),
                                                      OperatingPoint(1.55 * pF, 2.4 * GHz))

    def test_lossless_is_full_reflection(self, capsys):
        code, out, _ = run(capsys, "forward", "--r", "0", "--c", "1pF", "--f", "2.4GHz")
        assert code == 0
        assert float(kv(out)["rho"]) == pytest.approx(1.0, abs=1e-12)

    def test_zero_capacitance_is_usage_error(self, capsys):
        code, err = usage_exit(capsys, "forward", "--c", "0", "--f", "2.4GHz")
        assert code == 2
        assert "c must be > 0" in err

    @pytest.mark.parametrize("bad", [["--c", "1pH", "--f", "2.4GHz"], ["--c", "1pF"], ["--c", "abc", "--f", "1GHz"],
                                     ["--l1", "-1nH", "--c", "1pF", "--f", "1GHz"]])
    def test_bad_arguments(self, capsys, bad):
        code, _ = usage_exit(capsys, "forward", *bad)
        assert code == 2

    def test_degenerate_point_exit_3(self, capsys):
        l1, l2, f = 2.4 * nH, 0.5 * nH, 2.4 * GHz
        c = 1 / ((2 * math.pi * f) ** 2 * (l1 + l2))
        code, _, err = run(capsys, "forward", "--r", "0", "--l1", "2.4nH", "--l2", "0.5nH",
                           "--c", repr(c), "--f", "2.4GHz")
        assert code == 3
        assert "degenerate" in err


class TestInvert:
    def test_round_trip(self, capsys):
        code, out, _ = run(capsys, "forward", *LOW_LOSS, "--c", "1.3pF", "--f", "2.4GHz")
        theta = kv(out)["theta_rad"]
        code, out, _ = run(capsys, "invert", "phase", *LOW_LOSS, "--theta", f"{theta}rad", "--f", "2.4GHz")
        assert code == 0
        vals = kv(out)
        assert float(vals["c_selected_pF"]) == pytest.approx(1.3, rel=1e-6)
        assert float(vals["residual"]) <= 1e-6
        assert vals["in_range"] == "true"

    def test_amplitude(self, capsys):
        code, out, _ = run(capsys, "invert", "amplitude", *DIP, "--rho", "0.5", "--f", "2.4GHz")
        assert code == 0
        assert out.count("candidate_F") == 2
        c = float(kv(out)["c_selected_F"])
        assert reflection_amplitude(UnitCellParams(2.5 * nH, 0.4 * nH, 4.0),
                                    OperatingPoint(c, 2.4 * GHz)) == pytest.approx(0.5, abs=1e-6)

    def test_unreachable_phase_exit_4(self, capsys):
        code, out, err = run(capsys, "invert", "phase", *DIP, "--theta", "-80deg", "--f", "2.4GHz")
        assert code == 4
        assert out == ""
        assert "infeasible" in err

    def test_principal_convention(self, capsys):
        code, out, _ = run(capsys, "invert", "phase", *DIP, "--theta", "-80deg", "--f", "2.4GHz",
                           "--convention", "principal")
        assert code == 0
        assert float(kv(out)["c_selected_pF"]) == pytest.approx(1.48, abs=0.05)

    def test_strict_window(self, capsys):
        code, _, err = run(capsys, "invert", "amplitude", *DIP, "--rho", "0.5", "--f", "2.4GHz",
                           "--c-min", "0.47pF", "--c-max", "0.6pF", "--strict-window")
        assert code == 4
        assert "window" in err

    def test_out_of_window_warns(self, capsys):
        code, out, err = run(capsys, "invert", "amplitude", *DIP, "--rho", "0.5", "--f", "2.4GHz",
                             "--c-min", "0.47pF", "--c-max", "0.6pF")
        assert code == 0
        assert kv(out)["in_range"] == "false"
        assert "warning" in err

    def test_all_capacitances_valid(self, capsys):
        code, out, _ = run(capsys, "invert", "amplitude", "--r", "0", "--rho", "1", "--f", "2.4GHz")
        assert code == 0
        assert "all capacitances valid" in out

    @pytest.mark.parametrize("argv", [["phase", "--f", "1GHz"], ["amplitude", "--rho", "1.5", "--f", "1GHz"],
                                      ["phase", "--theta", "4rad", "--f", "1GHz"]])
    def test_usage(self, capsys, argv):
        code, _ = usage_exit(capsys, "invert", *argv)
        assert code == 2


class TestSweep:
    def test_two_steps(self, capsys):
        code, out, _ = run(capsys, "sweep", "--variable", "capacitance", "--start", "0.47pF", "--stop", "2.35pF",
                           "--steps", "2", "--f", "2.4GHz")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "variable,theta_rad,rho"
        assert len(lines) == 3
        assert float(lines[1].split(",")[0]) == 0.47 * pF

    def test_deterministic(self, capsys):
        argv = ["sweep", "--variable", "frequency", "--start", "1GHz", "--stop", "3GHz", "--c", "2pF",
                "--outputs", "theta,rho,c_theta", "--steps", "64", *LOW_LOSS]
        _, a, _ = run(capsys, *argv)
        _, b, _ = run(capsys, *argv)
        assert a == b

    def test_negative_phase_start(self, capsys):
        code, out, _ = run(capsys, "sweep", "--variable", "phase", "--start", "-90deg", "--stop", "90deg",
                           "--steps", "5", "--f", "2.4GHz", "--outputs", "c_theta", "--format", "json", *LOW_LOSS)
        assert code == 0
        cols = json.loads(out)["columns"]
        assert cols["variable"][0] == pytest.approx(-math.pi / 2)
        assert len(cols["c_theta_F"]) == 5

    @pytest.mark.parametrize("argv", [
        ["--variable", "frequency", "--start", "1GHz", "--stop", "3GHz"],
        ["--variable", "capacitance", "--start", "2pF", "--stop", "1pF", "--f", "1GHz"],
        ["--variable", "capacitance", "--start", "1GHz", "--stop", "2pF", "--f", "1GHz"],
        ["--variable", "capacitance", "--start", "1pF", "--stop", "2pF", "--f", "1GHz", "--steps", "1"],
    ])
    def test_usage(self, capsys, argv):
        code, _ = usage_exit(capsys, "sweep", *argv)
        assert code == 2


class TestTable:
    def test_rows(self, capsys, tmp_path):
        rows = tmp_path / "rows.csv"
        rows.write_text("theta_deg,rho,f_GHz\n30,0.39,2.0\n35,0.30,2.1\n40,0.7,2.2\n45,0.7,2.3\n55,0.8,2.4\n")
        code, out, _ = run(capsys, "table", str(rows), *LOW_LOSS)
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("theta_deg,rho,f_GHz,c_theta_pF")
        c_theta = [float(line.split(",")[3]) for line in lines[1:]]
        for got, ref in zip(c_theta, [2.34, 2.13, 1.99, 1.81, 1.56]):
            assert got == pytest.approx(ref, abs=0.2)

    def test_bad_row_kept(self, capsys, tmp_path):
        rows = tmp_path / "rows.csv"
        rows.write_text("40,1.5,2.4\n40,0.8,2.4\n")
        code, out, _ = run(capsys, "table", str(rows), *LOW_LOSS, "--format", "json")
        assert code == 0
        recs = json.loads(out)["rows"]
        assert len(recs) == 2
        assert recs[0]["c_theta_pF"] is None and "rho" in recs[0]["error"]
        assert recs[1]["c_theta_pF"] is not None

    def test_empty_file(self, capsys, tmp_path):
        rows = tmp_path / "rows.csv"
        rows.write_text("")
        code, out, _ = run(capsys, "table", str(rows))
        assert code == 0
        assert out.splitlines() == ["theta_deg,rho,f_GHz,c_theta_pF,c_rho_pF,theta_achieved_deg,"
                                    "rho_achieved,discrepancy,error"]

    def test_missing_file(self, capsys, tmp_path):
        code, _ = usage_exit(capsys, "table", str(tmp_path / "nope.csv"))
        assert code == 2


class TestVerify:
    def test_passes_and_is_byte_identical(self, capsys):
        argv = ["verify", "-n", "500", "--roundtrips", "20", "--seed", "3"]
        code, a, _ = run(capsys, *argv)
        assert code == 0
        _, b, _ = run(capsys, *argv)
        assert a == b
        report = json.loads(a)
        assert report["ok"] is True
        assert report["equivalence"]["points_checked"] == 500

    def test_zero_points_is_usage_error(self, capsys):
        code, _ = usage_exit(capsys, "verify", "-n", "0")
        assert code == 2

    def test_impossible_tolerance_fails(self, capsys):
        code, out, _ = run(capsys, "verify", "-n", "200", "--roundtrips", "5", "--phase-tol", "0")
        assert code == 5
        assert json.loads(out)["ok"] is False


class TestConfig:
    def test_file_and_precedence(self, capsys, tmp_path, monkeypatch):
        cfg = tmp_path / "cell.conf"
        cfg.write_text("# low-loss cell\nl1 = 2.3nH\nl2 = 0.56nH\nr = 5\n")
        monkeypatch.setenv(CONFIG_ENV, str(cfg))
        _, via_env, _ = run(capsys, "forward", "--r", "2", "--c", "1.6pF", "--f", "2.4GHz")
        _, via_flags, _ = run(capsys, "forward", *LOW_LOSS, "--c", "1.6pF", "--f", "2.4GHz")
        assert via_env == via_flags
        _, from_file, _ = run(capsys, "forward", "--c", "1.6pF", "--f", "2.4GHz")
        assert from_file != via_flags

    def test_bad_config(self, capsys, tmp_path):
        cfg = tmp_path / "bad.conf"
        cfg.write_text("colour = blue\n")
        code, err = usage_exit(capsys, "forward", "--config", str(cfg), "--c", "1pF", "--f", "1GHz")
        assert code == 2 and "bad.conf:1" in err

    def test_missing_config(self, capsys, tmp_path):
        code, _ = usage_exit(capsys, "forward", "--config", str(tmp_path / "x"), "--c", "1pF", "--f", "1GHz")
        assert code == 2

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "out.csv"
        code, out, _ = run(capsys, "sweep", "--variable", "capacitance", "--start", "1pF", "--stop", "2pF",
                           "--steps", "3", "--f", "2.4GHz", "-o", str(target))
        assert code == 0 and out == ""
        assert target.read_text().startswith("variable,")
        assert list(tmp_path.iterdir()) == [target]


class TestProcess:
    @pytest.mark.parametrize("sub", ["forward", "invert", "sweep", "table", "verify"])
    def test_help(self, sub):
        res = subprocess.run([sys.executable, "-m", "irs_circuit", sub, "--help"], capture_output=True, text=True)
        assert res.returncode == 0
        assert "usage:" in res.stdout

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "irs_circuit", "forward", "--c", "1pF", "--f", "2.4GHz"],
                             capture_output=True, text=True)
        assert res.returncode == 0
        assert "rho = " in res.stdout
