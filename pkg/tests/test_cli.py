"""End-to-end command line checks, run in process for speed."""
import csv
import io
import json
import math
from contextlib import redirect_stderr, redirect_stdout
from importlib import resources

import numpy as np
import pytest

from uanrelay import cli


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli.main(list(argv))
    return code, out.getvalue(), err.getvalue()


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    header = rows[0]
    return [dict(zip(header, row)) for row in rows[1:]]


def test_channel_csv_roundtrip():
    code, out, err = run_cli(["channel", "--l", "10", "--f", "1:50:0.5", "--format", "csv"])
    assert code == 0 and err == ""
    assert "\r" not in out and out.endswith("\n")
    lines = out.splitlines()
    assert lines[0] == "f_khz,absorption_db_per_km,path_loss_db,noise_psd_db,product_db"
    assert len(lines) == 100
    # reformatting the parsed numbers reproduces the file byte for byte
    for line in lines[1:]:
        cells = line.split(",")
        assert [cli.fmt_num(float(c)) for c in cells] == cells


def test_channel_product_has_interior_minimum():
    code, out, _ = run_cli(["channel", "--l", "10", "--f", "1:50:0.5", "--format", "csv"])
    assert code == 0
    rows = parse_csv(out)
    products = [float(r["product_db"]) for r in rows]
    best = int(np.argmin(products))
    assert 0 < best < len(products) - 1
    assert math.isclose(float(rows[best]["f_khz"]), 6.0)


def test_channel_json_document():
    code, out, err = run_cli(["channel", "--l", "10", "--f", "2:10:2", "--format", "json"])
    assert code == 0 and err == ""
    doc = json.loads(out)
    assert doc["l_km"] == 10
    assert len(doc["rows"]) == 5
    for row in doc["rows"]:
        assert np.isclose(
            row["product_db"], row["path_loss_db"] + row["noise_psd_db"], rtol=1e-9
        )


def test_empty_range_is_usage_error():
    code, _, err = run_cli(["channel", "--l", "10", "--f", "5:1:1"])
    assert code == 2
    assert "usage error" in err


def test_channel_rejects_bad_distance():
    code, _, err = run_cli(["channel", "--l", "-1", "--f", "1:2:1"])
    assert code == 3
    assert "distance must be positive" in err


def test_global_flags_position_independent():
    before = run_cli(["--format", "json", "channel", "--l", "10", "--f", "1:2:1"])
    after = run_cli(["channel", "--l", "10", "--f", "1:2:1", "--format", "json"])
    assert before == after
    assert before[0] == 0


def test_fit_default_grid_constants():
    code, out, err = run_cli(["fit", "--format", "json"])
    assert code == 0 and err == ""
    doc = json.loads(out)
    assert [m["snr0_db"] for m in doc["models"]] == [5, 10, 15, 20, 25]
    for m in doc["models"]:
        assert 0.5 < m["lam"] < 0.6
        assert 2.1 < m["gamma"] < 2.3
    assert np.isclose(doc["trend"]["slope_per_db"], 0.1, atol=1e-6)
    assert np.isclose(doc["trend"]["intercept"], -4.9465039490846870, atol=1e-6)


def test_fit_csv_columns():
    code, out, _ = run_cli(["fit", "--snr", "10,20", "--format", "csv"])
    assert code == 0
    rows = parse_csv(out)
    assert [r["snr0_db"] for r in rows] == ["10", "20"]
    assert set(rows[0]) == {
        "snr0_db", "omega", "lam", "delta", "psi", "gamma",
        "trend_slope_per_db", "trend_intercept",
    }
    assert float(rows[0]["trend_slope_per_db"]) == float(rows[1]["trend_slope_per_db"])


def test_fit_out_of_range_distances_fail_validation():
    code, _, err = run_cli(["fit", "--snr", "15", "--l-range", "50:100:1"])
    assert code == 3
    assert "out of range" in err


def test_fit_single_distance_is_usage_error():
    code, _, err = run_cli(["fit", "--snr", "15", "--l-range", "10:10:1"])
    assert code == 2
    assert "at least two distances" in err


def test_fit_numeric_failure_exit_code():
    # distances far outside the modeled range push the band search into the
    # window edge, which is a numeric failure rather than bad usage
    code, _, err = run_cli(["fit", "--snr", "15", "--l-range", "5000:20000:5000"])
    assert code == 4
    assert "window edge" in err


def test_json_errors_envelope():
    code, out, err = run_cli(
        ["fit", "--snr", "15", "--l-range", "5000:20000:5000", "--json-errors"]
    )
    assert code == 4
    assert err == ""
    doc = json.loads(out)
    assert doc["error"]["type"] == "BoundaryMinimumError"
    assert doc["error"]["exit_code"] == 4
    assert "window edge" in doc["error"]["message"]


def test_plan_document_matches_schema():
    jsonschema = pytest.importorskip("jsonschema")
    code, out, err = run_cli(["plan", "--l", "60", "--snr", "15", "--pr", "1.0"])
    assert code == 0 and err == ""
    doc = json.loads(out)
    schema = json.loads(
        resources.files("uanrelay").joinpath("data/plan.schema.json").read_text()
    )
    jsonschema.validate(doc, schema)
    assert doc["decision"] == "relay"
    assert doc["case"] == "RelayOptimal"
    assert doc["hop_count"] == 4
    assert doc["relay_positions_km"] == [15, 30, 45]
    assert doc["total_energy_joule"] < doc["direct_energy_joule"]


def test_plan_direct_case():
    code, out, _ = run_cli(["plan", "--l", "10", "--snr", "15", "--pr", "1.0"])
    assert code == 0
    doc = json.loads(out)
    assert doc["decision"] == "direct"
    assert doc["case"] == "DirectConcave"
    assert doc["relay_positions_km"] == []
    assert doc["hop_count"] == 1
    assert doc["total_energy_joule"] == doc["direct_energy_joule"]


def test_plan_rejects_negative_distance():
    code, _, err = run_cli(["plan", "--l", "-5", "--snr", "15", "--pr", "1.0"])
    assert code == 3
    assert "positive" in err


def test_table1_shape_and_ratios():
    code, out, err = run_cli(["table1", "--pr", "0.5", "--format", "csv"])
    assert code == 0 and err == ""
    rows = parse_csv(out)
    assert len(rows) == 20
    by_key = {(r["snr0_db"], r["l_km"]): r for r in rows}
    assert float(by_key[("25", "50")]["energy_reduction_ratio"]) > 0.6
    for r in rows:
        ratio = float(r["delay_reduction_ratio"])
        assert -0.016 < ratio < 0.0


def test_table1_exact_columns():
    code, out, _ = run_cli(["table1", "--pr", "0.5", "--exact", "--format", "json"])
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 20
    far = [r for r in rows if r["snr0_db"] == 25 and r["l_km"] == 50][0]
    assert np.isclose(far["exact_e0_joule"], 14.162776462665411, rtol=1e-9)
    exact_ratio = (far["exact_e0_joule"] - far["exact_e1_mid_joule"]) / far["exact_e0_joule"]
    assert abs(exact_ratio - 0.7177) < 0.005


def test_table1_rejects_bad_receive_power():
    code, _, err = run_cli(["table1", "--pr", "0"])
    assert code == 3
    assert "receive power" in err


def test_config_file_applies_and_flags_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults for a cylindrical-spreading study\nk=1.0\nformat=json\n")
    code, out, _ = run_cli(["channel", "--l", "1", "--f", "1:2:1", "--config", str(cfg)])
    assert code == 0
    doc = json.loads(out)
    assert np.isclose(doc["rows"][0]["path_loss_db"], 30.0690040905, atol=1e-9)
    code, out, _ = run_cli(
        ["channel", "--l", "1", "--f", "1:2:1", "--config", str(cfg), "--k", "2.0"]
    )
    doc = json.loads(out)
    assert np.isclose(doc["rows"][0]["path_loss_db"], 60.0690040905, atol=1e-9)


def test_config_unknown_key_is_usage_error(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus=1\n")
    code, _, err = run_cli(["channel", "--l", "1", "--f", "1:2:1", "--config", str(cfg)])
    assert code == 2
    assert "unknown config key" in err


def test_config_missing_file_is_usage_error():
    code, _, err = run_cli(["channel", "--l", "1", "--f", "1:2:1", "--config", "/no/such.cfg"])
    assert code == 2
    assert "cannot read config file" in err


def test_output_file_matches_stdout(tmp_path):
    target = tmp_path / "rows.csv"
    args = ["channel", "--l", "10", "--f", "1:20:1", "--format", "csv"]
    code, out, _ = run_cli(args)
    assert code == 0
    code, piped, _ = run_cli(args + ["--output", str(target)])
    assert code == 0 and piped == ""
    assert target.read_bytes().decode() == out


def test_surface_analytic_exact_fit():
    code, out, err = run_cli(
        [
            "surface", "--analytic",
            "--pr-range", "0.1:2.0:0.95",
            "--snr-range", "10:25:7.5",
            "--degrees", "2,2",
            "--format", "json",
        ]
    )
    assert code == 0 and err == ""
    doc = json.loads(out)
    assert doc["m"] == 2 and doc["n"] == 2
    assert doc["source"] == "analytic"
    assert doc["points"] == 9
    # the closed-form threshold is log-affine, so a low-degree fit is exact
    assert float(doc["gof"]["r2"]) > 0.999999
    # entries beyond the triangular layout serialize as nulls
    assert doc["coeffs"][2][1] is None
    assert doc["coeffs"][1][2] is None
    assert doc["coeffs"][2][2] is None


def test_surface_csv_rows():
    code, out, _ = run_cli(
        [
            "surface", "--analytic",
            "--pr-range", "0.1:2.0:0.95",
            "--snr-range", "10:25:7.5",
            "--degrees", "2,2",
            "--format", "csv",
        ]
    )
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == 6
    assert set(rows[0]) == {"i", "j", "value", "sse", "rmse", "r2", "adj_r2"}
    assert {(r["i"], r["j"]) for r in rows} == {
        ("0", "0"), ("0", "1"), ("0", "2"), ("1", "0"), ("1", "1"), ("2", "0")
    }


def test_surface_needs_enough_points():
    code, _, err = run_cli(
        [
            "surface", "--analytic",
            "--pr-range", "1.0:1.0:1.0",
            "--snr-range", "15:15:1.0",
            "--format", "json",
        ]
    )
    assert code == 3
    assert "points" in err


def test_surface_oracle_thread_count_invariance(monkeypatch):
    args = [
        "surface",
        "--pr-range", "0.9:1.1:0.2",
        "--snr-range", "14:16:2",
        "--degrees", "1,1",
        "--position-divisor", "4",
        "--format", "csv",
    ]
    monkeypatch.setenv("RELAY_PLANNER_THREADS", "1")
    serial = run_cli(args)
    monkeypatch.setenv("RELAY_PLANNER_THREADS", "2")
    threaded = run_cli(args)
    assert serial[0] == threaded[0] == 0
    assert serial[1] == threaded[1]


def test_usage_errors_and_help():
    code, _, err = run_cli(["channel", "--l", "10", "--f", "1:2:1", "--format", "xml"])
    assert code == 2
    code, _, err = run_cli([])
    assert code == 2
    code, out, _ = run_cli(["--help"])
    assert code == 0
    assert "usage: uanrelay" in out


def test_number_formatting_contract():
    assert cli.fmt_num(0.0) == "0"
    assert cli.fmt_num(42) == "42"
    assert cli.fmt_num(True) == "true"
    assert cli.fmt_num(123456.789) == "123456.789"
    assert cli.fmt_num(1e-7) == "0.0000001"
    # values at or above a million may use exponent form
    assert cli.fmt_num(1e6) == "1e+6"
    assert cli.fmt_num(1234567.0) == "1.234567e+6"
