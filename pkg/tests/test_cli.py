import io
import json

import pytest

from zirho.cli import read_pairs_csv, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_exact_reports_printed_value():
    code, out, _ = call("exact", "--margin-x", "zip:lambda=2,p=0.2", "--margin-y",
                        "zip:lambda=2,p=0.2", "--copula", "frechet:alpha=0.5")
    assert code == 0
    d = json.loads(out)
    assert abs(d["rho_s"] - 0.47) <= 0.005
    assert d["rho_s_identity"] == pytest.approx(d["rho_s"], abs=1e-11)
    assert set(d["decomposition"]) >= {"p11", "rho_s11", "p1_star", "p2_dagger"}


def test_twelve_significant_digits():
    _, out, _ = call("exact", "--margin-x", "zip:lambda=2,p=0.2", "--margin-y",
                     "zip:lambda=8,p=0.2", "--copula", "m")
    rho = json.loads(out)["rho_s"]
    assert rho == float(format(rho, ".12g"))


def test_estimate_on_all_zero_rows(tmp_path):
    f = tmp_path / "z.csv"
    f.write_text("x,y\n" + "0,0\n" * 5)
    code, out, _ = call("estimate", "--input", str(f))
    assert code == 0
    d = json.loads(out)
    assert d["rho_a"] == 0
    assert "rho_s11" in d["degenerate_flags"]
    assert d["counts"]["n00"] == 5


def test_estimate_with_bounds(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("1,2\n0,0\n3,4\n2,0\n0,5\n4,1\n")
    code, out, _ = call("estimate", "--input", str(f), "--bounds")
    assert code == 0
    d = json.loads(out)
    assert d["bounds"]["rho_min"] <= d["bounds"]["rho_max"]


def test_bounds_both_methods_agree():
    code, out, _ = call("bounds", "--margin-x", "zip:lambda=2,p=0.2", "--margin-y",
                        "zip:lambda=2,p=0.2", "--method", "both")
    assert code == 0
    d = json.loads(out)
    assert d["max_abs_diff"] <= 1e-9
    assert abs(d["oracle"]["rho_max"] - 0.95) <= 0.005
    assert d["closed_form"]["located_points"]


def test_bounds_from_data(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("1,2\n0,0\n3,4\n2,0\n0,5\n4,1\n0,0\n")
    code, out, _ = call("bounds", "--input", str(f))
    d = json.loads(out)
    assert code == 0 and "caveat" in d
    assert d["inflation"]["p1"] == pytest.approx(3 / 7, rel=1e-11)
    code, out, _ = call("bounds", "--input", str(f), "--recipe", "parametric",
                        "--base", "poisson:lambda=2")
    d = json.loads(out)
    assert code == 0 and "caveat" not in d
    assert "recipe=parametric" in d["empirical"]["case_tags"]


@pytest.mark.parametrize("argv", [
    ["exact", "--margin-x", "zip:lambda=2,p=1.5", "--margin-y", "zip:lambda=2,p=0.2"],
    ["exact", "--margin-x", "zip:lambda=2,p=0.2"],
    ["exact", "--margin-x", "zip:lambda=2,p=0.2", "--margin-y", "zip:lambda=2,p=0.2", "--bogus"],
    ["bounds", "--margin-x", "zip:lambda=2,p=0.2"],
    ["bounds", "--input", "x.csv", "--margin-x", "zip:lambda=2,p=0.2"],
    ["estimate", "--input", "/nonexistent/file.csv"],
    ["simulate", "--table", "1"],
    [],
])
def test_usage_errors_exit_2(argv):
    code, out, err = call(*argv)
    assert code == 2
    assert out == ""
    assert err.startswith("zirho: error:") and err.count("\n") == 1


def test_malformed_csv(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("x,y\n1,2\n3,abc\n")
    code, _, err = call("estimate", "--input", str(f))
    assert code == 2 and "bad.csv:3" in err


def test_header_detection(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_text("x,y\n1,2\n0,3\n")
    b.write_text("1,2\n0,3\n")
    assert read_pairs_csv(a).pairs.tolist() == read_pairs_csv(b).pairs.tolist() == [[1, 2], [0, 3]]


def test_simulate_scenarios_csv(tmp_path):
    sc = tmp_path / "sc.csv"
    sc.write_text("lambda_f,lambda_g,p1,p2,alpha,n,reps\n2,2,0.2,0.2,0.5,40,4\n")
    outs = []
    for workers in ("1", "3"):
        code, out, _ = call("simulate", "--seed", "5", "--scenarios", str(sc), "--workers", workers)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
    assert outs[0].splitlines()[0].startswith("scenario_id,lambda_f")


def test_simulate_table_json_and_outputs(tmp_path):
    box, dest = tmp_path / "box.csv", tmp_path / "t3.csv"
    code, _, _ = call("simulate", "--seed", "1", "--table", "3", "--n", "30", "--reps", "2",
                      "--boxplot", str(box), "--out", str(dest))
    assert code == 0
    assert len(dest.read_text().splitlines()) == 7
    # the bounds table keeps the six alpha = 0.5 scenarios
    assert len(box.read_text().splitlines()) == 6 * 2 + 1
    code, out, _ = call("simulate", "--seed", "1", "--n", "30", "--reps", "1", "--format", "json")
    assert code == 0 and len(json.loads(out)["scenarios"]) == 18
