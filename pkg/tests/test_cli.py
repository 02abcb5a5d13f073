"""Command-line behaviour: output formats, exit codes and error lines."""

import csv
import io
import json

import pytest

from gpd.cli import main

TABLE_HEADER = "variable,n_hat,rho,z,method,value,err_estimate"
MC_HEADER = "z,empirical_cdf,closed_cdf,abs_diff"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cdf_plain(capsys):
    code, out, _ = run(capsys, "cdf", "--z", "0", "--rho", "0")
    assert code == 0
    assert out.split()[:2] == ["closed", "0.5"]


def test_cdf_all_methods_csv(capsys):
    code, out, _ = run(capsys, "cdf", "--z", "1", "--rho", "0.5", "--method", "all", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["method"] for r in rows] == ["closed", "mixture", "k0"]
    values = [float(r["value"]) for r in rows]
    assert max(values) - min(values) < 1e-12


def test_cdf_json(capsys):
    code, out, _ = run(capsys, "cdf", "--z", "-1", "--rho", "0", "--format", "json")
    assert code == 0
    (record,) = json.loads(out)
    assert record["value"] == pytest.approx(0.104496831502326, abs=1e-13)


def test_pdf_and_singularity(capsys):
    code, out, _ = run(capsys, "pdf", "--z", "1", "--rho", "0", "--format", "json")
    assert code == 0
    assert json.loads(out)["pdf"] > 0
    code, _, err = run(capsys, "pdf", "--z", "0", "--rho", "0")
    assert code == 1
    assert err.startswith("error:")


@pytest.mark.parametrize("argv", [
    ["cdf", "--z", "1", "--rho", "2"],
    ["cdf", "--z", "1", "--rho", "0.995"],
    ["cdf", "--z", "nan", "--rho", "0"],
])
def test_domain_errors_exit_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert out == ""
    assert err.startswith("error:")


@pytest.mark.parametrize("argv", [
    ["cdf", "--rho", "0"],
    ["cdf", "--z", "x", "--rho", "0"],
    ["nosuch"],
    [],
    ["cdf", "--z", "1", "--rho", "0", "--var", "mean", "--n", "0"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error:" in err


@pytest.mark.parametrize("name,value", [("GPD_QUAD_ORDER", "abc"), ("GPD_QUAD_ORDER", "2"), ("GPD_RHO_MAX", "1.5")])
def test_bad_environment_exit_2(capsys, monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    code, _, err = run(capsys, "cdf", "--z", "1", "--rho", "0")
    assert code == 2
    assert err.startswith("error:")


def test_rho_max_env_widens_range(capsys, monkeypatch):
    monkeypatch.setenv("GPD_RHO_MAX", "0.9999")
    code, out, _ = run(capsys, "cdf", "--z", "1", "--rho", "0.995")
    assert code == 0


def test_table_default_grid(capsys):
    code, out, _ = run(capsys, "table")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == TABLE_HEADER
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 2412
    hit = [r for r in rows if r["variable"] == "product" and float(r["rho"]) == 0.0
           and float(r["z"]) == 0.0 and r["method"] == "closed"]
    assert len(hit) == 1 and float(hit[0]["value"]) == 0.5


def test_table_output_and_plot(capsys, tmp_path):
    csv_path = tmp_path / "t.csv"
    png_path = tmp_path / "t.png"
    code, _, _ = run(capsys, "table", "--rho-list=-0.5,0.5", "--z-steps", "11", "--methods", "closed,mixture",
                     "--var", "mean", "--n", "4", "--output", str(csv_path), "--plot", str(png_path))
    assert code == 0
    rows = list(csv.DictReader(csv_path.open()))
    assert len(rows) == 2 * 11 * 2
    assert {r["n_hat"] for r in rows} == {"4"}
    assert png_path.read_bytes()[:4] == b"\x89PNG"


def test_mc_csv_json_and_determinism(capsys, tmp_path):
    argv = ["mc", "--rho", "0.5", "--samples", "20000", "--seed", "7", "--z-steps", "9"]
    code, out1, _ = run(capsys, *argv)
    assert code == 0
    lines = out1.splitlines()
    assert lines[0] == MC_HEADER
    assert len(lines) == 1 + 9 + 1
    summary = json.loads(lines[-1])
    assert set(summary) == {"ks_distance", "sample_mean", "sample_var", "seed", "n_samples"}
    assert summary["seed"] == 7 and summary["n_samples"] == 20000
    _, out2, _ = run(capsys, *argv, "--threads", "2")
    assert out1 == out2
    png = tmp_path / "mc.png"
    code, _, _ = run(capsys, *argv, "--plot", str(png))
    assert code == 0 and png.read_bytes()[:4] == b"\x89PNG"


def test_mc_sharded_is_reproducible(capsys):
    argv = ["mc", "--rho", "-0.5", "--var", "sum", "--n", "3", "--samples", "20000", "--shards", "4", "--z-steps", "5"]
    _, a, _ = run(capsys, *argv, "--threads", "1")
    _, b, _ = run(capsys, *argv, "--threads", "4")
    assert a == b


def test_mc_rejects_tiny_sample(capsys):
    code, _, err = run(capsys, "mc", "--rho", "0", "--samples", "10")
    assert code in (1, 2)
    assert err.startswith("error:")


def test_bench_sections(capsys):
    code, out, _ = run(capsys, "bench", "--var", "product", "--reps", "3")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["section", "quantity", "rho=-0.9", "rho=0", "rho=0.5", "rho=0.9"]
    sections = {r[0] for r in rows[1:]}
    assert "timing_nondeterministic" in sections
    assert "diff_closed_mixture" in sections
    for r in rows[1:]:
        if r[0] == "diff_closed_mixture":
            assert all(float(x) < 5e-12 for x in r[2:])


def test_bench_plain(capsys):
    code, out, _ = run(capsys, "bench", "--var", "mean", "--n", "2", "--reps", "3", "--format", "plain")
    assert code == 0 and out.strip()


def test_selftest_quick(capsys):
    code, out, _ = run(capsys, "selftest", "--quick")
    assert code == 0
    assert "FAIL" not in out


def test_selftest_detects_convention_swap(capsys):
    code, out, _ = run(capsys, "selftest", "--quick", "--inject-convention-swap")
    assert code == 1
    assert "FAIL" in out
