"""Command-line pipeline: artifacts, manifests, exit codes, reruns.

Everything here runs at coarse resolution; the point is plumbing, not
numerics. Exit-code contract: 0 success, 1 pipeline failure, 2 usage.
"""

import csv
import json
import math
import re
import shutil
from pathlib import Path

import pytest

from pushedfronts.cli import _parse_alphas, main

MANIFEST_RE = re.compile(r"^# manifest=[0-9a-f]{64}$")


def _run(*argv) -> int:
    return main([str(a) for a in argv])


def _read_rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _first_line(path) -> str:
    return Path(path).read_text(encoding="utf-8").splitlines()[0]


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


@pytest.fixture(scope="module")
def cheap_constants_csv(workdir):
    """One coarse constants row at alpha = 0.75 for theory plumbing."""
    out = workdir / "theory.csv"
    rc = _run(
        "constants", "--alphas", "0.75", "--h", "0.08", "--dt", "4e-3",
        "--trunc-T", "15", "--xmin", "-30", "--xmax", "30", "--out", out,
    )
    assert rc == 0
    return out


@pytest.fixture(scope="module")
def small_ensemble_csv(workdir):
    """Four short replicates, no statistics pass."""
    out = workdir / "small.csv"
    rc = _run(
        "simulate", "--alpha", "0.75", "--N", "1000", "--T", "5",
        "--replicates", "4", "--out", out,
    )
    assert rc == 0
    return out


# ---------------------------------------------------------------------------
# profile


class TestProfile:
    def test_artifact_shape(self, workdir):
        out = workdir / "profile.csv"
        rc = _run("profile", "--alpha", "0.75", "--h", "0.1",
                  "--xmin", "-20", "--xmax", "20", "--out", out)
        assert rc == 0
        assert MANIFEST_RE.match(_first_line(out))
        rows = _read_rows(out)
        assert list(rows[0].keys()) == ["x", "m", "dm", "residual"]
        assert len(rows) == 401
        m = [float(r["m"]) for r in rows]
        assert all(a >= b for a, b in zip(m, m[1:]))  # front decreases rightward
        assert max(abs(float(r["residual"])) for r in rows) < 1e-3

        sidecar = json.loads(Path(str(out) + ".manifest.json").read_text())
        assert sidecar["command"] == "profile"
        assert sidecar["config"]["alpha"] == 0.75
        assert sidecar["manifest"] == _first_line(out).split("=", 1)[1]

    def test_rerun_byte_identical_across_paths(self, workdir):
        args = ["profile", "--alpha", "0.5", "--h", "0.1", "--xmin", "-15", "--xmax", "15"]
        a, b = workdir / "p_a.csv", workdir / "p_b.csv"
        assert _run(*args, "--out", a) == 0
        assert _run(*args, "--out", b) == 0
        assert a.read_bytes() == b.read_bytes()  # out path is not fingerprinted

    def test_bad_alpha_is_usage_error(self, workdir):
        assert _run("profile", "--alpha", "2.5", "--out", workdir / "x.csv") == 2


# ---------------------------------------------------------------------------
# constants


class TestConstants:
    def test_alphas_forms(self):
        assert _parse_alphas("0.5,1.0") == [0.5, 1.0]
        assert _parse_alphas("0.2:0.4:0.1") == [0.2, 0.3, 0.4]
        for bad in ("0.5:0.1", "a,b", "", "0.4:0.2:0.1"):
            with pytest.raises(Exception):
                _parse_alphas(bad)

    def test_coarse_row_contents(self, cheap_constants_csv):
        rows = _read_rows(cheap_constants_csv)
        assert len(rows) == 1
        row = rows[0]
        assert row["status"] == "ok"
        a1, closed = float(row["A1"]), float(row["A1_closed"])
        assert abs(a1 - closed) / closed < 1e-2  # coarse grid, loose band
        assert float(row["sigma2"]) == a1
        assert float(row["mu"]) > 0.0
        assert float(row["A2"]) < 0.0

    def test_default_horizon_is_per_alpha(self, workdir):
        # without --trunc-T the horizon follows the alpha: the tail budget
        # near the edge of the pushed band needs 80, the rest converge at 30
        out = workdir / "knee.csv"
        assert _run(
            "constants", "--alphas", "0.2,1.3", "--h", "0.08", "--dt", "4e-3",
            "--xmin", "-30", "--xmax", "30", "--out", out,
        ) == 0
        rows = _read_rows(out)
        assert [r["status"] for r in rows] == ["ok", "ok"]
        assert [float(r["trunc_T"]) for r in rows] == [30.0, 80.0]

    def test_malformed_range_is_usage_error(self, workdir):
        assert _run("constants", "--alphas", "0.5:0.1", "--out", workdir / "c.csv") == 2


# ---------------------------------------------------------------------------
# simulate / analyze


class TestSimulateAnalyze:
    def test_ensemble_artifact(self, small_ensemble_csv):
        rows = _read_rows(small_ensemble_csv)
        assert list(rows[0].keys()) == ["replicate", "t_w", "t_paper", "eta", "R", "rN", "flag"]
        assert len(rows) == 4 * 6  # 4 replicates, records at t = 0..5
        for r in rows:
            assert r["flag"] == ""
            assert float(r["t_paper"]) == pytest.approx(float(r["t_w"]) / 1000.0, abs=0.0)
            assert math.isfinite(float(r["eta"]))

    def test_rerun_byte_identical(self, workdir, small_ensemble_csv):
        again = workdir / "small2.csv"
        rc = _run("simulate", "--alpha", "0.75", "--N", "1000", "--T", "5",
                  "--replicates", "4", "--out", again)
        assert rc == 0
        assert again.read_bytes() == Path(small_ensemble_csv).read_bytes()

    def test_noise_off_smoke(self, workdir):
        out = workdir / "inf.csv"
        rc = _run("simulate", "--alpha", "0.75", "--N", "inf", "--T", "2",
                  "--replicates", "1", "--out", out)
        assert rc == 0
        assert all(float(r["t_paper"]) == 0.0 for r in _read_rows(out))

    def test_stats_pipeline_and_parity(self, workdir, cheap_constants_csv):
        ens = workdir / "med.csv"
        stats_a = workdir / "med_stats.csv"
        rc = _run(
            "simulate", "--alpha", "0.75", "--N", "1000", "--T", "5",
            "--replicates", "50", "--constants", cheap_constants_csv,
            "--out", ens, "--stats-out", stats_a,
        )
        assert rc == 0
        stats_b = workdir / "reanalyzed.csv"
        rc = _run("analyze", "--ensemble", ens, "--constants", cheap_constants_csv,
                  "--out", stats_b)
        assert rc == 0
        # same data rows whether computed in-run or re-derived from the CSV
        rows_a, rows_b = _read_rows(stats_a), _read_rows(stats_b)
        assert rows_a == rows_b
        assert int(rows_a[0]["n"]) == 50
        theory = _read_rows(cheap_constants_csv)[0]
        assert float(rows_a[0]["mu"]) == float(theory["mu"])
        assert float(rows_a[0]["sigma2"]) == float(theory["sigma2"])

    def test_constants_by_content_not_path(self, workdir, cheap_constants_csv, small_ensemble_csv):
        moved = workdir / "renamed_theory.csv"
        shutil.copyfile(cheap_constants_csv, moved)
        # the caller knows this run lacks the replicate count for statistics;
        # the point is only that the manifest keys inputs by content
        csv_a, csv_b = workdir / "h_a.csv", workdir / "h_b.csv"
        for path, const in ((csv_a, cheap_constants_csv), (csv_b, moved)):
            rc = _run("simulate", "--alpha", "0.75", "--N", "1000", "--T", "5",
                      "--replicates", "4", "--constants", const,
                      "--out", path, "--stats-out", workdir / (path.stem + "_s.csv"))
            assert rc == 1  # 4 replicates < statistics threshold
        assert csv_a.read_bytes() == csv_b.read_bytes()

    def test_too_few_replicates_propagates_statistics_error(
        self, workdir, small_ensemble_csv, cheap_constants_csv
    ):
        out = workdir / "nostats.csv"
        rc = _run("analyze", "--ensemble", small_ensemble_csv,
                  "--constants", cheap_constants_csv, "--out", out)
        assert rc == 1
        assert not out.exists()

    def test_missing_flags_usage_error(self, workdir, cheap_constants_csv):
        assert _run("analyze", "--constants", cheap_constants_csv,
                    "--out", workdir / "y.csv") == 2

    def test_missing_input_file_is_pipeline_error(self, workdir, cheap_constants_csv):
        rc = _run("analyze", "--ensemble", workdir / "no_such.csv",
                  "--constants", cheap_constants_csv, "--out", workdir / "z.csv")
        assert rc == 1

    def test_bad_spde_parameters_usage_error(self, workdir):
        assert _run("simulate", "--alpha", "0.75", "--N", "-3",
                    "--out", workdir / "n.csv") == 2
        # cut does not fit: (1.05) log(1e6) + 1 > 14
        assert _run("simulate", "--alpha", "0.75", "--N", "1e6",
                    "--xmin", "-15", "--xmax", "15",
                    "--out", workdir / "m.csv") == 2


# ---------------------------------------------------------------------------
# config file


class TestConfigFile:
    def test_flag_overrides_file_overrides_default(self, workdir):
        cfg = workdir / "run.cfg"
        cfg.write_text("h = 0.1\nalpha = 0.5\n# comment\n\nxmin = -15\nxmax = 15\n")
        out = workdir / "cfgrun.csv"
        rc = _run("profile", "--config", cfg, "--alpha", "0.75", "--out", out)
        assert rc == 0
        side = json.loads(Path(str(out) + ".manifest.json").read_text())["config"]
        assert side["alpha"] == 0.75  # flag wins
        assert side["h"] == 0.1  # file beats default
        assert side["seed"] == 0  # untouched default

    def test_malformed_line_rejected(self, workdir):
        cfg = workdir / "bad.cfg"
        cfg.write_text("h 0.1\n")
        assert _run("profile", "--config", cfg, "--out", workdir / "b.csv") == 2

    def test_unparseable_value_rejected(self, workdir):
        cfg = workdir / "worse.cfg"
        cfg.write_text("h = fine\n")
        assert _run("profile", "--config", cfg, "--out", workdir / "w.csv") == 2


# ---------------------------------------------------------------------------
# validate


class TestValidate:
    def test_quick_subset_passes(self, workdir, capsys):
        out = workdir / "report.txt"
        rc = _run("validate", "--quick", "--out", out)
        captured = capsys.readouterr().out
        assert rc == 0
        assert "FAIL" not in captured
        assert captured.count("PASS") >= 5
        text = out.read_text(encoding="utf-8")
        assert MANIFEST_RE.match(text.splitlines()[0])

    def test_bad_alpha_usage_error(self):
        assert _run("validate", "--alpha", "2.5", "--quick") == 2
