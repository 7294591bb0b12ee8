import hashlib
import json
import os
from pathlib import Path
import subprocess
import sys

import numpy as np
import pytest

from decaychaos import cli, config, pipeline
from decaychaos.analysis import Verdict
from decaychaos.errors import InvalidConfig
from decaychaos.ingest import read_events

SMALL = """
[experiment]
name = small
seed = 3

[source]
kind = logistic
n = 800

[analysis]
surrogates = 19
fnn_max = 4

[render]
figures = series, projection_2d, projection_3d, correlation
series_points = 60
"""


def run(*argv):
    return cli.main([str(a) for a in argv])


def _sha(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def test_experiment_round_trip():
    spec = config.parse_experiment(SMALL)
    assert spec.source.kind == "logistic" and spec.seed == 3
    assert spec.analysis.theiler is None and spec.analysis.fnn_max == 4
    again = config.parse_experiment(config.dump_experiment(spec))
    assert again == spec


def test_experiment_with_detector_and_fit_range():
    text = SMALL.replace("fnn_max = 4", "fnn_max = 0\nfit_range = 0.01 0.2\ntheiler = 2")
    text += "\n[detector]\nefficiency = 0.5\ndead_time = 0.001\n"
    spec = config.parse_experiment(text)
    assert spec.analysis.fit_range == (0.01, 0.2) and spec.analysis.theiler == 2
    assert spec.detector.efficiency == 0.5
    assert config.parse_experiment(config.dump_experiment(spec)) == spec


@pytest.mark.parametrize("text", [
    "[experiment]\nname = x\n",
    "[source]\nkind = comet\n",
    "[source]\nkind = logistic\n[analysis]\nsurrogates = 5\n",
    "[source]\nkind = logistic\n[analysis]\nfit_range = 0.5\n",
    "[source]\nkind = logistic\n[colour]\nx = 1\n",
    "[source]\nkind = logistic\nk = lots\n",
    "[source]\nkind = logistic\n[render]\nfigures = pie\n",
    "not an ini file",
])
def test_bad_experiment_text(text):
    with pytest.raises(InvalidConfig):
        config.parse_experiment(text)


def test_run_pipeline_writes_manifest(tmp_path):
    spec = config.parse_experiment(SMALL)
    res = pipeline.run_pipeline(spec, tmp_path)
    assert res.verdict is Verdict.STRUCTURE
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    listed = {a["path"]: a["sha256"] for a in manifest["artifacts"]}
    written = {p.name for p in tmp_path.iterdir()} - {"manifest.json"}
    assert written == set(listed)
    for name, digest in listed.items():
        assert _sha(tmp_path / name) == digest
    kinds = {a["kind"] for a in manifest["artifacts"]}
    assert {"series_plot", "projection_2d", "projection_3d_views", "correlation_curve",
            "report"} <= kinds
    report = (tmp_path / "report.txt").read_text()
    for key in ("D2", "fit r in", "p-value", "verdict      structure_detected", "FNN"):
        assert key in report
    assert read_events(tmp_path / "intervals.csv") == res.series


def test_pipeline_is_deterministic_and_thread_independent(tmp_path):
    spec = config.parse_experiment(SMALL)
    pipeline.run_pipeline(spec, tmp_path / "a", threads=1)
    pipeline.run_pipeline(spec, tmp_path / "b", threads=3)
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_missing_input_file_exit_3(tmp_path):
    cfg = tmp_path / "exp.ini"
    out = tmp_path / "out"
    cfg.write_text(f"[source]\nkind = file\npath = missing.csv\nformat = timestamps_csv\n"
                   f"[output]\ndir = {out}\n")
    assert run("run", "--config", cfg) == 3
    assert [p.name for p in out.iterdir()] == ["error.log"]
    log = (out / "error.log").read_text()
    assert "stage: source" in log and "missing.csv" in log


def test_config_error_exit_2(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text("[source]\nkind = logistic\n[analysis]\nsurrogates = 3\n")
    assert run("run", "--config", cfg) == 2
    assert run("run", "--config", tmp_path / "nope.ini") == 2


def test_analysis_error_exit_4(tmp_path):
    data = tmp_path / "flat.csv"
    data.write_text("dt_seconds\n" + "0.5\n" * 300)
    out = tmp_path / "out"
    assert run("run", "--input", data, "--out", out) == 4
    assert [p.name for p in out.iterdir()] == ["error.log"]
    assert "stage: analysis" in (out / "error.log").read_text()


def test_counts_per_bin_exit_5(tmp_path, capsys):
    data = tmp_path / "counts.csv"
    data.write_text("bin,count\n0,3\n")
    assert run("run", "--input", data, "--format", "counts_per_bin", "--out", tmp_path / "o") == 5
    assert "timestamps_csv" in capsys.readouterr().err
    assert run("analyze", data, "--format", "counts_per_bin") == 5


def test_parse_error_exit_3(tmp_path):
    data = tmp_path / "bad.csv"
    data.write_text("dt_seconds\n0.5\n-1\n")
    assert run("analyze", data) == 3


def test_subcommand_chain(tmp_path, capsys):
    ts = tmp_path / "ts.csv"
    assert run("generate", "exponential", "--rate", 5, "--n", 3000, "--seed", 2,
               "--timestamps", "--out", ts) == 0
    deg = tmp_path / "deg.csv"
    assert run("degrade", ts, "--efficiency", 0.5, "--dead-time", 0.01,
               "--seed", 1, "--intervals", "--out", deg) == 0
    assert "output=" in capsys.readouterr().out
    pts = tmp_path / "pts.csv"
    assert run("embed", deg, "-m", 2, "--out", pts) == 0
    assert pts.read_text().splitlines()[0] == "x0,x1"
    assert run("analyze", deg, "--fnn", 3, "--out", tmp_path / "an") == 0
    out = capsys.readouterr().out
    assert "D2 =" in out and "FNN m=3" in out and "no_structure" in out
    assert (tmp_path / "an" / "surrogates.csv").read_text().count("surrogate") == 19
    svg = tmp_path / "p.svg"
    assert run("render", deg, "--kind", "projection_3d", "--out", svg) == 0
    assert svg.read_text().startswith("<?xml")


def test_generate_is_seeded(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run("generate", "gaussian", "--n", 100, "--seed", 4, "--out", a)
    run("generate", "gaussian", "--n", 100, "--seed", 4, "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_run_from_flags(tmp_path, capsys):
    assert run("run", "--source", "uniform", "--n", 700, "--seed", 9, "--out", tmp_path) == 0
    assert "verdict" in capsys.readouterr().out
    assert (tmp_path / "manifest.json").exists()


def test_demo_command_matches_hashes(tmp_path):
    want = json.loads((Path(__file__).parent / "data" / "demo_hashes.json").read_text())["fig2"]
    assert run("demo", "fig2", "--out", tmp_path) == 0
    for name, digest in want["svg"].items():
        assert _sha(tmp_path / name) == digest


def test_unknown_demo():
    with pytest.raises(InvalidConfig):
        pipeline.demo_spec("fig9")


def test_demo_specs_parse():
    for name in pipeline.DEMOS:
        spec = pipeline.demo_spec(name)
        assert spec.name == name
    assert "not measured" in pipeline.demo_spec("fig5").caption


def test_numpy_fallback_flag():
    code = "from decaychaos import _accel, _kernels; print(_accel.backend(), _kernels._pair_counts.__name__)"
    env = dict(os.environ, DECAYCHAOS_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.split() == ["numpy", "_pair_counts_np"]
