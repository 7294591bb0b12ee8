"""Source -> detector -> embedding -> analysis -> figures, as one run.

Nothing is written until every stage has succeeded; a failing run leaves only
``error.log`` in the output directory.
"""
from contextlib import contextmanager
from dataclasses import dataclass, field
from importlib import resources
import json
import logging
from pathlib import Path

import numpy as np

from . import analysis, generators, ingest, render
from .config import ExperimentSpec, load_experiment, parse_experiment
from .detector import degrade
from .errors import DecayChaosError, InvalidConfig
from .rng import derive_seed
from .series import EventTimestamps, IntervalSeries, embed, intervals_from_timestamps

log = logging.getLogger(__name__)

DEMOS = tuple(f"fig{k}" for k in range(1, 8))
MANIFEST = "manifest.json"
ERROR_LOG = "error.log"

_SEED_SOURCE, _SEED_DETECTOR, _SEED_SURROGATES, _SEED_RADII = 1, 2, 3, 4


class PipelineError(DecayChaosError):
    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 1)
        super().__init__(f"{stage}: {cause}")


@dataclass
class PipelineResult:
    spec: ExperimentSpec
    series: IntervalSeries
    estimate: analysis.DimensionEstimate
    report: analysis.SurrogateReport
    artifacts: list = field(default_factory=list)
    summary: str = ""
    detector_stats: dict = None
    fnn: list = None

    @property
    def verdict(self):
        return self.report.verdict


@contextmanager
def _stage(name):
    try:
        yield
    except PipelineError:
        raise
    except DecayChaosError as exc:
        raise PipelineError(name, exc) from exc


def load_source(spec):
    """The source series of ``spec`` as timestamps or intervals."""
    src = spec.source
    seed = derive_seed(spec.seed, _SEED_SOURCE)
    if src.kind == "file":
        return ingest.read_events(src.params["path"], src.params.get("format"))
    cfg = src.generator_config()
    if src.kind == "logistic":
        return generators.logistic_orbit(cfg)
    if src.kind == "exponential":
        return generators.exponential_intervals(cfg, seed)
    return generators.distribution_intervals(cfg, seed)


def _source_text(spec, series):
    src = spec.source
    if src.kind == "file":
        return f"file {src.params['path']}"
    params = " ".join(f"{k}={v}" for k, v in src.params.items())
    return f"{src.kind} {params}".strip()


def _curve_csv(curve):
    lines = ["r,c,pairs"]
    for r, c, n in zip(curve.radii, curve.c_values, curve.pair_counts):
        lines.append(f"{r:.17g},{c:.17g},{int(n)}")
    return "\n".join(lines) + "\n"


def _surrogate_csv(report):
    lines = ["index,kind,d2", f"0,observed,{report.observed_stat:.17g}"]
    lines += [f"{k + 1},surrogate,{s:.17g}" for k, s in enumerate(report.surrogate_stats)]
    return "\n".join(lines) + "\n"


def _fnn_csv(fnn):
    return "m,fnn_fraction\n" + "".join(f"{m},{f:.17g}\n" for m, f in fnn)


def summarize(spec, series, cloud, curve, est, report, stats=None, fnn=None):
    lines = [f"decaychaos run: {spec.name}"]
    if spec.caption:
        lines.append(f"  {spec.caption}")
    lines.append(f"source       {_source_text(spec, series)}")
    if spec.detector is None:
        lines.append("detector     ideal")
    else:
        d = spec.detector
        lines.append(f"detector     efficiency={d.efficiency:g} dead_time={d.dead_time:g} s "
                     f"quantum={d.quantum:g} s background={d.background_rate:g}/s")
        if stats:
            lines.append(f"             events {stats['input']} -> {stats['output']} "
                         f"(+{stats['background_added']} background, {stats['collapsed']} collapsed)")
    lines.append(f"intervals    {len(series)}")
    lines.append(f"embedding    m={cloud.spec.dimension} delay={cloud.spec.delay} "
                 f"points={len(cloud)} theiler={curve.theiler}")
    mode = "sampled" if curve.sampled else "exact"
    lines.append(f"correlation  {curve.radii.size} radii, {curve.n_pairs} pairs ({mode})")
    lines.append(f"D2           {est.d2:.4f}  fit r in [{est.fit_range[0]:.4g}, {est.fit_range[1]:.4g}] "
                 f"over {est.n_radii} radii, rms {est.fit_residual:.3g}")
    s = np.asarray(report.surrogate_stats)
    lines.append(f"surrogates   {s.size} permutations, D2 in [{s.min():.4f}, {s.max():.4f}]")
    if fnn:
        lines.append("FNN          " + "  ".join(f"m={m}:{f:.3f}" for m, f in fnn))
    lines.append(f"p-value      {report.p_value:.4g} (alpha {report.alpha:g})")
    lines.append(f"verdict      {report.verdict}")
    return "\n".join(lines) + "\n"


def _analyze(spec, threads):
    with _stage("source"):
        raw = load_source(spec)
    stats = None
    with _stage("detector"):
        if spec.detector is not None:
            ts = raw if isinstance(raw, EventTimestamps) else EventTimestamps.from_intervals(raw)
            stats = {}
            ts = degrade(ts, spec.detector, derive_seed(spec.seed, _SEED_DETECTOR), stats)
            series = intervals_from_timestamps(ts)
        elif isinstance(raw, EventTimestamps):
            series = intervals_from_timestamps(raw)
        else:
            series = raw
    a = spec.analysis
    theiler = spec.embedding.delay if a.theiler is None else a.theiler
    with _stage("embedding"):
        cloud = embed(series, spec.embedding)
    with _stage("analysis"):
        stat_seed = derive_seed(spec.seed, _SEED_RADII)
        curve = analysis.correlation_integral(cloud, theiler=theiler, seed=stat_seed)
        est = analysis.estimate_dimension(curve, a.fit_range)
        report = analysis.surrogate_test(
            series, spec.embedding, a.surrogates, a.alpha,
            seed=derive_seed(spec.seed, _SEED_SURROGATES), theiler=theiler,
            fit_range=a.fit_range, threads=threads or a.threads, stat_seed=stat_seed)
        fnn = None
        if a.fnn_max > 0:
            fnn = analysis.false_nearest_neighbors(series, a.fnn_max, spec.embedding.delay, theiler)
    return series, cloud, curve, est, report, stats, fnn


def _figures(spec, series, cloud, curve, est):
    """``(filename, kind, caption, svg)`` for every requested figure."""
    name = spec.name
    cap = spec.caption or name
    out = []
    figs = spec.render.figures
    if "series" in figs:
        out.append(("series.svg", "series_plot", f"{cap}: interval series",
                    render.series_svg(series, spec.render.series_points, f"{cap}: t_i against i")))
    if "projection_2d" in figs and cloud.dimension >= 2:
        out.append(("attractor_2d.svg", "projection_2d", f"{cap}: reconstructed phase space, 2-D",
                    render.projection_svg(cloud, (0, 1), f"{cap}: phase space (2-D)")))
    if "projection_3d" in figs and cloud.dimension >= 3:
        out.append(("attractor_3d.svg", "projection_3d_views", f"{cap}: reconstructed phase space, 3-D",
                    render.views_svg(cloud, f"{cap}: phase space (3-D views)")))
    if "correlation" in figs:
        out.append(("correlation.svg", "correlation_curve", f"{cap}: correlation sum",
                    render.correlation_svg(curve, est, f"{cap}: correlation sum, m={cloud.dimension}")))
    return out


def _write_error(out_dir, exc):
    try:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stage = getattr(exc, "stage", "setup")
        (out / ERROR_LOG).write_text(f"stage: {stage}\nerror: {type(getattr(exc, 'cause', exc)).__name__}\n"
                                     f"message: {exc}\n", encoding="utf-8")
    except OSError:
        log.exception("could not write error log to %s", out_dir)


def run_pipeline(spec, out_dir=None, threads=None):
    """Run ``spec`` end to end and write its artifacts plus ``manifest.json``."""
    out = Path(out_dir or spec.out_dir)
    try:
        series, cloud, curve, est, report, stats, fnn = _analyze(spec, threads)
        with _stage("render"):
            figures = _figures(spec, series, cloud, curve, est)
    except PipelineError as exc:
        _write_error(out, exc)
        raise
    summary = summarize(spec, series, cloud, curve, est, report, stats, fnn)
    tables = [
        ("intervals.csv", "report", "analyzed interval series",
         ingest.format_events(series, ingest.INTERVALS)),
        ("correlation.csv", "correlation_curve", "correlation sum C(r) and pair counts",
         _curve_csv(curve)),
        ("surrogates.csv", "report", "D2 of the observed series and its surrogates",
         _surrogate_csv(report)),
    ]
    if fnn:
        tables.append(("fnn.csv", "report", "false nearest neighbour fractions", _fnn_csv(fnn)))
    tables.append(("report.txt", "report", "run summary and verdict", summary))
    artifacts = []
    with _stage("output"):
        try:
            for fname, kind, caption, text in figures + tables:
                art = render.write_artifact(text, out / fname, kind, caption)
                artifacts.append(render.FigureArtifact(kind, fname, caption, art.sha256))
            manifest = {
                "name": spec.name,
                "verdict": str(report.verdict),
                "p_value": report.p_value,
                "d2": est.d2,
                "artifacts": [a.as_dict() for a in artifacts],
            }
            (out / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
        except DecayChaosError as exc:
            _write_error(out, PipelineError("output", exc))
            raise
    return PipelineResult(spec, series, est, report, artifacts, summary, stats, fnn)


def demo_spec(name):
    if name not in DEMOS:
        raise InvalidConfig(f"unknown demo {name!r}; expected one of {', '.join(DEMOS)}")
    text = resources.files("decaychaos.demos").joinpath(f"{name}.ini").read_text(encoding="utf-8")
    return parse_experiment(text)


def run_demo(name, out_dir=None, threads=None):
    spec = demo_spec(name)
    return run_pipeline(spec, out_dir or Path(spec.out_dir), threads)


__all__ = ["run_pipeline", "run_demo", "demo_spec", "load_experiment", "PipelineError",
           "PipelineResult", "DEMOS"]
