"""Command line front end: ``decaychaos <command> ...``.

Exit codes: 0 success (whatever the verdict), 2 configuration error,
3 unreadable or malformed input, 4 analysis failure, 5 unsupported input kind.
"""
import argparse
import logging
from pathlib import Path
import sys

from . import __version__, analysis, generators, ingest, render
from .config import (AnalysisParams, ExperimentSpec, RenderParams, SourceSpec,
                     load_experiment)
from .detector import DetectorConfig, degrade
from .errors import DecayChaosError, InvalidConfig
from .pipeline import DEMOS, run_demo, run_pipeline
from .series import EmbeddingSpec, EventTimestamps, embed, intervals_from_timestamps

COUNTS = "counts_per_bin"


def _read(path, fmt):
    if fmt == COUNTS:
        ingest.read_counts_per_bin(path)
    return ingest.read_events(path, fmt)


def _read_intervals(path, fmt):
    data = _read(path, fmt)
    return intervals_from_timestamps(data) if isinstance(data, EventTimestamps) else data


def _input_args(p):
    p.add_argument("input", help="event file (timestamps_csv or intervals_csv)")
    p.add_argument("--format", choices=ingest.FORMATS + (COUNTS,), default=None,
                   help="input format; inferred from the header line when omitted")


def _embedding_args(p):
    p.add_argument("-m", "--dimension", type=int, default=3)
    p.add_argument("--delay", type=int, default=1)


def _source_params(args):
    keys = ("n", "k", "x0", "burn_in", "rate", "low", "high", "mean", "sigma", "mu")
    params = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    for item in getattr(args, "param", None) or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidConfig(f"--param expects key=value, got {item!r}")
        params[key.strip()] = value.strip()
    return params


def _generator_args(p):
    p.add_argument("--n", type=int, help="number of values")
    p.add_argument("--k", type=float, help="logistic parameter k")
    p.add_argument("--x0", type=float, help="logistic initial value")
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--rate", type=float, help="exponential rate (1/s)")
    p.add_argument("--low", type=float)
    p.add_argument("--high", type=float)
    p.add_argument("--mean", type=float, help="gaussian mean")
    p.add_argument("--sigma", type=float, help="gaussian/lognormal sigma")
    p.add_argument("--mu", type=float, help="lognormal mu")


def _detector_args(p):
    p.add_argument("--efficiency", type=float)
    p.add_argument("--dead-time", dest="dead_time", type=float)
    p.add_argument("--quantum", type=float)
    p.add_argument("--background-rate", dest="background_rate", type=float)


def _detector_from(args, always=False):
    keys = ("efficiency", "dead_time", "quantum", "background_rate")
    given = {k: getattr(args, k) for k in keys if getattr(args, k) is not None}
    if not given and not always:
        return None
    return DetectorConfig(**given)


def cmd_generate(args):
    src = SourceSpec(args.kind, _source_params(args))
    cfg = src.generator_config()
    if args.kind == "logistic":
        series = generators.logistic_orbit(cfg)
    elif args.kind == "exponential":
        series = generators.exponential_intervals(cfg, args.seed)
    else:
        series = generators.distribution_intervals(cfg, args.seed)
    if args.timestamps:
        ingest.write_events(EventTimestamps.from_intervals(series), args.out, ingest.TIMESTAMPS)
    else:
        ingest.write_events(series, args.out, ingest.INTERVALS)
    print(f"wrote {len(series)} values to {args.out}")
    return 0


def cmd_degrade(args):
    data = _read(args.input, args.format)
    ts = data if isinstance(data, EventTimestamps) else EventTimestamps.from_intervals(data)
    stats = {}
    out = degrade(ts, _detector_from(args, always=True), args.seed, stats)
    if args.intervals:
        ingest.write_events(intervals_from_timestamps(out), args.out, ingest.INTERVALS)
    else:
        ingest.write_events(out, args.out, ingest.TIMESTAMPS)
    print(" ".join(f"{k}={v}" for k, v in stats.items()))
    return 0


def cmd_embed(args):
    cloud = embed(_read_intervals(args.input, args.format), EmbeddingSpec(args.dimension, args.delay))
    header = ",".join(f"x{k}" for k in range(cloud.dimension))
    body = "\n".join(",".join(format(float(v), ".17g") for v in row) for row in cloud.points)
    text = header + "\n" + body + "\n"
    if args.out:
        render.write_artifact(text, args.out, "report", "embedded points")
        print(f"wrote {len(cloud)} points to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_analyze(args):
    series = _read_intervals(args.input, args.format)
    spec = EmbeddingSpec(args.dimension, args.delay)
    w = spec.delay if args.theiler is None else args.theiler
    cloud = embed(series, spec)
    curve = analysis.correlation_integral(cloud, theiler=w, seed=args.seed)
    fit = tuple(args.fit_range) if args.fit_range else None
    est = analysis.estimate_dimension(curve, fit)
    report = analysis.surrogate_test(series, spec, args.surrogates, args.alpha, seed=args.seed,
                                     theiler=w, fit_range=fit, threads=args.threads,
                                     stat_seed=args.seed)
    print(f"D2 = {est.d2:.4f}  fit r in [{est.fit_range[0]:.4g}, {est.fit_range[1]:.4g}]  "
          f"rms {est.fit_residual:.3g}")
    if args.fnn:
        for m, frac in analysis.false_nearest_neighbors(series, args.fnn, spec.delay, w):
            print(f"FNN m={m}: {frac:.4f}")
    print(f"p = {report.p_value:.4g} over {report.n_surrogates} surrogates -> {report.verdict}")
    if args.out:
        out = Path(args.out)
        lines = ["r,c,pairs"] + [f"{r:.17g},{c:.17g},{int(n)}"
                                 for r, c, n in zip(curve.radii, curve.c_values, curve.pair_counts)]
        render.write_artifact("\n".join(lines) + "\n", out / "correlation.csv",
                              "correlation_curve", "correlation sum")
        rows = ["index,kind,d2", f"0,observed,{report.observed_stat:.17g}"]
        rows += [f"{k + 1},surrogate,{s:.17g}" for k, s in enumerate(report.surrogate_stats)]
        render.write_artifact("\n".join(rows) + "\n", out / "surrogates.csv", "report", "surrogates")
    return 0


def cmd_render(args):
    series = _read_intervals(args.input, args.format)
    caption = args.caption or series.label
    if args.kind == "series":
        art = render.render_series(series, args.out, caption, args.points)
    else:
        m = 2 if args.kind == "projection_2d" else 3
        cloud = embed(series, EmbeddingSpec(max(m, args.dimension), args.delay))
        axes = tuple(args.axes) if args.axes else tuple(range(m))
        art = render.render_projection(cloud, axes, args.out, caption)
    print(f"{art.kind} -> {art.path} sha256={art.sha256}")
    return 0


def _spec_from_flags(args):
    if args.input:
        params = {"path": args.input}
        if args.format:
            params["format"] = args.format
        source = SourceSpec("file", params)
    else:
        source = SourceSpec(args.source, _source_params(args))
    fit = tuple(args.fit_range) if args.fit_range else None
    return ExperimentSpec(
        source=source,
        detector=_detector_from(args),
        embedding=EmbeddingSpec(args.dimension, args.delay),
        analysis=AnalysisParams(args.surrogates, args.alpha, args.theiler, fit, args.fnn or 0),
        render=RenderParams(),
        out_dir=args.out or "out",
        seed=args.seed or 0,
        name=args.name,
    )


def cmd_run(args):
    if args.config:
        spec = load_experiment(args.config)
        spec = spec.with_overrides(seed=args.seed, out_dir=args.out)
    else:
        if args.format == COUNTS:
            ingest.read_counts_per_bin(args.input)
        spec = _spec_from_flags(args)
    result = run_pipeline(spec, threads=args.threads)
    sys.stdout.write(result.summary)
    return 0


def cmd_demo(args):
    result = run_demo(args.name, args.out, threads=args.threads)
    sys.stdout.write(result.summary)
    out = Path(args.out or result.spec.out_dir)
    for art in result.artifacts:
        if art.path.endswith(".svg"):
            print(f"{art.sha256}  {out / art.path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="decaychaos",
        description="Delay-embedding test for deterministic structure in event interval series.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a generated interval series")
    p.add_argument("kind", choices=("logistic", "exponential", "uniform", "gaussian", "lognormal"))
    _generator_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timestamps", action="store_true", help="write cumulative timestamps instead")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("degrade", help="pass an event stream through the detector model")
    _input_args(p)
    _detector_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--intervals", action="store_true", help="write intervals instead of timestamps")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("embed", help="delay-embed a series and write the points as CSV")
    _input_args(p)
    _embedding_args(p)
    p.add_argument("--seed", type=int, default=0, help="unused; accepted for uniformity")
    p.add_argument("--out")
    p.set_defaults(func=cmd_embed)

    def analysis_args(p):
        p.add_argument("--theiler", type=int, default=None, help="Theiler window (default: delay)")
        p.add_argument("--surrogates", type=int, default=19)
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--fit-range", dest="fit_range", type=float, nargs=2, metavar=("R_LO", "R_HI"))
        p.add_argument("--fnn", type=int, default=0, metavar="M_MAX",
                       help="also report false nearest neighbours up to M_MAX")
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("analyze", help="correlation dimension and surrogate test")
    _input_args(p)
    _embedding_args(p)
    analysis_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="directory for correlation.csv and surrogates.csv")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("render", help="draw a series or phase-space portrait as SVG")
    _input_args(p)
    _embedding_args(p)
    p.add_argument("--kind", choices=("series", "projection_2d", "projection_3d"), default="projection_3d")
    p.add_argument("--axes", type=int, nargs="+")
    p.add_argument("--points", type=int, default=None, help="plot only the first N values")
    p.add_argument("--caption", default="")
    p.add_argument("--seed", type=int, default=0, help="unused; accepted for uniformity")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("run", help="full pipeline from an experiment file or flags")
    p.add_argument("--config", help="experiment file (INI)")
    p.add_argument("--source", default="logistic",
                   choices=("logistic", "exponential", "uniform", "gaussian", "lognormal"))
    p.add_argument("--input", help="event file; overrides --source")
    p.add_argument("--format", choices=ingest.FORMATS + (COUNTS,), default=None)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--name", default="run")
    _generator_args(p)
    _detector_args(p)
    _embedding_args(p)
    analysis_args(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("demo", help="regenerate one of the canned figures")
    p.add_argument("name", choices=DEMOS)
    p.add_argument("--out")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=None, help="unused; demos carry their own seed")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DecayChaosError as exc:
        print(f"decaychaos {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
