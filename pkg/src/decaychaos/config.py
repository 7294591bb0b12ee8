"""Experiment files.

An experiment is an INI file (``configparser`` syntax, ``#`` comments,
inline comments allowed)::

    # Logistic map, k = 4: deterministic chaos that looks random.
    [experiment]
    name = logistic
    seed = 1                  # master seed; every stage derives its own

    [source]
    kind = logistic           # logistic | exponential | uniform | gaussian | lognormal | file
    n = 4000
    k = 4.0
    x0 = 0.2
    burn_in = 1000

    [detector]                # optional; omit for an ideal detector
    efficiency = 0.5
    dead_time = 0.0
    quantum = 0.0
    background_rate = 0.0

    [embedding]
    dimension = 3
    delay = 1

    [analysis]
    surrogates = 19
    alpha = 0.05
    theiler = 1               # default: the embedding delay
    fit_range = auto          # or two radii, e.g. "0.01 0.1"

    [render]
    figures = series, projection_2d, projection_3d, correlation
    series_points = 200

    [output]
    dir = out/logistic

Source keys by kind: ``logistic`` k, x0, burn_in; ``exponential`` rate;
``uniform`` low, high; ``gaussian`` mean, sigma; ``lognormal`` mu, sigma;
``file`` path, format (``timestamps_csv`` or ``intervals_csv``, optional when
the file has a header). Every kind except ``file`` takes ``n``.
"""
import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .detector import DetectorConfig
from .errors import InvalidConfig
from .generators import (DecayConfig, DistributionConfig, LogisticConfig)
from .series import EmbeddingSpec

SOURCE_KINDS = ("logistic", "exponential", "uniform", "gaussian", "lognormal", "file")
FIGURES = ("series", "projection_2d", "projection_3d", "correlation")


@dataclass(frozen=True)
class SourceSpec:
    kind: str = "logistic"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise InvalidConfig(f"unknown source kind {self.kind!r}; expected one of "
                                f"{', '.join(SOURCE_KINDS)}")
        self.generator_config()

    def _get(self, key, default, cast=float):
        raw = self.params.get(key, default)
        try:
            return cast(raw)
        except (TypeError, ValueError):
            raise InvalidConfig(f"source.{key}: cannot read {raw!r} as {cast.__name__}") from None

    def generator_config(self):
        """Config object of the matching generator (``None`` for files)."""
        k = self.kind
        if k == "file":
            if "path" not in self.params:
                raise InvalidConfig("file source needs a path")
            return None
        n = self._get("n", 4000, int)
        if k == "logistic":
            return LogisticConfig(self._get("k", 4.0), self._get("x0", 0.2), n,
                                  self._get("burn_in", 1000, int))
        if k == "exponential":
            return DecayConfig(self._get("rate", 1.0), n)
        if k == "uniform":
            return DistributionConfig.uniform(self._get("low", 0.0), self._get("high", 1.0), n)
        if k == "gaussian":
            return DistributionConfig.gaussian(self._get("mean", 1.0), self._get("sigma", 0.2), n)
        return DistributionConfig.lognormal(self._get("mu", 0.0), self._get("sigma", 0.5), n)


@dataclass(frozen=True)
class AnalysisParams:
    surrogates: int = 19
    alpha: float = 0.05
    theiler: int = None
    fit_range: tuple = None
    fnn_max: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.surrogates < 19:
            raise InvalidConfig(f"analysis.surrogates must be >= 19, got {self.surrogates}")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidConfig(f"analysis.alpha must be in (0, 1), got {self.alpha}")
        if self.theiler is not None and self.theiler < 0:
            raise InvalidConfig("analysis.theiler must be >= 0")
        if self.fit_range is not None:
            lo, hi = self.fit_range
            if not 0.0 < lo < hi:
                raise InvalidConfig(f"analysis.fit_range must be 0 < lo < hi, got {self.fit_range}")
        if self.threads < 1:
            raise InvalidConfig("threads must be >= 1")


@dataclass(frozen=True)
class RenderParams:
    figures: tuple = FIGURES
    series_points: int = 200

    def __post_init__(self):
        bad = [f for f in self.figures if f not in FIGURES]
        if bad:
            raise InvalidConfig(f"unknown figures {bad}; expected some of {', '.join(FIGURES)}")


@dataclass(frozen=True)
class ExperimentSpec:
    source: SourceSpec = field(default_factory=SourceSpec)
    detector: DetectorConfig = None
    embedding: EmbeddingSpec = field(default_factory=EmbeddingSpec)
    analysis: AnalysisParams = field(default_factory=AnalysisParams)
    render: RenderParams = field(default_factory=RenderParams)
    out_dir: str = "out"
    seed: int = 0
    name: str = "experiment"
    caption: str = ""

    def with_overrides(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _parser():
    return configparser.ConfigParser(inline_comment_prefixes=("#", ";"),
                                     interpolation=None)


def _num(section, key, cast, default):
    if key not in section:
        return default
    raw = section[key]
    try:
        return cast(raw)
    except ValueError:
        raise InvalidConfig(f"[{section.name}] {key}: cannot read {raw!r}") from None


def parse_experiment(text, base_dir=None):
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise InvalidConfig(f"experiment file: {exc}") from None
    known = {"experiment", "source", "detector", "embedding", "analysis", "render", "output"}
    extra = set(cp.sections()) - known
    if extra:
        raise InvalidConfig(f"unknown sections: {', '.join(sorted(extra))}")
    if "source" not in cp:
        raise InvalidConfig("experiment needs a [source] section")
    exp = cp["experiment"] if "experiment" in cp else {}

    src = dict(cp["source"])
    kind = src.pop("kind", None)
    if kind is None:
        raise InvalidConfig("[source] needs a kind")
    if kind == "file" and base_dir is not None and "path" in src:
        p = Path(src["path"])
        src["path"] = str(p if p.is_absolute() else Path(base_dir) / p)
    source = SourceSpec(kind, src)

    detector = None
    if "detector" in cp:
        d = cp["detector"]
        detector = DetectorConfig(_num(d, "efficiency", float, 1.0), _num(d, "dead_time", float, 0.0),
                                  _num(d, "quantum", float, 0.0), _num(d, "background_rate", float, 0.0))

    emb = cp["embedding"] if "embedding" in cp else None
    embedding = EmbeddingSpec(_num(emb, "dimension", int, 3), _num(emb, "delay", int, 1)) if emb else EmbeddingSpec()

    analysis = AnalysisParams()
    if "analysis" in cp:
        a = cp["analysis"]
        fit = a.get("fit_range", "auto").strip()
        fit_range = None
        if fit.lower() != "auto":
            try:
                lo, hi = (float(v) for v in fit.replace(",", " ").split())
            except ValueError:
                raise InvalidConfig(f"[analysis] fit_range: expected 'auto' or two radii, got {fit!r}") from None
            fit_range = (lo, hi)
        theiler = a.get("theiler", "auto").strip()
        analysis = AnalysisParams(
            _num(a, "surrogates", int, 19), _num(a, "alpha", float, 0.05),
            None if theiler.lower() == "auto" else _num(a, "theiler", int, None),
            fit_range, _num(a, "fnn_max", int, 0), _num(a, "threads", int, 1))

    render = RenderParams()
    if "render" in cp:
        r = cp["render"]
        figs = tuple(f.strip() for f in r.get("figures", ",".join(FIGURES)).split(",") if f.strip())
        render = RenderParams(figs, _num(r, "series_points", int, 200))

    out_dir = cp["output"].get("dir", "out") if "output" in cp else "out"
    return ExperimentSpec(source, detector, embedding, analysis, render, out_dir,
                          _num(exp, "seed", int, 0) if exp else 0,
                          exp.get("name", "experiment") if exp else "experiment",
                          exp.get("caption", "") if exp else "")


def load_experiment(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidConfig(f"cannot read experiment file {path}: {exc.strerror or exc}") from None
    return parse_experiment(text, Path(path).parent)


def dump_experiment(spec):
    """Render ``spec`` back to experiment-file text."""
    lines = ["[experiment]", f"name = {spec.name}", f"seed = {spec.seed}"]
    if spec.caption:
        lines.append(f"caption = {spec.caption}")
    lines += ["", "[source]", f"kind = {spec.source.kind}"]
    lines += [f"{k} = {v}" for k, v in spec.source.params.items()]
    if spec.detector is not None:
        lines += ["", "[detector]"]
        lines += [f"{f.name} = {getattr(spec.detector, f.name)!r}" for f in fields(spec.detector)]
    lines += ["", "[embedding]", f"dimension = {spec.embedding.dimension}",
              f"delay = {spec.embedding.delay}"]
    a = spec.analysis
    fit = "auto" if a.fit_range is None else f"{a.fit_range[0]!r} {a.fit_range[1]!r}"
    lines += ["", "[analysis]", f"surrogates = {a.surrogates}", f"alpha = {a.alpha!r}",
              f"theiler = {'auto' if a.theiler is None else a.theiler}", f"fit_range = {fit}",
              f"fnn_max = {a.fnn_max}", f"threads = {a.threads}"]
    lines += ["", "[render]", f"figures = {', '.join(spec.render.figures)}",
              f"series_points = {spec.render.series_points}"]
    lines += ["", "[output]", f"dir = {spec.out_dir}", ""]
    return "\n".join(lines)
