"""Experiment driver: metric suites, the three noise/projection experiments,
correlations, rankings and report emission."""

from __future__ import annotations

import json
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from scipy import stats

from . import segmetrics as sm
from .bleu import bleu_signature
from .core import (
    Corpus,
    MassMode,
    SegmentedText,
    check_comparable,
    lines,
    select_boundaries,
    to_masses,
)
from .mt import DEFAULT_MASK, bleu_br, ter_br
from .noise import NoiseKind, NoiseSpec, noise_segmentation, noise_text
from .projection import project_boundaries
from .sigma import UNDEFINED, sigma
from .ter import ter_signature

logger = logging.getLogger(__name__)

SCHEMA = "evalsub-report/1"

SEG_METRICS = ("Pk", "WindowDiff", "SegSim", "BoundSim", "Precision", "Recall", "F1")
EXP1_METRICS = SEG_METRICS + ("BLEU_br", "TER_br")
TYPE_AWARE = frozenset({"BoundSim", "BLEU_br", "TER_br"})
# error metrics: lower is better
LOWER_BETTER = frozenset({"Pk", "WindowDiff", "TER_br", "TER_br@proj", "TER_br@raw"})

EXP1_KINDS = (("shift", 1), ("shift", 2), ("shift", 3), ("add", None), ("delete", None),
              ("replace", None))
EXP1_PERCENTAGES = (20, 40, 60, 80, 100)
EXP2_TEXT_LEVELS = tuple(range(0, 100, 10))
EXP2_SEG_LEVELS = tuple(range(0, 100, 10))
# BLEU_nb interval typical of real system outputs
REALISTIC_BLEU_NB = (25.0, 55.0)
SYNTHETIC_SYSTEMS = (("sys1", 10, 10), ("sys2", 20, 30), ("sys3", 30, 50), ("sys4", 40, 70))


# -- basic measures -------------------------------------------------------------

def length_conformity(corpus: Corpus, max_chars: int = 42) -> float:
    """Fraction of lines whose text fits in ``max_chars`` characters."""
    total = ok = 0
    for s in corpus:
        for line in lines(s):
            total += 1
            ok += len(" ".join(line)) <= max_chars
    return ok / total if total else 1.0


def pearson(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Sample Pearson coefficient, or None when either side has zero variance."""
    if len(x) != len(y):
        raise ValueError("length mismatch")
    if len(x) < 2:
        return None
    try:
        r = statistics.correlation(x, y)
    except statistics.StatisticsError:
        return None
    # rounding on near-degenerate inputs can overshoot the unit interval
    return max(-1.0, min(1.0, r))


@dataclass(frozen=True)
class CorrelationMatrix:
    labels: tuple[str, ...]
    values: tuple[tuple[float | None, ...], ...]
    sizes: tuple[tuple[int, ...], ...]

    def get(self, a: str, b: str) -> float | None:
        return self.values[self.labels.index(a)][self.labels.index(b)]

    def to_tsv(self) -> str:
        out = ["\t".join(("metric",) + self.labels)]
        for label, row in zip(self.labels, self.values):
            out.append("\t".join([label] + [_fmt(v) for v in row]))
        return "\n".join(out) + "\n"

    def to_dict(self) -> dict:
        return {"labels": list(self.labels),
                "values": [[UNDEFINED if v is None else v for v in row] for row in self.values],
                "sizes": [list(r) for r in self.sizes]}


def correlation_matrix(columns: Mapping[str, Mapping[str, float]],
                       labels: Sequence[str] | None = None) -> CorrelationMatrix:
    """Pearson matrix over conditions, using the conditions both metrics share."""
    labels = tuple(labels or columns)
    vals, sizes = [], []
    for a in labels:
        row, srow = [], []
        for b in labels:
            keys = sorted(set(columns[a]) & set(columns[b]))
            if a == b:
                row.append(1.0 if len(keys) >= 2 else None)
            else:
                row.append(pearson([columns[a][k] for k in keys], [columns[b][k] for k in keys]))
            srow.append(len(keys))
        vals.append(tuple(row))
        sizes.append(tuple(srow))
    # exact symmetry regardless of summation order
    for i in range(len(labels)):
        for j in range(i):
            vals[i] = vals[i][:j] + (vals[j][i],) + vals[i][j + 1:]
    return CorrelationMatrix(labels, tuple(vals), tuple(sizes))


# -- reports ----------------------------------------------------------------

@dataclass(frozen=True)
class Row:
    condition: str
    metric: str
    value: float | None
    config: str = ""


def _fmt(v) -> str:
    if v is None:
        return UNDEFINED
    return repr(float(v))


@dataclass
class MetricReport:
    experiment: str
    rows: list[Row] = field(default_factory=list)
    corpora: dict = field(default_factory=dict)
    seeds: list[int] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    errors: list[dict] = field(default_factory=list)

    def add(self, condition: str, metrics: Mapping[str, float | None], config: str = "") -> None:
        for name, value in metrics.items():
            self.rows.append(Row(condition, name, value, config))

    def value(self, condition: str, metric: str) -> float | None:
        for r in self.rows:
            if r.condition == condition and r.metric == metric:
                return r.value
        raise KeyError((condition, metric))

    def get(self, condition: str, metric: str, default=None):
        try:
            return self.value(condition, metric)
        except KeyError:
            return default

    def conditions(self) -> list[str]:
        return list(dict.fromkeys(r.condition for r in self.rows))

    def columns(self) -> dict[str, dict[str, float]]:
        """metric -> condition -> value, skipping undefined values."""
        out: dict[str, dict[str, float]] = {}
        for r in self.rows:
            if r.value is not None:
                out.setdefault(r.metric, {})[r.condition] = r.value
        return out

    def to_tsv(self) -> str:
        out = ["condition\tmetric\tvalue"]
        out += [f"{r.condition}\t{r.metric}\t{_fmt(r.value)}" for r in self.rows]
        return "\n".join(out) + "\n"

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "experiment": self.experiment,
            "corpora": self.corpora,
            "seeds": self.seeds,
            "config": self.config,
            "rows": [{"condition": r.condition, "metric": r.metric,
                      "value": UNDEFINED if r.value is None else r.value, "config": r.config}
                     for r in self.rows],
            "errors": self.errors,
            "extras": self.extras,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True, ensure_ascii=False) + "\n"

    def write(self, prefix: str | Path) -> tuple[Path, Path]:
        prefix = Path(prefix)
        tsv = prefix.with_name(prefix.name + ".tsv")
        js = prefix.with_name(prefix.name + ".json")
        tsv.write_text(self.to_tsv(), encoding="utf-8")
        js.write_text(self.to_json(), encoding="utf-8")
        return tsv, js

    @classmethod
    def from_dict(cls, d: dict) -> "MetricReport":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        rows = [Row(r["condition"], r["metric"],
                    None if r["value"] == UNDEFINED else float(r["value"]), r.get("config", ""))
                for r in d["rows"]]
        return cls(d["experiment"], rows, d.get("corpora", {}), d.get("seeds", []),
                   d.get("config", {}), d.get("extras", {}), d.get("errors", []))


def read_report(path: str | Path) -> MetricReport:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return MetricReport.from_dict(json.loads(text))
    rows = []
    header, *body = text.rstrip("\n").split("\n")
    if header.split("\t")[:3] != ["condition", "metric", "value"]:
        raise ValueError(f"{path}: not a condition/metric/value table")
    for line in body:
        cond, metric, value = line.split("\t")[:3]
        rows.append(Row(cond, metric, None if value == UNDEFINED else float(value)))
    return MetricReport(path.stem, rows)


# -- metric suite -------------------------------------------------------------

@dataclass(frozen=True)
class SuiteConfig:
    mode: str = "agnostic"
    aggregation: str = "pooled"
    n_t: int = sm.DEFAULT_NT
    sub_weight: float = sm.DEFAULT_SUB_WEIGHT
    window: int | None = None
    type_sensitive_prf: bool = False
    tokenize: str = "none"
    mask: str = DEFAULT_MASK
    alpha_source: str = "reference"
    max_chars: int = 42

    def __post_init__(self):
        MassMode(self.mode)
        if self.aggregation not in ("pooled", "mean"):
            raise ValueError(f"unknown aggregation {self.aggregation!r}")

    def fingerprint(self) -> str:
        return (f"mode:{self.mode}|agg:{self.aggregation}|nt:{self.n_t}|sub:{self.sub_weight}"
                f"|k:{self.window or 'auto'}|prf:{'typed' if self.type_sensitive_prf else 'any'}"
                f"|mask:{self.mask}|alpha:{self.alpha_source}|bp:bleu_nb"
                f"||{bleu_signature(tokenize=self.tokenize)}||{ter_signature()}")

    def to_dict(self) -> dict:
        return {"mode": self.mode, "aggregation": self.aggregation, "n_t": self.n_t,
                "sub_weight": self.sub_weight, "window": self.window,
                "type_sensitive_prf": self.type_sensitive_prf, "tokenize": self.tokenize,
                "mask": self.mask, "alpha_source": self.alpha_source, "max_chars": self.max_chars,
                "fingerprint": self.fingerprint()}


@dataclass(frozen=True)
class SentenceScores:
    pk: sm.WindowScore | None
    wd: sm.WindowScore | None
    segsim: sm.EditSimScore
    boundsim: sm.EditSimScore
    prf: sm.PRF1


def sentence_scores(ref: SegmentedText, hyp: SegmentedText, cfg: SuiteConfig = SuiteConfig()
                    ) -> SentenceScores:
    if len(ref) != len(hyp):
        raise sm.LengthMismatchError(
            f"token counts differ ({len(ref)} vs {len(hyp)}); project boundaries first")
    mode = MassMode(cfg.mode)
    mr, mh = to_masses(ref, mode), to_masses(hyp, mode)
    try:
        pk = sm.pk(mr, mh, cfg.window)
        wd = sm.window_diff(mr, mh, cfg.window)
    except ValueError:
        # too short for the window: no probes
        pk = wd = None
    br = select_boundaries(ref, mode).boundary_map()
    bh = select_boundaries(hyp, mode).boundary_map()
    return SentenceScores(
        pk, wd,
        sm.segmentation_similarity(mr, mh, cfg.n_t),
        sm.boundary_similarity(br, bh, cfg.n_t, cfg.sub_weight),
        sm.precision_recall_f1(br, bh, cfg.type_sensitive_prf),
    )


def aggregate(scores: Sequence[SentenceScores], aggregation: str = "pooled") -> dict[str, float | None]:
    windows = [(s.pk, s.wd) for s in scores if s.pk is not None]
    out: dict[str, float | None] = {}
    if aggregation == "pooled":
        out["Pk"] = sm.pool_window([p for p, _ in windows]) if windows else None
        out["WindowDiff"] = sm.pool_window([w for _, w in windows]) if windows else None
        out["SegSim"] = sm.pool_editsim([s.segsim for s in scores])
        out["BoundSim"] = sm.pool_editsim([s.boundsim for s in scores])
        prf = sm.pool_prf1(s.prf for s in scores)
        out["Precision"], out["Recall"], out["F1"] = prf.precision, prf.recall, prf.f1
    else:
        out["Pk"] = sm.mean_value([p.value for p, _ in windows]) if windows else None
        out["WindowDiff"] = sm.mean_value([w.value for _, w in windows]) if windows else None
        out["SegSim"] = sm.mean_value([s.segsim.value for s in scores])
        out["BoundSim"] = sm.mean_value([s.boundsim.value for s in scores])
        out["Precision"] = sm.mean_value([s.prf.precision for s in scores])
        out["Recall"] = sm.mean_value([s.prf.recall for s in scores])
        out["F1"] = sm.mean_value([s.prf.f1 for s in scores])
    return out


def segmentation_suite(ref: Corpus, hyp: Corpus, cfg: SuiteConfig = SuiteConfig(),
                       metrics: Iterable[str] = SEG_METRICS) -> dict[str, float | None]:
    check_comparable(ref, hyp)
    scores = [sentence_scores(r, h, cfg) for r, h in zip(ref, hyp)]
    agg = aggregate(scores, cfg.aggregation)
    return {m: agg[m] for m in metrics}


def same_text(ref: Corpus, hyp: Corpus) -> bool:
    return len(ref) == len(hyp) and all(r.tokens == h.tokens for r, h in zip(ref, hyp))


def project_corpus(ref: Corpus, hyp: Corpus, granularity: str = "line"):
    """Projected reference plus the indices of sentences that could not be projected."""
    check_comparable(ref, hyp)
    out, bad, dropped = [], [], 0
    for i, (r, h) in enumerate(zip(ref, hyp)):
        res = project_boundaries(r, h, granularity)
        if "empty_hypothesis" in res.flags or "empty_reference" in res.flags:
            bad.append(i)
        dropped += res.dropped_tags
        out.append(res.ref_proj)
    return ref.replace(out, f"{ref.identifier}<-proj:{hyp.identifier}"), bad, dropped


def evaluate(ref: Corpus, hyp: Corpus, cfg: SuiteConfig = SuiteConfig()) -> MetricReport:
    """Full suite.  Segmentation metrics need the same words on both sides; when
    the texts differ they are computed against the projected reference."""
    check_comparable(ref, hyp)
    report = MetricReport("evaluate", corpora={"ref": ref.identifier, "hyp": hyp.identifier},
                          config=cfg.to_dict())
    fp = cfg.fingerprint()
    if same_text(ref, hyp):
        seg_hyp, setting, keep = hyp, "direct", list(range(len(ref)))
    else:
        seg_hyp, bad, dropped = project_corpus(ref, hyp)
        setting = "projected"
        keep = [i for i in range(len(ref)) if i not in set(bad)]
        report.extras["projection"] = {"excluded": bad, "dropped_tags": dropped}
    r_sub = ref.replace(ref[i] for i in keep)
    h_sub = seg_hyp.replace(seg_hyp[i] for i in keep)
    report.add(setting, segmentation_suite(r_sub, h_sub, cfg), fp)
    sig = sigma(hyp, ref, cfg.alpha_source, cfg.tokenize)
    report.add("raw", {
        "BLEU_nb": sig.bleu_nb.value,
        "BLEU_br": sig.bleu_br.value,
        "TER_br": ter_br(hyp, ref, cfg.mask).value,
        "BLEU_br+": sig.bleu_br_plus,
        "Sigma": sig.sigma,
        "Length": length_conformity(hyp, cfg.max_chars),
    }, fp)
    report.extras["sigma"] = sig.to_dict()
    if setting == "projected":
        report.add(setting, {"BLEU_br": bleu_br(h_sub, r_sub, cfg.tokenize).value,
                             "TER_br": ter_br(h_sub, r_sub, cfg.mask).value}, fp)
    return report


# -- parallel helper -------------------------------------------------------------

def _run(fn: Callable, cells: Sequence, jobs: int) -> list:
    """Apply ``fn`` to every cell; results come back in cell order."""
    if jobs <= 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, cells))


# -- experiment 1 ----------------------------------------------------------------

def exp1_grid(kinds=EXP1_KINDS, percentages=EXP1_PERCENTAGES, seeds=(0,)) -> list[NoiseSpec]:
    return [NoiseSpec(NoiseKind(kind), p, seed, k)
            for seed in seeds for kind, k in kinds for p in percentages]


def condition_label(spec: NoiseSpec, n_seeds: int = 1) -> str:
    return spec.label if n_seeds <= 1 else f"{spec.label}.seed{spec.seed}"


def _exp1_cell(args):
    ref, spec, cfg = args
    noised = noise_segmentation(ref, spec)
    hyp = noised.corpus
    wanted = EXP1_METRICS
    if spec.kind is NoiseKind.REPLACE:
        wanted = tuple(m for m in EXP1_METRICS if m in TYPE_AWARE)
    seg = [m for m in wanted if m in SEG_METRICS]
    out = dict(segmentation_suite(ref, hyp, cfg, seg))
    if "BLEU_br" in wanted:
        out["BLEU_br"] = bleu_br(hyp, ref, cfg.tokenize).value
    if "TER_br" in wanted:
        out["TER_br"] = ter_br(hyp, ref, cfg.mask).value
    out["Length"] = length_conformity(hyp, cfg.max_chars)
    return {m: out[m] for m in wanted + ("Length",)}, noised.to_dict()


def run_experiment_1(ref: Corpus, grid: Sequence[NoiseSpec] | None = None,
                     cfg: SuiteConfig = SuiteConfig(), jobs: int = 1) -> MetricReport:
    grid = list(grid) if grid is not None else exp1_grid()
    n_seeds = len({s.seed for s in grid})
    report = MetricReport("exp1", corpora={"ref": ref.identifier},
                          seeds=sorted({s.seed for s in grid}), config=cfg.to_dict())
    results = _run(_exp1_cell, [(ref, spec, cfg) for spec in grid], jobs)
    noise_stats = {}
    for spec, (metrics, stats_) in zip(grid, results):
        label = condition_label(spec, n_seeds)
        report.add(label, metrics, cfg.fingerprint())
        noise_stats[label] = stats_
        missing = [m for m in EXP1_METRICS if m not in metrics]
        if missing:
            report.errors.append({"condition": label, "metrics": missing,
                                  "error": "blind to boundary type; tag flips leave it unchanged"})
    report.extras["noise"] = noise_stats
    return report


def exp1_correlations(report: MetricReport, labels: Sequence[str] = EXP1_METRICS + ("Length",)
                      ) -> CorrelationMatrix:
    cols = report.columns()
    return correlation_matrix(cols, [l for l in labels if l in cols])


# -- experiment 2 ----------------------------------------------------------------

def _sigma_row(hyp: Corpus, ref: Corpus, cfg: SuiteConfig) -> dict[str, float | None]:
    s = sigma(hyp, ref, cfg.alpha_source, cfg.tokenize)
    return {"BLEU_nb": s.bleu_nb.value, "BLEU_br": s.bleu_br.value,
            "BLEU_br+": s.bleu_br_plus, "Sigma": s.sigma,
            "p1_nb": s.bleu_nb.precisions.p[0], "p1_br": s.bleu_br.precisions.p[0]}


def _exp2_cell(args):
    ref, text_level, seg_levels, seed, cfg = args
    text = noise_text(ref, NoiseSpec(NoiseKind.TEXT, text_level, seed))
    rows = [(f"text.{text_level}", _sigma_row(text.corpus, ref, cfg))]
    for q in seg_levels:
        seg = noise_segmentation(text.corpus, NoiseSpec(NoiseKind.MIXED, q, seed))
        rows.append((f"text.{text_level}+mixed.{q}", _sigma_row(seg.corpus, ref, cfg)))
    return rows, text.to_dict()


def run_experiment_2(ref: Corpus, text_levels: Sequence[int] = EXP2_TEXT_LEVELS,
                     seg_levels: Sequence[int] = EXP2_SEG_LEVELS, seed: int = 0,
                     cfg: SuiteConfig = SuiteConfig(), jobs: int = 1) -> MetricReport:
    report = MetricReport("exp2", corpora={"ref": ref.identifier}, seeds=[seed],
                          config=cfg.to_dict())
    cells = [(ref, t, tuple(seg_levels), seed, cfg) for t in text_levels]
    fp = cfg.fingerprint()
    ranges = {}
    noise_stats = {}
    for t, (rows, st) in zip(text_levels, _run(_exp2_cell, cells, jobs)):
        for cond, metrics in rows:
            report.add(cond, metrics, fp)
        noise_stats[f"text.{t}"] = st
        sig = [m["Sigma"] for c, m in rows[1:] if m["Sigma"] is not None]
        br = [m["BLEU_br"] for c, m in rows[1:]]
        ranges[f"text.{t}"] = {"BLEU_nb": rows[0][1]["BLEU_nb"],
                               "sigma": [min(sig), max(sig)] if sig else None,
                               "bleu_br": [min(br), max(br)] if br else None}
    stage1 = [(report.value(f"text.{t}", "BLEU_nb"), report.value(f"text.{t}", "BLEU_br"))
              for t in text_levels]
    report.extras["noise"] = noise_stats
    report.extras["linearity"] = linear_fit([a for a, _ in stage1], [b for _, b in stage1])
    report.extras["ranges"] = ranges
    report.extras["sigma_drift"] = range_drift(
        [ranges[f"text.{t}"]["sigma"] for t in text_levels])
    report.extras["bleu_br_drift"] = range_drift(
        [ranges[f"text.{t}"]["bleu_br"] for t in text_levels])
    # series whose BLEU_nb falls where real systems usually land
    band = [t for t in text_levels
            if REALISTIC_BLEU_NB[0] <= ranges[f"text.{t}"]["BLEU_nb"] <= REALISTIC_BLEU_NB[1]]
    report.extras["sigma_drift_realistic"] = {
        "bleu_nb_band": list(REALISTIC_BLEU_NB), "levels": band,
        **range_drift([ranges[f"text.{t}"]["sigma"] for t in band])}
    report.extras["sigma_monotone"] = {
        f"text.{t}": _strictly_decreasing(
            [report.value(f"text.{t}+mixed.{q}", "Sigma") for q in seg_levels])
        for t in text_levels}
    return report


def _strictly_decreasing(xs: Sequence[float | None]) -> bool:
    return all(a is not None and b is not None and a > b for a, b in zip(xs, xs[1:]))


def linear_fit(x: Sequence[float], y: Sequence[float]) -> dict:
    fit = stats.linregress(x, y)
    return {"slope": float(fit.slope), "intercept": float(fit.intercept),
            "r2": float(fit.rvalue ** 2), "stderr": float(fit.stderr), "n": len(x)}


def range_drift(ranges: Sequence[Sequence[float] | None]) -> dict:
    """How far the [min, max] range moves from the first level.

    ``end_to_end`` compares first and last level; ``max`` is the largest
    deviation of either endpoint at any level.
    """
    rs = [r for r in ranges if r is not None]
    if len(rs) < 2:
        return {"end_to_end": None, "max": None}
    lo0, hi0 = rs[0]
    dev = [max(abs(lo - lo0), abs(hi - hi0)) for lo, hi in rs]
    return {"end_to_end": dev[-1], "max": max(dev)}


# -- experiment 3 ----------------------------------------------------------------

def _metric_precision(metric: str) -> int:
    if metric.startswith(("BLEU", "TER")):
        return 2
    if metric == "Sigma":
        return 1
    return 3


def synthetic_systems(ref: Corpus, seed: int = 0, levels=SYNTHETIC_SYSTEMS) -> dict[str, Corpus]:
    """Noised references standing in for system outputs; earlier entries are better."""
    out = {}
    for name, text, seg in levels:
        t = noise_text(ref, NoiseSpec(NoiseKind.TEXT, text, seed)).corpus
        s = noise_segmentation(t, NoiseSpec(NoiseKind.MIXED, seg, seed)).corpus
        out[name] = s.replace(s.sentences, name)
    return out


def _exp3_cell(args):
    ref, name, hyp, cfg = args
    proj, bad, dropped = project_corpus(ref, hyp)
    keep = [i for i in range(len(ref)) if i not in set(bad)]
    r_sub = ref.replace(ref[i] for i in keep)
    p_sub = proj.replace(proj[i] for i in keep)
    out = dict(segmentation_suite(r_sub, p_sub, cfg))
    out["BLEU_br@proj"] = bleu_br(p_sub, r_sub, cfg.tokenize).value
    out["TER_br@proj"] = ter_br(p_sub, r_sub, cfg.mask).value
    out["BLEU_br@raw"] = bleu_br(hyp, ref, cfg.tokenize).value
    out["TER_br@raw"] = ter_br(hyp, ref, cfg.mask).value
    s = sigma(hyp, ref, cfg.alpha_source, cfg.tokenize)
    out["Sigma"] = s.sigma
    out["BLEU_nb"] = s.bleu_nb.value
    out["Length"] = length_conformity(hyp, cfg.max_chars)
    return out, {"excluded": bad, "dropped_tags": dropped}


EXP3_RANKED = SEG_METRICS + ("BLEU_br@proj", "TER_br@proj", "BLEU_br@raw", "TER_br@raw", "Sigma")


def run_experiment_3(ref: Corpus, systems: Mapping[str, Corpus], cfg: SuiteConfig = SuiteConfig(),
                     jobs: int = 1, expected_order: Sequence[str] | None = None) -> MetricReport:
    names = list(systems)
    for n in names:
        check_comparable(ref, systems[n])
    report = MetricReport("exp3", corpora={"ref": ref.identifier,
                                           **{f"system:{n}": systems[n].identifier for n in names}},
                          config=cfg.to_dict())
    results = _run(_exp3_cell, [(ref, n, systems[n], cfg) for n in names], jobs)
    table = {}
    for n, (metrics, proj) in zip(names, results):
        report.add(n, metrics, cfg.fingerprint())
        table[n] = metrics
        report.extras.setdefault("projection", {})[n] = proj
        if proj["excluded"]:
            report.errors.append({"condition": n, "error": "unprojectable sentences excluded",
                                  "count": len(proj["excluded"])})
    ranking = rank_systems(table, EXP3_RANKED)
    report.extras["ranking"] = ranking
    if expected_order is not None:
        report.extras["agreement"] = order_agreement(ranking["rankings"], expected_order)
    return report


def _better(metric: str, a: float | None, b: float | None) -> int:
    """1 if a is better, -1 if b is, 0 for a tie at reported precision."""
    if a is None or b is None:
        return 0
    d = _metric_precision(metric)
    ra, rb = round(a, d), round(b, d)
    if ra == rb:
        return 0
    better = ra < rb if metric in LOWER_BETTER else ra > rb
    return 1 if better else -1


def rank_systems(table: Mapping[str, Mapping[str, float | None]], metrics: Sequence[str]) -> dict:
    """Per-metric rankings and pairwise win/tie counts across metrics."""
    names = list(table)
    rankings = {}
    for m in metrics:
        def key(n, m=m):
            v = table[n].get(m)
            if v is None:
                return (1, 0.0)
            v = round(v, _metric_precision(m))
            return (0, v if m in LOWER_BETTER else -v)
        rankings[m] = sorted(names, key=lambda n: (key(n), names.index(n)))
    pairs = {}
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            wins_a, wins_b, ties = [], [], []
            for m in metrics:
                c = _better(m, table[a].get(m), table[b].get(m))
                (wins_a if c > 0 else wins_b if c < 0 else ties).append(m)
            pairs[f"{a} vs {b}"] = {"wins": {a: wins_a, b: wins_b}, "ties": ties}
    return {"rankings": rankings, "pairs": pairs}


def order_agreement(rankings: Mapping[str, Sequence[str]], expected: Sequence[str]) -> dict:
    """Fraction of system pairs each metric orders as ``expected`` does."""
    out = {}
    for m, order in rankings.items():
        rank = {n: i for i, n in enumerate(order)}
        pairs = [(a, b) for i, a in enumerate(expected) for b in expected[i + 1:]]
        good = sum(1 for a, b in pairs if rank[a] < rank[b])
        out[m] = good / len(pairs) if pairs else 1.0
    return {"concordance": out, "recovered": [m for m, v in out.items() if v == 1.0]}
