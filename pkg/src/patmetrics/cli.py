"""Command-line pipeline: synth, classify, metrics, stats, report.

Stages communicate only through files in the output directory, so running
them one at a time gives byte-identical artifacts to a monolithic `run`.
`run.log` records stage progress without timestamps and is excluded from
the manifest.

Exit codes: 0 ok, 2 configuration error, 3 data error, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from dataclasses import dataclass, replace

from . import classify as cls
from . import io as pio
from . import metrics as met
from . import stats as st
from . import synth as syn
from .corpus import Corpus, DEFAULT_WINDOW
from .errors import ConfigError, DataError, PatmetricsError

STAGES = ("classify", "metrics", "stats", "report")

APPROACH_KINDS = ("keyword", "science", "wipo", "uspto")


@dataclass(frozen=True)
class GroupConfig:
    name: str
    kind: str
    keywords_path: str | None = None  # None means the packaged default table
    field: str = cls.DEFAULT_SCIENCE_FIELD
    min_confidence: int = cls.DEFAULT_MIN_CONFIDENCE
    rules_path: str | None = None
    uspto_path: str | None = None
    prefix: str = ""


@dataclass(frozen=True)
class RunConfig:
    base_dir: str
    strict: bool = False
    window: tuple[int, int] = DEFAULT_WINDOW
    periods: tuple[tuple[int, int], ...] = ()
    synth_path: str | None = None
    table_paths: tuple[tuple[str, str | None], ...] = ()
    groups: tuple[GroupConfig, ...] = ()
    levels: tuple[int, ...] = (1, 3, 4)
    universes: tuple[tuple[int, int], ...] = ()
    lag_mode: str = "all_citations"
    zscore_metrics: tuple[str, ...] = ()
    lowess_metrics: tuple[str, ...] = ()
    lowess_fraction: float = 2.0 / 3.0
    descendants: bool = True
    compare: tuple[str, ...] = ("growth",)
    holm: bool = True
    exact_cutoff: int = st.DEFAULT_EXACT_CUTOFF
    seed_override: int | None = None


def _parse_period(text: str) -> tuple[int, int]:
    try:
        a, b = text.split("-")
        lo, hi = int(a), int(b)
    except ValueError:
        raise ConfigError(f"bad year range {text!r}, expected LO-HI") from None
    if lo > hi:
        raise ConfigError(f"empty year range {text!r}")
    return lo, hi


def load_run_config(path: str) -> RunConfig:
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise ConfigError(f"cannot read run config {path!r}")
    base = os.path.dirname(os.path.abspath(path))

    def resolve(p: str) -> str:
        return p if os.path.isabs(p) else os.path.join(base, p)

    run = parser["run"] if "run" in parser else parser["DEFAULT"]
    window = _parse_period(run.get("window", "1990-2019"))
    periods = tuple(
        _parse_period(t.strip())
        for t in run.get("periods", "").split(",")
        if t.strip()
    ) or (window,)

    synth_path = None
    tables: list[tuple[str, str | None]] = []
    if "inputs" not in parser:
        raise ConfigError(f"{path}: missing [inputs] section")
    inputs = parser["inputs"]
    if inputs.get("synth", "").strip():
        synth_path = resolve(inputs.get("synth").strip())
    else:
        if not inputs.get("patents", "").strip():
            raise ConfigError(f"{path}: [inputs] needs either synth= or patents=")
        for name in ("patents", "cpc", "citations", "science"):
            value = inputs.get(name, "").strip()
            tables.append((name, resolve(value) if value else None))

    groups = []
    for section in parser.sections():
        if not section.startswith("group:"):
            continue
        name = section.split(":", 1)[1]
        g = parser[section]
        kind = g.get("kind", "").strip()
        if kind not in APPROACH_KINDS + ("prefix",):
            raise ConfigError(f"{path}: group {name!r} has unknown kind {kind!r}")
        keywords = g.get("keywords", "default").strip()
        rules = g.get("rules", "default").strip()
        groups.append(
            GroupConfig(
                name=name,
                kind=kind,
                keywords_path=None if keywords == "default" else resolve(keywords),
                field=g.get("field", cls.DEFAULT_SCIENCE_FIELD),
                min_confidence=g.getint("min_confidence", cls.DEFAULT_MIN_CONFIDENCE),
                rules_path=None if rules == "default" else resolve(rules),
                uspto_path=resolve(g.get("config").strip()) if g.get("config") else None,
                prefix=g.get("prefix", "").strip(),
            )
        )
    names = [g.name for g in groups]
    if len(set(names)) != len(names):
        raise ConfigError(f"{path}: duplicate group names {names}")
    if not groups:
        raise ConfigError(f"{path}: no [group:*] sections")
    for g in groups:
        if g.kind == "prefix" and not g.prefix:
            raise ConfigError(f"{path}: group {g.name!r} needs prefix=")
        if g.kind == "uspto" and not g.uspto_path:
            raise ConfigError(f"{path}: group {g.name!r} needs config=")

    m = parser["metrics"] if "metrics" in parser else {}
    levels = tuple(
        int(t) for t in (m.get("levels", "1,3,4") if m else "1,3,4").split(",") if t.strip()
    )
    for lv in levels:
        if lv not in (1, 3, 4):
            raise ConfigError(f"{path}: unsupported CPC level {lv}")
    universes = []
    if m:
        for lv in (3, 4):
            key = f"diversity_universe_{lv}"
            if m.get(key, "").strip():
                universes.append((lv, int(m.get(key))))
    lag_mode = (m.get("lag_mode", "all_citations") if m else "all_citations").strip()
    if lag_mode not in ("all_citations", "first_citation"):
        raise ConfigError(f"{path}: unknown lag_mode {lag_mode!r}")

    s = parser["stats"] if "stats" in parser else {}

    def listed(section, key, default=""):
        raw = section.get(key, default) if section else default
        return tuple(t.strip() for t in raw.split(",") if t.strip())

    cfg = RunConfig(
        base_dir=base,
        strict=run.getboolean("strict", False) if hasattr(run, "getboolean") else False,
        window=window,
        periods=periods,
        synth_path=synth_path,
        table_paths=tuple(tables),
        groups=tuple(groups),
        levels=levels,
        universes=tuple(universes),
        lag_mode=lag_mode,
        zscore_metrics=listed(m, "zscore", "generality"),
        lowess_metrics=listed(m, "lowess", "growth"),
        lowess_fraction=float(m.get("lowess_fraction", "0.6667")) if m else 2.0 / 3.0,
        descendants=(m.get("descendants", "true").strip().lower() != "false") if m else True,
        compare=listed(s, "compare", "growth"),
        holm=(s.get("holm", "true").strip().lower() != "false") if s else True,
        exact_cutoff=int(s.get("exact_cutoff", str(st.DEFAULT_EXACT_CUTOFF))) if s else st.DEFAULT_EXACT_CUTOFF,
    )
    for metric in cfg.zscore_metrics:
        if metric not in ("generality", "avg_citing_classes", "avg_citing_classes_cited"):
            raise ConfigError(f"{path}: zscore unsupported for metric {metric!r}")
    return cfg


# ---------------------------------------------------------------------------
# logging

class RunLog:
    """Append-only, timestamp-free run log (excluded from the manifest)."""

    def __init__(self, out_dir: str):
        self.path = os.path.join(out_dir, "run.log")
        os.makedirs(out_dir, exist_ok=True)

    def line(self, text: str) -> None:
        with open(self.path, "a", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")


# ---------------------------------------------------------------------------
# corpus preparation

def _ensure_corpus(cfg: RunConfig, out_dir: str, log: RunLog) -> Corpus:
    """Load the corpus, generating and persisting synthetic tables first
    when the config asks for them."""
    if cfg.synth_path is not None:
        corpus_dir = os.path.join(out_dir, "corpus")
        patents = os.path.join(corpus_dir, "patents.tsv")
        if not os.path.exists(patents):
            scfg = syn.load_synth_config(cfg.synth_path)
            if cfg.seed_override is not None:
                scfg = replace(scfg, rng_seed=cfg.seed_override)
            corpus, truth = syn.generate(scfg)
            pio.write_corpus(corpus_dir, corpus)
            for name in sorted(truth):
                pio.write_ids(os.path.join(corpus_dir, "truth", f"{name}.ids"), truth[name])
            log.line(f"synth: generated {len(corpus)} patents into corpus/")
        paths = {
            "patents": patents,
            "cpc": os.path.join(corpus_dir, "cpc.tsv"),
            "citations": os.path.join(corpus_dir, "citations.tsv"),
            "science": os.path.join(corpus_dir, "science.tsv"),
        }
    else:
        paths = {name: p for name, p in cfg.table_paths}
        missing = paths.get("patents")
        if missing is None or not os.path.exists(missing):
            raise ConfigError(f"patents table not found: {missing!r}")

    corpus, report = pio.load_corpus(
        paths["patents"],
        paths.get("cpc"),
        paths.get("citations"),
        paths.get("science"),
        window=cfg.window,
        strict=cfg.strict,
    )
    # report paths relative to the output dir, so re-runs in different
    # directories hash identically
    for t in report.tables.values():
        rel = os.path.relpath(t.path, out_dir)
        if not rel.startswith(".."):
            t.path = rel
    pio.write_text(os.path.join(out_dir, "load-report.txt"), report.format())
    log.line(
        f"load: {len(corpus)} patents, {len(corpus.citations)} citations, "
        f"{len(corpus.science)} science links"
    )
    return corpus


# ---------------------------------------------------------------------------
# stages

def stage_classify(cfg: RunConfig, out_dir: str, log: RunLog) -> None:
    corpus = _ensure_corpus(cfg, out_dir, log)
    for g in cfg.groups:
        if g.kind == "keyword":
            table = (
                cls.load_keywords(g.keywords_path)
                if g.keywords_path
                else cls.default_keywords()
            )
            members = cls.classify_keyword(corpus, table)
        elif g.kind == "science":
            members = cls.classify_science(corpus, g.field, g.min_confidence)
        elif g.kind == "wipo":
            rules = (
                cls.load_wipo_rules(g.rules_path) if g.rules_path else cls.default_wipo_rules()
            )
            members = cls.classify_wipo(corpus, rules)
        elif g.kind == "uspto":
            ucfg = load_uspto_config(g.uspto_path)
            model = cls.train_uspto(corpus, ucfg)
            members = cls.classify_uspto(corpus, model)
        else:
            members = cls.classify_prefix_group(corpus, g.prefix)
        pio.write_ids(os.path.join(out_dir, "groups", f"{g.name}.ids"), members)
        log.line(f"classify: {g.name} ({g.kind}) -> {len(members)} patents")


def load_uspto_config(path: str) -> cls.UsptoConfig:
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise ConfigError(f"cannot read config {path!r}")
    if "uspto" not in parser:
        raise ConfigError(f"{path}: missing [uspto] section")
    u = parser["uspto"]
    components = tuple(
        t.strip() for t in u.get("components", ",".join(cls.DEFAULT_COMPONENTS)).split(",") if t.strip()
    )
    seeds: dict[str, tuple[str, ...]] = {}
    if "seeds" in parser:
        for comp, raw in parser["seeds"].items():
            seeds[comp] = tuple(t.strip() for t in raw.split(",") if t.strip())
    else:
        seeds = dict(cls.DEFAULT_SEED_RULES)
    try:
        return cls.UsptoConfig(
            components=components,
            seed_rules=seeds,
            expansion_hops=u.getint("expansion_hops", 1),
            vocab_size=u.getint("vocab_size", 500),
            threshold=u.getfloat("threshold", 0.5),
            epochs=u.getint("epochs", 150),
            learning_rate=u.getfloat("learning_rate", 2.0),
            anti_seed_rng=u.getint("anti_seed_rng", 13),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _read_groups(cfg: RunConfig, out_dir: str) -> dict[str, frozenset[str]]:
    out = {}
    for g in cfg.groups:
        path = os.path.join(out_dir, "groups", f"{g.name}.ids")
        if not os.path.exists(path):
            raise DataError(f"missing group file {path}; run the classify stage first")
        out[g.name] = pio.read_ids(path)
    return out


def _mpath(out_dir: str, stem: str) -> str:
    return os.path.join(out_dir, "metrics", f"{stem}.metric.tsv")


def stage_metrics(cfg: RunConfig, out_dir: str, log: RunLog) -> None:
    corpus = _ensure_corpus(cfg, out_dir, log)
    groups = _read_groups(cfg, out_dir)
    order = [g.name for g in cfg.groups]
    approach = [g.name for g in cfg.groups if g.kind in APPROACH_KINDS]
    universes = dict(cfg.universes)
    scalars: list[tuple[str, str, str, float | None]] = []  # metric, level, group, value

    counts = {name: met.count_series(corpus, groups[name], name) for name in order}
    pio.write_series(_mpath(out_dir, "counts"), list(counts.values()))

    whole = met.count_series(corpus, corpus.ids(), "All")
    shares = [met.share_series(counts[name], whole) for name in order]
    pio.write_series(_mpath(out_dir, "share"), shares)

    growth = {name: met.growth_series(counts[name]) for name in order}
    pio.write_series(_mpath(out_dir, "growth"), list(growth.values()))

    for name in order:
        scalars.append(("counts", "", name, float(len(groups[name]))))

    if len(approach) >= 2:
        jac = []
        for i, a in enumerate(approach):
            for b in approach[i + 1 :]:
                jac.append(met.jaccard_series(corpus, a, groups[a], b, groups[b]))
                scalars.append(("jaccard", "", f"{a}|{b}", met.jaccard(groups[a], groups[b])))
        pio.write_series(_mpath(out_dir, "jaccard"), jac)
        count, share = met.allway_overlap([groups[a] for a in approach])
        pio.write_table(
            os.path.join(out_dir, "metrics", "overlap.tsv"),
            ("groups", "all_way_count", "all_way_share"),
            [("|".join(approach), str(count), pio.fmt_value(share))],
        )

    for level in cfg.levels:
        tag = f"_d{level}"
        gen = [met.generality_series(corpus, groups[n], level, n) for n in order]
        gen = [s for s in gen if s.points]
        if gen:
            pio.write_series(_mpath(out_dir, f"generality{tag}"), gen)
        for n in order:
            scalars.append(
                ("generality", str(level), n, met.generality_index(corpus, groups[n], level))
            )

        for cited_only, stem in ((False, "avg_citing_classes"), (True, "avg_citing_classes_cited")):
            rows = []
            for n in order:
                series, overall = met.avg_citing_classes(
                    corpus, groups[n], level, n, cited_only=cited_only
                )
                if series.points:
                    rows.append(series)
                scalars.append((stem, str(level), n, overall))
            if rows:
                pio.write_series(_mpath(out_dir, f"{stem}{tag}"), rows)

        if level in (3, 4):
            rows = []
            for n in order:
                series, overall = met.diversity_share(
                    corpus, groups[n], level, n, universe=universes.get(level)
                )
                rows.append(series)
                scalars.append(("diversity_share", str(level), n, overall))
            pio.write_series(_mpath(out_dir, f"diversity_share{tag}"), rows)

        rows = []
        for n in order:
            series, overall = met.diversity_per_patent(corpus, groups[n], level, n)
            if series.points:
                rows.append(series)
            scalars.append(("diversity_per_patent", str(level), n, overall))
        if rows:
            pio.write_series(_mpath(out_dir, f"diversity_per_patent{tag}"), rows)

        if len(approach) >= 2:
            for zm in cfg.zscore_metrics:
                if zm == "generality":
                    zin = [met.generality_series(corpus, groups[n], level, n) for n in approach]
                else:
                    cited_only = zm == "avg_citing_classes_cited"
                    zin = [
                        met.avg_citing_classes(corpus, groups[n], level, n, cited_only)[0]
                        for n in approach
                    ]
                zin = [s for s in zin if s.points]
                if len(zin) >= 2:
                    pio.write_series(
                        _mpath(out_dir, f"{zm}{tag}_zscore"),
                        met.zscore_across_groups(zin),
                    )

    lag_rows = []
    for n in order:
        series, overall = met.citation_lag_series(corpus, groups[n], n, cfg.lag_mode)
        if series.points:
            lag_rows.append(series)
        scalars.append(("citation_lag", "", n, overall))
    if lag_rows:
        pio.write_series(_mpath(out_dir, "citation_lag"), lag_rows)

    period_rows = []
    for n in order:
        means = met.lag_period_means(corpus, groups[n], cfg.periods, cfg.lag_mode)
        period_rows.append(
            [n] + [pio.fmt_value(v) for _, v in means]
        )
    pio.write_table(
        os.path.join(out_dir, "metrics", "lag_periods.tsv"),
        ["group"] + [f"{lo}-{hi}" for lo, hi in cfg.periods],
        period_rows,
    )

    if cfg.descendants and approach:
        desc_sets = {n: met.descendants(corpus, groups[n]) for n in approach}
        for n in approach:
            pio.write_ids(
                os.path.join(out_dir, "groups", f"{n}.descendants.ids"), desc_sets[n]
            )
        dcounts = [met.count_series(corpus, desc_sets[n], n) for n in approach]
        pio.write_series(_mpath(out_dir, "descendants_counts"), dcounts)
        dshares = [met.share_series(c, whole) for c in dcounts]
        pio.write_series(_mpath(out_dir, "descendants_share"), dshares)
        for n in approach:
            scalars.append(("descendants_counts", "", n, float(len(desc_sets[n]))))

    for metric in cfg.lowess_metrics:
        path = _mpath(out_dir, metric)
        if not os.path.exists(path):
            continue
        smoothed = [
            st.smooth_series(s, cfg.lowess_fraction)
            for s in pio.read_series(path, metric)
            if len(s.points) >= 2 and len(set(s.years())) >= 2
        ]
        if smoothed:
            pio.write_series(_mpath(out_dir, f"{metric}_lowess"), smoothed)

    pio.write_table(
        os.path.join(out_dir, "metrics", "scalars.tsv"),
        ("metric", "level", "group", "value"),
        [(m, lv, g, pio.fmt_value(v)) for m, lv, g, v in scalars],
    )
    log.line(f"metrics: wrote series for {len(order)} groups at levels {list(cfg.levels)}")


def stage_stats(cfg: RunConfig, out_dir: str, log: RunLog) -> None:
    for metric in cfg.compare:
        path = _mpath(out_dir, metric)
        if not os.path.exists(path):
            raise DataError(f"missing metric file {path}; run the metrics stage first")
        series = pio.read_series(path, metric)
        if len(series) < 2:
            log.line(f"stats: {metric} has fewer than 2 group series, skipped")
            continue
        order = [s.group for s in series]
        for period in cfg.periods:
            tag = f"{period[0]}-{period[1]}"
            result = st.pairwise_compare(
                series, period, holm=cfg.holm, exact_cutoff=cfg.exact_cutoff
            )

            rows = []
            for a, b in sorted(result.tests, key=lambda p: (order.index(p[0]), order.index(p[1]))):
                res = result.tests[(a, b)]
                if res is None:
                    rows.append((a, b, "0", "", "", "", ""))
                else:
                    rows.append(
                        (
                            a, b, str(res.n_effective), pio.fmt_value(res.statistic),
                            res.method, pio.fmt_value(res.p_value),
                            pio.fmt_value(result.adjusted[(a, b)]),
                        )
                    )
            pio.write_table(
                os.path.join(out_dir, "stats", f"{metric}_tests_{tag}.tsv"),
                ("group_a", "group_b", "n", "statistic", "method", "p_raw", "p_adjusted"),
                rows,
            )

            matrix_rows = []
            for i, a in enumerate(order[1:], start=1):
                row = [a]
                for j in range(len(order) - 1):
                    if j < i:
                        key = (order[j], a) if (order[j], a) in result.adjusted else (a, order[j])
                        row.append(pio.fmt_value(result.adjusted.get(key)))
                    else:
                        row.append("")
                matrix_rows.append(row)
            pio.write_table(
                os.path.join(out_dir, "stats", f"{metric}_pvalues_{tag}.tsv"),
                ["group"] + order[:-1],
                matrix_rows,
            )

        summary_rows = []
        for period in cfg.periods:
            result = st.pairwise_compare(
                series, period, holm=cfg.holm, exact_cutoff=cfg.exact_cutoff
            )
            for stat_idx, stat_name in enumerate(("mean", "median", "stdev")):
                row = [f"{period[0]}-{period[1]}", stat_name]
                for g in order:
                    s = result.summaries[g]
                    row.append(pio.fmt_value(s[stat_idx]) if s else "")
                summary_rows.append(row)
        pio.write_table(
            os.path.join(out_dir, "stats", f"{metric}_summary.tsv"),
            ["period", "stat"] + order,
            summary_rows,
        )
        log.line(f"stats: {metric} over {len(cfg.periods)} periods for {len(order)} groups")


def stage_report(cfg: RunConfig, out_dir: str, log: RunLog) -> None:
    metrics_dir = os.path.join(out_dir, "metrics")
    if not os.path.isdir(metrics_dir):
        raise DataError(f"missing directory {metrics_dir}; run the metrics stage first")
    made = 0
    for name in sorted(os.listdir(metrics_dir)):
        if not name.endswith(".metric.tsv"):
            continue
        stem = name[: -len(".metric.tsv")]
        series = pio.read_series(os.path.join(metrics_dir, name), stem)
        series = [s for s in series if s.points]
        if not any(len(s.points) >= 2 for s in series):
            log.line(f"report: skipped {stem} (fewer than 2 points per series)")
            continue
        skipped = pio.write_svg_lines(
            os.path.join(out_dir, "plots", f"{stem}.svg"),
            series,
            pio.PlotOptions(title=stem, y_label=stem),
        )
        for g in skipped:
            log.line(f"report: {stem}: dropped single-point series {g}")
        made += 1
    log.line(f"report: wrote {made} plots")


# ---------------------------------------------------------------------------
# entry points

def cmd_synth(args) -> int:
    scfg = syn.load_synth_config(args.config)
    if args.seed is not None:
        scfg = replace(scfg, rng_seed=args.seed)
    corpus, truth = syn.generate(scfg)
    pio.write_corpus(args.out, corpus)
    for name in sorted(truth):
        pio.write_ids(os.path.join(args.out, "truth", f"{name}.ids"), truth[name])
    log = RunLog(args.out)
    log.line(f"synth: {len(corpus)} patents, {len(corpus.citations)} citations")
    pio.write_manifest(args.out)
    return 0


def cmd_run(args, only: tuple[str, ...] | None = None) -> int:
    cfg = load_run_config(args.config)
    if args.strict:
        cfg = replace(cfg, strict=True)
    if args.seed is not None:
        cfg = replace(cfg, seed_override=args.seed)
    if getattr(args, "only", None):
        only = tuple(t.strip() for t in args.only.split(",") if t.strip())
    stages = only or STAGES
    for name in stages:
        if name not in STAGES:
            raise ConfigError(f"unknown stage {name!r}, expected one of {', '.join(STAGES)}")
    log = RunLog(args.out)
    runner = {
        "classify": stage_classify,
        "metrics": stage_metrics,
        "stats": stage_stats,
        "report": stage_report,
    }
    for name in stages:
        runner[name](cfg, args.out, log)
    pio.write_manifest(args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="patmetrics",
        description="patent-corpus classification and technology metrics pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, seed_help):
        p.add_argument("--config", required=True, help="configuration file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help=seed_help)

    p_synth = sub.add_parser("synth", help="generate a synthetic corpus")
    add_common(p_synth, "override the generator RNG seed")

    p_run = sub.add_parser("run", help="run the full pipeline")
    add_common(p_run, "override the synthetic-input RNG seed")
    p_run.add_argument("--strict", action="store_true", help="abort on any rejected row")
    p_run.add_argument("--threads", type=int, default=1, help="reserved; stages run single-threaded")
    p_run.add_argument("--only", default="", help="comma-separated subset of stages to run")

    for stage in STAGES:
        p_stage = sub.add_parser(stage, help=f"run only the {stage} stage")
        add_common(p_stage, "override the synthetic-input RNG seed")
        p_stage.add_argument("--strict", action="store_true")

    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            return cmd_synth(args)
        if args.command == "run":
            return cmd_run(args)
        return cmd_run(args, only=(args.command,))
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except PatmetricsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
