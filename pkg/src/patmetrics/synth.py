"""Synthetic patent corpus generator with planted, recoverable structure.

Groups are planted as per-year index intervals, so sizes and pairwise
overlaps are exact counting results rather than sampling outcomes; only
filler text, background codes, and citation targets use the seeded RNG.
Citation lags follow a geometric distribution truncated to the available
history, which produces the shrinking-lag pattern of recent cohorts.
"""

from __future__ import annotations

import configparser
import math
import random
from dataclasses import dataclass, replace

from .classify import tokenize
from .corpus import Corpus, CorpusBuilder, PatentRecord, parse_cpc
from .errors import ConfigError, CpcParseError

DEFAULT_BACKGROUND_CODES = (
    "A01B", "A61K", "B23K", "B25J", "B29C", "B60L", "B82B", "B82Y",
    "C07D", "C08F", "C12N", "C12Q", "D21H", "E04B", "E21B", "F16H",
    "F25B", "G01N", "G02B", "G06F", "G11C", "H01L", "H02J", "H03M",
    "H04L", "H04W",
)


@dataclass(frozen=True)
class GroupSpec:
    """A planted group.

    `codes` is cycled over members by their within-year position; a None
    entry plants no code on that member.  `jaccard_with` must name an
    earlier group; the planted per-year overlap is sized so the realised
    Jaccard matches `jaccard_target`.
    """

    name: str
    share: float
    phrase: str | None = None
    codes: tuple[str | None, ...] = ()
    science_field: str | None = None
    science_confidence: int = 4
    marker: str | None = None
    jaccard_with: str | None = None
    jaccard_target: float | None = None


@dataclass(frozen=True)
class SynthConfig:
    rng_seed: int = 1
    years: tuple[int, int] = (1990, 2019)
    base_count: int = 100
    growth: tuple[float, ...] = ()  # per year-step; empty means flat counts
    groups: tuple[GroupSpec, ...] = ()
    edges_per_patent: int = 4
    ai_attraction: float = 4.0
    lag_mean: float = 8.0
    classes_per_patent_mean: float = 2.0
    class_concentration: float = 1.1
    background_codes: tuple[str, ...] = DEFAULT_BACKGROUND_CODES
    filler_vocab: int = 400
    title_len: int = 6
    abstract_len: int = 30
    claims_len: int = 15
    description_len: int = 20
    decoy_links: tuple[tuple[str, int, int], ...] = ()  # field, confidence, per year


def year_counts(config: SynthConfig) -> dict[int, int]:
    """Patents per year under the growth schedule (successive rounding)."""
    lo, hi = config.years
    steps = hi - lo
    growth = config.growth
    if growth and len(growth) not in (1, steps):
        raise ConfigError(
            f"growth schedule needs 1 or {steps} rates, got {len(growth)}"
        )
    counts = {lo: config.base_count}
    for i in range(steps):
        g = growth[i % len(growth)] if growth else 0.0
        counts[lo + 1 + i] = max(1, round(counts[lo + i] * (1.0 + g)))
    return counts


def _validate(config: SynthConfig) -> None:
    if config.base_count < 1:
        raise ConfigError("base_count must be at least 1")
    if config.years[0] > config.years[1]:
        raise ConfigError(f"empty year range {config.years!r}")
    if config.edges_per_patent < 0 or config.lag_mean < 0:
        raise ConfigError("edges_per_patent and lag_mean must be non-negative")
    if config.ai_attraction <= 0:
        raise ConfigError("ai_attraction must be positive")
    if config.filler_vocab < 1:
        raise ConfigError("filler_vocab must be positive")
    seen = set()
    phrases: dict[str, tuple[str, ...]] = {}
    markers: set[str] = set()
    for spec in config.groups:
        if spec.name in seen:
            raise ConfigError(f"duplicate group name {spec.name!r}")
        seen.add(spec.name)
        if not (0.0 <= spec.share <= 1.0):
            raise ConfigError(f"group {spec.name}: share {spec.share} outside [0, 1]")
        for code in spec.codes:
            if code is not None:
                try:
                    parse_cpc(code)
                except CpcParseError as exc:
                    raise ConfigError(f"group {spec.name}: {exc}") from None
        if spec.jaccard_with is not None:
            if spec.jaccard_with not in seen - {spec.name}:
                raise ConfigError(
                    f"group {spec.name}: jaccard_with {spec.jaccard_with!r} "
                    "must name an earlier group"
                )
            if spec.jaccard_target is None or not (0.0 <= spec.jaccard_target < 1.0):
                raise ConfigError(f"group {spec.name}: jaccard_target outside [0, 1)")
        if spec.phrase is not None:
            toks = tuple(tokenize(spec.phrase))
            if not toks:
                raise ConfigError(f"group {spec.name}: empty phrase")
            phrases[spec.name] = toks
        if spec.marker is not None:
            markers.add(spec.marker.lower())
        if spec.science_field is not None and spec.science_confidence < 1:
            raise ConfigError(f"group {spec.name}: science confidence below 1")
    # planted phrases must not shadow each other or collide with markers
    items = list(phrases.items())
    for i, (na, pa) in enumerate(items):
        for nb, pb in items[i + 1 :]:
            if _contains_run(pa, pb) or _contains_run(pb, pa):
                raise ConfigError(
                    f"phrases of groups {na!r} and {nb!r} overlap; recovery "
                    "by keyword would not be exact"
                )
    for m in markers:
        for name, ph in phrases.items():
            if m in ph:
                raise ConfigError(f"marker {m!r} collides with phrase of {name!r}")
    for code in config.background_codes:
        try:
            parse_cpc(code)
        except CpcParseError as exc:
            raise ConfigError(f"background code: {exc}") from None


def _contains_run(haystack: tuple[str, ...], needle: tuple[str, ...]) -> bool:
    k = len(needle)
    return any(haystack[i : i + k] == needle for i in range(len(haystack) - k + 1))


def _place_groups(
    config: SynthConfig, m: int
) -> dict[str, tuple[int, int]]:
    """Per-year interval [start, start+size) for each group; overlap with the
    chained partner is sized from the Jaccard target."""
    pos: dict[str, tuple[int, int]] = {}
    cursor = 0
    for spec in config.groups:
        size = round(spec.share * m)
        if spec.jaccard_with is None or size == 0:
            start = cursor
        else:
            p_start, p_size = pos[spec.jaccard_with]
            t = spec.jaccard_target
            o = round(t * (p_size + size) / (1.0 + t))
            o = min(o, p_size, size)
            start = p_start + p_size - o
        pos[spec.name] = (start, size)
        cursor = max(cursor, start + size)
    if cursor > m:
        raise ConfigError(
            f"planted groups need {cursor} slots but the year has only {m} patents"
        )
    return pos


def _truncated_geometric(rng: random.Random, mean: float, upper: int) -> int:
    if upper <= 0 or mean <= 0:
        return 0
    p = 1.0 / (1.0 + mean)
    u = rng.random()
    draw = int(math.floor(math.log(1.0 - u) / math.log(1.0 - p)))
    return min(draw, upper)


def generate(config: SynthConfig) -> tuple[Corpus, dict[str, frozenset[str]]]:
    """Build a corpus and the ground-truth member sets for each group."""
    _validate(config)
    rng = random.Random(config.rng_seed)
    counts = year_counts(config)
    lo, hi = config.years

    filler = [f"w{i:03d}" for i in range(config.filler_vocab)]
    code_weights = [
        1.0 / (i + 1) ** config.class_concentration
        for i in range(len(config.background_codes))
    ]

    builder = CorpusBuilder(window=config.years)
    truth: dict[str, set[str]] = {spec.name: set() for spec in config.groups}
    ids_by_year: dict[int, list[str]] = {}
    ai_by_year: dict[int, list[str]] = {}
    bg_by_year: dict[int, list[str]] = {}
    serial = 0

    for year in range(lo, hi + 1):
        m = counts[year]
        pos = _place_groups(config, m)
        membership: dict[int, list[GroupSpec]] = {}
        for spec in config.groups:
            start, size = pos[spec.name]
            for idx in range(start, start + size):
                membership.setdefault(idx, []).append(spec)

        year_ids = []
        for idx in range(m):
            pid = f"P{serial:07d}"
            serial += 1
            specs = membership.get(idx, [])

            planted_codes = []
            phrase_tokens: list[tuple[str, ...]] = []
            marker_tokens: list[str] = []
            for spec in specs:
                start, _ = pos[spec.name]
                k = idx - start
                if spec.codes:
                    code = spec.codes[k % len(spec.codes)]
                    if code is not None:
                        planted_codes.append(code)
                if spec.phrase is not None:
                    phrase_tokens.append(tuple(tokenize(spec.phrase)))
                if spec.marker is not None:
                    marker_tokens.append(spec.marker.lower())

            title = rng.choices(filler, k=config.title_len)
            abstract = rng.choices(filler, k=config.abstract_len)
            claims = rng.choices(filler, k=config.claims_len)
            description = rng.choices(filler, k=config.description_len)
            # all insertion points are chosen against the filler sequence and
            # applied in one pass, so one planted run can never split another
            inserts = [
                (rng.randrange(len(abstract) + 1), run) for run in phrase_tokens
            ]
            inserts += [
                (rng.randrange(len(abstract) + 1), (tok,)) for tok in marker_tokens
            ]
            if inserts:
                inserts.sort(key=lambda item: item[0])
                merged: list[str] = []
                prev = 0
                for at, run in inserts:
                    merged.extend(abstract[prev:at])
                    merged.extend(run)
                    prev = at
                merged.extend(abstract[prev:])
                abstract = merged

            builder.add_record(
                _record(pid, year, title, abstract, claims, description)
            )

            n_extra = _truncated_geometric(
                rng, max(config.classes_per_patent_mean - 1.0, 0.0), 4
            )
            drawn = rng.choices(config.background_codes, weights=code_weights, k=1 + n_extra)
            for code in dict.fromkeys(planted_codes + drawn):
                builder.add_assignment(pid, code)

            for spec in specs:
                truth[spec.name].add(pid)
                if spec.science_field is not None:
                    builder.add_science_link(
                        pid, spec.science_field, spec.science_confidence
                    )

            year_ids.append(pid)

        for field_label, conf, per_year in config.decoy_links:
            for idx in rng.sample(range(m), min(per_year, m)):
                builder.add_science_link(year_ids[idx], field_label, conf)

        in_ai = {pid for name in truth for pid in truth[name]}
        ids_by_year[year] = year_ids
        ai_by_year[year] = [p for p in year_ids if p in in_ai]
        bg_by_year[year] = [p for p in year_ids if p not in in_ai]

    # citations: each patent cites `edges_per_patent` earlier-or-same-year
    # patents, lag geometric (truncated), AI members oversampled as targets
    for year in range(lo, hi + 1):
        span = year - lo
        for citing in ids_by_year[year]:
            for _ in range(config.edges_per_patent):
                lag = _truncated_geometric(rng, config.lag_mean, span)
                target_year = year - lag
                for _attempt in range(4):
                    ai_pool = ai_by_year[target_year]
                    bg_pool = bg_by_year[target_year]
                    mass_ai = config.ai_attraction * len(ai_pool)
                    mass_bg = float(len(bg_pool))
                    if mass_ai + mass_bg == 0:
                        break
                    if rng.random() * (mass_ai + mass_bg) < mass_ai:
                        cited = ai_pool[rng.randrange(len(ai_pool))]
                    else:
                        cited = bg_pool[rng.randrange(len(bg_pool))]
                    if cited != citing and builder.add_citation(citing, cited):
                        break

    corpus = builder.build()
    return corpus, {name: frozenset(ids) for name, ids in truth.items()}


def _record(pid, year, title, abstract, claims, description):
    return PatentRecord(
        id=pid,
        grant_year=year,
        title=" ".join(title),
        abstract=" ".join(abstract),
        claims=" ".join(claims),
        description=" ".join(description),
    )


# ---------------------------------------------------------------------------
# config file parsing

def load_synth_config(path: str) -> SynthConfig:
    """Parse a synthesis config file (ini format, [synth] plus [group:*])."""
    parser = configparser.ConfigParser()
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise ConfigError(f"cannot read synth config {path!r}")
    if "synth" not in parser:
        raise ConfigError(f"{path}: missing [synth] section")
    s = parser["synth"]

    def years_of(text: str) -> tuple[int, int]:
        try:
            a, b = text.split("-")
            return int(a), int(b)
        except ValueError:
            raise ConfigError(f"{path}: bad year range {text!r}") from None

    try:
        growth_text = s.get("growth", "").strip()
        growth = (
            tuple(float(t) for t in growth_text.split(",") if t.strip())
            if growth_text
            else ()
        )
        decoys = []
        if "decoys" in parser:
            for line in parser["decoys"].get("links", "").splitlines():
                line = line.strip()
                if not line:
                    continue
                fld, conf, per_year = line.split("|")
                decoys.append((fld.strip(), int(conf), int(per_year)))
        groups = []
        for section in parser.sections():
            if not section.startswith("group:"):
                continue
            g = parser[section]
            if "share" not in g:
                raise ConfigError(f"{path}: [{section}] is missing share")
            codes_text = g.get("codes", "").strip()
            codes: tuple[str | None, ...] = ()
            if codes_text:
                codes = tuple(
                    None if t.strip() == "-" else t.strip()
                    for t in codes_text.split(",")
                )
            jt = g.get("jaccard_target", "").strip()
            groups.append(
                GroupSpec(
                    name=section.split(":", 1)[1],
                    share=g.getfloat("share"),
                    phrase=g.get("phrase", "").strip() or None,
                    codes=codes,
                    science_field=g.get("science_field", "").strip() or None,
                    science_confidence=g.getint("science_confidence", 4),
                    marker=g.get("marker", "").strip() or None,
                    jaccard_with=g.get("jaccard_with", "").strip() or None,
                    jaccard_target=float(jt) if jt else None,
                )
            )
        cfg = SynthConfig(
            rng_seed=s.getint("rng_seed", 1),
            years=years_of(s.get("years", "1990-2019")),
            base_count=s.getint("base_count", 100),
            growth=growth,
            groups=tuple(groups),
            edges_per_patent=s.getint("edges_per_patent", 4),
            ai_attraction=s.getfloat("ai_attraction", 4.0),
            lag_mean=s.getfloat("lag_mean", 8.0),
            classes_per_patent_mean=s.getfloat("classes_per_patent_mean", 2.0),
            class_concentration=s.getfloat("class_concentration", 1.1),
            filler_vocab=s.getint("filler_vocab", 400),
            title_len=s.getint("title_len", 6),
            abstract_len=s.getint("abstract_len", 30),
            claims_len=s.getint("claims_len", 15),
            description_len=s.getint("description_len", 20),
            decoy_links=tuple(decoys),
        )
    except (ValueError, configparser.Error) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    bg = s.get("background_codes", "").strip()
    if bg:
        cfg = replace(
            cfg, background_codes=tuple(t.strip() for t in bg.split(",") if t.strip())
        )
    _validate(cfg)
    return cfg
