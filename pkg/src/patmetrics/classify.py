"""Patent classifiers: keyword list, science-reference rule, code/keyword
rule table, CPC-prefix groups, and a trained per-component text classifier.

All classifiers return frozensets of patent ids, so downstream metrics are
indifferent to how a group was produced.
"""

from __future__ import annotations

import math
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Corpus
from .errors import ConfigError, DataError

_TOKEN_RE = re.compile(r"[a-z0-9]+")

#: Science-reference field label and confidence floor used by default.
DEFAULT_SCIENCE_FIELD = "Computer Science; Artificial Intelligence"
DEFAULT_MIN_CONFIDENCE = 3

KEYWORD_CATEGORIES = ("symbols", "learning", "robotics")

#: Text fields searched by the rule-table classifier (descriptions excluded).
WIPO_TEXT_FIELDS = ("title", "abstract", "claims")


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens; every other character separates."""
    return _TOKEN_RE.findall(text.lower())


def _phrase(text: str) -> tuple[str, ...]:
    return tuple(tokenize(text))


class PhraseMatcher:
    """Matches token phrases as consecutive token runs within a field."""

    def __init__(self, phrases: Iterable[tuple[str, ...]]):
        by_first: dict[str, list[tuple[str, ...]]] = {}
        for ph in phrases:
            if not ph:
                raise ValueError("empty phrase")
            by_first.setdefault(ph[0], []).append(ph)
        self._by_first = {k: tuple(v) for k, v in by_first.items()}

    def match_tokens(self, tokens: Sequence[str]) -> bool:
        by_first = self._by_first
        n = len(tokens)
        for i, tok in enumerate(tokens):
            cands = by_first.get(tok)
            if not cands:
                continue
            for ph in cands:
                k = len(ph)
                if k == 1 or (i + k <= n and tuple(tokens[i + 1 : i + k]) == ph[1:]):
                    return True
        return False

    def match_text(self, text: str) -> bool:
        return self.match_tokens(tokenize(text))


# ---------------------------------------------------------------------------
# keyword classifier

@dataclass(frozen=True)
class KeywordTable:
    """Phrase -> category table; phrases are stored tokenised and deduplicated."""

    entries: tuple[tuple[tuple[str, ...], str], ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "KeywordTable":
        seen = set()
        entries = []
        for phrase_text, category in pairs:
            cat = category.strip().lower()
            if cat not in KEYWORD_CATEGORIES:
                raise ConfigError(f"unknown keyword category {category!r}")
            ph = _phrase(phrase_text)
            if not ph:
                raise ConfigError(f"empty keyword phrase {phrase_text!r}")
            if ph in seen:
                continue
            seen.add(ph)
            entries.append((ph, cat))
        if not entries:
            raise ConfigError("keyword table has no phrases")
        return cls(tuple(entries))

    def phrases(self) -> list[tuple[str, ...]]:
        return [ph for ph, _ in self.entries]


def load_keywords(path: str) -> KeywordTable:
    """Read a phrase/category TSV (with header) into a KeywordTable."""
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[:2] != ["phrase", "category"]:
            raise ConfigError(f"{path}: expected columns phrase, category")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ConfigError(f"{path}: line {lineno}: expected 2 columns")
            pairs.append((parts[0], parts[1]))
    return KeywordTable.from_pairs(pairs)


def default_keywords() -> KeywordTable:
    """The packaged default keyword list."""
    path = resources.files("patmetrics") / "data" / "keywords.tsv"
    with resources.as_file(path) as p:
        return load_keywords(str(p))


def classify_keyword(corpus: Corpus, table: KeywordTable | None = None) -> frozenset[str]:
    """Patents whose title, abstract, claims, or description contains at
    least one listed phrase."""
    if table is None:
        table = default_keywords()
    matcher = PhraseMatcher(table.phrases())
    hits = []
    for pid, rec in corpus.records.items():
        for _, text in rec.text_fields():
            if text and matcher.match_text(text):
                hits.append(pid)
                break
    return frozenset(hits)


# ---------------------------------------------------------------------------
# science-reference classifier

def classify_science(
    corpus: Corpus,
    field_label: str = DEFAULT_SCIENCE_FIELD,
    min_confidence: int = DEFAULT_MIN_CONFIDENCE,
) -> frozenset[str]:
    """Patents with a science reference to `field_label` whose confidence is
    strictly greater than `min_confidence`."""
    return frozenset(
        link.patent
        for link in corpus.science
        if link.field_label == field_label and link.confidence > min_confidence
    )


# ---------------------------------------------------------------------------
# code/keyword rule classifier

@dataclass(frozen=True)
class WipoRule:
    """One rule: a CPC prefix, a phrase, or a conjunction of both."""

    kind: str  # "code" | "keyword" | "combined"
    prefix: str = ""
    phrase: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("code", "keyword", "combined"):
            raise ConfigError(f"unknown rule kind {self.kind!r}")
        if self.kind in ("code", "combined") and not self.prefix:
            raise ConfigError(f"{self.kind} rule needs a code prefix")
        if self.kind in ("keyword", "combined") and not self.phrase:
            raise ConfigError(f"{self.kind} rule needs a phrase")


def load_wipo_rules(path: str) -> tuple[WipoRule, ...]:
    """Read a rule_kind/code_prefix/phrase TSV (with header)."""
    rules = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header[:3] != ["rule_kind", "code_prefix", "phrase"]:
            raise ConfigError(f"{path}: expected columns rule_kind, code_prefix, phrase")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if not parts or not parts[0].strip():
                raise ConfigError(f"{path}: line {lineno}: missing rule_kind")
            parts += [""] * (3 - len(parts))  # trailing empty cells may be dropped
            kind, prefix, phrase_text = parts[0].strip(), parts[1].strip(), parts[2]
            rules.append(WipoRule(kind, prefix.upper(), _phrase(phrase_text)))
    if not rules:
        raise ConfigError(f"{path}: rule table is empty")
    return tuple(rules)


def default_wipo_rules() -> tuple[WipoRule, ...]:
    """The packaged sample rule table (one rule of each kind)."""
    path = resources.files("patmetrics") / "data" / "wipo_rules.tsv"
    with resources.as_file(path) as p:
        return load_wipo_rules(str(p))


def classify_wipo(corpus: Corpus, rules: Sequence[WipoRule] | None = None) -> frozenset[str]:
    """Patents satisfying at least one rule.

    Code rules test CPC raw-symbol prefixes; keyword rules search title,
    abstract, and claims; combined rules require both on the same patent.
    """
    if rules is None:
        rules = default_wipo_rules()
    if not rules:
        raise ConfigError("rule set is empty")
    matchers = {
        r.phrase: PhraseMatcher([r.phrase]) for r in rules if r.phrase
    }
    hits = []
    for pid, rec in corpus.records.items():
        raws = [c.raw for c in corpus.codes_of(pid)]
        token_cache: dict[str, list[str]] = {}

        def has_phrase(ph: tuple[str, ...]) -> bool:
            m = matchers[ph]
            for name in WIPO_TEXT_FIELDS:
                tokens = token_cache.get(name)
                if tokens is None:
                    tokens = tokenize(getattr(rec, name))
                    token_cache[name] = tokens
                if m.match_tokens(tokens):
                    return True
            return False

        for rule in rules:
            code_ok = any(raw.startswith(rule.prefix) for raw in raws) if rule.prefix else True
            if rule.kind == "code":
                if code_ok:
                    hits.append(pid)
                    break
            elif rule.kind == "keyword":
                if has_phrase(rule.phrase):
                    hits.append(pid)
                    break
            else:
                if code_ok and has_phrase(rule.phrase):
                    hits.append(pid)
                    break
    return frozenset(hits)


# ---------------------------------------------------------------------------
# CPC prefix groups

def classify_prefix_group(corpus: Corpus, prefix: str) -> frozenset[str]:
    """Patents holding a CPC code starting with `prefix`; "All" selects the
    entire corpus."""
    if prefix == "All":
        return frozenset(corpus.ids())
    pref = prefix.strip().upper()
    if not pref:
        raise ConfigError("empty CPC prefix")
    return frozenset(
        pid
        for pid, codes in corpus.codes.items()
        if any(c.raw.startswith(pref) for c in codes)
    )


# ---------------------------------------------------------------------------
# supervised component classifier

DEFAULT_COMPONENTS = (
    "machine_learning",
    "evolutionary_computation",
    "natural_language_processing",
    "speech",
    "vision",
    "knowledge_processing",
    "planning_control",
    "ai_hardware",
)

DEFAULT_SEED_RULES: dict[str, tuple[str, ...]] = {
    "machine_learning": ("G06N20", "G06N3/08"),
    "evolutionary_computation": ("G06N3/12",),
    "natural_language_processing": ("G06F40",),
    "speech": ("G10L15", "G10L25"),
    "vision": ("G06V", "G06T7"),
    "knowledge_processing": ("G06N5",),
    "planning_control": ("G05B13",),
    "ai_hardware": ("G06N3/06", "G11C11/54"),
}

#: Fields pooled into the bag-of-tokens features.
USPTO_TEXT_FIELDS = ("title", "abstract", "claims")


@dataclass
class UsptoConfig:
    """Knobs for the component classifier.  `seed_rules` maps component
    name -> CPC prefixes whose carriers become positive training labels."""

    components: tuple[str, ...] = DEFAULT_COMPONENTS
    seed_rules: Mapping[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_SEED_RULES)
    )
    expansion_hops: int = 1
    vocab_size: int = 500
    threshold: float = 0.5
    epochs: int = 150
    learning_rate: float = 2.0
    anti_seed_rng: int = 13

    def __post_init__(self):
        if not self.components:
            raise ConfigError("component list is empty")
        if len(set(self.components)) != len(self.components):
            raise ConfigError(f"duplicate component names: {self.components}")
        if not (0.0 < self.threshold < 1.0):
            raise ConfigError(f"threshold must lie in (0, 1): {self.threshold}")
        if self.vocab_size < 1:
            raise ConfigError("vocab_size must be positive")
        if self.epochs < 0 or self.expansion_hops < 0:
            raise ConfigError("epochs and expansion_hops must be non-negative")
        for comp in self.components:
            if not self.seed_rules.get(comp):
                raise ConfigError(f"component {comp!r} has no seed prefixes")


@dataclass
class ComponentModel:
    name: str
    vocab: tuple[str, ...]
    weights: np.ndarray  # vocab dims, then backward-cite and forward-cite dims
    bias: float
    seed: frozenset[str]
    anti_seed: frozenset[str]


@dataclass
class UsptoModel:
    config: UsptoConfig
    components: list[ComponentModel]


def build_uspto_seed(
    corpus: Corpus, prefixes: Sequence[str], hops: int = 0
) -> frozenset[str]:
    """Carriers of any seed prefix, expanded `hops` times by shared CPC
    subclass or by a direct citation in either direction."""
    cleaned = [p.strip().upper() for p in prefixes if p.strip()]
    if not cleaned:
        raise ConfigError("no seed prefixes given")
    seed = {
        pid
        for pid, codes in corpus.codes.items()
        if any(c.raw.startswith(pref) for pref in cleaned for c in codes)
    }
    for _ in range(hops):
        seed_subclasses = {c.subclass4 for pid in seed for c in corpus.codes_of(pid)}
        grown = set(seed)
        for pid, codes in corpus.codes.items():
            if pid not in grown and any(c.subclass4 in seed_subclasses for c in codes):
                grown.add(pid)
        for e in corpus.citations:
            if e.cited in seed:
                grown.add(e.citing)
            if e.citing in seed:
                grown.add(e.cited)
        if grown == seed:
            break
        seed = grown
    return frozenset(seed)


def _doc_counter(corpus: Corpus, pid: str) -> Counter:
    rec = corpus.record(pid)
    counts: Counter = Counter()
    for name in USPTO_TEXT_FIELDS:
        counts.update(tokenize(getattr(rec, name)))
    return counts


def _text_rows(counters: Sequence[Counter], vocab_index: Mapping[str, int]) -> np.ndarray:
    X = np.zeros((len(counters), len(vocab_index)), dtype=np.float64)
    for i, counts in enumerate(counters):
        total = 0
        for tok, n in counts.items():
            if tok in vocab_index:
                total += n
        if total == 0:
            continue
        for tok, n in counts.items():
            j = vocab_index.get(tok)
            if j is not None:
                X[i, j] = n / total
    return X


def _citation_features(corpus: Corpus, ids: Sequence[str], seed: frozenset[str]) -> np.ndarray:
    F = np.zeros((len(ids), 2), dtype=np.float64)
    for i, pid in enumerate(ids):
        back = sum(1 for e in corpus.outgoing(pid) if e.cited in seed)
        fwd = sum(1 for e in corpus.incoming(pid) if e.citing in seed)
        F[i, 0] = math.log1p(back) if back else 0.0
        F[i, 1] = math.log1p(fwd) if fwd else 0.0
    return F


def train_uspto(corpus: Corpus, config: UsptoConfig | None = None) -> UsptoModel:
    """Train one logistic model per component.

    Positives are the (expanded) seed; negatives are an equal-size sample of
    the rest of the corpus drawn with a fixed RNG.  Weights start at zero
    and move by full-batch gradient descent, so zero epochs leaves every
    score at exactly 0.5.
    """
    cfg = config or UsptoConfig()
    models = []
    for comp in cfg.components:
        seed = build_uspto_seed(corpus, cfg.seed_rules[comp], cfg.expansion_hops)
        if not seed:
            raise ConfigError(f"component {comp!r}: seed matches no patent")
        pool = sorted(set(corpus.ids()) - seed)
        if not pool:
            raise ConfigError(f"component {comp!r}: no negatives left to sample")
        rng = random.Random(f"{cfg.anti_seed_rng}:{comp}")
        anti = frozenset(rng.sample(pool, min(len(seed), len(pool))))

        train_ids = sorted(seed) + sorted(anti)
        y = np.array([1.0] * len(seed) + [0.0] * len(anti))
        counters = [_doc_counter(corpus, pid) for pid in train_ids]
        totals: Counter = Counter()
        for c in counters:
            totals.update(c)
        vocab = tuple(
            tok for tok, _ in sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))[: cfg.vocab_size]
        )
        vocab_index = {tok: j for j, tok in enumerate(vocab)}
        X = np.hstack(
            [_text_rows(counters, vocab_index), _citation_features(corpus, train_ids, seed)]
        )
        # max-abs column scaling during descent only; folding the scales back
        # into the weights keeps scoring a plain dot product on raw features
        scales = np.abs(X).max(axis=0)
        scales[scales == 0] = 1.0
        Xs = X / scales

        w = np.zeros(Xs.shape[1])
        b = 0.0
        n = len(train_ids)
        for _ in range(cfg.epochs):
            p = 1.0 / (1.0 + np.exp(-(Xs @ w + b)))
            g = p - y
            w -= cfg.learning_rate * (Xs.T @ g) / n
            b -= cfg.learning_rate * g.mean()
        models.append(ComponentModel(comp, vocab, w / scales, float(b), seed, anti))
    return UsptoModel(cfg, models)


def score_component(corpus: Corpus, model: ComponentModel, ids: Sequence[str]) -> np.ndarray:
    """Predicted probabilities for the given patents under one component."""
    vocab_index = {tok: j for j, tok in enumerate(model.vocab)}
    counters = [_doc_counter(corpus, pid) for pid in ids]
    X = np.hstack(
        [_text_rows(counters, vocab_index), _citation_features(corpus, ids, model.seed)]
    )
    return 1.0 / (1.0 + np.exp(-(X @ model.weights + model.bias)))


def classify_uspto(corpus: Corpus, model: UsptoModel) -> frozenset[str]:
    """Union of patents scoring strictly above the threshold in any component."""
    ids = list(corpus.ids())
    hits: set[str] = set()
    indexes = [{tok: j for j, tok in enumerate(c.vocab)} for c in model.components]
    chunk = 4096
    for start in range(0, len(ids), chunk):
        batch = ids[start : start + chunk]
        counters = [_doc_counter(corpus, pid) for pid in batch]
        for comp, vocab_index in zip(model.components, indexes):
            X = np.hstack(
                [
                    _text_rows(counters, vocab_index),
                    _citation_features(corpus, batch, comp.seed),
                ]
            )
            scores = 1.0 / (1.0 + np.exp(-(X @ comp.weights + comp.bias)))
            for pid, s in zip(batch, scores):
                if s > model.config.threshold:
                    hits.add(pid)
    return frozenset(hits)
