"""In-memory patent corpus: records, CPC assignments, citations, science links.

The corpus is immutable once built.  `CorpusBuilder` is the single place where
row-level validation happens, so file loading and synthetic generation share
the same rules.  Builders count every rejected row by reason; callers decide
whether a rejection is fatal (strict mode) or merely logged.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import CpcParseError, DataError

# Section letter, two-digit class, subclass letter, optional group/subgroup tail.
_CPC_RE = re.compile(r"^[A-HY][0-9]{2}[A-Z](?:[0-9]+(?:/[0-9]+)?)?$")

#: CPC hierarchy depths usable as a truncation level.
LEVELS = (1, 3, 4)

DEFAULT_WINDOW = (1990, 2019)


@dataclass(frozen=True, slots=True)
class CpcCode:
    """A validated CPC symbol.  Prefix views expose the hierarchy levels."""

    raw: str

    @property
    def section(self) -> str:
        return self.raw[:1]

    @property
    def class3(self) -> str:
        return self.raw[:3]

    @property
    def subclass4(self) -> str:
        return self.raw[:4]

    def at_level(self, level: int) -> str:
        if level not in LEVELS:
            raise ValueError(f"unsupported CPC level {level!r}, expected one of {LEVELS}")
        return self.raw[:level]


def parse_cpc(raw: str) -> CpcCode:
    """Normalise and validate a CPC symbol string.

    Whitespace is stripped and letters uppercased.  The symbol must be at
    least subclass-deep (e.g. ``G06N``); a group tail such as ``G06N20/00``
    is allowed.  Raises `CpcParseError` otherwise.
    """
    cleaned = raw.strip().upper().replace(" ", "")
    if not _CPC_RE.match(cleaned):
        raise CpcParseError(f"not a valid CPC symbol: {raw!r}")
    return CpcCode(cleaned)


@dataclass(frozen=True, slots=True)
class PatentRecord:
    """One granted patent.  Text fields may be empty but never None-typed away."""

    id: str
    grant_year: int
    title: str = ""
    abstract: str = ""
    claims: str = ""
    description: str = ""

    def text_fields(self) -> Iterator[tuple[str, str]]:
        yield "title", self.title
        yield "abstract", self.abstract
        yield "claims", self.claims
        yield "description", self.description


@dataclass(frozen=True, slots=True)
class CitationEdge:
    """Directed citation: `citing` cites `cited`.  `citing_year` is the
    grant year of the citing patent (resolved at build time)."""

    citing: str
    cited: str
    citing_year: int


@dataclass(frozen=True, slots=True)
class ScienceLink:
    """A patent-to-science reference with a field label and a reliability
    confidence score (integer, >= 1)."""

    patent: str
    field_label: str
    confidence: int


class CorpusBuilder:
    """Accumulates rows with validation.  add_* methods return True when the
    row was accepted; rejected rows are counted in `counts[table][reason]`.

    A duplicate patent id always raises: downstream identity assumptions
    would silently break otherwise.
    """

    def __init__(self, window: tuple[int, int] = DEFAULT_WINDOW):
        lo, hi = window
        if lo > hi:
            raise ValueError(f"empty corpus window {window!r}")
        self.window = (int(lo), int(hi))
        self._records: dict[str, PatentRecord] = {}
        self._codes: dict[str, list[CpcCode]] = {}
        self._code_seen: set[tuple[str, str]] = set()
        self._citations: list[CitationEdge] = []
        self._cite_seen: set[tuple[str, str]] = set()
        self._science: list[ScienceLink] = []
        self._sci_seen: set[tuple[str, str, int]] = set()
        self.counts: dict[str, Counter] = {
            "patents": Counter(),
            "cpc": Counter(),
            "citations": Counter(),
            "science": Counter(),
        }
        self.accepted: Counter = Counter()

    def _reject(self, table: str, reason: str) -> bool:
        self.counts[table][reason] += 1
        return False

    def grant_year(self, patent_id: str) -> int:
        return self._records[patent_id].grant_year

    def add_record(self, rec: PatentRecord) -> bool:
        if not rec.id:
            return self._reject("patents", "empty_id")
        if rec.id in self._records:
            raise DataError(f"duplicate patent id {rec.id!r}")
        lo, hi = self.window
        if not (lo <= rec.grant_year <= hi):
            return self._reject("patents", "year_out_of_window")
        self._records[rec.id] = rec
        self.accepted["patents"] += 1
        return True

    def add_assignment(self, patent_id: str, raw_code: str) -> bool:
        if patent_id not in self._records:
            return self._reject("cpc", "unknown_patent")
        try:
            code = parse_cpc(raw_code)
        except CpcParseError:
            return self._reject("cpc", "bad_code")
        key = (patent_id, code.raw)
        if key in self._code_seen:
            return self._reject("cpc", "duplicate")
        self._code_seen.add(key)
        self._codes.setdefault(patent_id, []).append(code)
        self.accepted["cpc"] += 1
        return True

    def add_citation(self, citing: str, cited: str) -> bool:
        if citing not in self._records:
            return self._reject("citations", "unknown_citing")
        if cited not in self._records:
            return self._reject("citations", "unknown_cited")
        if citing == cited:
            return self._reject("citations", "self_citation")
        if (citing, cited) in self._cite_seen:
            return self._reject("citations", "duplicate")
        citing_year = self._records[citing].grant_year
        if citing_year < self._records[cited].grant_year:
            return self._reject("citations", "negative_lag")
        self._cite_seen.add((citing, cited))
        self._citations.append(CitationEdge(citing, cited, citing_year))
        self.accepted["citations"] += 1
        return True

    def add_science_link(self, patent_id: str, field_label: str, confidence: int) -> bool:
        if patent_id not in self._records:
            return self._reject("science", "unknown_patent")
        label = field_label.strip()
        if not label:
            return self._reject("science", "empty_field")
        if confidence < 1:
            return self._reject("science", "bad_confidence")
        key = (patent_id, label, confidence)
        if key in self._sci_seen:
            return self._reject("science", "duplicate")
        self._sci_seen.add(key)
        self._science.append(ScienceLink(patent_id, label, confidence))
        self.accepted["science"] += 1
        return True

    def build(self) -> "Corpus":
        return Corpus(
            records=dict(self._records),
            codes={p: tuple(cs) for p, cs in self._codes.items()},
            citations=tuple(self._citations),
            science=tuple(self._science),
            window=self.window,
        )


@dataclass(frozen=True)
class Corpus:
    """Immutable corpus with lazily built indexes.

    `records` preserves insertion order; all derived indexes are
    deterministic functions of the content.
    """

    records: dict[str, PatentRecord]
    codes: dict[str, tuple[CpcCode, ...]]
    citations: tuple[CitationEdge, ...]
    science: tuple[ScienceLink, ...]
    window: tuple[int, int] = DEFAULT_WINDOW
    _caches: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, patent_id: str) -> bool:
        return patent_id in self.records

    def ids(self) -> Iterable[str]:
        return self.records.keys()

    def record(self, patent_id: str) -> PatentRecord:
        return self.records[patent_id]

    def grant_year(self, patent_id: str) -> int:
        return self.records[patent_id].grant_year

    def codes_of(self, patent_id: str) -> tuple[CpcCode, ...]:
        return self.codes.get(patent_id, ())

    def classes_of(self, patent_id: str, level: int) -> frozenset[str]:
        """Distinct CPC prefixes of the patent's codes at the given level."""
        return self.class_sets(level).get(patent_id, frozenset())

    def class_sets(self, level: int) -> dict[str, frozenset[str]]:
        """patent id -> frozenset of level-truncated codes (patents with codes only)."""
        if level not in LEVELS:
            raise ValueError(f"unsupported CPC level {level!r}, expected one of {LEVELS}")
        key = ("class_sets", level)
        cached = self._caches.get(key)
        if cached is None:
            cached = {
                pid: frozenset(c.raw[:level] for c in cs) for pid, cs in self.codes.items()
            }
            self._caches[key] = cached
        return cached

    def years(self) -> list[int]:
        lo, hi = self.window
        return list(range(lo, hi + 1))

    def patents_in_year(self, year: int) -> frozenset[str]:
        return self.year_index().get(year, frozenset())

    def year_index(self) -> dict[int, frozenset[str]]:
        cached = self._caches.get("year_index")
        if cached is None:
            bins: dict[int, list[str]] = {}
            for pid, rec in self.records.items():
                bins.setdefault(rec.grant_year, []).append(pid)
            cached = {y: frozenset(ids) for y, ids in bins.items()}
            self._caches["year_index"] = cached
        return cached

    def incoming(self, patent_id: str) -> tuple[CitationEdge, ...]:
        """Edges whose cited side is this patent."""
        return self._edge_index("incoming").get(patent_id, ())

    def outgoing(self, patent_id: str) -> tuple[CitationEdge, ...]:
        """Edges whose citing side is this patent."""
        return self._edge_index("outgoing").get(patent_id, ())

    def _edge_index(self, direction: str) -> dict[str, tuple[CitationEdge, ...]]:
        cached = self._caches.get(direction)
        if cached is None:
            bins: dict[str, list[CitationEdge]] = {}
            for e in self.citations:
                key = e.cited if direction == "incoming" else e.citing
                bins.setdefault(key, []).append(e)
            cached = {p: tuple(es) for p, es in bins.items()}
            self._caches[direction] = cached
        return cached
