"""Deterministic readers and writers: corpus tables, metric series, id lists,
SVG line charts, and the output manifest.

All numeric cells are rendered with 6 significant digits, so a
write -> read -> write cycle is a fixed point.  Files always use ``\\n`` line
endings and UTF-8, independent of platform.
"""

from __future__ import annotations

import csv
import hashlib
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

from .corpus import DEFAULT_WINDOW, Corpus, CorpusBuilder, PatentRecord
from .errors import DataError
from .metrics import GroupSeries

TABLE_COLUMNS = {
    "patents": ("id", "grant_year", "title", "abstract", "claims", "description"),
    "cpc": ("patent_id", "cpc_code"),
    "citations": ("citing_id", "cited_id", "citing_year"),
    "science": ("patent_id", "field_label", "confidence"),
}


# ---------------------------------------------------------------------------
# corpus tables

@dataclass
class TableReport:
    path: str
    rows: int = 0
    accepted: int = 0
    rejected: Counter = field(default_factory=Counter)
    warnings: Counter = field(default_factory=Counter)

    @property
    def rejected_total(self) -> int:
        return sum(self.rejected.values())


@dataclass
class LoadReport:
    window: tuple[int, int]
    strict: bool
    tables: dict[str, TableReport] = field(default_factory=dict)

    def format(self) -> str:
        lines = [
            f"corpus window: {self.window[0]}-{self.window[1]}",
            f"mode: {'strict' if self.strict else 'lenient'}",
        ]
        for name in ("patents", "cpc", "citations", "science"):
            if name not in self.tables:
                continue
            t = self.tables[name]
            lines.append(
                f"table {name}: rows={t.rows} accepted={t.accepted} "
                f"rejected={t.rejected_total} ({t.path})"
            )
            for reason in sorted(t.rejected):
                lines.append(f"  rejected {reason}: {t.rejected[reason]}")
            for reason in sorted(t.warnings):
                lines.append(f"  warning {reason}: {t.warnings[reason]}")
        return "\n".join(lines) + "\n"


def _open_table(path: str, table: str):
    fh = open(path, "r", encoding="utf-8", newline="")
    reader = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
    try:
        header = next(reader)
    except StopIteration:
        fh.close()
        raise DataError(f"{path}: empty file, expected a header row")
    cols = {}
    for name in TABLE_COLUMNS[table]:
        if name not in header:
            fh.close()
            raise DataError(f"{path}: missing required column {name!r}")
        cols[name] = header.index(name)
    return fh, reader, cols


def load_corpus(
    patents_path: str,
    cpc_path: str | None = None,
    citations_path: str | None = None,
    science_path: str | None = None,
    *,
    window: tuple[int, int] = DEFAULT_WINDOW,
    strict: bool = False,
) -> tuple[Corpus, LoadReport]:
    """Load corpus tables from TSV files.

    In lenient mode bad rows are counted and skipped; in strict mode the
    first bad row raises `DataError` naming the file and line.  Duplicate
    patent ids abort in either mode.
    """
    builder = CorpusBuilder(window=window)
    report = LoadReport(window=builder.window, strict=strict)

    def bad(table: TableReport, path: str, lineno: int, reason: str):
        table.rejected[reason] += 1
        if strict:
            raise DataError(f"{path}: line {lineno}: rejected row ({reason})")

    t = report.tables["patents"] = TableReport(patents_path)
    fh, reader, cols = _open_table(patents_path, "patents")
    with fh:
        for lineno, row in enumerate(reader, start=2):
            t.rows += 1
            if len(row) <= max(cols.values()):
                bad(t, patents_path, lineno, "malformed")
                continue
            try:
                year = int(row[cols["grant_year"]])
            except ValueError:
                bad(t, patents_path, lineno, "malformed")
                continue
            rec = PatentRecord(
                id=row[cols["id"]].strip(),
                grant_year=year,
                title=row[cols["title"]],
                abstract=row[cols["abstract"]],
                claims=row[cols["claims"]],
                description=row[cols["description"]],
            )
            before = dict(builder.counts["patents"])
            if builder.add_record(rec):
                t.accepted += 1
            else:
                reason = _new_reason(before, builder.counts["patents"])
                bad(t, patents_path, lineno, reason)

    if cpc_path is not None:
        t = report.tables["cpc"] = TableReport(cpc_path)
        fh, reader, cols = _open_table(cpc_path, "cpc")
        with fh:
            for lineno, row in enumerate(reader, start=2):
                t.rows += 1
                if len(row) <= max(cols.values()):
                    bad(t, cpc_path, lineno, "malformed")
                    continue
                before = dict(builder.counts["cpc"])
                if builder.add_assignment(row[cols["patent_id"]].strip(), row[cols["cpc_code"]]):
                    t.accepted += 1
                else:
                    bad(t, cpc_path, lineno, _new_reason(before, builder.counts["cpc"]))

    if citations_path is not None:
        t = report.tables["citations"] = TableReport(citations_path)
        fh, reader, cols = _open_table(citations_path, "citations")
        with fh:
            for lineno, row in enumerate(reader, start=2):
                t.rows += 1
                if len(row) <= max(cols.values()):
                    bad(t, citations_path, lineno, "malformed")
                    continue
                citing = row[cols["citing_id"]].strip()
                cited = row[cols["cited_id"]].strip()
                try:
                    stated_year = int(row[cols["citing_year"]])
                except ValueError:
                    bad(t, citations_path, lineno, "malformed")
                    continue
                before = dict(builder.counts["citations"])
                if builder.add_citation(citing, cited):
                    t.accepted += 1
                    # citing_year is resolved from the citing record; a stated
                    # year that disagrees is worth flagging but not fatal.
                    if builder.grant_year(citing) != stated_year:
                        t.warnings["citing_year_mismatch"] += 1
                else:
                    bad(t, citations_path, lineno, _new_reason(before, builder.counts["citations"]))

    if science_path is not None:
        t = report.tables["science"] = TableReport(science_path)
        fh, reader, cols = _open_table(science_path, "science")
        with fh:
            for lineno, row in enumerate(reader, start=2):
                t.rows += 1
                if len(row) <= max(cols.values()):
                    bad(t, science_path, lineno, "malformed")
                    continue
                try:
                    conf = int(row[cols["confidence"]])
                except ValueError:
                    bad(t, science_path, lineno, "malformed")
                    continue
                before = dict(builder.counts["science"])
                if builder.add_science_link(row[cols["patent_id"]].strip(), row[cols["field_label"]], conf):
                    t.accepted += 1
                else:
                    bad(t, science_path, lineno, _new_reason(before, builder.counts["science"]))

    return builder.build(), report


def _new_reason(before: dict, after: Counter) -> str:
    for reason, n in after.items():
        if n != before.get(reason, 0):
            return reason
    return "rejected"


def write_corpus(out_dir: str, corpus: Corpus) -> dict[str, str]:
    """Write the four corpus tables under `out_dir`; returns name -> path."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    def clean(text: str) -> str:
        return text.replace("\t", " ").replace("\n", " ").replace("\r", " ")

    paths["patents"] = p = os.path.join(out_dir, "patents.tsv")
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(TABLE_COLUMNS["patents"]) + "\n")
        for rec in corpus.records.values():
            fh.write(
                "\t".join(
                    (rec.id, str(rec.grant_year), clean(rec.title), clean(rec.abstract),
                     clean(rec.claims), clean(rec.description))
                )
                + "\n"
            )

    paths["cpc"] = p = os.path.join(out_dir, "cpc.tsv")
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(TABLE_COLUMNS["cpc"]) + "\n")
        for pid, codes in corpus.codes.items():
            for code in codes:
                fh.write(f"{pid}\t{code.raw}\n")

    paths["citations"] = p = os.path.join(out_dir, "citations.tsv")
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(TABLE_COLUMNS["citations"]) + "\n")
        for e in corpus.citations:
            fh.write(f"{e.citing}\t{e.cited}\t{e.citing_year}\n")

    paths["science"] = p = os.path.join(out_dir, "science.tsv")
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(TABLE_COLUMNS["science"]) + "\n")
        for link in corpus.science:
            fh.write(f"{link.patent}\t{clean(link.field_label)}\t{link.confidence}\n")

    return paths


# ---------------------------------------------------------------------------
# metric series files

def fmt_value(v: float | None) -> str:
    """Render a numeric cell with 6 significant digits; None -> empty cell."""
    if v is None:
        return ""
    return format(float(v), ".6g")


def write_series(path: str, series_list: Sequence[GroupSeries]) -> None:
    """Write series as a year-by-group TSV, columns sorted by group name.

    Years missing from a series produce empty cells.  Group names must be
    unique; metric identity is carried by the file name.
    """
    ordered = sorted(series_list, key=lambda s: s.group)
    names = [s.group for s in ordered]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate group columns in {path}: {names}")
    years = sorted({y for s in ordered for y, _ in s.points})
    lookup = [dict(s.points) for s in ordered]
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("year\t" + "\t".join(names) + "\n")
        for y in years:
            cells = [fmt_value(d.get(y)) for d in lookup]
            fh.write(str(y) + "\t" + "\t".join(cells) + "\n")


def read_series(path: str, metric: str | None = None) -> list[GroupSeries]:
    """Parse a series TSV back into GroupSeries (one per column)."""
    if metric is None:
        metric = os.path.basename(path).split(".")[0]
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        header = next(reader)
        if not header or header[0] != "year":
            raise DataError(f"{path}: expected a 'year' first column")
        groups = header[1:]
        points: list[list[tuple[int, float]]] = [[] for _ in groups]
        for row in reader:
            if not row:
                continue
            year = int(row[0])
            for i in range(len(groups)):
                cell = row[i + 1] if i + 1 < len(row) else ""
                if cell != "":
                    points[i].append((year, float(cell)))
    return [
        GroupSeries(group=g, metric=metric, points=tuple(pts))
        for g, pts in zip(groups, points)
    ]


def write_ids(path: str, ids: Iterable[str]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for pid in sorted(ids):
            fh.write(pid + "\n")


def read_ids(path: str) -> frozenset[str]:
    with open(path, "r", encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip())


def write_table(path: str, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(str(c) for c in row) + "\n")


def read_table(path: str) -> tuple[list[str], list[list[str]]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        header = next(reader)
        return header, [row for row in reader]


def write_text(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# SVG line charts

@dataclass(frozen=True)
class PlotOptions:
    width: int = 720
    height: int = 480
    title: str = ""
    x_label: str = "year"
    y_label: str = ""


_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2",
)

_MARGIN = (56, 20, 42, 30)  # left, right, bottom, top


def _nice_step(span: float, target: int = 5) -> float:
    raw = span / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag + 1e-12 * mag:
            return mult * mag
    return 10.0 * mag


def write_svg_lines(
    path: str, series_list: Sequence[GroupSeries], options: PlotOptions | None = None
) -> list[str]:
    """Render series as an SVG line chart with fixed deterministic layout.

    Series with fewer than two points are skipped (their names are
    returned so callers can log them); if no series remains, raises
    `DataError`.
    """
    opt = options or PlotOptions()
    drawable = sorted((s for s in series_list if len(s.points) >= 2), key=lambda s: s.group)
    skipped = sorted(s.group for s in series_list if len(s.points) < 2)
    if not drawable:
        raise DataError(f"{path}: no series with at least 2 points")

    xs = [y for s in drawable for y, _ in s.points]
    ys = [v for s in drawable for _, v in s.points]
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(ys), max(ys)
    if x_min == x_max:
        x_min, x_max = x_min - 1, x_max + 1
    if y_min == y_max:
        y_min, y_max = y_min - 1.0, y_max + 1.0

    ml, mr, mb, mt = _MARGIN
    pw = opt.width - ml - mr
    ph = opt.height - mt - mb

    def sx(x: float) -> float:
        return ml + (x - x_min) / (x_max - x_min) * pw

    def sy(y: float) -> float:
        return mt + (y_max - y) / (y_max - y_min) * ph

    def f(v: float) -> str:
        return format(v, ".2f")

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{opt.width}" '
        f'height="{opt.height}" viewBox="0 0 {opt.width} {opt.height}">',
        f'<rect width="{opt.width}" height="{opt.height}" fill="white"/>',
    ]
    if opt.title:
        parts.append(
            f'<text x="{opt.width / 2:.0f}" y="{mt - 10}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{escape(opt.title)}</text>'
        )

    axis = 'stroke="black" stroke-width="1"'
    parts.append(f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" {axis}/>')
    parts.append(f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" {axis}/>')

    x_step = max(1, round(_nice_step(x_max - x_min, 6)))
    tick = math.ceil(x_min / x_step) * x_step
    while tick <= x_max:
        px = sx(tick)
        parts.append(f'<line x1="{f(px)}" y1="{mt + ph}" x2="{f(px)}" y2="{mt + ph + 4}" {axis}/>')
        parts.append(
            f'<text x="{f(px)}" y="{mt + ph + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{tick}</text>'
        )
        tick += x_step

    y_step = _nice_step(y_max - y_min, 5)
    ty = math.ceil(y_min / y_step) * y_step
    while ty <= y_max + 1e-9 * y_step:
        py = sy(ty)
        parts.append(f'<line x1="{ml - 4}" y1="{f(py)}" x2="{ml}" y2="{f(py)}" {axis}/>')
        parts.append(
            f'<text x="{ml - 6}" y="{f(py + 3)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{fmt_value(ty)}</text>'
        )
        ty += y_step

    if opt.x_label:
        parts.append(
            f'<text x="{ml + pw / 2:.0f}" y="{opt.height - 6}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{escape(opt.x_label)}</text>'
        )
    if opt.y_label:
        cx, cy = 14, mt + ph / 2
        parts.append(
            f'<text x="{cx}" y="{cy:.0f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11" '
            f'transform="rotate(-90 {cx} {cy:.0f})">{escape(opt.y_label)}</text>'
        )

    for i, s in enumerate(drawable):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{f(sx(x))},{f(sy(v))}" for x, v in s.points)
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>'
        )
        ly = mt + 14 + 14 * i
        lx = ml + pw - 130
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{lx + 22}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">{escape(s.group)}</text>'
        )

    parts.append("</svg>")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
    return skipped


# ---------------------------------------------------------------------------
# manifest

def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    out_dir: str,
    manifest_name: str = "manifest.txt",
    exclude: Sequence[str] = ("run.log",),
) -> list[str]:
    """Hash every artifact under `out_dir` into a sorted manifest file.

    The manifest itself and excluded names are not listed.  Returns the
    relative paths that were hashed.
    """
    rels = []
    for root, dirs, files in os.walk(out_dir):
        dirs.sort()
        for name in sorted(files):
            rel = os.path.relpath(os.path.join(root, name), out_dir).replace(os.sep, "/")
            if name == manifest_name or rel in exclude or name in exclude:
                continue
            rels.append(rel)
    rels.sort()
    lines = [f"{sha256_file(os.path.join(out_dir, r))}  {r}" for r in rels]
    write_text(os.path.join(out_dir, manifest_name), "\n".join(lines) + "\n")
    return rels
