import os

import pytest

from patmetrics import io as pio
from patmetrics.errors import DataError
from patmetrics.metrics import GroupSeries

from helpers import build_corpus


def write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def sample_tables(tmp_path):
    write(
        tmp_path / "patents.tsv",
        "id\tgrant_year\ttitle\tabstract\tclaims\tdescription\n"
        "P1\t2000\ta title\tan abstract\tsome claims\tlong text\n"
        "P2\t2001\t\t\t\t\n"
        "P3\t2002\tt3\ta3\tc3\td3\n",
    )
    write(tmp_path / "cpc.tsv", "patent_id\tcpc_code\nP1\tG06N20/00\nP2\tA01B\nP3\tG06N\n")
    write(
        tmp_path / "citations.tsv",
        "citing_id\tcited_id\tciting_year\nP2\tP1\t2001\nP3\tP1\t2002\n",
    )
    write(tmp_path / "science.tsv", "patent_id\tfield_label\tconfidence\nP1\tPhysics; Applied\t7\n")
    return tmp_path


class TestLoadCorpus:
    def test_clean_load(self, tmp_path):
        d = sample_tables(tmp_path)
        corpus, report = pio.load_corpus(
            str(d / "patents.tsv"), str(d / "cpc.tsv"),
            str(d / "citations.tsv"), str(d / "science.tsv"),
            window=(2000, 2002),
        )
        assert len(corpus) == 3
        assert corpus.record("P1").abstract == "an abstract"
        assert corpus.classes_of("P1", 4) == {"G06N"}
        assert len(corpus.citations) == 2
        assert len(corpus.science) == 1
        for t in report.tables.values():
            assert t.rejected_total == 0

    def test_lenient_counts_rejections(self, tmp_path):
        d = sample_tables(tmp_path)
        write(
            d / "patents.tsv",
            "id\tgrant_year\ttitle\tabstract\tclaims\tdescription\n"
            "P1\t2000\tt\ta\tc\td\n"
            "P2\tnot_a_year\tt\ta\tc\td\n"
            "P3\t1980\tt\ta\tc\td\n"
            "P4\t2001\tt\ta\tc\td\n",
        )
        corpus, report = pio.load_corpus(
            str(d / "patents.tsv"), window=(2000, 2002)
        )
        assert sorted(corpus.ids()) == ["P1", "P4"]
        t = report.tables["patents"]
        assert t.rows == 4 and t.accepted == 2
        assert t.rejected["malformed"] == 1
        assert t.rejected["year_out_of_window"] == 1
        # accounting invariant: every row is either accepted or rejected
        assert t.rows == t.accepted + t.rejected_total

    def test_strict_raises_on_bad_row(self, tmp_path):
        d = sample_tables(tmp_path)
        write(
            d / "patents.tsv",
            "id\tgrant_year\ttitle\tabstract\tclaims\tdescription\n"
            "P1\t1980\tt\ta\tc\td\n",
        )
        with pytest.raises(DataError):
            pio.load_corpus(str(d / "patents.tsv"), window=(2000, 2002), strict=True)

    def test_missing_column_always_fatal(self, tmp_path):
        d = sample_tables(tmp_path)
        write(d / "patents.tsv", "id\tgrant_year\ttitle\nP1\t2000\tt\n")
        with pytest.raises(DataError):
            pio.load_corpus(str(d / "patents.tsv"), window=(2000, 2002))

    def test_unknown_citation_side_counted(self, tmp_path):
        d = sample_tables(tmp_path)
        write(
            d / "citations.tsv",
            "citing_id\tcited_id\tciting_year\nPX\tP1\t2001\nP3\tPX\t2002\nP3\tP1\t2002\n",
        )
        corpus, report = pio.load_corpus(
            str(d / "patents.tsv"), str(d / "cpc.tsv"), str(d / "citations.tsv"),
            window=(2000, 2002),
        )
        t = report.tables["citations"]
        assert t.accepted == 1
        assert t.rejected["unknown_citing"] == 1
        assert t.rejected["unknown_cited"] == 1
        assert len(corpus.citations) == 1

    def test_citing_year_mismatch_is_warning(self, tmp_path):
        d = sample_tables(tmp_path)
        write(
            d / "citations.tsv",
            "citing_id\tcited_id\tciting_year\nP2\tP1\t1999\n",
        )
        corpus, report = pio.load_corpus(
            str(d / "patents.tsv"), str(d / "cpc.tsv"), str(d / "citations.tsv"),
            window=(2000, 2002),
        )
        # the resolved year wins; the stated one is only flagged
        assert corpus.citations[0].citing_year == 2001
        assert report.tables["citations"].warnings["citing_year_mismatch"] == 1
        assert report.tables["citations"].accepted == 1

    def test_report_format_is_deterministic(self, tmp_path):
        d = sample_tables(tmp_path)
        _, report = pio.load_corpus(str(d / "patents.tsv"), window=(2000, 2002))
        text = report.format()
        assert "corpus window: 2000-2002" in text
        assert "mode: lenient" in text
        assert text == report.format()


class TestRoundTrip:
    def test_corpus_tables_round_trip(self, tmp_path):
        corpus = build_corpus(
            {"A": 2000, "B": 2001},
            codes={"A": ["G06N20/00", "H04L9/40"], "B": ["A01B"]},
            cites=[("B", "A")],
            science=[("A", "Physics; Applied", 7)],
            texts={"A": {"title": "a title", "abstract": "deep language model"}},
        )
        pio.write_corpus(str(tmp_path), corpus)
        reloaded, report = pio.load_corpus(
            str(tmp_path / "patents.tsv"), str(tmp_path / "cpc.tsv"),
            str(tmp_path / "citations.tsv"), str(tmp_path / "science.tsv"),
            window=corpus.window,
        )
        assert reloaded.records == corpus.records
        assert reloaded.codes == corpus.codes
        assert set(reloaded.citations) == set(corpus.citations)
        assert set(reloaded.science) == set(corpus.science)
        for t in report.tables.values():
            assert t.rejected_total == 0


class TestSeriesFiles:
    def test_format_and_missing_cells(self, tmp_path):
        a = GroupSeries("A", "counts", ((2000, 1.0), (2001, 2.0), (2002, 3.0)))
        b = GroupSeries("B", "counts", ((2001, 0.5),))
        path = str(tmp_path / "counts.metric.tsv")
        pio.write_series(path, [b, a])  # unsorted input
        lines = open(path).read().splitlines()
        assert lines[0] == "year\tA\tB"
        assert lines[1] == "2000\t1\t"
        assert lines[2] == "2001\t2\t0.5"
        assert lines[3] == "2002\t3\t"

    def test_six_significant_digits(self, tmp_path):
        s = GroupSeries("A", "share", ((2000, 0.123456789), (2001, 1234567.0)))
        path = str(tmp_path / "share.metric.tsv")
        pio.write_series(path, [s])
        content = open(path).read()
        assert "0.123457" in content
        assert "1.23457e+06" in content

    def test_write_read_write_fixed_point(self, tmp_path):
        import random

        rng = random.Random(7)
        series = [
            GroupSeries(
                name,
                "growth",
                tuple(
                    (y, rng.uniform(-1, 1))
                    for y in range(2000, 2020)
                    if rng.random() > 0.2
                ),
            )
            for name in ("A", "B", "C")
        ]
        p1 = str(tmp_path / "one.metric.tsv")
        p2 = str(tmp_path / "two.metric.tsv")
        pio.write_series(p1, series)
        back = pio.read_series(p1, "growth")
        assert [s.group for s in back] == ["A", "B", "C"]
        pio.write_series(p2, back)
        assert open(p1).read() == open(p2).read()

    def test_duplicate_groups_rejected(self, tmp_path):
        s = GroupSeries("A", "counts", ((2000, 1.0),))
        with pytest.raises(ValueError):
            pio.write_series(str(tmp_path / "x.tsv"), [s, s])

    def test_ids_round_trip(self, tmp_path):
        path = str(tmp_path / "g.ids")
        pio.write_ids(path, {"P2", "P10", "P1"})
        assert open(path).read() == "P1\nP10\nP2\n"
        assert pio.read_ids(path) == {"P1", "P2", "P10"}


class TestSvg:
    def series(self):
        return [
            GroupSeries("A", "counts", ((2000, 1.0), (2001, 4.0), (2002, 2.0))),
            GroupSeries("B", "counts", ((2000, 3.0), (2002, 5.0))),
        ]

    def test_writes_valid_svg_with_polylines(self, tmp_path):
        path = str(tmp_path / "chart.svg")
        skipped = pio.write_svg_lines(path, self.series(), pio.PlotOptions(title="counts"))
        text = open(path).read()
        assert skipped == []
        assert text.startswith("<svg ")
        assert text.count("<polyline") == 2
        assert "counts" in text
        assert "2000" in text and "2002" in text

    def test_single_point_series_skipped(self, tmp_path):
        series = self.series() + [GroupSeries("C", "counts", ((2000, 9.0),))]
        skipped = pio.write_svg_lines(str(tmp_path / "c.svg"), series)
        assert skipped == ["C"]
        assert open(tmp_path / "c.svg").read().count("<polyline") == 2

    def test_error_when_nothing_drawable(self, tmp_path):
        series = [GroupSeries("C", "counts", ((2000, 9.0),))]
        with pytest.raises(DataError):
            pio.write_svg_lines(str(tmp_path / "c.svg"), series)

    def test_deterministic_bytes(self, tmp_path):
        p1, p2 = str(tmp_path / "a.svg"), str(tmp_path / "b.svg")
        pio.write_svg_lines(p1, self.series())
        pio.write_svg_lines(p2, self.series())
        assert open(p1).read() == open(p2).read()

    def test_flat_series_padded_axis(self, tmp_path):
        flat = [GroupSeries("A", "counts", ((2000, 2.0), (2001, 2.0)))]
        pio.write_svg_lines(str(tmp_path / "flat.svg"), flat)  # must not divide by zero


class TestManifest:
    def test_sorted_hashes_and_exclusions(self, tmp_path):
        write(tmp_path / "b.txt", "bbb\n")
        write(tmp_path / "a.txt", "aaa\n")
        os.makedirs(tmp_path / "sub")
        write(tmp_path / "sub" / "c.txt", "ccc\n")
        write(tmp_path / "run.log", "log line\n")
        rels = pio.write_manifest(str(tmp_path))
        assert rels == ["a.txt", "b.txt", "sub/c.txt"]
        lines = open(tmp_path / "manifest.txt").read().splitlines()
        assert len(lines) == 3
        for line in lines:
            digest, rel = line.split("  ")
            assert len(digest) == 64
        assert [l.split("  ")[1] for l in lines] == rels

    def test_rewrite_is_stable(self, tmp_path):
        write(tmp_path / "a.txt", "aaa\n")
        pio.write_manifest(str(tmp_path))
        first = open(tmp_path / "manifest.txt").read()
        pio.write_manifest(str(tmp_path))
        assert open(tmp_path / "manifest.txt").read() == first
