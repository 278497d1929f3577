import os

import pytest

from patmetrics import cli
from patmetrics import io as pio
from patmetrics.errors import ConfigError

CS_AI = "Computer Science; Artificial Intelligence"

SYNTH_TEXT = """\
[synth]
rng_seed = 424
years = 2000-2004
base_count = 120
growth = 0.05
lag_mean = 4
edges_per_patent = 3

[group:kw]
share = 0.06
phrase = neural network

[group:sci]
share = 0.09
science_field = Computer Science; Artificial Intelligence
science_confidence = 4
jaccard_with = kw
jaccard_target = 0.1

[group:wipo]
share = 0.07
phrase = fuzzy logic
codes = G06N, B25J, -
jaccard_with = sci
jaccard_target = 0.15

[group:us]
share = 0.18
marker = quantumflux
codes = Y02E
jaccard_with = wipo
jaccard_target = 0.12

[decoys]
links =
    Computer Science; Artificial Intelligence|3|2
    Physics; Applied|9|2
"""

USPTO_TEXT = """\
[uspto]
components = ai_core
expansion_hops = 0
vocab_size = 200
epochs = 80
learning_rate = 2.0
threshold = 0.5

[seeds]
ai_core = Y02
"""

RUN_TEXT = """\
[run]
window = 2000-2004
periods = 2000-2004, 2000-2002, 2003-2004

[inputs]
synth = small.synth

[group:Keyword]
kind = keyword

[group:Science]
kind = science

[group:Rules]
kind = wipo

[group:Auto]
kind = uspto
config = small.uspto

[group:All]
kind = prefix
prefix = All

[group:G06]
kind = prefix
prefix = G06

[metrics]
levels = 1,3,4
diversity_universe_3 = 136
diversity_universe_4 = 674
zscore = generality
lowess = growth

[stats]
compare = growth
"""


@pytest.fixture(scope="module")
def ws(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    (root / "small.synth").write_text(SYNTH_TEXT, encoding="utf-8")
    (root / "small.uspto").write_text(USPTO_TEXT, encoding="utf-8")
    (root / "small.run").write_text(RUN_TEXT, encoding="utf-8")
    return root


@pytest.fixture(scope="module")
def full_run(ws):
    out = ws / "full"
    code = cli.main(["run", "--config", str(ws / "small.run"), "--out", str(out)])
    assert code == 0
    return out


def read(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


class TestSynthCommand:
    def test_writes_tables_truth_and_manifest(self, ws):
        out = ws / "synth-out"
        code = cli.main(["synth", "--config", str(ws / "small.synth"), "--out", str(out)])
        assert code == 0
        for name in ("patents.tsv", "cpc.tsv", "citations.tsv", "science.tsv"):
            assert (out / name).exists()
        for name in ("kw", "sci", "wipo", "us"):
            assert (out / "truth" / f"{name}.ids").exists()
        manifest = read(out / "manifest.txt")
        assert "patents.tsv" in manifest
        assert "run.log" not in manifest
        assert "manifest.txt" not in manifest

    def test_seed_flag_changes_output(self, ws):
        a, b = ws / "seed-a", ws / "seed-b"
        assert cli.main(["synth", "--config", str(ws / "small.synth"), "--out", str(a)]) == 0
        assert (
            cli.main(
                ["synth", "--config", str(ws / "small.synth"), "--out", str(b), "--seed", "99"]
            )
            == 0
        )
        assert pio.sha256_file(str(a / "patents.tsv")) != pio.sha256_file(str(b / "patents.tsv"))

    def test_infeasible_config_exits_2(self, ws, capsys):
        bad = ws / "bad.synth"
        bad.write_text(
            "[synth]\nbase_count = 10\nyears = 2000-2001\n"
            "[group:a]\nshare = 0.7\n[group:b]\nshare = 0.7\n",
            encoding="utf-8",
        )
        code = cli.main(["synth", "--config", str(bad), "--out", str(ws / "bad-out")])
        assert code == 2
        assert "configuration error" in capsys.readouterr().err


class TestRunPipeline:
    def test_artifact_tree(self, full_run):
        out = full_run
        for g in ("Keyword", "Science", "Rules", "Auto", "All", "G06"):
            assert (out / "groups" / f"{g}.ids").exists()
        metric_stems = [
            "counts", "share", "growth", "growth_lowess", "jaccard", "citation_lag",
            "generality_d1", "generality_d3", "generality_d4",
            "avg_citing_classes_d1", "avg_citing_classes_cited_d1",
            "diversity_share_d3", "diversity_share_d4",
            "diversity_per_patent_d1", "descendants_counts", "descendants_share",
            "generality_d1_zscore",
        ]
        for stem in metric_stems:
            assert (out / "metrics" / f"{stem}.metric.tsv").exists(), stem
        for name in ("scalars.tsv", "overlap.tsv", "lag_periods.tsv"):
            assert (out / "metrics" / name).exists()
        for tag in ("2000-2004", "2000-2002", "2003-2004"):
            assert (out / "stats" / f"growth_tests_{tag}.tsv").exists()
            assert (out / "stats" / f"growth_pvalues_{tag}.tsv").exists()
        assert (out / "stats" / "growth_summary.tsv").exists()
        assert (out / "plots" / "counts.svg").exists()
        assert (out / "load-report.txt").exists()
        assert (out / "manifest.txt").exists()
        assert (out / "run.log").exists()

    def test_groups_match_planted_truth(self, full_run):
        out = full_run
        truth = {
            name: pio.read_ids(str(out / "corpus" / "truth" / f"{name}.ids"))
            for name in ("kw", "sci", "wipo", "us")
        }
        assert pio.read_ids(str(out / "groups" / "Keyword.ids")) == truth["kw"]
        assert pio.read_ids(str(out / "groups" / "Science.ids")) == truth["sci"]
        assert pio.read_ids(str(out / "groups" / "Rules.ids")) == truth["wipo"]
        assert pio.read_ids(str(out / "groups" / "Auto.ids")) == truth["us"]

    def test_all_group_covers_corpus(self, full_run):
        n_all = len(pio.read_ids(str(full_run / "groups" / "All.ids")))
        patents = read(full_run / "corpus" / "patents.tsv").strip().splitlines()
        assert n_all == len(patents) - 1  # header

    def test_scalar_table_well_formed(self, full_run):
        lines = read(full_run / "metrics" / "scalars.tsv").strip().splitlines()
        assert lines[0] == "metric\tlevel\tgroup\tvalue"
        metrics_seen = {line.split("\t")[0] for line in lines[1:]}
        assert {"counts", "jaccard", "generality", "diversity_share", "citation_lag"} <= metrics_seen

    def test_rerun_is_byte_identical(self, ws, full_run):
        out2 = ws / "full-again"
        assert cli.main(["run", "--config", str(ws / "small.run"), "--out", str(out2)]) == 0
        assert read(full_run / "manifest.txt") == read(out2 / "manifest.txt")

    def test_stagewise_equals_monolithic(self, ws, full_run):
        out = ws / "staged"
        for stage in ("classify", "metrics", "stats", "report"):
            code = cli.main(
                ["run", "--config", str(ws / "small.run"), "--out", str(out), "--only", stage]
            )
            assert code == 0
        assert read(full_run / "manifest.txt") == read(out / "manifest.txt")

    def test_stage_subcommands_match_run(self, ws, full_run):
        out = ws / "subcmd"
        for stage in ("classify", "metrics", "stats", "report"):
            code = cli.main([stage, "--config", str(ws / "small.run"), "--out", str(out)])
            assert code == 0
        assert read(full_run / "manifest.txt") == read(out / "manifest.txt")


class TestExitCodes:
    def test_missing_run_config(self, tmp_path, capsys):
        code = cli.main(["run", "--config", str(tmp_path / "none.run"), "--out", str(tmp_path / "o")])
        assert code == 2

    def test_unknown_stage_in_only(self, ws, tmp_path):
        code = cli.main(
            ["run", "--config", str(ws / "small.run"), "--out", str(tmp_path / "o"), "--only", "paint"]
        )
        assert code == 2

    def test_metrics_before_classify(self, ws, tmp_path, capsys):
        code = cli.main(
            ["metrics", "--config", str(ws / "small.run"), "--out", str(tmp_path / "o")]
        )
        assert code == 3
        assert "classify stage" in capsys.readouterr().err

    def test_stats_before_metrics(self, ws, tmp_path):
        code = cli.main(["stats", "--config", str(ws / "small.run"), "--out", str(tmp_path / "o")])
        assert code == 3

    def test_report_before_metrics(self, ws, tmp_path):
        code = cli.main(["report", "--config", str(ws / "small.run"), "--out", str(tmp_path / "o")])
        assert code == 3

    def test_missing_patents_table(self, tmp_path):
        cfg = tmp_path / "x.run"
        cfg.write_text(
            "[run]\nwindow = 2000-2001\n[inputs]\npatents = none.tsv\n"
            "[group:All]\nkind = prefix\nprefix = All\n",
            encoding="utf-8",
        )
        assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2

    def test_unwritable_output_is_io_error(self, ws, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        code = cli.main(
            ["run", "--config", str(ws / "small.run"), "--out", str(blocker / "sub")]
        )
        assert code == 4


class TestStrictMode:
    @pytest.fixture()
    def tables(self, ws, tmp_path):
        src = ws / "synth-tables"
        if not src.exists():
            assert (
                cli.main(["synth", "--config", str(ws / "small.synth"), "--out", str(src)]) == 0
            )
        # append one malformed CPC assignment
        cpc = tmp_path / "cpc.tsv"
        cpc.write_text(read(src / "cpc.tsv") + "P0000001\tBADCODE\n", encoding="utf-8")
        cfg = tmp_path / "tables.run"
        cfg.write_text(
            "[run]\nwindow = 2000-2004\n"
            "[inputs]\n"
            f"patents = {src / 'patents.tsv'}\n"
            f"cpc = {cpc}\n"
            f"citations = {src / 'citations.tsv'}\n"
            f"science = {src / 'science.tsv'}\n"
            "[group:All]\nkind = prefix\nprefix = All\n"
            "[metrics]\nlevels = 1\n",
            encoding="utf-8",
        )
        return cfg

    def test_lenient_run_reports_rejection(self, tables, tmp_path):
        out = tmp_path / "lenient"
        assert cli.main(["run", "--config", str(tables), "--out", str(out)]) == 0
        assert "bad_code" in read(out / "load-report.txt")

    def test_strict_run_fails(self, tables, tmp_path, capsys):
        out = tmp_path / "strict"
        code = cli.main(["run", "--config", str(tables), "--out", str(out), "--strict"])
        assert code == 3
        err = capsys.readouterr().err
        assert "cpc.tsv" in err and "line" in err


class TestRunConfigParsing:
    def write(self, tmp_path, text):
        path = tmp_path / "case.run"
        path.write_text(text, encoding="utf-8")
        return str(path)

    def base(self, extra=""):
        return (
            "[run]\nwindow = 2000-2004\n[inputs]\nsynth = s.synth\n"
            "[group:All]\nkind = prefix\nprefix = All\n" + extra
        )

    def test_defaults(self, tmp_path):
        cfg = cli.load_run_config(self.write(tmp_path, self.base()))
        assert cfg.window == (2000, 2004)
        assert cfg.periods == ((2000, 2004),)
        assert cfg.levels == (1, 3, 4)
        assert cfg.compare == ("growth",)
        assert cfg.zscore_metrics == ("generality",)
        assert cfg.lag_mode == "all_citations"
        assert cfg.holm is True
        assert cfg.synth_path == str(tmp_path / "s.synth")

    def test_relative_paths_resolve_against_config_dir(self, tmp_path):
        nested = tmp_path / "configs"
        nested.mkdir()
        path = nested / "case.run"
        path.write_text(self.base(), encoding="utf-8")
        cfg = cli.load_run_config(str(path))
        assert cfg.synth_path == str(nested / "s.synth")

    def test_missing_inputs_section(self, tmp_path):
        with pytest.raises(ConfigError):
            cli.load_run_config(
                self.write(tmp_path, "[run]\nwindow = 2000-2001\n[group:A]\nkind = prefix\nprefix = All\n")
            )

    def test_no_groups(self, tmp_path):
        with pytest.raises(ConfigError):
            cli.load_run_config(
                self.write(tmp_path, "[run]\nwindow = 2000-2001\n[inputs]\nsynth = s\n")
            )

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(ConfigError):
            cli.load_run_config(
                self.write(tmp_path, self.base("[group:X]\nkind = magic\n"))
            )

    def test_prefix_group_needs_prefix(self, tmp_path):
        with pytest.raises(ConfigError):
            cli.load_run_config(self.write(tmp_path, self.base("[group:X]\nkind = prefix\n")))

    def test_uspto_group_needs_config(self, tmp_path):
        with pytest.raises(ConfigError):
            cli.load_run_config(self.write(tmp_path, self.base("[group:X]\nkind = uspto\n")))

    def test_bad_level(self, tmp_path):
        with pytest.raises(ConfigError):
            cli.load_run_config(self.write(tmp_path, self.base("[metrics]\nlevels = 2\n")))

    def test_bad_lag_mode(self, tmp_path):
        with pytest.raises(ConfigError):
            cli.load_run_config(self.write(tmp_path, self.base("[metrics]\nlag_mode = newest\n")))

    def test_bad_zscore_metric(self, tmp_path):
        with pytest.raises(ConfigError):
            cli.load_run_config(self.write(tmp_path, self.base("[metrics]\nzscore = share\n")))

    def test_bad_period(self, tmp_path):
        with pytest.raises(ConfigError):
            cli.load_run_config(
                self.write(
                    tmp_path,
                    "[run]\nwindow = 2000-2001\nperiods = 2001-2000\n[inputs]\nsynth = s\n"
                    "[group:A]\nkind = prefix\nprefix = All\n",
                )
            )


class TestUsptoConfigParsing:
    def test_round_trip(self, ws):
        cfg = cli.load_uspto_config(str(ws / "small.uspto"))
        assert cfg.components == ("ai_core",)
        assert cfg.seed_rules == {"ai_core": ("Y02",)}
        assert cfg.expansion_hops == 0
        assert cfg.vocab_size == 200
        assert cfg.epochs == 80

    def test_defaults(self, tmp_path):
        path = tmp_path / "u.ini"
        path.write_text("[uspto]\n", encoding="utf-8")
        cfg = cli.load_uspto_config(str(path))
        assert cfg.components == cli.cls.DEFAULT_COMPONENTS
        assert cfg.threshold == 0.5

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            cli.load_uspto_config(str(tmp_path / "none.ini"))

    def test_missing_section(self, tmp_path):
        path = tmp_path / "u.ini"
        path.write_text("[other]\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            cli.load_uspto_config(str(path))

    def test_bad_value(self, tmp_path):
        path = tmp_path / "u.ini"
        path.write_text("[uspto]\nthreshold = 1.5\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            cli.load_uspto_config(str(path))
