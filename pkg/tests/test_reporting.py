import re

import pytest

from conftest import melody_clip
from mira import EvaluationConfig, build_corpus, evaluate_pairwise, save_wav, sensitivity_experiment, write_set_manifest
from mira.errors import ConfigurationError
from mira.evaluator import EvaluationReport
from mira.manifests import CorpusBundle
from mira.reporting import (
    load_report,
    report_from_dict,
    report_to_dict,
    write_report,
    write_report_csv,
    write_report_json,
    write_trend_svg,
)


@pytest.fixture(scope="module")
def small_report(tmp_path_factory):
    tmp_path = tmp_path_factory.mktemp("report_src")
    clips = [melody_clip(seed=500 + i, duration_s=1.2, clip_id=f"x{i}") for i in range(3)]
    set_dir = tmp_path / "set"
    set_dir.mkdir()
    tracks = []
    for clip in clips:
        save_wav(clip, set_dir / f"{clip.id}.wav")
        tracks.append({"id": clip.id, "audio": f"{clip.id}.wav"})
    manifest = set_dir / "set.json"
    write_set_manifest(manifest, "set", tracks)
    config = EvaluationConfig(
        manifest, manifest, metrics=("builtin_cos", "kl"), thresholds={"builtin_cos": 0.5}
    )
    return evaluate_pairwise(config)


@pytest.fixture(scope="module")
def stats_report():
    refs = [melody_clip(seed=600 + i, duration_s=2.0, clip_id=f"ref{i}") for i in range(3)]
    mixes = [melody_clip(seed=700 + i, duration_s=2.0, clip_id=f"mix{i}") for i in range(3)]
    manifest, replicas = build_corpus(refs, mixes, [0.10, 0.50], 2, seed=3)
    bundle = CorpusBundle(manifest, {c.id: c for c in refs}, {c.id: c for c in replicas})
    outcome = sensitivity_experiment(bundle, metrics=("builtin_cos", "kl"))
    return EvaluationReport(per_pair=[], set_pairs={}, global_stats={}, stats=outcome.stats)


class TestCsv:
    def test_row_count(self, small_report, tmp_path):
        path = tmp_path / "report.csv"
        write_report_csv(small_report, path)
        lines = path.read_text().splitlines()
        assert len(lines) == len(small_report.per_pair) + 1
        assert lines[0] == "metric,ref_id,tgt_id,value,flagged"

    def test_flag_column_sound(self, small_report, tmp_path):
        path = tmp_path / "report.csv"
        write_report_csv(small_report, path)
        flagged = {(f.ref_id, f.tgt_id, f.metric) for f in small_report.flags}
        for line in path.read_text().splitlines()[1:]:
            metric, ref_id, tgt_id, _value, flag = line.split(",")
            assert (flag == "true") == ((ref_id, tgt_id, metric) in flagged)

    def test_byte_deterministic(self, small_report, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_report_csv(small_report, a)
        write_report_csv(small_report, b)
        assert a.read_bytes() == b.read_bytes()


class TestJson:
    def test_round_trip_equality(self, small_report, tmp_path):
        path = tmp_path / "report.json"
        write_report_json(small_report, path)
        assert load_report(path) == small_report

    def test_stats_round_trip(self, stats_report, tmp_path):
        path = tmp_path / "stats.json"
        write_report_json(stats_report, path)
        assert load_report(path) == stats_report

    def test_dict_round_trip(self, small_report):
        assert report_from_dict(report_to_dict(small_report)) == small_report

    def test_byte_deterministic(self, small_report, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_report_json(small_report, a)
        write_report_json(small_report, b)
        assert a.read_bytes() == b.read_bytes()


class TestSvg:
    def test_one_series_per_metric_with_all_points(self, stats_report, tmp_path):
        path = tmp_path / "trend.svg"
        write_trend_svg(stats_report, path)
        svg = path.read_text()
        series = re.findall(r'<g class="series" id="series-([\w_]+)">', svg)
        assert sorted(series) == ["builtin_cos", "kl"]
        n_points = len(stats_report.stats.degrees) + 1  # baseline + each degree
        for chunk in re.split(r'<g class="series"', svg)[1:]:
            assert chunk.count("<circle") == n_points

    def test_requires_stats(self, small_report, tmp_path):
        with pytest.raises(ConfigurationError):
            write_trend_svg(small_report, tmp_path / "x.svg")


class TestWriteReport:
    def test_formats_selected(self, small_report, tmp_path):
        written = write_report(small_report, tmp_path, formats={"csv", "json"})
        names = {p.name for p in written}
        assert names == {"report.csv", "report.json"}

    def test_svg_skipped_without_stats(self, small_report, tmp_path):
        written = write_report(small_report, tmp_path, formats={"svg"})
        assert written == []

    def test_unknown_format_rejected(self, small_report, tmp_path):
        with pytest.raises(ConfigurationError):
            write_report(small_report, tmp_path, formats={"pdf"})
