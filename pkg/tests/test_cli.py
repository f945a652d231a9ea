import json

import pytest

from conftest import melody_clip
from mira import save_wav, write_set_manifest
from mira.cli import main

RATE = 44100


@pytest.fixture(scope="module")
def song_dirs(tmp_path_factory):
    base = tmp_path_factory.mktemp("cli_songs")
    ref_dir = base / "ref"
    mix_dir = base / "mix"
    ref_dir.mkdir()
    mix_dir.mkdir()
    for i in range(3):
        save_wav(melody_clip(seed=800 + i, duration_s=2.0, clip_id=f"ref{i}"), ref_dir / f"ref{i}.wav")
        save_wav(melody_clip(seed=900 + i, duration_s=2.0, clip_id=f"mix{i}"), mix_dir / f"mix{i}.wav")
    return ref_dir, mix_dir


@pytest.fixture(scope="module")
def audio_manifests(tmp_path_factory):
    base = tmp_path_factory.mktemp("cli_sets")
    manifests = {}
    for name, seed0 in (("ref", 1000), ("tgt", 1100)):
        set_dir = base / name
        set_dir.mkdir()
        tracks = []
        for i in range(2):
            clip = melody_clip(seed=seed0 + i, duration_s=1.5, clip_id=f"{name}{i}")
            save_wav(clip, set_dir / f"{clip.id}.wav")
            tracks.append({"id": clip.id, "audio": f"{clip.id}.wav"})
        manifest = set_dir / "set.json"
        write_set_manifest(manifest, name, tracks)
        manifests[name] = manifest
    return manifests


class TestSynthCommand:
    def test_synth_writes_corpus(self, song_dirs, tmp_path, capsys):
        ref_dir, mix_dir = song_dirs
        out = tmp_path / "corpus"
        code = main([
            "synth", "--reference", str(ref_dir), "--mixture", str(mix_dir),
            "--degrees", "10,50", "--replicas", "2", "--seed", "5", "--out", str(out),
        ])
        assert code == 0
        data = json.loads((out / "corpus.json").read_text())
        assert len(data["specs"]) == 3 * 2 * 2
        assert len(list((out / "replicas").glob("*.wav"))) == 12

    def test_synth_deterministic(self, song_dirs, tmp_path):
        ref_dir, mix_dir = song_dirs
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            main([
                "synth", "--reference", str(ref_dir), "--mixture", str(mix_dir),
                "--degrees", "25", "--replicas", "1", "--seed", "9", "--out", str(out),
            ])
            outs.append(out)
        a_json = (outs[0] / "corpus.json").read_text()
        b_json = (outs[1] / "corpus.json").read_text()
        assert a_json == b_json
        for wav in sorted((outs[0] / "replicas").glob("*.wav")):
            assert wav.read_bytes() == (outs[1] / "replicas" / wav.name).read_bytes()

    def test_missing_dir_is_config_error(self, tmp_path):
        code = main([
            "synth", "--reference", str(tmp_path / "nope"), "--mixture", str(tmp_path / "nope"),
            "--out", str(tmp_path / "out"),
        ])
        assert code == 2


class TestEvalCommand:
    def test_eval_writes_reports(self, audio_manifests, tmp_path, capsys):
        out = tmp_path / "run"
        code = main([
            "eval", "--reference", str(audio_manifests["ref"]), "--target", str(audio_manifests["tgt"]),
            "--metrics", "builtin_cos,kl", "--threshold", "builtin_cos=0.0", "--out", str(out),
        ])
        assert code == 0
        assert (out / "report.json").exists()
        assert (out / "report.csv").exists()
        captured = capsys.readouterr()
        assert "reference_vs_target builtin_cos" in captured.out

    def test_unknown_metric_exit_2(self, audio_manifests, tmp_path):
        code = main([
            "eval", "--reference", str(audio_manifests["ref"]), "--target", str(audio_manifests["tgt"]),
            "--metrics", "bogus", "--out", str(tmp_path / "x"),
        ])
        assert code == 2

    def test_missing_manifest_exit_3(self, tmp_path):
        code = main([
            "eval", "--reference", str(tmp_path / "none.json"), "--target", str(tmp_path / "none.json"),
            "--out", str(tmp_path / "x"),
        ])
        assert code == 3

    def test_majority_corrupt_exit_4(self, tmp_path):
        set_dir = tmp_path / "bad"
        set_dir.mkdir()
        tracks = []
        for i in range(2):
            (set_dir / f"b{i}.wav").write_bytes(b"garbage")
            tracks.append({"id": f"b{i}", "audio": f"b{i}.wav"})
        manifest = set_dir / "set.json"
        write_set_manifest(manifest, "bad", tracks)
        code = main([
            "eval", "--reference", str(manifest), "--target", str(manifest),
            "--metrics", "builtin_cos", "--out", str(tmp_path / "x"),
        ])
        assert code == 4


class TestStatsCommand:
    def test_stats_over_synth_corpus(self, song_dirs, tmp_path, capsys):
        ref_dir, mix_dir = song_dirs
        corpus = tmp_path / "corpus"
        main([
            "synth", "--reference", str(ref_dir), "--mixture", str(mix_dir),
            "--degrees", "10,50", "--replicas", "2", "--seed", "5", "--out", str(corpus),
        ])
        out = tmp_path / "stats"
        code = main([
            "stats", "--corpus", str(corpus / "corpus.json"),
            "--metrics", "builtin_cos,kl", "--out", str(out),
        ])
        assert code == 0
        assert (out / "report.json").exists()
        assert (out / "trend.svg").exists()
        captured = capsys.readouterr()
        assert "baseline" in captured.out


class TestReportCommand:
    def test_reemit_formats(self, audio_manifests, tmp_path):
        run_dir = tmp_path / "run"
        main([
            "eval", "--reference", str(audio_manifests["ref"]), "--target", str(audio_manifests["tgt"]),
            "--metrics", "builtin_cos", "--formats", "json", "--out", str(run_dir),
        ])
        assert not (run_dir / "report.csv").exists()
        code = main(["report", "--in", str(run_dir), "--formats", "csv,json"])
        assert code == 0
        assert (run_dir / "report.csv").exists()

    def test_missing_run_dir_exit_2(self, tmp_path):
        assert main(["report", "--in", str(tmp_path)]) == 2
