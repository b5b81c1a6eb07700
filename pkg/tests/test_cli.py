import json
from pathlib import Path

import pytest

from chatqe.cli import main
from chatqe.corpus import serialize_corpus
from chatqe.synthetic import make_corpus

FIXTURE = str(Path(__file__).parent / "fixtures" / "chat_example.jsonl")


@pytest.fixture(scope="module")
def synthetic_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "synthetic.jsonl"
    path.write_text(serialize_corpus(make_corpus(8, seed=3)), encoding="utf-8")
    return str(path)


def test_validate_clean_corpus_exits_zero(capsys):
    assert main(["validate", FIXTURE]) == 0
    assert "0 violations" in capsys.readouterr().out


def test_validate_broken_corpus_exits_one(tmp_path, capsys):
    record = json.loads(Path(FIXTURE).read_text(encoding="utf-8").splitlines()[0])
    record["turns"][1]["source"] = ""
    bad = tmp_path / "bad.jsonl"
    bad.write_text(json.dumps(record) + "\n", encoding="utf-8")
    assert main(["validate", str(bad)]) == 1
    assert "empty-source" in capsys.readouterr().err


def test_unreadable_corpus_exits_one(tmp_path, capsys):
    garbled = tmp_path / "garbled.jsonl"
    garbled.write_text("{not json\n", encoding="utf-8")
    assert main(["validate", str(garbled)]) == 1
    assert "error:" in capsys.readouterr().err


def test_usage_error_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["contextify", FIXTURE])  # --system/--out missing
    assert exc.value.code == 2


def test_stats_writes_outputs_and_manifest(synthetic_path, tmp_path, capsys):
    out = tmp_path / "stats"
    assert main(["stats", synthetic_path, "--group-by", "by_direction", "--out", str(out)]) == 0
    assert (tmp_path / "stats.tsv").exists()
    payload = json.loads((tmp_path / "stats.json").read_text(encoding="utf-8"))
    assert payload["groups"]
    manifest = json.loads((tmp_path / "stats.manifest.json").read_text(encoding="utf-8"))
    assert manifest["command"] == "stats"
    assert synthetic_path in manifest["inputs"]
    assert len(manifest["inputs"][synthetic_path]) == 64  # sha256 hex


def test_mqm_score_with_score_file(synthetic_path, tmp_path, capsys):
    out = tmp_path / "mqm.tsv"
    scores = tmp_path / "human.tsv"
    assert main(["mqm-score", synthetic_path, "--out", str(out), "--score-file", str(scores)]) == 0
    assert out.exists()
    header = scores.read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("# metric=human-mqm")


def test_contextify_deterministic(synthetic_path, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    args = ["contextify", synthetic_path, "--system", "sysA", "--k", "2", "--batch-id", "x"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_perturb_and_import_scores_roundtrip(synthetic_path, tmp_path, capsys):
    batch = tmp_path / "batch.jsonl"
    main(["contextify", synthetic_path, "--system", "sysA", "--k", "2", "--out", str(batch)])
    noisy = tmp_path / "noisy.jsonl"
    assert main(["perturb", str(batch), "--kind", "swap", "--seed", "7", "--out", str(noisy)]) == 0
    scores = tmp_path / "scores.tsv"
    assert main(["score", str(noisy), "--metric", "chrf", "--out", str(scores)]) == 0
    assert main(["import-scores", str(scores), "--batch", str(noisy)]) == 0
    assert "aligned" in capsys.readouterr().out


def test_perturb_seed_recorded_in_manifest(synthetic_path, tmp_path):
    batch = tmp_path / "batch.jsonl"
    main(["contextify", synthetic_path, "--system", "sysA", "--k", "2", "--out", str(batch)])
    noisy = tmp_path / "noisy.jsonl"
    main(["perturb", str(batch), "--kind", "drop-pair", "--seed", "11", "--out", str(noisy)])
    manifest = json.loads((tmp_path / "noisy.jsonl.manifest.json").read_text(encoding="utf-8"))
    assert manifest["seed"] == 11
    assert manifest["config"]["kind"] == "drop-pair"


def test_metaeval_end_to_end(synthetic_path, tmp_path, capsys):
    batch = tmp_path / "batch.jsonl"
    human = tmp_path / "human.tsv"
    metric = tmp_path / "bleu.tsv"
    report = tmp_path / "report"
    main(["mqm-score", synthetic_path, "--out", str(tmp_path / "m.tsv"), "--score-file", str(human)])
    main(["contextify", synthetic_path, "--system", "sysA", "--k", "2", "--out", str(batch)])
    main(["score", str(batch), "--metric", "bleu", "--out", str(metric)])
    code = main(
        [
            "metaeval",
            "--scores", str(metric),
            "--human", str(human),
            "--corpus", synthetic_path,
            "--group-by", "language_pair",
            "--out", str(report),
        ]
    )
    assert code == 0
    payload = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert payload["results"]
    assert all(r["metric"] == "bleu" for r in payload["results"])
    capsys.readouterr()
    assert main(["report", str(tmp_path / "report.json"), "--plot-data", str(tmp_path / "plot.csv")]) == 0
    assert "bleu" in capsys.readouterr().out
    assert (tmp_path / "plot.csv").exists()


def test_metaeval_report_deterministic(synthetic_path, tmp_path):
    batch = tmp_path / "batch.jsonl"
    human = tmp_path / "human.tsv"
    metric = tmp_path / "bleu.tsv"
    main(["mqm-score", synthetic_path, "--out", str(tmp_path / "m.tsv"), "--score-file", str(human)])
    main(["contextify", synthetic_path, "--system", "sysA", "--k", "2", "--out", str(batch)])
    main(["score", str(batch), "--metric", "bleu", "--out", str(metric)])
    base = ["metaeval", "--scores", str(metric), "--human", str(human), "--corpus", synthetic_path]
    main(base + ["--out", str(tmp_path / "r1")])
    main(base + ["--out", str(tmp_path / "r2")])
    assert (tmp_path / "r1.tsv").read_bytes() == (tmp_path / "r2.tsv").read_bytes()
    assert (tmp_path / "r1.json").read_bytes() == (tmp_path / "r2.json").read_bytes()


def test_llm_eval_with_local_endpoint(synthetic_path, tmp_path, capsys):
    from tests.test_llm import MockEndpoint

    ep = MockEndpoint()
    try:
        out = tmp_path / "llm.tsv"
        code = main(
            [
                "llm-eval", FIXTURE,
                "--system", "sysA",
                "--k", "2",
                "--endpoint-url", ep.url,
                "--model", "test-model",
                "--retries", "0",
                "--cache-dir", str(tmp_path / "cache"),
                "--archive", str(tmp_path / "arch.jsonl"),
                "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("# metric=llm-mqm")
        assert all(line.endswith("\t0.0") for line in lines[1:])
    finally:
        ep.close()
