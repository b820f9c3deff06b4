import csv
import importlib.resources as res
import json

import pytest

from evrec import cli, generator, streams

RULES = str(res.files("evrec") / "rules" / "surveillance.rtec")


def write_rules(tmp_path, text):
    path = tmp_path / "pack.rtec"
    path.write_text(text)
    return str(path)


def test_gen_then_run(tmp_path):
    stream = tmp_path / "s.jsonl"
    out = tmp_path / "out.jsonl"
    assert cli.main([
        "gen", "--entities", "6", "--duration", "300", "--seed", "9",
        "--out", str(stream),
    ]) == 0
    assert cli.main([
        "run", "--rules", RULES, "--input", str(stream),
        "--wm", "80", "--step", "40", "--mode", "asap", "--out", str(out),
    ]) == 0
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert lines, "expected some recognised intervals"
    for obj in lines:
        assert set(obj) == {"name", "args", "value", "from", "to", "stability", "q"}
        assert obj["stability"] in ("open", "partial", "final")


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    args = ["gen", "--entities", "5", "--duration", "200", "--seed", "4"]
    cli.main(args + ["--out", str(a)])
    cli.main(args + ["--out", str(b)])
    assert a.read_text() == b.read_text()


def test_gen_copies_scale_entities(tmp_path):
    path = tmp_path / "s.jsonl"
    cli.main(["gen", "--entities", "4", "--duration", "120", "--copies", "3",
              "--seed", "1", "--out", str(path)])
    doc = streams.read_stream(path)
    assert doc.diagnostics == []
    assert len(streams.stream_entities(doc.records)) == 12


def test_generated_stream_is_valid(tmp_path):
    recs = generator.generate(generator.GenSpec(entities=8, duration=250, seed=2))
    path = tmp_path / "s.jsonl"
    streams.write_stream(recs, path)
    doc = streams.read_stream(path)
    assert doc.diagnostics == []


def test_run_mode_final_only(tmp_path):
    stream = tmp_path / "s.jsonl"
    out = tmp_path / "out.jsonl"
    cli.main(["gen", "--entities", "6", "--duration", "300", "--seed", "9",
              "--out", str(stream)])
    cli.main(["run", "--rules", RULES, "--input", str(stream),
              "--wm", "80", "--step", "40", "--mode", "final", "--out", str(out)])
    for line in out.read_text().splitlines():
        assert json.loads(line)["stability"] == "final"


def test_bench_writes_csv_report(tmp_path):
    stream = tmp_path / "s.jsonl"
    report = tmp_path / "rep.csv"
    cli.main(["gen", "--entities", "5", "--duration", "200", "--seed", "3",
              "--out", str(stream)])
    assert cli.main([
        "bench", "--rules", RULES, "--input", str(stream),
        "--wm", "40,80", "--step", "40", "--shards", "1",
        "--report", str(report),
    ]) == 0
    with open(report) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["wm", "step", "shards", "avg_ms", "p95_ms", "max_ms", "realtime"]
    assert len(rows) == 3
    assert [r[0] for r in rows[1:]] == ["40", "80"]


def test_bench_determinism_of_results(tmp_path):
    # same seed, shards=1: two runs produce identical recognition output
    stream = tmp_path / "s.jsonl"
    cli.main(["gen", "--entities", "5", "--duration", "200", "--seed", "3",
              "--out", str(stream)])
    outs = []
    for name in ("a.jsonl", "b.jsonl"):
        out = tmp_path / name
        cli.main(["run", "--rules", RULES, "--input", str(stream),
                  "--wm", "80", "--step", "40", "--out", str(out)])
        outs.append(out.read_text())
    assert outs[0] == outs[1]


def test_rule_errors_exit_nonzero(tmp_path, capsys):
    bad = write_rules(tmp_path, "input event e/1\nnonsense here\n")
    code = cli.main(["run", "--rules", bad, "--input", "missing.jsonl",
                     "--wm", "10", "--step", "10", "--out", "x.jsonl"])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_rule_diagnostics_block_run(tmp_path, capsys):
    bad = write_rules(
        tmp_path,
        "input event e/1\nsimple fluent f/1\n"
        "initiatedAt(f(X) = true, T) <- happensAt(e(X), T).\n",
    )
    with pytest.raises(SystemExit):
        cli.main(["run", "--rules", bad, "--input", "missing.jsonl",
                  "--wm", "10", "--step", "10", "--out", "x.jsonl"])


def test_missing_input_file_is_reported(tmp_path, capsys):
    code = cli.main(["run", "--rules", RULES, "--input",
                     str(tmp_path / "none.jsonl"),
                     "--wm", "10", "--step", "10", "--out", "x.jsonl"])
    assert code == 2


def test_bad_wm_list_rejected(tmp_path):
    with pytest.raises(SystemExit):
        cli.main(["bench", "--rules", RULES, "--input", "x", "--wm", "ten",
                  "--step", "5", "--report", "r.csv"])
