import json
import logging
import math

import pytest

from transalign.cli import main, parse_chain_spec
from transalign.errors import ConfigError

LOOKAHEAD_TRANS = ["I go to school every day.", "I don't go to school every day."]
LOOKAHEAD_TARGET = [
    "I like going to school every day.",
    "I do not go to school every day.",
    "We will go tomorrow.",
]


def write(tmp_path, name, lines):
    path = tmp_path / name
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return str(path)


def last_json(capsys):
    out = capsys.readouterr().out.strip().splitlines()
    return json.loads(out[-1])


def distinct_lines(n):
    return [f"w{i} k{i * 7 % 101} q{i * 13 % 89} end{i}" for i in range(n)]


def test_parse_chain_spec():
    chain = parse_chain_spec("token_overlap:0.99,matching_blocks_ratio:0.85")
    assert [(c.kind, c.threshold) for c in chain] == [
        ("token_overlap", 0.99),
        ("matching_blocks_ratio", 0.85),
    ]
    with pytest.raises(ConfigError):
        parse_chain_spec("token_overlap")
    with pytest.raises(ConfigError):
        parse_chain_spec("token_overlap:high")
    with pytest.raises(ConfigError):
        parse_chain_spec(",")


def test_translate_file_provider(tmp_path, capsys):
    source = write(tmp_path, "src.txt", ["a", "b", "c"])
    pre = write(tmp_path, "pre.txt", ["x", "y", "z"])
    out = tmp_path / "out.txt"
    code = main(
        ["translate", "--source", source, "--provider", "file",
         "--provider-path", pre, "--out", str(out)]
    )
    assert code == 0
    assert out.read_text(encoding="utf-8") == "x\ny\nz\n"


def test_translate_missing_source_names_path(tmp_path, capsys):
    pre = write(tmp_path, "pre.txt", ["x"])
    code = main(
        ["translate", "--source", str(tmp_path / "absent.txt"), "--provider", "file",
         "--provider-path", pre, "--out", str(tmp_path / "out.txt")]
    )
    assert code == 1
    assert "absent.txt" in capsys.readouterr().err


def test_translate_cached_rerun_zero_provider_calls(tmp_path, capsys):
    source = write(tmp_path, "src.txt", ["jeden", "dwa"])
    pre = write(tmp_path, "pre.txt", ["one", "two"])
    cache = str(tmp_path / "cache")
    argv = ["translate", "--source", source, "--provider", "file",
            "--provider-path", pre, "--cache", cache, "--stats",
            "--out", str(tmp_path / "out.txt")]
    assert main(argv) == 0
    first = last_json(capsys)
    assert first["provider_calls"] == 2
    assert main(argv) == 0
    second = last_json(capsys)
    assert second == {"lines": 2, "provider_calls": 0, "cache_hits": 2}


def align_argv(tmp_path, source, target, trans, subdir="run", extra=()):
    out = tmp_path / subdir
    out.mkdir(exist_ok=True)
    return [
        "align", "--source", source, "--target", target, "--trans", trans,
        "--out-source", str(out / "s.txt"), "--out-target", str(out / "t.txt"),
        "--report", str(out / "r.jsonl"), *extra,
    ], out


def test_align_identity_summary(tmp_path, capsys):
    lines = distinct_lines(6)
    source = write(tmp_path, "src.txt", lines)
    target = write(tmp_path, "tgt.txt", lines)
    argv, out = align_argv(
        tmp_path, source, target, source,
        extra=["--chain", "matching_blocks_ratio:1.0", "--window", "0"],
    )
    assert main(argv) == 0
    summary = last_json(capsys)
    assert summary["A"] == summary["L"] == 6
    assert summary["T"] == summary["D"] == 0
    assert (out / "t.txt").read_text(encoding="utf-8").splitlines() == lines


def test_align_lookahead_fixture_report_shows_deferral(tmp_path, capsys):
    source = write(tmp_path, "src.txt", ["zrodlo raz", "zrodlo dwa"])
    target = write(tmp_path, "tgt.txt", LOOKAHEAD_TARGET)
    trans = write(tmp_path, "trans.txt", LOOKAHEAD_TRANS)
    argv, out = align_argv(
        tmp_path, source, target, trans,
        extra=["--chain", "matching_blocks_ratio:0.6", "--window", "0"],
    )
    assert main(argv) == 0
    records = [
        json.loads(line)
        for line in (out / "r.jsonl").read_text(encoding="utf-8").splitlines()
    ]
    assert records[0]["text"] == "I like going to school every day."
    assert records[1]["text"] == "I do not go to school every day."


def test_align_disproportion_summary(tmp_path, capsys):
    lines = distinct_lines(7)
    source = write(tmp_path, "src.txt", lines)
    target = write(tmp_path, "tgt.txt", [lines[0], lines[2], lines[3], lines[5], lines[6]])
    argv, _ = align_argv(
        tmp_path, source, target, source,
        extra=["--chain", "matching_blocks_ratio:1.0", "--window", "0"],
    )
    assert main(argv) == 0
    summary = last_json(capsys)
    assert summary["D"] == 2
    assert summary["L"] == 7


def test_align_auto_translates_without_trans_file(tmp_path, capsys):
    lines = distinct_lines(4)
    source = write(tmp_path, "src.txt", ["s1", "s2", "s3", "s4"])
    target = write(tmp_path, "tgt.txt", lines)
    pre = write(tmp_path, "pre.txt", lines)
    out = tmp_path / "auto"
    out.mkdir()
    code = main(
        ["align", "--source", source, "--target", target,
         "--provider", "file", "--provider-path", pre,
         "--chain", "matching_blocks_ratio:1.0", "--window", "0",
         "--out-source", str(out / "s.txt"), "--out-target", str(out / "t.txt"),
         "--report", str(out / "r.jsonl")]
    )
    assert code == 0
    assert last_json(capsys)["A"] == 4


def test_align_is_byte_deterministic(tmp_path, capsys):
    lines = distinct_lines(20)
    shuffled = lines[5:] + lines[:5]
    source = write(tmp_path, "src.txt", lines)
    target = write(tmp_path, "tgt.txt", shuffled)
    blobs = []
    for subdir in ("one", "two"):
        argv, out = align_argv(
            tmp_path, source, target, source, subdir=subdir,
            extra=["--chain", "matching_blocks_ratio:1.0", "--window", "0"],
        )
        assert main(argv) == 0
        blobs.append(
            tuple((out / n).read_bytes() for n in ("s.txt", "t.txt", "r.jsonl"))
        )
    assert blobs[0] == blobs[1]
    outputs = capsys.readouterr().out.strip().splitlines()
    assert outputs[0] == outputs[1]


def test_align_rejects_bad_threshold_before_reading_files(tmp_path, capsys):
    argv, _ = align_argv(
        tmp_path,
        str(tmp_path / "missing-src.txt"),
        str(tmp_path / "missing-tgt.txt"),
        str(tmp_path / "missing-trans.txt"),
        extra=["--chain", "matching_blocks_ratio:1.5"],
    )
    assert main(argv) == 1
    err = capsys.readouterr().err
    assert "threshold" in err


def test_align_trans_length_mismatch_is_data_error(tmp_path, capsys):
    lines = distinct_lines(3)
    source = write(tmp_path, "src.txt", lines)
    target = write(tmp_path, "tgt.txt", lines)
    trans = write(tmp_path, "trans.txt", lines[:2])
    argv, _ = align_argv(tmp_path, source, target, trans)
    assert main(argv) == 2


def test_score_command_round_trip(tmp_path, capsys):
    lines = distinct_lines(10)
    source = write(tmp_path, "src.txt", lines)
    target = write(tmp_path, "tgt.txt", lines)
    argv, out = align_argv(
        tmp_path, source, target, source,
        extra=["--chain", "matching_blocks_ratio:1.0", "--window", "0"],
    )
    assert main(argv) == 0
    gold = write(tmp_path, "gold.txt", lines)
    assert main(["score", "--report", str(out / "r.jsonl"), "--gold", gold]) == 0
    card = last_json(capsys)
    assert card == {"A": 10, "M": 0, "T": 0, "D": 0, "L": 10, "S": 100}


def test_score_gold_shorter_is_data_error(tmp_path, capsys):
    lines = distinct_lines(4)
    source = write(tmp_path, "src.txt", lines)
    target = write(tmp_path, "tgt.txt", lines)
    argv, out = align_argv(
        tmp_path, source, target, source,
        extra=["--chain", "matching_blocks_ratio:1.0"],
    )
    assert main(argv) == 0
    gold = write(tmp_path, "gold.txt", lines[:2])
    assert main(["score", "--report", str(out / "r.jsonl"), "--gold", gold]) == 2


def test_evaluate_identity(tmp_path, capsys):
    lines = ["the cat sat on the mat", "and then it slept all day"]
    hyp = write(tmp_path, "hyp.txt", lines)
    ref = write(tmp_path, "ref.txt", lines)
    assert main(["evaluate", "--hyp", hyp, "--ref", ref]) == 0
    report = last_json(capsys)
    assert report["bleu"] == 1.0
    assert report["ter"] == 0.0
    assert report["cer"] == 0.0


def test_evaluate_bigram_fixture_and_bp_forms(tmp_path, capsys):
    hyp = write(tmp_path, "hyp.txt", ["a b c d"])
    ref = write(tmp_path, "ref.txt", ["a b c d e"])
    assert main(["evaluate", "--hyp", hyp, "--ref", ref, "--max-order", "2"]) == 0
    assert last_json(capsys)["bleu"] == pytest.approx(math.exp(-0.25), abs=1e-12)
    assert main(
        ["evaluate", "--hyp", hyp, "--ref", ref, "--max-order", "2",
         "--bp-form", "paper"]
    ) == 0
    assert last_json(capsys)["bleu"] == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_evaluate_line_count_mismatch_is_data_error(tmp_path):
    hyp = write(tmp_path, "hyp.txt", ["a"])
    ref = write(tmp_path, "ref.txt", ["a", "b"])
    assert main(["evaluate", "--hyp", hyp, "--ref", ref]) == 2


def test_evaluate_empty_files_error(tmp_path):
    hyp = write(tmp_path, "hyp.txt", [])
    ref = write(tmp_path, "ref.txt", [])
    assert main(["evaluate", "--hyp", hyp, "--ref", ref]) == 2


def test_provider_failure_exit_code(tmp_path):
    source = write(tmp_path, "src.txt", ["jeden"])
    code = main(
        ["translate", "--source", source, "--provider", "http",
         "--endpoint", "http://127.0.0.1:9/echo?q={text}&src={src}&tgt={tgt}",
         "--out", str(tmp_path / "out.txt")]
    )
    assert code == 3


def test_usage_errors_exit_one(capsys):
    assert main(["align"]) == 1  # missing required flags
    assert main(["nonsense"]) == 1
    assert main(["evaluate", "--hyp", "a", "--ref", "b", "--bp-form", "wat"]) == 1
    capsys.readouterr()


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    capsys.readouterr()


def test_config_file_flags_win(tmp_path, capsys):
    source = write(tmp_path, "src.txt", ["zrodlo raz", "zrodlo dwa"])
    target = write(tmp_path, "tgt.txt", LOOKAHEAD_TARGET)
    trans = write(tmp_path, "trans.txt", LOOKAHEAD_TRANS)
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps({"chain": "matching_blocks_ratio:1.0", "window": 0}),
        encoding="utf-8",
    )
    argv, _ = align_argv(
        tmp_path, source, target, trans, subdir="strict",
        extra=["--config", str(config)],
    )
    assert main(argv) == 0
    assert last_json(capsys)["A"] == 0  # nothing clears an exact-match bar

    argv, _ = align_argv(
        tmp_path, source, target, trans, subdir="loose",
        extra=["--config", str(config), "--chain", "matching_blocks_ratio:0.6"],
    )
    assert main(argv) == 0
    assert last_json(capsys)["A"] == 2  # flag overrode the config chain


def test_config_chain_as_json_list(tmp_path, capsys):
    lines = distinct_lines(3)
    source = write(tmp_path, "src.txt", lines)
    target = write(tmp_path, "tgt.txt", lines)
    config = tmp_path / "config.json"
    config.write_text(
        json.dumps(
            {"chain": [{"kind": "matching_blocks_ratio", "threshold": 1.0}],
             "window": 0}
        ),
        encoding="utf-8",
    )
    argv, _ = align_argv(tmp_path, source, target, source, extra=["--config", str(config)])
    assert main(argv) == 0
    assert last_json(capsys)["A"] == 3


def test_config_invalid_json_exit_one(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text("{broken", encoding="utf-8")
    source = write(tmp_path, "src.txt", ["a"])
    argv, _ = align_argv(tmp_path, source, source, source, extra=["--config", str(config)])
    assert main(argv) == 1


def test_tune_command_step_fixture(tmp_path, capsys, caplog):
    letters = "abcdefghijklmnopqrst"
    trans, target = [], []
    for i in range(5):
        block, filler = letters[4 * i : 4 * i + 2], letters[4 * i + 2 : 4 * i + 4]
        trans.append(block * 2)
        target.append(block + filler)
    source = write(tmp_path, "src.txt", [f"zrodlo {i}" for i in range(5)])
    target_path = write(tmp_path, "tgt.txt", target)
    trans_path = write(tmp_path, "trans.txt", trans)
    gold = write(tmp_path, "gold.txt", target)
    out = tmp_path / "tuned.json"
    with caplog.at_level(logging.WARNING):
        code = main(
            ["tune", "--source", source, "--target", target_path,
             "--trans", trans_path, "--gold", gold,
             "--chain", "matching_blocks_ratio:0.9", "--window", "0",
             "--out", str(out)]
        )
    assert code == 0
    payload = last_json(capsys)
    assert payload["achieved_score"] == 100
    assert payload["thresholds"][0] <= 0.5
    assert payload["config_fragment"]["chain"][0]["kind"] == "matching_blocks_ratio"
    assert json.loads(out.read_text(encoding="utf-8")) == payload
    # 5 dev lines is far below the recommended range
    assert any("lines" in record.message for record in caplog.records)
