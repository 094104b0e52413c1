import json
import subprocess
import sys

import pytest

from afl_lattices import cli
from afl_lattices.reductions import CheckReport

WORKED = {"space": {"ring_spec": {"p": 3, "precision": 24}, "gram": [[3]]}, "x": [[0]], "j": [1]}
ODD = {"p": 3, "f0": 1, "n": 2, "parity": "odd"}


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def lines(out):
    return [json.loads(x) for x in out.splitlines() if x.strip()]


def test_orbital_worked_example(capsys):
    code, out, _ = run(capsys, "orbital", json.dumps(WORKED))
    assert code == 0
    (rec,) = lines(out)
    assert rec["counts"] == {"0": 1, "1": 1}
    assert rec["series"] == [[0, 1], [1, -1]]
    assert rec["derived"] == 1 and rec["parity"] == "odd"


def test_input_from_file_and_stdin(capsys, tmp_path, monkeypatch):
    path = tmp_path / "pair.json"
    path.write_text(json.dumps(WORKED))
    code, from_file, _ = run(capsys, "orbital", path)
    assert code == 0
    monkeypatch.setattr(sys, "stdin", __import__("io").StringIO(json.dumps(WORKED)))
    code, from_stdin, _ = run(capsys, "orbital", "-")
    assert code == 0 and from_stdin == from_file


def test_parity_subcommand(capsys):
    code, out, _ = run(capsys, "parity", json.dumps(WORKED["space"]))
    assert code == 0
    assert lines(out) == [{"dual_index": 1, "n": 1, "parity": "odd"}]


def test_vanishing_batch_of_one_hundred(capsys):
    code, out, _ = run(capsys, "vanishing-check", json.dumps(dict(ODD, seeds=[0, 100])))
    recs = lines(out)
    assert code == 0 and len(recs) == 100
    assert all(r["verdict"] == "pass" and r["lhs"]["O"] == 0 for r in recs)
    assert "millis" not in recs[0]


def test_timings_flag_adds_millis(capsys):
    _, out, _ = run(capsys, "vanishing-check", "--timings", json.dumps(WORKED))
    assert "millis" in lines(out)[0]


@pytest.mark.parametrize("payload", [
    {"space": {"ring_spec": {"p": 3}, "gram": [[1, 1], [2, 1]]}, "x": [[0, 0], [0, 0]], "j": [1, 0]},
    {"space": {"ring_spec": {"p": 3}, "gram": [[1, 0]]}, "x": [[0]], "j": [1]},
    {"space": {"ring_spec": {"p": 4}, "gram": [[1]]}, "x": [[0]], "j": [1]},
    {"p": 3, "f0": 1, "n": 2, "parity": "odd", "colour": "red"},
])
def test_schema_errors_exit_2(capsys, payload):
    code, out, err = run(capsys, "orbital", json.dumps(payload))
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "schema"


def test_bad_json_and_missing_file_exit_2(capsys, tmp_path):
    assert run(capsys, "orbital", "{not json")[0] == 2
    assert run(capsys, "orbital", tmp_path / "absent.json")[0] == 2
    # the FL check wants an even space
    assert run(capsys, "fl-check", json.dumps(WORKED))[0] == 2


def test_cap_exceeded_exits_3(capsys):
    code, out, err = run(capsys, "orbital", "--cap", 2, json.dumps(dict(ODD, seed=0)))
    assert code == 3
    info = json.loads(err)
    assert info["error"] == "cap_exceeded" and info["cap"] == 2 and info["required"] > 2


def test_precision_error_exits_1(capsys):
    code, _, err = run(capsys, "orbital", "--precision", 1, json.dumps(WORKED))
    assert code == 1 and json.loads(err)["error"] == "precision"


def test_failed_check_exits_1(capsys, monkeypatch):
    # route the vanishing subcommand to a check that always reports a mismatch
    monkeypatch.setitem(cli.PAIR_CHECKS, "vanishing",
                        lambda pair, cap=None: CheckReport("vanishing", 1, 0, False, [24, 28], 0, "x"))
    code, out, _ = run(capsys, "vanishing-check", json.dumps(WORKED))
    assert code == 1 and lines(out)[0]["verdict"] == "fail"


def test_fail_outranks_cap():
    recs = [{"status": "cap_exceeded"}, {"verdict": "fail"}, {"verdict": "pass"}]
    assert cli.verdict_code(recs) == 1
    assert cli.verdict_code(recs[::2]) == 3
    assert cli.verdict_code(recs[2:]) == 0


def test_output_is_byte_identical_across_processes():
    argv = [sys.executable, "-m", "afl_lattices", "fl-check", "--seed", "5",
            json.dumps({"p": 3, "f0": 1, "n": 2, "parity": "even", "seeds": [0, 4]})]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and len(a.splitlines()) == 4


def test_env_overrides(capsys, monkeypatch):
    monkeypatch.setenv("AFL_PRECISION", "30")
    _, out, _ = run(capsys, "vanishing-check", json.dumps(WORKED))
    assert lines(out)[0]["precisions"] == [30, 34]
    # the flag beats the environment
    _, out, _ = run(capsys, "vanishing-check", "--precision", 20, json.dumps(WORKED))
    assert lines(out)[0]["precisions"] == [20, 24]
    monkeypatch.setenv("AFL_PRECISION", "lots")
    assert run(capsys, "vanishing-check", json.dumps(WORKED))[0] == 2


def test_env_seed_matches_flag(capsys, monkeypatch):
    prof = json.dumps(ODD)
    _, by_flag, _ = run(capsys, "gen", "--seed", 9, prof)
    monkeypatch.setenv("AFL_SEED", "9")
    _, by_env, _ = run(capsys, "gen", prof)
    assert by_flag == by_env


def test_csv_and_pretty_formats(capsys, monkeypatch):
    code, out, _ = run(capsys, "vanishing-check", "--format", "csv", json.dumps(dict(ODD, seeds=[0, 3])))
    rows = out.splitlines()
    assert code == 0 and len(rows) == 4
    assert rows[0].split(",")[:2] == ["diagnostic", "identity"]
    monkeypatch.setenv("AFL_FORMAT", "pretty")
    _, out, _ = run(capsys, "orbital", json.dumps(WORKED))
    assert json.loads(out)["derived"] == 1 and "\n  " in out


def test_gen_output_feeds_back_in(capsys, tmp_path):
    _, out, _ = run(capsys, "gen", json.dumps(dict(ODD, seeds=[0, 2])))
    path = tmp_path / "pairs.jsonl"
    path.write_text(out)
    code, out, _ = run(capsys, "vanishing-check", path)
    assert code == 0 and len(lines(out)) == 2


def test_scan_journal_resume(capsys, tmp_path):
    journal = tmp_path / "scan.jsonl"
    prof = json.dumps([dict(ODD, seeds=[0, 6]), {"p": 5, "f0": 1, "n": 1, "parity": "odd", "seeds": [0, 3]}])
    code, first, _ = run(capsys, "scan", "--check", "vanishing", "--jobs", 2, "--journal", journal, prof)
    assert code == 0 and len(lines(first)) == 9
    assert len(journal.read_text().splitlines()) == 9
    # a resumed scan does no new work and reproduces the same stream
    code, again, _ = run(capsys, "scan", "--check", "vanishing", "--journal", journal, prof)
    assert again == first and len(journal.read_text().splitlines()) == 9
    code, fresh, _ = run(capsys, "scan", "--check", "vanishing", prof)
    assert fresh == first
    digests = [r["inputs_digest"] for r in lines(first)]
    assert digests == sorted(digests)


def test_scan_partial_journal_and_new_precision(capsys, tmp_path):
    journal = tmp_path / "scan.jsonl"
    prof = dict(ODD, seeds=[0, 4])
    run(capsys, "scan", "--check", "vanishing", "--journal", journal, json.dumps(dict(prof, seeds=[0, 2])))
    assert len(journal.read_text().splitlines()) == 2
    _, out, _ = run(capsys, "scan", "--check", "vanishing", "--journal", journal, json.dumps(prof))
    assert len(lines(out)) == 4 and len(journal.read_text().splitlines()) == 4
    _, out, _ = run(capsys, "scan", "--check", "vanishing", "--precision", 20, "--journal", journal,
                    json.dumps(prof))
    assert {r["precisions"][0] for r in lines(out)} == {20}
    assert len(journal.read_text().splitlines()) == 8


def test_scan_records_cap_and_missing_instances(capsys):
    code, out, _ = run(capsys, "scan", "--check", "vanishing", "--cap", 2, json.dumps(dict(ODD, seeds=[0, 2])))
    recs = lines(out)
    assert code == 3 and {r["status"] for r in recs} == {"cap_exceeded"}


def test_witt_check_one_extension(capsys):
    code, out, _ = run(capsys, "witt-check", json.dumps({"p": 3, "f0": 1, "eis_coeffs": [-3, 0, 1]}))
    recs = lines(out)
    assert code == 0 and all(r["verdict"] == "pass" for r in recs)


def test_base_change_check(capsys):
    code, out, _ = run(capsys, "base-change-check",
                       json.dumps({"p": 3, "f0": 1, "a_spec": {"p": 3, "f0": 3}, "n_A": 1, "j_val": 1}))
    (rec,) = lines(out)
    assert code == 0 and rec["lhs"]["dO"] == 3


def test_product_and_extend_checks(capsys):
    split = json.dumps(dict(ODD, n=3, structure="split", seeds=[0, 2]))
    code, out, _ = run(capsys, "product-check", split)
    assert code == 0 and len(lines(out)) == 2
    code, out, _ = run(capsys, "extend-check", json.dumps(dict(ODD, seed=1)))
    ids = [r["identity"] for r in lines(out)]
    assert code == 0 and len(ids) == 2


def test_pair_origin_is_verified(capsys):
    _, out, _ = run(capsys, "gen", json.dumps(dict(ODD, seed=0)))
    pair = json.loads(out)
    pair["origin"]["profile"]["seed"] = 99
    assert run(capsys, "vanishing-check", json.dumps(pair))[0] == 2


def test_pair_without_origin_that_cannot_be_lifted(capsys):
    # over f0 = 2 an entrywise lift of x breaks adjoint stability at N + 4
    _, out, _ = run(capsys, "gen", json.dumps({"p": 3, "f0": 2, "n": 2, "parity": "odd", "seed": 0}))
    pair = json.loads(out)
    del pair["origin"]
    code, _, err = run(capsys, "vanishing-check", json.dumps(pair))
    assert code == 1 and json.loads(err)["error"] == "precision"
    stored = pair["space"]["ring_spec"]["precision"]
    code, _, _ = run(capsys, "vanishing-check", "--precision", stored - 4, json.dumps(pair))
    assert code == 0
