import json

import pytest

from secure_regen.cli import EXIT_IO, EXIT_OK, EXIT_PROPERTY, EXIT_VALIDATION, main, parse_secret
from secure_regen import checks


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_params(capsys):
    code, rep, _ = run(capsys, "params", "-n", "4", "-k", "3", "-l", "2", "--gamma", "3")
    assert code == EXIT_OK
    assert (rep["thm1_bound"], rep["thm2_capacity"], rep["M"], rep["R"]) == (1, 1, 6, 1)
    assert set(rep) >= {"theta", "M", "R", "mu", "thm1_bound", "thm2_capacity", "unsecure_capacity"}
    _, rep, _ = run(capsys, "params", "-n", "4", "-k", "3", "-l", "0", "--gamma", "3")
    assert rep["thm2_capacity"] == 6
    code, _, err = run(capsys, "params", "-n", "4", "-k", "3", "-l", "3", "--gamma", "3")
    assert code == EXIT_VALIDATION and "parameter violation" in err


def test_params_missing_required(capsys):
    code, _, err = run(capsys, "params", "-n", "4")
    assert code == EXIT_VALIDATION and "required" in err


def test_build(capsys):
    code, rep, _ = run(capsys, "build", "-n", "3", "-k", "2", "-l", "1", "-q", "7")
    assert code == EXIT_OK
    assert rep["code"]["generator"] == [1, 1, 1, 1, 2, 3, 1, 4, 2]
    assert rep["placement"]["edges"] == {"1": [1, 2], "2": [1, 3], "3": [2, 3]}


def test_simulate_counts_and_validation(capsys, tmp_path):
    out = tmp_path / "h.json"
    code, _, _ = run(capsys, "simulate", "-n", "4", "-k", "3", "-l", "2", "-q", "5", "--code", "systematic",
                     "--secret", "2", "--trace", "4,4,1", "--out", str(out))
    assert code == EXIT_OK
    snap = json.loads(out.read_text())
    assert len(snap["nodes"]) == 7
    _, snap, _ = run(capsys, "simulate", "-n", "4", "-k", "3", "-l", "2")
    assert len(snap["nodes"]) == 4
    code, _, _ = run(capsys, "simulate", "-n", "4", "-k", "3", "-l", "2", "--trace", "9")
    assert code == EXIT_VALIDATION


def test_simulate_deterministic(capsys):
    args = ("simulate", "-n", "5", "-k", "3", "-l", "1", "--seed", "17", "--trace", "1,5,5,2")
    main(list(args))
    first = capsys.readouterr().out
    main(list(args))
    assert capsys.readouterr().out == first


def test_trace_file(capsys, tmp_path):
    tf = tmp_path / "trace.json"
    tf.write_text(json.dumps({"params": {"n": 4, "k": 3, "ell": 2, "Gamma": 3}, "seed": 9, "trace": [1, 2, 3, 4, 1, 2]}))
    code, rep, _ = run(capsys, "sweep", "--trace", str(tf))
    assert code == EXIT_OK
    assert rep == {"max_leakage": 0, "subsets_checked": 45, "mode": "exhaustive", "perfect_secrecy": True, "witness": [1, 2]}
    code, snap, _ = run(capsys, "simulate", "--trace", str(tf))
    assert snap["seed"] == 9 and len(snap["nodes"]) == 10


def test_attack_and_io(capsys, tmp_path):
    out = tmp_path / "h.json"
    run(capsys, "simulate", "-n", "4", "-k", "3", "-l", "2", "--trace", "4,4", "--out", str(out))
    code, rep, _ = run(capsys, "attack", "--history", str(out), "--nodes", "5,6")
    assert code == EXIT_OK
    assert rep == {"node_ids": [5, 6], "observed_count": 3, "leakage_qary": 0, "oracle": "rank", "perfect_secrecy": True}
    _, rep, _ = run(capsys, "attack", "--history", str(out), "--nodes", "1,2", "--bruteforce")
    assert rep["oracle"] == "bruteforce" and rep["leakage_qary"] == 0 and rep["observed_count"] == 5
    code, _, err = run(capsys, "attack", "--history", str(out), "--nodes", "1,2,3")
    assert code == EXIT_VALIDATION and "budget" in err
    _, rep, _ = run(capsys, "attack", "--history", str(out), "--nodes", "1,2,3", "--override-budget")
    assert rep["leakage_qary"] == 1 and not rep["perfect_secrecy"]
    code, _, _ = run(capsys, "attack", "--history", str(tmp_path / "missing.json"), "--nodes", "1")
    assert code == EXIT_IO
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run(capsys, "attack", "--history", str(bad), "--nodes", "1")
    assert code == EXIT_IO


def test_sweep_fixture_six_failures(capsys):
    code, rep, _ = run(capsys, "sweep", "-n", "4", "-k", "3", "-l", "2", "-q", "5", "--code", "systematic",
                       "--secret", "2", "--trace", "1,2,3,4,1,2")
    assert code == EXIT_OK
    assert rep["max_leakage"] == 0 and rep["subsets_checked"] == 45


def test_sweep_switches_to_sampling(capsys):
    code, rep, _ = run(capsys, "sweep", "-n", "4", "-k", "3", "-l", "2", "--trace", "1,2,3,4,1,2",
                       "--budget", "10", "--samples", "20")
    assert code == EXIT_OK and rep["mode"] == "sampled" and rep["subsets_checked"] == 20


def test_rlnc(capsys):
    code, rep, _ = run(capsys, "rlnc", "--trials", "100")
    assert code == EXIT_OK
    assert rep["trials"] == 100 and rep["q"] == 65521
    assert rep["full_recovery_count"] >= 99


def test_verify_bruteforce(capsys):
    code, rep, _ = run(capsys, "verify", "-n", "3", "-k", "2", "-l", "1", "-q", "7", "--bruteforce")
    assert code == EXIT_OK and rep["passed"]
    names = {c["name"] for c in rep["checks"]}
    assert "oracle_equivalence" in names


def test_verify_reports_failure(capsys, monkeypatch):
    monkeypatch.setattr(checks, "check_bounds", lambda params: [checks.CheckResult("forced", False)])
    code, rep, _ = run(capsys, "verify", "-n", "3", "-k", "2", "-l", "1", "-q", "7")
    assert code == EXIT_PROPERTY and not rep["passed"]


def test_secret_parsing(tmp_path):
    assert parse_secret("2", 5) == [2]
    assert parse_secret("0x1f,03", 65521) == [31, 3]
    f = tmp_path / "s.txt"
    f.write_text("a\nb\n")
    assert parse_secret("@" + str(f), 13) == [10, 11]
    with pytest.raises(Exception, match="not elements"):
        parse_secret("ff", 7)
