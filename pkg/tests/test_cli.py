import json
import math

import pytest

from k2q import cli


def write(tmp_path, doc, name="ts.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_implicit_pair(tmp_path, capsys):
    f = write(tmp_path, {"processors": 1, "tasks": [{"id": "a", "C": 1, "T": 4}, {"id": "b", "C": 2, "T": 6}]})
    code, out, _ = run(["analyze", f], capsys)
    assert code == 0
    rep = json.loads(out)
    b = rep["tasks"][1]
    assert b["tests"]["rm-util"]["condition"].startswith("rm-util")
    assert b["oracle"]["tda"] == "accept"
    assert b["oracle"]["wcrt"] == 3
    assert "simulation" not in rep


def test_analyze_arbitrary_has_both_uniprocessor_analyses(tmp_path, capsys):
    f = write(tmp_path, {"processors": 1, "tasks": [{"C": 1, "T": 3}, {"C": 1, "T": 20}, {"C": 1, "T": 4, "D": 8}]})
    code, out, _ = run(["analyze", f, "--tests", "window,response"], capsys)
    rep = json.loads(out)
    row = rep["tasks"][2]
    assert row["tests"]["window"]["verdict"] == "accept"
    assert "response" in row["tests"] and "rm-util" not in row["tests"]
    assert row["response_bound"] == pytest.approx(4.162162, abs=1e-5)
    assert "oracle" not in row


def test_analyze_multiprocessor(tmp_path, capsys):
    f = write(tmp_path, {"processors": 2, "tasks": [{"C": 1, "T": 4}, {"C": 2, "T": 6}, {"C": 3, "T": 12}]})
    out_file = tmp_path / "rep.json"
    code, _, _ = run(["analyze", f, "--out", str(out_file)], capsys)
    rep = json.loads(out_file.read_text())
    assert code == 0
    names = set(rep["tasks"][2]["tests"])
    assert names == {"grm-quadratic", "grm-util", "gdm-quadratic"}
    assert rep["simulation"]["outcome"] == "no-miss"
    assert "oracle" not in rep["tasks"][0]


def test_analyze_policy_reorders(tmp_path, capsys):
    f = write(tmp_path, {"tasks": [{"id": "slow", "C": 1, "T": 9}, {"id": "fast", "C": 1, "T": 3}]})
    _, out, _ = run(["analyze", f, "--policy", "rm"], capsys)
    assert [t["id"] for t in json.loads(out)["tasks"]] == ["fast", "slow"]


def test_analyze_reports_not_applicable(tmp_path, capsys):
    f = write(tmp_path, {"tasks": [{"C": 1, "T": 9}, {"C": 1, "T": 3}]})
    _, out, _ = run(["analyze", f, "--tests", "rm-util"], capsys)
    v = json.loads(out)["tasks"][1]["tests"]["rm-util"]
    assert v["verdict"] == "n/a" and v["note"]


@pytest.mark.parametrize(
    "content",
    ["{not json", json.dumps({"tasks": []}), json.dumps({"tasks": [{"C": 5, "T": 2}]})],
)
def test_analyze_input_errors(tmp_path, capsys, content):
    p = tmp_path / "bad.json"
    p.write_text(content)
    code, _, err = run(["analyze", str(p)], capsys)
    assert code == 2 and "error" in err


def test_analyze_missing_file_and_bad_test(tmp_path, capsys):
    assert run(["analyze", str(tmp_path / "missing.json")], capsys)[0] == 2
    f = write(tmp_path, {"tasks": [{"C": 1, "T": 3}]})
    assert run(["analyze", f, "--tests", "nope"], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2


CFG = {"n": 6, "total_util": 0.5, "integer_mode": True, "period_range": [10, 500]}


def sweep_rows(text):
    lines = text.split("\n")
    assert lines[0] == "util,test,accepted,total,ratio"
    assert lines[-1] == ""
    rows = [l.split(",") for l in lines[1:-1]]
    return [(float(u), t, int(a), int(n), float(r)) for u, t, a, n, r in rows]


def test_sweep_csv_is_deterministic_and_lf(tmp_path, capsys):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--config", json.dumps(CFG), "--util-grid", "0.2,0.6", "--trials", "10", "--seed", "4"]
    assert run(args + ["--out", str(out1)], capsys)[0] == 0
    assert run(args + ["--out", str(out2)], capsys)[0] == 0
    raw = out1.read_bytes()
    assert raw == out2.read_bytes()
    assert b"\r" not in raw
    rows = sweep_rows(raw.decode())
    assert {r[1] for r in rows} == {"window", "response", "rm-util", "exact"}
    assert all(a <= n for _, _, a, n, _ in rows)


def test_sweep_low_load_accepts_everything(capsys):
    code, out, _ = run(["sweep", "--config", json.dumps(CFG), "--util-grid", "0.05", "--trials", "40"], capsys)
    assert code == 0
    assert all(r == 1.0 for *_, r in sweep_rows(out))


def test_sweep_monotone_in_utilization(capsys):
    cfg = dict(CFG, n=8)
    _, out, _ = run(["sweep", "--config", json.dumps(cfg), "--util-grid", "0.1:1.0:0.1", "--trials", "60"], capsys)
    rows = sweep_rows(out)
    for test in {r[1] for r in rows}:
        ratios = [r[4] for r in rows if r[1] == test]
        assert len(ratios) == 10
        # statistical check: allow small sampling wiggles
        assert all(b <= a + 0.1 for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] <= ratios[0]


def test_sweep_rm_util_drops_above_limit(capsys):
    cfg = dict(CFG, n=10)
    _, out, _ = run(
        ["sweep", "--config", json.dumps(cfg), "--util-grid", "0.7", "--trials", "50", "--tests", "rm-util"], capsys
    )
    (row,) = sweep_rows(out)
    assert row[4] < 1.0


def test_sweep_json_records(tmp_path, capsys):
    j = tmp_path / "rows.json"
    run(["sweep", "--config", json.dumps(CFG), "--util-grid", "0.5", "--trials", "5", "--tests", "response",
         "--json", str(j)], capsys)
    (rec,) = json.loads(j.read_text())
    assert rec["test"] == "response" and rec["total"] == 5
    assert rec["mean_bound"] is None or math.isfinite(rec["mean_bound"])


def test_sweep_multiprocessor(capsys):
    cfg = {"n": 6, "total_util": 1.0, "processors": 2, "integer_mode": True, "period_range": [10, 100]}
    code, out, _ = run(["sweep", "--config", json.dumps(cfg), "--util-grid", "0.3", "--trials", "5"], capsys)
    assert code == 0
    assert {r[1] for r in sweep_rows(out)} == {"grm-quadratic", "grm-util", "gdm-quadratic", "sim"}


def test_sweep_input_errors(tmp_path, capsys):
    assert run(["sweep", "--config", "{\"n\": 0, \"total_util\": 1}"], capsys)[0] == 2
    assert run(["sweep", "--config", str(tmp_path / "nope.json")], capsys)[0] == 2
    assert run(["sweep", "--util-grid", "1:0:0.1"], capsys)[0] == 2
    assert run(["sweep", "--trials", "0"], capsys)[0] == 2
    assert run(["sweep", "--tests", "exact"], capsys)[0] == 2


def test_verify_pass_and_fail_codes(tmp_path, capsys, monkeypatch):
    out_file = tmp_path / "report.txt"
    code, out, _ = run(["verify", "--suite", "constants,ordering", "--count", "20", "--out", str(out_file)], capsys)
    assert code == 0 and "[PASS] constants" in out
    assert out_file.read_text().count("[PASS]") == 2

    from k2q import verify

    def broken(**_):
        res = verify.SuiteResult("broken", checked=1)
        res.fail("counterexample", {"processors": 1, "tasks": [{"C": 1, "T": 2, "D": 2}]})
        return res

    monkeypatch.setitem(verify.SUITES, "broken", broken)
    code, out, _ = run(["verify", "--suite", "broken"], capsys)
    assert code == 1
    assert "[FAIL] broken" in out and '"tasks": [{"C": 1' in out
    assert run(["verify", "--suite", "nope"], capsys)[0] == 2
