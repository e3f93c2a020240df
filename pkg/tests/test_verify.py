import pytest

from k2q import verify


@pytest.mark.parametrize(
    "name, count",
    [("constants", None), ("safety", 200), ("oracles", 200), ("lp", 100), ("ordering", 50),
     ("global", 30), ("bertogna", 1000), ("pigeonhole", 200), ("implication", 500)],
)
def test_suite_small_runs_clean(name, count):
    (res,) = verify.run_suites([name], count=count)
    assert res.passed, res.violations
    assert res.checked > 0
    assert res.summary().startswith("[PASS]")


def test_failures_are_capped_and_counted():
    res = verify.SuiteResult("x")
    for i in range(verify.MAX_REPORTED + 5):
        res.fail("bad", {"i": i})
    assert len(res.violations) == verify.MAX_REPORTED
    assert res.stats["unreported_violations"] == 5
    assert not res.passed


def test_corpus_is_reproducible():
    a = list(verify.uniproc_corpus(20, seed=3))
    b = list(verify.uniproc_corpus(20, seed=3))
    assert a == b
    assert all(ts.is_integral and ts.utilization <= 1 for ts in a)
    assert {ts.model for ts in a} >= {"arbitrary"}
