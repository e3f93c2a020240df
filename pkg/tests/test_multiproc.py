import math
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import uniproc_sets
from k2q import core, multiproc, uniproc
from k2q.core import NotApplicable
from k2q.oracles.simulator import first_miss
from k2q.task_model import Task, TaskSet, assign_priorities


def ts(*tasks, m=2):
    return TaskSet(tuple(Task(*t) for t in tasks), processors=m)


@st.composite
def global_sets(draw, deadlines="implicit", policy="rm"):
    m = draw(st.sampled_from([2, 4]))
    s = draw(uniproc_sets(max_n=3 * m, max_util=float(m), deadlines=deadlines))
    return assign_priorities(replace(s, processors=m), policy)


# -- global RM --------------------------------------------------------------------


def test_grm_quadratic_examples():
    v = multiproc.grm_quadratic_test(ts((1, 2), (2, 4)), 1)
    assert v.bound == pytest.approx(0.5625)
    assert v.schedulable and v.condition == "grm-quadratic"
    v = multiproc.grm_quadratic_test(ts((3, 4)), 0)
    assert v.bound == 1 and v.schedulable


def test_grm_quadratic_not_applicable():
    assert not multiproc.grm_quadratic_test(ts((1, 4, 3), (1, 5)), 1).applicable
    assert not multiproc.grm_quadratic_test(ts((1, 5), (1, 4)), 1).applicable


@given(st.lists(st.floats(0.01, 1.0), max_size=10))
def test_grm_on_one_processor_is_uniform_form(u):
    assert multiproc.grm_quadratic_rhs(u, 1) == pytest.approx(core.uniform_rhs_closed(u, 1, 1), abs=1e-12)


def test_grm_util_examples():
    assert multiproc.grm_util_bound(10**6, 0.5) == pytest.approx(2 - math.sqrt(3), abs=1e-5)
    assert multiproc.grm_util_bound(10**6, 1.0) == pytest.approx(0.0, abs=1e-5)
    with pytest.raises(ValueError):
        multiproc.grm_util_bound(1, 0.5)
    with pytest.raises(ValueError):
        multiproc.grm_util_test(ts((1, 4)), 0)
    assert multiproc.grm_util_test(ts((1, 10), (1, 10), (1, 10)), 2).schedulable


def test_capacity_constants():
    x = multiproc.capacity_root()
    assert x == pytest.approx(3 - math.sqrt(7), abs=1e-12)
    assert 2 - math.sqrt(2 + 2 * x) == pytest.approx(x, abs=1e-12)
    assert multiproc.grm_capacity_factor() == pytest.approx((3 + math.sqrt(7)) / 2, abs=1e-9)
    assert multiproc.grm_capacity_factor() * x == pytest.approx(1.0)


@given(global_sets())
def test_grm_util_implies_quadratic(s):
    for k in range(1, len(s)):
        if multiproc.grm_util_test(s, k).schedulable:
            assert multiproc.grm_quadratic_test(s, k).schedulable


@given(global_sets())
def test_grm_accepted_sets_do_not_miss(s):
    if all(multiproc.grm_quadratic_test(s, k).schedulable for k in range(len(s))):
        when, _ = first_miss(s, cap=20_000)
        assert when is None


# -- global DM ---------------------------------------------------------------------


def test_gdm_example():
    s = ts((1, 5), (1, 4), (1, 10))
    v = multiproc.gdm_quadratic_test(s, 2)
    assert v.bound == pytest.approx(0.69125)
    assert v.schedulable and v.condition == "gdm-quadratic"


def test_gdm_no_interference():
    assert multiproc.gdm_quadratic_test(ts((4, 5, 4)), 0).schedulable
    assert multiproc.gdm_quadratic_test(ts((4, 5, 4)), 0).bound == 1


def test_gdm_not_applicable():
    assert not multiproc.gdm_quadratic_test(ts((1, 4, 8), (1, 5)), 1).applicable
    assert not multiproc.gdm_quadratic_test(ts((9, 10, 2), (9, 10, 2), (8, 10, 2), (1, 10, 2)), 3).applicable


@given(uniproc_sets(max_n=4, deadlines="constrained"))
def test_gdm_single_processor_single_hp_matches_response_test(s):
    if len(s) >= 2:
        s2 = TaskSet(s.tasks[:2])
        _, su, sd, cross = multiproc.gdm_terms(s2, 1)
        assert 1 - su - sd + cross == pytest.approx(uniproc.cor1_rhs(s2, 1), abs=1e-12)


def test_witness_examples():
    assert multiproc.gdm_speedup_witness(ts((3, 10), (3, 10), (5, 10)), 2)[0] == "delta"
    many = ts(*[(1, 4)] * 12, (1, 40), m=4)
    assert multiproc.gdm_speedup_witness(many, 12) == ("utilization", pytest.approx(0.75))
    assert multiproc.gdm_speedup_witness(ts((6, 50), (6, 50), (6, 50), (1, 10)), 3)[0] == "density"
    with pytest.raises(ValueError):
        multiproc.gdm_speedup_witness(ts((1, 5), (1, 4), (1, 10)), 2)


@given(global_sets(deadlines="constrained", policy="dm"))
def test_rejections_always_have_witness(s):
    for k in range(len(s)):
        v = multiproc.gdm_quadratic_test(s, k)
        if v.applicable and not v.schedulable:
            label, value = multiproc.gdm_speedup_witness(s, k)
            assert label in multiproc.WITNESS_LABELS and value > 1 / 3


@given(global_sets(deadlines="constrained", policy="dm"))
def test_gdm_accepted_sets_do_not_miss(s):
    if all(multiproc.gdm_quadratic_test(s, k).schedulable for k in range(len(s))):
        when, _ = first_miss(s, cap=20_000)
        assert when is None


def test_bertogna_dominance_grid():
    for i in range(10_001):
        x = i / 10_000
        assert 2 - math.sqrt(2 + 2 * x) >= (1 - x) / 2 - 1e-15
