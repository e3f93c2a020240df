from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

from hypothesis import strategies as st

from k2q.task_model import Task, TaskSet


@st.composite
def uniproc_sets(draw, max_n=6, max_util=1.0, deadlines="arbitrary"):
    """Small integer uniprocessor sets with total utilization <= max_util."""
    n = draw(st.integers(1, max_n))
    tasks = []
    total = 0.0
    for i in range(n):
        t = draw(st.integers(2, 60))
        c = draw(st.integers(1, t))
        if total + c / t > max_util:
            c = int((max_util - total) * t)
            if c < 1:
                break
        total += c / t
        if deadlines == "implicit":
            d = t
        elif deadlines == "constrained":
            d = draw(st.integers(max(c, 1), t))
        else:
            d = draw(st.integers(1, 3 * t))
        tasks.append(Task(c, t, d, id=f"t{i + 1}"))
    return TaskSet(tuple(tasks))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
