import numpy as np
import pytest
from hypothesis import strategies as st

from qlogic import subspace as sp
from qlogic.formula import And, BOT, Not, Or, TOP, Var


def e(n, *idx):
    """Sum of standard basis vectors of C^n."""
    v = np.zeros(n, dtype=complex)
    for i in idx:
        v[i] += 1.0
    return v


def span(n, *vectors):
    return sp.from_spanning(list(vectors), n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


names = st.sampled_from(["a", "b", "c", "d"])

formulas = st.recursive(
    st.one_of(names.map(Var), st.just(TOP), st.just(BOT)),
    lambda children: st.one_of(
        children.map(Not),
        st.tuples(children, children).map(lambda p: And(*p)),
        st.tuples(children, children).map(lambda p: Or(*p)),
    ),
    max_leaves=6,
)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
