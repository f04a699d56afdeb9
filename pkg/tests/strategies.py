"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from membp import pop, push, random_md_circuit, random_sbp
from membp.programs import NOP

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def sbps(draw, max_vertices=9, nop_prob=None):
    n = draw(st.integers(2, max_vertices))
    return random_sbp(
        n,
        n_vars=draw(st.integers(1, 3)),
        n_symbols=draw(st.integers(1, 3)),
        seed=draw(seeds),
        edge_prob=draw(st.sampled_from([0.2, 0.4, 0.7])),
        nop_prob=draw(st.sampled_from([0.0, 0.2, 0.4])) if nop_prob is None else nop_prob,
    )


@st.composite
def md_circuits(draw, max_gates=14):
    n_vars = draw(st.integers(1, 3))
    return random_md_circuit(n_vars, draw(st.integers(n_vars, max_gates)), draw(seeds))


def stack_ops(n_symbols=2, max_size=10):
    op = st.one_of(
        st.just(NOP),
        st.integers(0, n_symbols - 1).map(push),
        st.integers(0, n_symbols - 1).map(pop),
    )
    return st.lists(op, max_size=max_size)
