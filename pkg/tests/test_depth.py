import itertools

import pytest
from hypothesis import given

from membp import (Edge, GapDescription, PathDescription, Sbp, Var, decompose_oracle, decompositions, depth_reduce,
                   pit_equal, pop, push, random_sbp, sbp_to_circuit, stack_height, stack_seq_realizable)
from membp.algebra import PolyDomain, PrimeField
from membp.circuits import Prod, circuit_stats
from membp.depth import depth_bound

from strategies import sbps

F = PrimeField()
A, B = 0, 1


def chain_sbp(length, n_symbols=1):
    """A path of ``length`` steps with a push and a pop edge per symbol at every step."""
    edges = []
    for k in range(length):
        for s in range(n_symbols):
            edges.append(Edge(k, k + 1, Var(1 + 2 * s), push(s)))
            edges.append(Edge(k, k + 1, Var(2 + 2 * s), pop(s)))
    return Sbp(length + 1, tuple(edges), 0, length, tuple("ab"[:n_symbols]))


def realizable_words(max_len, symbols=(A, B)):
    letters = [push(s) for s in symbols] + [pop(s) for s in symbols]
    for n in range(0, max_len + 1, 2):
        for word in itertools.product(letters, repeat=n):
            if stack_seq_realizable(word):
                yield word


def closed_gaps(word):
    """Positions ``(gc, gd)`` of balanced segments whose removal leaves a closed gap path."""
    n = len(word)
    for gc in range(n + 1):
        for gd in range(gc, n + 1, 2):
            if stack_seq_realizable(word[gc:gd]) and (gd == n or word[gd].kind == "pop"):
                yield gc, gd


def test_descriptions():
    assert PathDescription(0, 3, 4).measure == 4
    assert GapDescription(0, 1, 2, 2, 3, 6).measure == 4


def test_stack_height_examples():
    ops = [push(A), push(B), pop(B), pop(A)]
    assert stack_height(ops, 0) == 0
    assert stack_height(ops, 2) == 2
    assert stack_height(ops, 4) == 0
    with pytest.raises(ValueError):
        stack_height(ops, 5)


def test_decompose_examples():
    assert decompose_oracle([push(A), pop(A)]) == (0, 2, 2, 0)
    # nested length 4: the whole path is the block and returns to height 0 at the end
    assert decompose_oracle([push(A), push(B), pop(B), pop(A)]) == (0, 4, 4, 0)
    # flat length 4: the second block together with nothing after it is too short, so P1 starts at 0
    d = decompose_oracle([push(A), pop(A), push(B), pop(B)])
    assert d.start == 0 and d.end == 4


def test_decomposition_unique_for_all_short_paths():
    plain = gap = 0
    for word in realizable_words(8):
        if len(word) >= 2:
            decompose_oracle(word)
            plain += 1
        for gc, gd in closed_gaps(word):
            if len(word) - (gd - gc) >= 2:
                decompose_oracle(word, (gc, gd))
                gap += 1
    assert (plain, gap) == (274, 2068)


def test_unrestricted_splits_are_not_unique():
    word = [push(A), pop(A), push(A), pop(A), push(A), pop(A)]
    assert len(decompositions(word, closed_form=False)) > 1
    assert len(decompositions(word)) == 1


def test_depth_reduce_examples():
    pair = Sbp.from_edges([(0, 1, Var(1), "push:a"), (1, 2, Var(2), "pop:a")])
    c, rep = depth_reduce(pair)
    assert c.semi_unbounded
    assert c.evaluate(PolyDomain(F)).terms == {((1, 1), (2, 1)): 1}
    dead = Sbp.from_edges([(0, 1, Var(1), "push:a"), (1, 2, Var(2), "pop:b")])
    assert depth_reduce(dead)[0].evaluate(PolyDomain(F)).is_zero()


@given(sbps(max_vertices=10))
def test_depth_reduce_matches_extraction(g):
    c, rep = depth_reduce(g)
    assert all(len(gate.children) == 2 for gate in c.gates if isinstance(gate, Prod))
    assert rep.within_bound and rep.depth == circuit_stats(c).depth
    assert pit_equal(c, sbp_to_circuit(g), trials=20).equal


def test_depth_grows_slowly_along_chains():
    for n_symbols in (1, 2):
        depths = [depth_reduce(chain_sbp(length, n_symbols))[1] for length in (4, 8, 16, 32)]
        for small, big in zip(depths, depths[1:]):
            assert big.depth - small.depth <= 16
        assert all(r.within_bound for r in depths)
    assert depth_bound(0) == 32 and depth_bound(30) == 96


def test_chain_is_correct():
    g = chain_sbp(8, 2)
    assert pit_equal(depth_reduce(g)[0], sbp_to_circuit(g), trials=10).equal


def test_dense_program():
    g = random_sbp(10, seed=5, edge_prob=0.8, nop_prob=0.0, n_symbols=1)
    c, rep = depth_reduce(g)
    assert rep.within_bound
    assert pit_equal(c, g, trials=10).equal
