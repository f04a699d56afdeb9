import pytest
from hypothesis import given, settings, strategies as st

from membp import (Abp, Circuit, Input, Prod, RelaxedSbp, Sbp, Sum, Var, abp_to_one_symbol_sbp, circuit_to_relaxed,
                   circuit_to_sbp, eval_relaxed, eval_sbp, one_symbol_to_abp, pit_equal, random_abp,
                   random_md_circuit, random_relaxed_sbp, random_sbp, remove_nops, sbp_to_circuit, unwind,
                   width2_reduce, width_of)
from membp.algebra import FieldDomain, PolyDomain, PrimeField
from membp.circuits import is_multiplicatively_disjoint
from membp.evaluators import eval_abp_domain
from membp.programs import enumerate_realizable_walks, path_sum, shortest_realizable_walk
from membp.transforms import NOP_SYMBOL, encode_binary, size_report, sbp_to_circuit_bound

from strategies import md_circuits, sbps, seeds

F = PrimeField()
X1, X2, X3 = Var(1), Var(2), Var(3)


def poly(obj):
    return obj.evaluate(PolyDomain(F))


def test_remove_nops_examples():
    g = Sbp.from_edges([(0, 1, X1, "nop")])
    h = remove_nops(g)
    assert [h.op_name(e.op) for e in h.edges] == [f"push:{NOP_SYMBOL}", f"pop:{NOP_SYMBOL}"]
    assert [e.weight for e in h.edges] == [X1, 1]
    assert poly(h) == poly(g)
    pair = Sbp.from_edges([(0, 1, X1, "push:a"), (1, 2, X2, "pop:a")])
    sub = remove_nops(pair)
    assert sub.n_vertices == 5 and sub.symbols == ("a",)
    assert [sub.op_name(e.op) for e in sub.edges] == ["push:a", "push:a", "pop:a", "pop:a"]
    assert pit_equal(pair, sub).equal


@given(sbps(max_vertices=10))
def test_remove_nops_properties(g):
    h = remove_nops(g)
    assert all(e.op.kind != "nop" for e in h.edges)
    assert h.n_vertices == g.n_vertices + len(g.edges)
    assert size_report("remove-nops", g, h).within_bound
    assert pit_equal(g, h, trials=50, seed=4).equal


def test_remove_nops_keeps_layering():
    g = Sbp.from_edges([(0, 1, X1, "nop"), (1, 2, X2, "nop")], layers=(0, 1, 2))
    assert width_of(remove_nops(g)) == 1


def test_unwind_examples():
    g = RelaxedSbp.from_edges([(0, 1, X1, "nop")])
    h = unwind(g, 1)
    assert sorted(set(h.layers)) == [0, 1]
    assert poly(h) == path_sum(enumerate_realizable_walks(g, 1), PolyDomain(F))


@given(seeds, st.integers(1, 6))
def test_unwind_matches_walks(seed, m):
    g = random_relaxed_sbp(5, seed=seed)
    h = unwind(g, m)
    assert h.n_vertices <= (m + 1) * g.n_vertices
    assert width_of(h) <= g.n_vertices
    assert size_report("unwind", g, h, m=m).within_bound
    assert poly(h) == path_sum(enumerate_realizable_walks(g, m), PolyDomain(F))


def test_compile_examples():
    _, trace = circuit_to_relaxed(Circuit((Input(X1),), 0))
    assert trace[0].m == 1
    _, trace = circuit_to_relaxed(Circuit((Input(X1), Input(X2), Prod(0, 1)), 2))
    assert trace[2].m == 6
    g, trace = circuit_to_relaxed(Circuit((Input(X1), Input(X2), Sum(0, 1)), 2))
    assert trace[2].m == 3
    assert eval_relaxed(g, 3, [4, 9]) == 13


def test_compile_rejects_shared_products():
    c = Circuit((Input(X1), Input(X2), Sum(0, 1), Prod(2, 2)), 3)
    assert not is_multiplicatively_disjoint(c)
    with pytest.raises(ValueError):
        circuit_to_relaxed(c)


def test_sum_with_unequal_children_uses_padding():
    # X1 has m = 1, X1*X2 has m = 6: the shorter branch is padded to the same length
    c = Circuit((Input(X1), Input(X2), Prod(0, 1), Input(X3), Sum(2, 3)), 4)
    g, trace = circuit_to_relaxed(c)
    assert trace[4].m == 8
    assert eval_relaxed(g, 8, [2, 3, 5]) == 11
    assert shortest_realizable_walk(g, trace[4].v_minus, trace[4].v_plus, 8) == 8


@given(md_circuits(max_gates=10))
def test_compile_trace(c):
    g, trace = circuit_to_relaxed(c)
    assert trace.length_bounds_hold()
    assert g.n_vertices <= trace.size_bound
    for rec in trace.records:
        walks = enumerate_realizable_walks(g, rec.m, start=rec.v_minus, end=rec.v_plus)
        assert walks
        assert shortest_realizable_walk(g, rec.v_minus, rec.v_plus, rec.m) == rec.m
    assert pit_equal(c, g.at_length(trace[c.output].m), trials=20).equal


def test_circuit_to_sbp_examples():
    for c in (Circuit((Input(X1), Input(X2), Prod(0, 1)), 2),
              Circuit((Input(X1), Input(X2), Prod(0, 1), Input(X3), Sum(2, 3)), 4)):
        assert pit_equal(c, circuit_to_sbp(c), trials=50).equal


@given(md_circuits(max_gates=18))
def test_circuit_to_sbp_pit(c):
    g = circuit_to_sbp(c)
    assert g.acyclic
    assert pit_equal(c, g, trials=20).equal
    relaxed, trace = circuit_to_relaxed(c)
    assert g.n_vertices <= (trace[c.output].m + 1) * relaxed.n_vertices


def test_sbp_to_circuit_examples():
    pair = Sbp.from_edges([(0, 1, X1, "push:a"), (1, 2, X2, "pop:a")])
    assert poly(sbp_to_circuit(pair)) == poly(Circuit((Input(X1), Input(X2), Prod(0, 1)), 2))
    dead = Sbp.from_edges([(0, 1, X1, "push:a"), (1, 2, X2, "pop:b")])
    assert poly(sbp_to_circuit(dead)).is_zero()


@given(sbps(max_vertices=12))
def test_sbp_to_circuit_pit(g):
    c = sbp_to_circuit(g)
    assert c.size <= sbp_to_circuit_bound(g)
    assert pit_equal(g, c, trials=20).equal


def one_symbol(seed, n=8):
    return random_sbp(n, n_symbols=1, seed=seed)


def test_one_symbol_examples():
    pair = Sbp.from_edges([(0, 1, X1, "push:a"), (1, 2, X2, "pop:a")])
    abp = one_symbol_to_abp(pair)
    assert abp.n_vertices == 4 * 3
    assert poly(abp) == poly(pair)
    under = Sbp.from_edges([(0, 1, X1, "pop:a"), (1, 2, X2, "push:a")])
    assert poly(one_symbol_to_abp(under)).is_zero()
    with pytest.raises(ValueError):
        one_symbol_to_abp(random_sbp(5, n_symbols=2, seed=1, nop_prob=0.0, edge_prob=0.9))


@settings(max_examples=20)
@given(seeds)
def test_one_symbol_collapse(seed):
    g = one_symbol(seed)
    abp = one_symbol_to_abp(g)
    assert abp.n_vertices == (g.n_vertices + 1) * g.n_vertices
    assert size_report("one-symbol-to-abp", g, abp).within_bound
    assert pit_equal(abp, g, trials=10).equal
    back = abp_to_one_symbol_sbp(abp)
    assert pit_equal(back, g, trials=10).equal
    assert pit_equal(one_symbol_to_abp(remove_nops(back)), g, trials=5).equal


@given(seeds)
def test_abp_to_sbp_is_identity_on_structure(seed):
    abp = random_abp(8, seed=seed)
    g = abp_to_one_symbol_sbp(abp)
    assert [(e.src, e.dst, e.weight) for e in g.edges] == [(e.src, e.dst, e.weight) for e in abp.edges]
    assert all(e.op.kind == "nop" for e in g.edges)
    assert poly(g) == poly(abp)


def test_width2_small():
    pair = Sbp.from_edges([(0, 1, X1, "push:a"), (1, 2, X2, "pop:a")])
    h = width2_reduce(pair)
    assert width_of(h) == 2 and h.symbols == ("0", "1")
    assert pit_equal(pair, h, trials=50).equal


def test_width2_gadgets_have_two_routes():
    g = random_sbp(6, seed=8)
    wide = width2_reduce(g, binary=False)
    n_gadgets = sum(1 for e in wide.edges if e.op.kind == "pop" and wide.layers[e.src] % 4 == 1)
    # ignoring the stack, each gadget offers exactly two routes and the chain multiplies them
    unit = Sbp(wide.n_vertices, tuple(e._replace(weight=1) for e in wide.edges), wide.source, wide.sink,
               wide.symbols, wide.layers)
    routes = eval_abp_domain(unit, FieldDomain(F, []))
    assert routes == 2 ** n_gadgets
    assert width_of(wide) == 2
    assert pit_equal(g, wide).equal
    assert pit_equal(wide, encode_binary(wide)).equal


@given(sbps(max_vertices=8))
def test_width2_reduce(g):
    h = width2_reduce(g)
    assert width_of(h) <= 2
    assert set(h.symbols) <= {"0", "1"}
    assert pit_equal(g, h, trials=10).equal


def test_size_report_json():
    g = random_sbp(6, seed=2)
    rep = size_report("remove-nops", g, remove_nops(g)).to_json()
    assert rep["within_bound"] and rep["bound_formula"] == "|V|+|E|"
