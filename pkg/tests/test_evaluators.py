import pytest
from hypothesis import given

from membp import (Abp, Rabp, RelaxedSbp, Sbp, Var, eval_abp, eval_rabp, eval_relaxed, eval_sbp,
                   enumerate_realizable_paths, enumerate_realizable_walks, random_abp, random_points, random_rabp,
                   random_relaxed_sbp, random_sbp, remove_nops, sbp_dp_table)
from membp.algebra import BudgetExceeded, FieldDomain, PolyDomain, PrimeField
from membp.evaluators import eval_sbp_configs_domain, eval_sbp_domain
from membp.programs import ProgramError, path_sum

from strategies import sbps, seeds

F = PrimeField()
X = [None] + [Var(k) for k in range(1, 5)]


def oracle_value(g, point):
    return path_sum(enumerate_realizable_paths(g), FieldDomain(F, point))


def test_abp_examples():
    assert eval_abp(Abp.from_edges([(0, 1, X[1])]), [7]) == 7
    diamond = Abp.from_edges([(0, 1, X[1]), (1, 3, X[2]), (0, 2, X[3]), (2, 3, X[4])])
    assert eval_abp(diamond, [1, 2, 3, 4]) == 14


@given(seeds)
def test_abp_matches_path_sum(seed):
    g = random_abp(9, seed=seed)
    for pt in random_points(3, 3, seed):
        assert eval_abp(g, pt) == oracle_value(g, pt)


def test_sbp_examples():
    pair = Sbp.from_edges([(0, 1, X[1], "push:a"), (1, 2, X[2], "pop:a")])
    assert eval_sbp(pair, [2, 3]) == 6
    bad = Sbp.from_edges([(0, 1, X[1], "push:a"), (1, 2, X[2], "pop:b")])
    assert eval_sbp(bad, [2, 3]) == 0


def test_frozen_random_instance():
    g = random_sbp(8, seed=11)
    assert len(enumerate_realizable_paths(g)) == 3
    assert eval_sbp(g, [2, 3, 5]) == 159


@given(sbps(max_vertices=12))
def test_sbp_matches_path_oracle_as_polynomial(g):
    poly = path_sum(enumerate_realizable_paths(g), PolyDomain(F))
    assert eval_sbp_domain(g, PolyDomain(F)) == poly
    assert eval_sbp_configs_domain(g, PolyDomain(F)) == poly
    for pt in random_points(3, 4, 1):
        assert eval_sbp(g, pt) == poly(pt)


@given(sbps(max_vertices=10, nop_prob=0.0))
def test_dp_table_invariants(g):
    table = sbp_dp_table(g, FieldDomain(F, [3, 5, 7]))
    n = g.n_vertices
    for v in range(n):
        assert table.value(v, v, 0) == 1
        for u in range(n):
            if u != v:
                assert table.value(v, u, 0) == 0
            for i in range(1, table.max_len + 1, 2):
                assert table.value(v, u, i) == 0
    # step count well inside the polynomial budget |V|^4 |E|^2
    assert table.mul_count <= n ** 4 * max(len(g.edges), 1) ** 2


def test_dp_table_rejects_nops():
    with pytest.raises(ProgramError):
        sbp_dp_table(Sbp.from_edges([(0, 1, X[1])]), FieldDomain(F, [1]))


def test_relaxed_examples():
    loop = RelaxedSbp.from_edges([(0, 0, X[1], "push:a"), (0, 1, X[2], "nop"), (1, 0, X[3], "pop:a")], sink=0)
    assert eval_relaxed(loop, 0, [2, 3, 5]) == 1
    apart = RelaxedSbp.from_edges([(0, 1, X[1], "nop")])
    assert eval_relaxed(apart, 0, [2]) == 0
    walks = enumerate_realizable_walks(loop, 4)
    assert eval_relaxed(loop, 4, [2, 3, 5]) == path_sum(walks, FieldDomain(F, [2, 3, 5]))


@given(seeds)
def test_relaxed_matches_walk_oracle(seed):
    g = random_relaxed_sbp(4, seed=seed)
    for m in range(9):
        want = path_sum(enumerate_realizable_walks(g, m), PolyDomain(F))
        assert g.at_length(m).evaluate(PolyDomain(F)) == want


def test_rabp_examples():
    ok = Rabp.from_edges([(0, 1, X[1], "write:a"), (1, 2, X[2], "delete:a")])
    assert eval_rabp(ok, [2, 5]) == 10
    bad = Rabp.from_edges([(0, 1, X[1], "write:a"), (1, 2, X[2], "delete:b")])
    assert eval_rabp(bad, [2, 5]) == 0


@given(seeds)
def test_rabp_matches_path_oracle(seed):
    g = random_rabp(11, seed=seed)
    poly = path_sum(enumerate_realizable_paths(g), PolyDomain(F))
    assert g.evaluate(PolyDomain(F)) == poly


def test_rabp_state_budget():
    g = random_rabp(14, seed=2, edge_prob=0.9, nop_prob=0.0)
    with pytest.raises(BudgetExceeded):
        eval_rabp(g, [1, 2, 3], state_budget=3)


@given(sbps(max_vertices=10))
def test_nop_removal_preserves_value(g):
    pt = [11, 13, 17]
    assert eval_sbp(remove_nops(g), pt) == eval_sbp(g, pt)
