import pytest
from hypothesis import given

from membp import (Circuit, CircuitBuilder, CircuitError, Input, Prod, Sum, Var, circuit_stats, eval_circuit,
                   is_multiplicatively_disjoint, is_skew, poly_expand_small, random_md_circuit, random_points)
from membp.algebra import FieldDomain, PrimeField

from strategies import md_circuits, seeds

X1, X2, X3 = Var(1), Var(2), Var(3)


def test_eval_examples():
    assert eval_circuit(Circuit((Input(X1),), 0), [5]) == 5
    assert eval_circuit(Circuit((Input(X1), Input(X1), Prod(0, 1)), 2), [3]) == 9
    c = Circuit((Input(X1), Input(X2), Prod(0, 1), Input(1), Sum(2, 3)), 4)
    assert eval_circuit(c, [2, 3]) == 7


def test_structural_errors():
    with pytest.raises(CircuitError, match="dangling"):
        Circuit((Input(X1), Sum(0, 5)), 1)
    with pytest.raises(CircuitError, match="cycle"):
        Circuit((Input(X1), Sum(0, 2), Sum(0, 1), Sum(2, 2)), 3)
    with pytest.raises(CircuitError, match="semi_unbounded"):
        Circuit((Input(X1), Input(X2), Input(X3), Sum(0, 1, 2)), 3)
    with pytest.raises(CircuitError, match="second sink"):
        Circuit((Input(X1), Input(X2)), 1)
    Circuit((Input(X1), Input(X2), Input(X3), Sum(0, 1, 2)), 3, semi_unbounded=True)


def test_md_examples():
    tree = Circuit((Input(X1), Input(X2), Prod(0, 1), Input(X3), Sum(2, 3)), 4)
    assert is_multiplicatively_disjoint(tree)
    shared = Circuit((Input(X1), Input(X2), Sum(0, 1), Prod(2, 2)), 3)
    assert not is_multiplicatively_disjoint(shared)
    # the same g twice under a sum: subcircuits of the only product are {g} and {X3}
    sum_shared = Circuit((Input(X1), Input(X2), Sum(0, 1), Sum(2, 2), Input(X3), Prod(3, 4)), 5)
    assert sum_shared.descendants[3] & sum_shared.descendants[4] == 0
    assert is_multiplicatively_disjoint(sum_shared)


def test_skew_examples():
    assert is_skew(Circuit((Input(X1), Input(X2), Sum(0, 1)), 2))
    assert is_skew(Circuit((Input(X1), Input(X2), Input(X3), Sum(1, 2), Prod(0, 3)), 4))
    c = Circuit((Input(X1), Input(X2), Input(X2), Input(X3), Sum(0, 1), Sum(2, 3), Prod(4, 5)), 6)
    assert not is_skew(c)


def test_stats_examples():
    s = circuit_stats(Circuit((Input(X1),), 0))
    assert (s.size, s.depth) == (1, 0) and s.formal_degree <= 1
    assert circuit_stats(Circuit((Input(X1), Input(X2), Prod(0, 1)), 2)).formal_degree == 2
    tree = Circuit((Input(X1), Input(X2), Input(X3), Input(Var(4)), Prod(0, 1), Prod(2, 3), Prod(4, 5)), 6)
    s = circuit_stats(tree)
    assert (s.depth, s.formal_degree) == (2, 4)


def test_random_md_circuit_is_frozen():
    c = random_md_circuit(2, 5, 42)
    assert c == random_md_circuit(2, 5, 42)
    assert c.gates == (Input(X1), Input(X2), Sum(1, 0), Sum(0, 2), Sum(3, 3))
    assert c.output == 4
    assert poly_expand_small(c).terms == {((1, 1),): 4, ((2, 1),): 2}


@given(md_circuits())
def test_random_circuits_are_md_and_agree_with_expansion(c):
    assert is_multiplicatively_disjoint(c)
    poly = poly_expand_small(c)
    for pt in random_points(max(c.max_var(), 1), 5, 3):
        assert eval_circuit(c, pt) == poly(pt)
    assert poly.total_degree() <= circuit_stats(c).formal_degree


@given(seeds)
def test_generator_respects_gate_budget(seed):
    c = random_md_circuit(3, 20, seed)
    assert c.size <= 20


def test_shared_product_is_not_md():
    b = CircuitBuilder()
    x = b.add(b.input(X1), b.input(X2))
    y = b.mul(x, b.input(X3))
    c = b.build(b.mul(y, b.add(x, b.input(X3))))
    assert not is_multiplicatively_disjoint(c)


def test_builder_semi_unbounded():
    b = CircuitBuilder(semi_unbounded=True)
    out = b.add_many([b.input(X1), b.input(X2), b.input(X3)])
    c = b.build(out)
    assert c.semi_unbounded and eval_circuit(c, [1, 2, 3]) == 6
    assert c.evaluate(FieldDomain(PrimeField(7), [3, 3, 3])) == 2
