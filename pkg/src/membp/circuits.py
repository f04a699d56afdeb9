"""Arithmetic circuits: gates, structural predicates, evaluation, construction."""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Sequence

from .algebra import DEFAULT_FIELD, Field, FieldDomain, Var, Weight, domain_sum


class CircuitError(ValueError):
    """Structural problem in a circuit description."""


@dataclass(frozen=True)
class Input:
    label: Weight
    children = ()


@dataclass(frozen=True)
class Sum:
    children: tuple

    def __init__(self, *children):
        if len(children) == 1 and isinstance(children[0], (tuple, list)):
            children = children[0]
        object.__setattr__(self, "children", tuple(children))


@dataclass(frozen=True)
class Prod:
    left: int
    right: int

    @property
    def children(self):
        return (self.left, self.right)


def topological_order(n: int, edges: Sequence[tuple[int, int]]) -> list[int]:
    """Kahn's algorithm; ties are broken by ascending id.  Raises on cycles."""
    indeg = [0] * n
    succ: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        succ[u].append(v)
        indeg[v] += 1
    heap = [v for v in range(n) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    if len(order) != n:
        raise CircuitError("graph contains a cycle")
    return order


@dataclass(frozen=True)
class Circuit:
    """A DAG of gates with a single output.

    ``gates[k]`` is an :class:`Input`, :class:`Sum` or :class:`Prod`; children
    are gate indices.  Sum gates take exactly two children unless
    ``semi_unbounded`` is set.  Every gate except the output must feed some
    other gate.
    """

    gates: tuple
    output: int
    semi_unbounded: bool = False
    _order: tuple = dc_field(default=(), repr=False, compare=False)

    def __post_init__(self):
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        n = len(gates)
        if not 0 <= self.output < n:
            raise CircuitError(f"output {self.output} is not a gate")
        arcs = []
        used = [False] * n
        for k, g in enumerate(gates):
            if isinstance(g, Input):
                if not isinstance(g.label, Var):
                    try:
                        DEFAULT_FIELD.element(g.label)
                    except (TypeError, ValueError):
                        raise CircuitError(f"gate {k}: bad input label {g.label!r}") from None
            elif isinstance(g, Prod):
                pass
            elif isinstance(g, Sum):
                if len(g.children) < 2 and not self.semi_unbounded:
                    raise CircuitError(f"gate {k}: sum gate needs two children")
                if len(g.children) > 2 and not self.semi_unbounded:
                    raise CircuitError(f"gate {k}: sum fanin {len(g.children)} needs semi_unbounded")
                if not g.children:
                    raise CircuitError(f"gate {k}: empty sum")
            else:
                raise CircuitError(f"gate {k}: unknown gate type {type(g).__name__}")
            for c in g.children:
                if not isinstance(c, int) or not 0 <= c < n:
                    raise CircuitError(f"gate {k}: dangling child {c!r}")
                arcs.append((c, k))
                used[c] = True
        order = topological_order(n, arcs)
        if used[self.output]:
            raise CircuitError("output gate feeds another gate")
        for k in range(n):
            if k != self.output and not used[k]:
                raise CircuitError(f"gate {k} is a second sink")
        object.__setattr__(self, "_order", tuple(order))

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def order(self) -> tuple:
        return self._order

    def evaluate(self, domain):
        values = [None] * len(self.gates)
        for k in self._order:
            g = self.gates[k]
            if isinstance(g, Input):
                values[k] = domain.weight(g.label)
            elif isinstance(g, Prod):
                values[k] = domain.mul(values[g.left], values[g.right])
            else:
                values[k] = domain_sum(domain, (values[c] for c in g.children))
        return values[self.output]

    def max_var(self) -> int:
        return max((g.label.index for g in self.gates if isinstance(g, Input) and isinstance(g.label, Var)),
                   default=0)

    def degree_bound(self) -> int:
        return circuit_stats(self).formal_degree

    @cached_property
    def descendants(self) -> tuple:
        """Bitmask of the gates of each subcircuit ``C_v`` (including ``v``)."""
        masks = [0] * len(self.gates)
        for k in self._order:
            m = 1 << k
            for c in self.gates[k].children:
                m |= masks[c]
            masks[k] = m
        return tuple(masks)

    def subcircuit_size(self, v: int) -> int:
        return bin(self.descendants[v]).count("1")


@dataclass(frozen=True)
class CircuitStats:
    size: int
    depth: int
    formal_degree: int
    gate_degrees: tuple = ()


def eval_circuit(c: Circuit, point: Sequence, field: Field = DEFAULT_FIELD):
    """Value of ``c`` at ``point`` (``point[i - 1]`` is ``X_i``)."""
    return c.evaluate(FieldDomain(field, point))


def is_multiplicatively_disjoint(c: Circuit) -> bool:
    desc = c.descendants
    return all(desc[g.left] & desc[g.right] == 0 for g in c.gates if isinstance(g, Prod))


def is_skew(c: Circuit) -> bool:
    return all(isinstance(c.gates[g.left], Input) or isinstance(c.gates[g.right], Input)
               for g in c.gates if isinstance(g, Prod))


def circuit_stats(c: Circuit) -> CircuitStats:
    depth = [0] * c.size
    degree = [0] * c.size
    for k in c.order:
        g = c.gates[k]
        if isinstance(g, Input):
            degree[k] = 1 if isinstance(g.label, Var) else 0
            continue
        depth[k] = 1 + max(depth[ch] for ch in g.children)
        if isinstance(g, Prod):
            degree[k] = degree[g.left] + degree[g.right]
        else:
            degree[k] = max(degree[ch] for ch in g.children)
    return CircuitStats(c.size, depth[c.output], degree[c.output], tuple(degree))


class CircuitBuilder:
    """Incrementally builds a circuit; also usable as an evaluation domain.

    Identical gates are shared (hash-consing) and the trivial identities
    ``0 + x``, ``0 * x`` and ``1 * x`` are folded, so running an evaluator
    over a builder records exactly the arithmetic it performs.  ``build``
    keeps only the gates the output depends on.
    """

    def __init__(self, semi_unbounded: bool = False):
        self.semi_unbounded = semi_unbounded
        self.gates: list = []
        self._index: dict = {}
        self.zero = self.const(0)
        self.one = self.const(1)

    def _gate(self, gate) -> int:
        k = self._index.get(gate)
        if k is None:
            k = len(self.gates)
            self.gates.append(gate)
            self._index[gate] = k
        return k

    def const(self, c) -> int:
        return self._gate(Input(c))

    def input(self, label: Weight) -> int:
        return self._gate(Input(label))

    weight = input

    def _is_const(self, k, value) -> bool:
        g = self.gates[k]
        return isinstance(g, Input) and not isinstance(g.label, Var) and g.label == value

    def add(self, a: int, b: int) -> int:
        if self._is_const(a, 0):
            return b
        if self._is_const(b, 0):
            return a
        return self._gate(Sum(a, b))

    def add_many(self, children: Sequence[int]) -> int:
        children = [c for c in children if not self._is_const(c, 0)]
        if not children:
            return self.zero
        if len(children) == 1:
            return children[0]
        if not self.semi_unbounded:
            total = children[0]
            for c in children[1:]:
                total = self._gate(Sum(total, c))
            return total
        return self._gate(Sum(*children))

    def mul(self, a: int, b: int) -> int:
        if self._is_const(a, 0) or self._is_const(b, 0):
            return self.zero
        if self._is_const(a, 1):
            return b
        if self._is_const(b, 1):
            return a
        return self._gate(Prod(a, b))

    def build(self, output: int) -> Circuit:
        keep = []
        stack = [output]
        seen = {output}
        while stack:
            k = stack.pop()
            keep.append(k)
            for ch in self.gates[k].children:
                if ch not in seen:
                    seen.add(ch)
                    stack.append(ch)
        keep.sort()
        remap = {old: new for new, old in enumerate(keep)}
        gates = []
        for old in keep:
            g = self.gates[old]
            if isinstance(g, Prod):
                g = Prod(remap[g.left], remap[g.right])
            elif isinstance(g, Sum):
                g = Sum(*(remap[ch] for ch in g.children))
            gates.append(g)
        return Circuit(tuple(gates), remap[output], self.semi_unbounded)


def random_md_circuit(n_vars: int, n_gates: int, seed: int, const_prob: float = 0.1) -> Circuit:
    """A seeded random multiplicatively disjoint circuit with at most ``n_gates`` gates.

    Product gates whose operands would share a gate get a fresh copy of the
    right operand's subcircuit; when the budget cannot pay for the copy a sum
    gate is emitted instead.  Dangling gates are folded into the output with
    sums at the end, and that folding is reserved in the budget.
    """
    if n_gates < 1 or n_vars < 1 or n_gates < n_vars:
        raise ValueError("need n_gates >= n_vars >= 1")
    rng = random.Random(seed)
    gates: list = []
    desc: list[int] = []
    sinks: set[int] = set()

    def emit(g) -> int:
        k = len(gates)
        m = 1 << k
        for ch in g.children:
            m |= desc[ch]
            sinks.discard(ch)
        gates.append(g)
        desc.append(m)
        sinks.add(k)
        return k

    def copy(root: int) -> int:
        members = [k for k in range(root + 1) if desc[root] >> k & 1]
        remap = {}
        for k in members:
            g = gates[k]
            if isinstance(g, Prod):
                g = Prod(remap[g.left], remap[g.right])
            elif isinstance(g, Sum):
                g = Sum(*(remap[ch] for ch in g.children))
            remap[k] = emit(g)
        for k in members:
            sinks.discard(remap[k])
        return remap[root]

    n_leaves = min(n_vars, (n_gates + 1) // 2)
    for i in range(1, n_leaves + 1):
        emit(Input(Var(i)))

    def budget_left() -> int:
        return n_gates - len(gates) - (len(sinks) - 1)

    def pick() -> int:
        pool = sorted(sinks) if sinks and rng.random() < 0.6 else range(len(gates))
        return rng.choice(list(pool))

    def cost(*children) -> int:
        return 1 - len(set(children) & sinks) + 1

    while budget_left() > 0:
        r = rng.random()
        if r < const_prob and budget_left() >= 2:
            emit(Input(rng.choice([1, 2, 3, -1])))
            continue
        if r < const_prob + 0.1 and budget_left() >= 2:
            emit(Input(Var(rng.randint(1, n_vars))))
            continue
        a, b = pick(), pick()
        if budget_left() < cost(a, b):
            a = max(sinks)
            b = a if budget_left() < cost(a, a) else b
            if budget_left() < cost(a, b):
                b = a
        if rng.random() < 0.5:
            if desc[a] & desc[b]:
                size = bin(desc[b]).count("1")
                if budget_left() >= size + cost(a):
                    b = copy(b)
                    emit(Prod(a, b))
                    continue
            else:
                emit(Prod(a, b))
                continue
        emit(Sum(a, b))
    out = sorted(sinks)
    total = out[0]
    for k in out[1:]:
        total = emit(Sum(total, k))
    c = Circuit(tuple(gates), total)
    assert is_multiplicatively_disjoint(c)
    return c
