"""Branching programs with and without memory, and brute-force path oracles.

Vertices are the integers ``0 .. n_vertices - 1``; an edge's id is its
position in ``edges``.  Memory symbols are interned: an :class:`Op` stores
a symbol id and the program carries the ``symbols`` name table.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import ClassVar, Iterable, NamedTuple, Sequence

from .algebra import BudgetExceeded, Var, Weight, domain_sum, parse_constant
from .circuits import CircuitError, topological_order

OP_KINDS = ("nop", "push", "pop", "write", "delete")


class ProgramError(ValueError):
    """Structural problem in a branching program."""


class Op(NamedTuple):
    kind: str
    symbol: int | None = None

    def __repr__(self):
        return self.kind if self.symbol is None else f"{self.kind}({self.symbol})"


NOP = Op("nop")


def push(s: int) -> Op:
    return Op("push", s)


def pop(s: int) -> Op:
    return Op("pop", s)


def write(s: int) -> Op:
    return Op("write", s)


def delete(s: int) -> Op:
    return Op("delete", s)


class Edge(NamedTuple):
    src: int
    dst: int
    weight: Weight = 1
    op: Op = NOP


@dataclass(frozen=True)
class BranchingProgram:
    """Common structure of ABPs, SBPs, relaxed SBPs and RABPs."""

    n_vertices: int
    edges: tuple
    source: int = 0
    sink: int = 0
    symbols: tuple = ()
    layers: tuple | None = None
    _order: tuple | None = dc_field(default=None, repr=False, compare=False)

    kind = "program"
    allowed_ops: ClassVar[frozenset] = frozenset({"nop"})
    acyclic = True

    def __post_init__(self):
        edges = tuple(Edge(*e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "symbols", tuple(self.symbols))
        n = self.n_vertices
        if n < 1:
            raise ProgramError("a program needs at least one vertex")
        for v, what in ((self.source, "source"), (self.sink, "sink")):
            if not 0 <= v < n:
                raise ProgramError(f"{what} {v} is not a vertex")
        if len(set(self.symbols)) != len(self.symbols):
            raise ProgramError("duplicate symbol names")
        for k, e in enumerate(edges):
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise ProgramError(f"edge {k}: endpoint out of range")
            if not isinstance(e.op, Op) or e.op.kind not in self.allowed_ops:
                raise ProgramError(f"edge {k}: operation {e.op!r} not allowed in {self.kind}")
            if e.op.kind != "nop" and not (isinstance(e.op.symbol, int) and 0 <= e.op.symbol < len(self.symbols)):
                raise ProgramError(f"edge {k}: unknown symbol {e.op.symbol!r}")
            if not isinstance(e.weight, Var):
                try:
                    parse_constant(e.weight)
                except (TypeError, ValueError):
                    raise ProgramError(f"edge {k}: bad weight {e.weight!r}") from None
        if self.layers is not None:
            layers = tuple(self.layers)
            object.__setattr__(self, "layers", layers)
            if len(layers) != n:
                raise ProgramError("layering must give one layer per vertex")
            for k, e in enumerate(edges):
                if layers[e.dst] != layers[e.src] + 1:
                    raise ProgramError(f"edge {k} does not go to the next layer")
        if self.acyclic:
            try:
                order = topological_order(n, [(e.src, e.dst) for e in edges])
            except CircuitError:
                raise ProgramError(f"{self.kind} must be acyclic") from None
            object.__setattr__(self, "_order", tuple(order))

    # -- structure ----------------------------------------------------------

    @classmethod
    def from_edges(cls, edges: Iterable, source: int = 0, sink: int | None = None,
                   n_vertices: int | None = None, symbols: Sequence[str] = (), layers=None):
        """Build a program from ``(src, dst, weight[, op])`` tuples.

        ``op`` may be an :class:`Op` or text such as ``"push:a"``; new symbol
        names are appended to the symbol table in order of appearance.
        """
        table = list(symbols)
        built = []
        for e in edges:
            src, dst, weight, *rest = e
            op = rest[0] if rest else NOP
            if isinstance(op, str):
                op = parse_op(op, table)
            built.append(Edge(src, dst, weight, op))
        if n_vertices is None:
            n_vertices = 1 + max([source] + [sink or 0] + [max(e.src, e.dst) for e in built])
        if sink is None:
            sink = n_vertices - 1
        return cls(n_vertices, tuple(built), source, sink, tuple(table), layers)

    @property
    def size(self) -> int:
        return self.n_vertices

    @property
    def order(self) -> tuple:
        if self._order is None:
            raise ProgramError(f"{self.kind} has no topological order")
        return self._order

    @cached_property
    def out_edges(self) -> tuple:
        out: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for k, e in enumerate(self.edges):
            out[e.src].append(k)
        return tuple(tuple(x) for x in out)

    @cached_property
    def in_edges(self) -> tuple:
        inc: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for k, e in enumerate(self.edges):
            inc[e.dst].append(k)
        return tuple(tuple(x) for x in inc)

    def max_var(self) -> int:
        return max((e.weight.index for e in self.edges if isinstance(e.weight, Var)), default=0)

    def degree_bound(self) -> int:
        return self.n_vertices

    def op_name(self, op: Op) -> str:
        return op.kind if op.symbol is None else f"{op.kind}:{self.symbols[op.symbol]}"

    def structurally_equal(self, other) -> bool:
        return type(self) is type(other) and self == other


def parse_op(text: str, table: list) -> Op:
    kind, _, name = text.partition(":")
    if kind not in OP_KINDS:
        raise ProgramError(f"unknown operation {text!r}")
    if kind == "nop":
        if name:
            raise ProgramError("nop takes no symbol")
        return NOP
    if not name:
        raise ProgramError(f"{kind} needs a symbol")
    if name not in table:
        table.append(name)
    return Op(kind, table.index(name))


class Abp(BranchingProgram):
    kind = "abp"
    allowed_ops = frozenset({"nop"})

    def evaluate(self, domain):
        from .evaluators import eval_abp_domain
        return eval_abp_domain(self, domain)


class Sbp(BranchingProgram):
    kind = "sbp"
    allowed_ops = frozenset({"nop", "push", "pop"})

    def evaluate(self, domain):
        from .evaluators import eval_sbp_fast_domain
        return eval_sbp_fast_domain(self, domain)


class RelaxedSbp(BranchingProgram):
    """An SBP whose graph may contain cycles; evaluated over walks of a fixed length."""

    kind = "relaxed-sbp"
    allowed_ops = frozenset({"nop", "push", "pop"})
    acyclic = False

    def degree_bound(self) -> int:
        raise ProgramError("a relaxed SBP has a degree only for a fixed walk length; use at_length(m)")

    def at_length(self, m: int) -> "WalkLength":
        return WalkLength(self, m)


@dataclass(frozen=True)
class WalkLength:
    """A relaxed SBP together with the walk length it is evaluated at."""

    program: RelaxedSbp
    m: int

    def evaluate(self, domain):
        from .evaluators import eval_relaxed_domain
        return eval_relaxed_domain(self.program, self.m, domain)

    def max_var(self) -> int:
        return self.program.max_var()

    def degree_bound(self) -> int:
        return self.m


class Rabp(BranchingProgram):
    kind = "rabp"
    allowed_ops = frozenset({"nop", "write", "delete"})

    def evaluate(self, domain):
        from .evaluators import eval_rabp_domain
        return eval_rabp_domain(self, domain)


PROGRAM_KINDS = {cls.kind: cls for cls in (Abp, Sbp, RelaxedSbp, Rabp)}


# -- realizability ----------------------------------------------------------


def stack_seq_realizable(ops: Iterable[Op]) -> bool:
    """Stack simulation: pops must match the top symbol and the stack must end empty."""
    stack = []
    for op in ops:
        if op.kind == "push":
            stack.append(op.symbol)
        elif op.kind == "pop":
            if not stack or stack.pop() != op.symbol:
                return False
        elif op.kind != "nop":
            raise ValueError(f"{op!r} is not a stack operation")
    return not stack


def ram_seq_realizable(ops: Iterable[Op]) -> bool:
    """Per-symbol counts never go negative and end at zero."""
    count: Counter = Counter()
    for op in ops:
        if op.kind == "write":
            count[op.symbol] += 1
        elif op.kind == "delete":
            if count[op.symbol] == 0:
                return False
            count[op.symbol] -= 1
        elif op.kind != "nop":
            raise ValueError(f"{op!r} is not a memory operation")
    return not +count


def _realizable(g: BranchingProgram):
    return ram_seq_realizable if isinstance(g, Rabp) else stack_seq_realizable


class WeightedPath(NamedTuple):
    edges: tuple
    weights: tuple

    def value(self, domain):
        result = domain.one
        for w in self.weights:
            result = domain.mul(result, domain.weight(w))
        return result


def enumerate_realizable_paths(g: BranchingProgram, max_count: int = 100_000) -> list[WeightedPath]:
    """Every ``s``-``t`` path whose operation sequence is realizable.

    Enumerates all ``s``-``t`` paths (DFS in edge-id order) and filters them
    with the sequence checker.  ``max_count`` bounds the number of ``s``-``t``
    paths examined.  When ``s = t`` the empty path is included.
    """
    if not g.acyclic:
        raise ProgramError("path enumeration needs an acyclic program")
    ok = _realizable(g)
    reaches_sink = _co_reachable(g)
    found: list[WeightedPath] = []
    examined = 0
    stack: list[tuple[int, tuple]] = [(g.source, ())]
    while stack:
        v, path = stack.pop()
        if v == g.sink:
            examined += 1
            if examined > max_count:
                raise BudgetExceeded(f"more than {max_count} s-t paths")
            if ok(g.edges[k].op for k in path):
                found.append(WeightedPath(path, tuple(g.edges[k].weight for k in path)))
        for k in reversed(g.out_edges[v]):
            if reaches_sink[g.edges[k].dst]:
                stack.append((g.edges[k].dst, path + (k,)))
    found.sort()
    return found


def _co_reachable(g: BranchingProgram) -> list[bool]:
    ok = [False] * g.n_vertices
    ok[g.sink] = True
    frontier = [g.sink]
    while frontier:
        v = frontier.pop()
        for k in g.in_edges[v]:
            u = g.edges[k].src
            if not ok[u]:
                ok[u] = True
                frontier.append(u)
    return ok


def enumerate_realizable_walks(g: BranchingProgram, m: int, max_count: int = 100_000,
                               start: int | None = None, end: int | None = None) -> list[WeightedPath]:
    """Every walk of exactly ``m`` edges from ``start`` to ``end`` with a realizable stack sequence.

    Defaults to source and sink.  The search simulates the stack along the
    walk and abandons prefixes that already failed or whose stack is taller
    than the number of steps left, so only walks that can still be completed
    are extended; ``max_count`` bounds the number of walks returned.
    """
    if m < 0:
        raise ValueError("walk length must be non-negative")
    start = g.source if start is None else start
    end = g.sink if end is None else end
    found: list[WeightedPath] = []

    def extend(v: int, walk: tuple, stack: tuple):
        left = m - len(walk)
        if left == 0:
            if v == end and not stack:
                if len(found) >= max_count:
                    raise BudgetExceeded(f"more than {max_count} realizable walks")
                found.append(WeightedPath(walk, tuple(g.edges[k].weight for k in walk)))
            return
        for k in g.out_edges[v]:
            op = g.edges[k].op
            if op.kind == "push":
                new = stack + (op.symbol,)
            elif op.kind == "pop":
                if not stack or stack[-1] != op.symbol:
                    continue
                new = stack[:-1]
            else:
                new = stack
            if len(new) <= left - 1:
                extend(g.edges[k].dst, walk + (k,), new)

    extend(start, (), ())
    return found


def shortest_realizable_walk(g: BranchingProgram, start: int, end: int, max_len: int) -> int | None:
    """Length of the shortest realizable ``start``-``end`` walk, searching lengths ``<= max_len``.

    Breadth-first search over stack configurations ``(vertex, stack)``; every
    configuration reachable from ``(start, empty)`` is generated, so this is an
    exhaustive enumeration of walk prefixes modulo identical configurations.
    """
    frontier = {(start, ())}
    for length in range(max_len + 1):
        if (end, ()) in frontier:
            return length
        nxt = set()
        left = max_len - length - 1
        for v, stack in frontier:
            for k in g.out_edges[v]:
                op = g.edges[k].op
                if op.kind == "push":
                    new = stack + (op.symbol,)
                elif op.kind == "pop":
                    if not stack or stack[-1] != op.symbol:
                        continue
                    new = stack[:-1]
                else:
                    new = stack
                if len(new) <= left:
                    nxt.add((g.edges[k].dst, new))
        frontier = nxt
        if not frontier:
            return None
    return None


def path_sum(paths: Iterable[WeightedPath], domain):
    return domain_sum(domain, (p.value(domain) for p in paths))


def width_of(g: BranchingProgram) -> int:
    """Largest layer of a layered program."""
    if g.layers is None:
        raise ProgramError("program has no layering")
    return max(Counter(g.layers).values())


# -- random instances -------------------------------------------------------


def _random_weight(rng: random.Random, n_vars: int, const_prob: float) -> Weight:
    if rng.random() < const_prob:
        return rng.choice([1, 2, -1, 3])
    return Var(rng.randint(1, n_vars))


def _balanced_ops(rng: random.Random, length: int, n_symbols: int, nop_prob: float) -> list[Op]:
    """A random realizable stack sequence of exactly ``length`` operations."""
    n_nops = sum(rng.random() < nop_prob for _ in range(length))
    if (length - n_nops) % 2:
        n_nops += 1 if n_nops < length else -1
    opens = (length - n_nops) // 2
    word: list[Op] = []
    stack: list[int] = []
    while opens or stack:
        if opens and (not stack or rng.random() < 0.5):
            s = rng.randrange(n_symbols)
            stack.append(s)
            word.append(push(s))
            opens -= 1
        else:
            word.append(pop(stack.pop()))
    for _ in range(n_nops):
        word.insert(rng.randint(0, len(word)), NOP)
    return word


def random_sbp(n_vertices: int, n_vars: int = 3, n_symbols: int = 2, seed: int = 0,
               edge_prob: float = 0.35, nop_prob: float = 0.2, const_prob: float = 0.15,
               max_edges: int | None = None, plant: bool = True) -> Sbp:
    """A seeded random acyclic SBP on vertices ``0 .. n-1`` (source 0, sink n-1).

    With ``plant`` a realizable source-sink path is planted first so most
    instances compute a nonzero polynomial; the remaining edges go forward
    in vertex order with random operations.
    """
    rng = random.Random(seed)
    n = n_vertices
    symbols = tuple("abcdefghijklmnopqrstuvwxyz"[i] if i < 26 else f"s{i}" for i in range(n_symbols))
    edges: list[Edge] = []
    if plant and n >= 2:
        inner = sorted(rng.sample(range(1, n - 1), rng.randint(0, n - 2)))
        path = [0] + inner + [n - 1]
        if (len(path) - 1) % 2 and nop_prob == 0:
            if inner:
                path.pop(rng.randrange(1, len(path) - 1))
            else:
                path = []
        ops = _balanced_ops(rng, len(path) - 1, n_symbols, nop_prob) if path else []
        for (u, v), op in zip(zip(path, path[1:]), ops):
            edges.append(Edge(u, v, _random_weight(rng, n_vars, const_prob), op))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob:
                edges.append(Edge(u, v, _random_weight(rng, n_vars, const_prob), _random_stack_op(rng, n_symbols, nop_prob)))
    if max_edges is not None and len(edges) > max_edges:
        keep = sorted(rng.sample(range(len(edges)), max_edges))
        edges = [edges[k] for k in keep]
    return Sbp(n, tuple(edges), 0, n - 1, symbols)


def _random_stack_op(rng: random.Random, n_symbols: int, nop_prob: float) -> Op:
    r = rng.random()
    if r < nop_prob:
        return NOP
    s = rng.randrange(n_symbols)
    return push(s) if r < nop_prob + (1 - nop_prob) / 2 else pop(s)


def random_abp(n_vertices: int, n_vars: int = 3, seed: int = 0, edge_prob: float = 0.4,
               const_prob: float = 0.15) -> Abp:
    rng = random.Random(seed)
    n = n_vertices
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob or (v == u + 1 and rng.random() < 0.7):
                edges.append(Edge(u, v, _random_weight(rng, n_vars, const_prob)))
    return Abp(n, tuple(edges), 0, n - 1)


def random_relaxed_sbp(n_vertices: int, n_vars: int = 3, n_symbols: int = 2, seed: int = 0,
                       n_edges: int | None = None, nop_prob: float = 0.25,
                       const_prob: float = 0.15) -> RelaxedSbp:
    """A random relaxed SBP; edges may go backwards and self-loops are allowed."""
    rng = random.Random(seed)
    n = n_vertices
    if n_edges is None:
        n_edges = rng.randint(n, 2 * n + 1)
    symbols = tuple("abcdefgh"[i] for i in range(n_symbols))
    edges = [Edge(rng.randrange(n), rng.randrange(n), _random_weight(rng, n_vars, const_prob),
                  _random_stack_op(rng, n_symbols, nop_prob)) for _ in range(n_edges)]
    sink = rng.randrange(n)
    return RelaxedSbp(n, tuple(edges), 0, sink, symbols)


def random_rabp(n_vertices: int, n_vars: int = 3, n_symbols: int = 2, seed: int = 0,
                edge_prob: float = 0.35, nop_prob: float = 0.3, const_prob: float = 0.15) -> Rabp:
    rng = random.Random(seed)
    n = n_vertices
    symbols = tuple("abcdefgh"[i] for i in range(n_symbols))
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_prob or (v == u + 1 and rng.random() < 0.6):
                r = rng.random()
                s = rng.randrange(n_symbols)
                op = NOP if r < nop_prob else (write(s) if r < nop_prob + (1 - nop_prob) / 2 else delete(s))
                edges.append(Edge(u, v, _random_weight(rng, n_vars, const_prob), op))
    return Rabp(n, tuple(edges), 0, n - 1, symbols)
