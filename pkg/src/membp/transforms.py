"""Structural constructions between circuits and stack branching programs.

Every transform is a pure function returning a new object.  ``size_report``
checks an output against the size bound of the construction that made it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .algebra import Weight
from .circuits import Circuit, CircuitBuilder, Input, Prod, Sum, is_multiplicatively_disjoint
from .evaluators import sbp_dp_table
from .programs import (NOP, Abp, BranchingProgram, Edge, Op, ProgramError, RelaxedSbp, Sbp, pop, push,
                       width_of)

NOP_SYMBOL = "$nop"


@dataclass(frozen=True)
class SizeReport:
    transform: str
    input_size: int
    output_size: int
    bound_formula: str
    bound: int
    width: int | None = None

    @property
    def within_bound(self) -> bool:
        return self.output_size <= self.bound

    def to_json(self) -> dict:
        return {"transform": self.transform, "input_size": self.input_size, "output_size": self.output_size,
                "bound_formula": self.bound_formula, "bound": self.bound, "within_bound": self.within_bound,
                "width": self.width}


def _fresh_symbol(symbols: tuple, base: str) -> str:
    name = base
    k = 0
    while name in symbols:
        k += 1
        name = f"{base}{k}"
    return name


# -- nop removal ------------------------------------------------------------


def remove_nops(g: Sbp) -> Sbp:
    """Subdivide every edge ``uv`` into ``u -> v_e -> v``.

    The first half carries the weight, the second weight 1.  A nop edge
    becomes ``push(*)``/``pop(*)`` for a reserved symbol ``*`` not in the
    symbol table; any other edge repeats its operation on both halves, so each
    stack operation is doubled and realizability is unchanged.  The output has
    ``|V| + |E|`` vertices and is layered whenever the input is.
    """
    n = g.n_vertices
    symbols = g.symbols
    reserved = None
    if any(e.op.kind == "nop" for e in g.edges):
        symbols = symbols + (_fresh_symbol(symbols, NOP_SYMBOL),)
        reserved = len(symbols) - 1
    edges = []
    for k, e in enumerate(g.edges):
        mid = n + k
        if e.op.kind == "nop":
            first, second = push(reserved), pop(reserved)
        else:
            first = second = e.op
        edges.append(Edge(e.src, mid, e.weight, first))
        edges.append(Edge(mid, e.dst, 1, second))
    layers = None
    if g.layers is not None:
        layers = tuple(2 * x for x in g.layers) + tuple(2 * g.layers[e.src] + 1 for e in g.edges)
    return Sbp(n + len(g.edges), tuple(edges), g.source, g.sink, symbols, layers)


# -- unwinding relaxed SBPs -------------------------------------------------


def unwind(g: BranchingProgram, m: int, trim: bool = False) -> Sbp:
    """The layered SBP whose source-sink paths are the length-``m`` walks of ``g``.

    Vertex ``v`` at step ``i`` (``0 <= i <= m``) becomes ``i * |V| + v``; each
    edge ``uv`` becomes ``u_i -> v_{i+1}`` for ``i < m``.  With ``trim`` the
    copies that lie on no source-sink path are dropped (the polynomial is the
    same and the result is smaller).
    """
    if m < 1:
        raise ValueError("unwinding needs m >= 1")
    n = g.n_vertices
    keep = None
    if trim:
        keep = _walk_support(g, m)
    ids: dict[tuple[int, int], int] = {}

    def vid(v: int, i: int) -> int:
        key = (i, v)
        if key not in ids:
            ids[key] = len(ids)
        return ids[key]

    if keep is None:
        for i in range(m + 1):
            for v in range(n):
                vid(v, i)
    else:
        vid(g.source, 0)
        for i in range(m + 1):
            for v in sorted(keep[i]):
                vid(v, i)
        vid(g.sink, m)
    edges = []
    for i in range(m):
        for e in g.edges:
            if keep is not None and not (e.src in keep[i] and e.dst in keep[i + 1]):
                continue
            edges.append(Edge(vid(e.src, i), vid(e.dst, i + 1), e.weight, e.op))
    layers = [0] * len(ids)
    for (i, _v), k in ids.items():
        layers[k] = i
    return Sbp(len(ids), tuple(edges), ids[(0, g.source)], ids[(m, g.sink)], g.symbols, tuple(layers))


def _walk_support(g: BranchingProgram, m: int) -> list[set]:
    """For each step ``i``, the vertices on some length-``m`` source-sink walk."""
    fwd = [{g.source}]
    for _ in range(m):
        fwd.append({g.edges[k].dst for v in fwd[-1] for k in g.out_edges[v]})
    back = [set() for _ in range(m + 1)]
    back[m] = {g.sink} & fwd[m]
    for i in range(m - 1, -1, -1):
        back[i] = {v for v in fwd[i] if any(g.edges[k].dst in back[i + 1] for k in g.out_edges[v])}
    return back


# -- circuits to relaxed SBPs -----------------------------------------------


@dataclass(frozen=True)
class GateRecord:
    gate: int
    v_minus: int
    v_plus: int
    m: int
    subcircuit_size: int


@dataclass(frozen=True)
class CompileTrace:
    """Per-gate entry/exit vertices and walk lengths of a circuit compilation.

    The polynomial of gate ``v`` is the sum over realizable walks of exactly
    ``records[v].m`` edges from ``v_minus`` to ``v_plus``.
    """

    records: tuple
    circuit_size: int
    relaxed_size: int

    def __getitem__(self, gate: int) -> GateRecord:
        return self.records[gate]

    @property
    def size_bound(self) -> int:
        c = self.circuit_size
        return 2 * c * (c + 1) + 3 * c

    def length_bounds_hold(self) -> bool:
        return all(r.m <= 4 * r.subcircuit_size for r in self.records)


class _Assembler:
    def __init__(self):
        self.n = 0
        self.edges: list[Edge] = []
        self.symbols: list[str] = []

    def vertex(self) -> int:
        self.n += 1
        return self.n - 1

    def symbol(self, name: str) -> int:
        self.symbols.append(name)
        return len(self.symbols) - 1

    def edge(self, u: int, v: int, weight: Weight = 1, op: Op = NOP):
        self.edges.append(Edge(u, v, weight, op))


def circuit_to_relaxed(c: Circuit) -> tuple[RelaxedSbp, CompileTrace]:
    """Compile a multiplicatively disjoint circuit into a relaxed SBP.

    Gates are processed in topological order.  An input gate is one nop edge
    ``v- -> v+`` carrying its label (``m = 1``).  A product gate runs its two
    children in series, ``v- -push-> u- ... u+ -pop-> v_i -push-> w- ... w+ -pop-> v+``
    (``m = m_u + m_w + 4``).  A sum gate wraps each child ``u`` in
    ``push(vu)``/``pop(vu)``; a child shorter than the longest one is entered
    through a nop chain so every branch has length ``m_v = max m_u + 2``.
    The chain to a child ``w`` has ``max m - m_w + 1`` edges, the first
    carrying the push.  Sums of any fanin are accepted.
    """
    if not is_multiplicatively_disjoint(c):
        raise ValueError("circuit is not multiplicatively disjoint")
    asm = _Assembler()
    records: dict[int, GateRecord] = {}
    for v in c.order:
        g = c.gates[v]
        size = c.subcircuit_size(v)
        vm, vp = asm.vertex(), asm.vertex()
        if isinstance(g, Input):
            asm.edge(vm, vp, g.label, NOP)
            m = 1
        elif isinstance(g, Prod):
            u, w = records[g.left], records[g.right]
            mid = asm.vertex()
            su, sw = asm.symbol(f"{v}.0"), asm.symbol(f"{v}.1")
            asm.edge(vm, u.v_minus, 1, push(su))
            asm.edge(u.v_plus, mid, 1, pop(su))
            asm.edge(mid, w.v_minus, 1, push(sw))
            asm.edge(w.v_plus, vp, 1, pop(sw))
            m = u.m + w.m + 4
        else:
            kids = [records[ch] for ch in g.children]
            top = max(k.m for k in kids)
            for slot, kid in enumerate(kids):
                s = asm.symbol(f"{v}.{slot}")
                prev = vm
                for _ in range(top - kid.m):
                    nxt = asm.vertex()
                    asm.edge(prev, nxt, 1, push(s) if prev == vm else NOP)
                    prev = nxt
                asm.edge(prev, kid.v_minus, 1, push(s) if prev == vm else NOP)
                asm.edge(kid.v_plus, vp, 1, pop(s))
            m = top + 2
        records[v] = GateRecord(v, vm, vp, m, size)
    root = records[c.output]
    g = RelaxedSbp(asm.n, tuple(asm.edges), root.v_minus, root.v_plus, tuple(asm.symbols))
    trace = CompileTrace(tuple(records[v] for v in range(c.size)), c.size, asm.n)
    return g, trace


def circuit_to_sbp(c: Circuit, trim: bool = True) -> Sbp:
    """Acyclic SBP for a multiplicatively disjoint circuit: compile, then unwind at ``m_root``."""
    relaxed, trace = circuit_to_relaxed(c)
    return unwind(relaxed, trace[c.output].m, trim=trim)


# -- SBPs to circuits -------------------------------------------------------


def sbp_to_circuit(g: Sbp) -> Circuit:
    """Materialise the length DP of ``g`` as a circuit with fanin-2 gates.

    Each table cell ``w(v, u, i)`` becomes a gate wired by the DP recursion;
    the output adds up ``w(s, t, i)`` over even ``i``.
    """
    h = remove_nops(g) if any(e.op.kind == "nop" for e in g.edges) else g
    builder = CircuitBuilder()
    table = sbp_dp_table(h, builder)
    return builder.build(table.total(h.source, h.sink))


def sbp_to_circuit_bound(g: Sbp, c: int = 4) -> int:
    """Declared gate bound ``c * |V'|**4`` where ``V'`` is the nop-free vertex set."""
    n = g.n_vertices + (len(g.edges) if any(e.op.kind == "nop" for e in g.edges) else 0)
    return c * max(n, 2) ** 4


# -- one stack symbol -------------------------------------------------------


def one_symbol_to_abp(g: Sbp) -> Abp:
    """Track the stack height in the vertex: ``v`` becomes ``v_0 .. v_m`` with ``m = |V|``.

    Only the symbols used on edges count, so unused entries of the symbol
    table (for instance after :func:`remove_nops`) are harmless.

    Push edges raise the height, pop edges lower it, nop edges keep it; the
    source is ``s_0`` and the sink ``t_0``.  Vertex ``v_h`` is ``h * |V| + v``.
    """
    if len({e.op.symbol for e in g.edges if e.op.kind != "nop"}) > 1:
        raise ProgramError("one_symbol_to_abp needs edges that use at most one stack symbol")
    n = g.n_vertices
    m = n
    edges = []
    for e in g.edges:
        if e.op.kind == "push":
            heights = [(h, h + 1) for h in range(m)]
        elif e.op.kind == "pop":
            heights = [(h, h - 1) for h in range(1, m + 1)]
        else:
            heights = [(h, h) for h in range(m + 1)]
        for h1, h2 in heights:
            edges.append(Edge(h1 * n + e.src, h2 * n + e.dst, e.weight, NOP))
    return Abp((m + 1) * n, tuple(edges), g.source, g.sink)


def abp_to_one_symbol_sbp(g: Abp, symbol: str = "s") -> Sbp:
    """The same graph read as an SBP whose edges are all nop edges."""
    return Sbp(g.n_vertices, tuple(Edge(e.src, e.dst, e.weight, NOP) for e in g.edges),
               g.source, g.sink, (symbol,), g.layers)


# -- width 2 ----------------------------------------------------------------


def _edge_order(g: BranchingProgram) -> list[int]:
    """Edges sorted so that ``uv`` precedes ``vw``: by the topological rank of the head."""
    order = []
    for v in g.order:
        order.extend(sorted(g.in_edges[v]))
    return order


def _useful_edges(g: BranchingProgram) -> set[int]:
    fwd = {g.source}
    for v in g.order:
        if v in fwd:
            fwd.update(g.edges[k].dst for k in g.out_edges[v])
    back = {g.sink}
    for v in reversed(g.order):
        if any(g.edges[k].dst in back for k in g.out_edges[v]):
            back.add(v)
    return {k for k, e in enumerate(g.edges) if e.src in fwd and e.dst in back}


def width2_reduce(g: Sbp, binary: bool = True) -> Sbp:
    """A layered width-2 SBP over the symbols ``{0, 1}`` computing the same polynomial.

    The source gets a fresh predecessor and the sink a fresh successor (both
    nop edges of weight 1), edges off every source-sink path are dropped, and
    one six-vertex gadget is laid out per pair of consecutive edges
    ``(e, e')``: the weighted route pops ``e``, performs ``e``'s own
    operation with ``e``'s weight and pushes ``e'``; the other route is three
    nop edges.  Gadgets are chained in the lexicographic order induced by
    the edge order, between an initial ``push(e_s)`` and a final ``pop(e_t)``.
    With ``binary`` every symbol of ``S`` plus the edge symbols is then
    written as an ``l``-bit string and each edge becomes a path of ``l``
    edges, the weight on the first of them.
    """
    n = g.n_vertices
    s0, t0 = n, n + 1
    edges = list(g.edges) + [Edge(s0, g.source, 1, NOP), Edge(g.sink, t0, 1, NOP)]
    norm = Sbp(n + 2, tuple(edges), s0, t0, g.symbols)
    e_s, e_t = len(edges) - 2, len(edges) - 1
    useful = _useful_edges(norm)
    rank = {k: r for r, k in enumerate(k for k in _edge_order(norm) if k in useful)}
    pairs = sorted(((e, f) for e in useful for f in norm.out_edges[norm.edges[e].dst] if f in useful),
                   key=lambda p: (rank[p[0]], rank[p[1]]))

    n_sym = len(g.symbols)
    edge_symbol = {k: n_sym + r for k, r in rank.items()}
    symbols = g.symbols + tuple(f"e{k}" for k in sorted(rank, key=rank.get))

    out: list[Edge] = []
    layers: list[int] = []

    def vertex(layer: int) -> int:
        layers.append(layer)
        return len(layers) - 1

    src = vertex(0)
    prev, layer = src, 0
    first = True
    for e, f in pairs:
        base = layer + 1
        v1 = vertex(base)
        v2, v3 = vertex(base + 1), vertex(base + 1)
        v4, v5 = vertex(base + 2), vertex(base + 2)
        v6 = vertex(base + 3)
        out.append(Edge(prev, v1, 1, push(edge_symbol[e_s]) if first else NOP))
        first = False
        edge = norm.edges[e]
        out.append(Edge(v1, v2, 1, pop(edge_symbol[e])))
        out.append(Edge(v1, v3, 1, NOP))
        out.append(Edge(v2, v4, edge.weight, edge.op))
        out.append(Edge(v3, v5, 1, NOP))
        out.append(Edge(v4, v6, 1, push(edge_symbol[f])))
        out.append(Edge(v5, v6, 1, NOP))
        prev, layer = v6, base + 3
    snk = vertex(layer + 1)
    if first:
        # no consecutive pairs: the sink is unreachable and the polynomial is zero
        return Sbp(2, (), src, snk, ("0", "1") if binary else symbols, (0, 1))
    out.append(Edge(prev, snk, 1, pop(edge_symbol[e_t])))
    wide = Sbp(len(layers), tuple(out), src, snk, symbols, tuple(layers))
    return encode_binary(wide) if binary else wide


def encode_binary(g: Sbp) -> Sbp:
    """Re-encode every stack symbol as an ``l``-bit string over ``{0, 1}``.

    Each edge becomes a path of ``l`` edges: a push pushes the bits of its
    symbol, a pop pops them in reverse order, a nop stays nop.  The first edge
    of the path carries the weight.  Layer ``x`` maps to layer ``l * x``.
    """
    if g.layers is None:
        raise ProgramError("binary encoding expects a layered SBP")
    ell = max(1, math.ceil(math.log2(max(len(g.symbols), 1))))
    bits = {s: [(s >> (ell - 1 - b)) & 1 for b in range(ell)] for s in range(len(g.symbols))}
    layers = [ell * x for x in g.layers]
    edges = []
    for e in g.edges:
        if e.op.kind == "push":
            ops = [push(b) for b in bits[e.op.symbol]]
        elif e.op.kind == "pop":
            ops = [pop(b) for b in reversed(bits[e.op.symbol])]
        else:
            ops = [NOP] * ell
        prev = e.src
        for step, op in enumerate(ops):
            if step == ell - 1:
                nxt = e.dst
            else:
                nxt = len(layers)
                layers.append(ell * g.layers[e.src] + step + 1)
            edges.append(Edge(prev, nxt, e.weight if step == 0 else 1, op))
            prev = nxt
    return Sbp(len(layers), tuple(edges), g.source, g.sink, ("0", "1"), tuple(layers))


# -- size reports -----------------------------------------------------------

_BOUNDS: dict[str, tuple[str, Callable]] = {
    "remove-nops": ("|V|+|E|", lambda g, **_: g.n_vertices + len(g.edges)),
    "unwind": ("(m+1)|V|", lambda g, m, **_: (m + 1) * g.n_vertices),
    "one-symbol-to-abp": ("(m+1)|G|, m=|V|", lambda g, **_: (g.n_vertices + 1) * g.n_vertices),
    "abp-to-sbp": ("|V|", lambda g, **_: g.n_vertices),
    "circuit-to-relaxed": ("2|C|(|C|+1)+3|C|", lambda c, **_: 2 * c.size * (c.size + 1) + 3 * c.size),
    "extract": ("4|V'|^4", lambda g, **_: sbp_to_circuit_bound(g)),
}


def size_report(transform: str, before, after, **params) -> SizeReport:
    formula, bound = _BOUNDS[transform]
    width = None
    if isinstance(after, BranchingProgram) and after.layers is not None:
        width = width_of(after)
    return SizeReport(transform, before.size, after.size, formula, bound(before, **params), width)
