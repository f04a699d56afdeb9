"""Dominating-set and vertex-cover polynomials, and their RABP constructions.

``build_dsp_rabp`` gives a layered width-2 random access branching program
for the dominating-set polynomial; ``vcp_via_dsp`` turns a vertex-cover
polynomial into a projection of a dominating-set polynomial.  Vertex ``v``
of a graph always corresponds to the variable ``X_{v+1}``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .algebra import DEFAULT_FIELD, Field, FieldDomain, Var, Weight
from .programs import NOP, Edge, Rabp, delete, write

MAX_ORACLE_VERTICES = 20


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected graph on ``0 .. n-1`` without loops or parallel edges."""

    n: int
    edges: tuple = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {(u, v)} has an endpoint out of range")
            e = (min(u, v), max(u, v))
            if e in norm:
                raise ValueError(f"parallel edge {e}")
            norm.add(e)
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @cached_property
    def adjacency(self) -> tuple:
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def max_var(self) -> int:
        return self.n

    def to_json(self) -> dict:
        return {"kind": "graph", "n": self.n, "edges": [list(e) for e in self.edges]}


def random_graph(n: int, edge_prob: float = 0.5, seed: int = 0) -> SimpleGraph:
    rng = random.Random(seed)
    return SimpleGraph(n, tuple((u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < edge_prob))


def canonical_form(g: SimpleGraph) -> tuple:
    """Lexicographically least edge list over all relabellings (brute force, small ``n`` only)."""
    best = None
    for perm in itertools.permutations(range(g.n)):
        key = tuple(sorted((min(perm[u], perm[v]), max(perm[u], perm[v])) for u, v in g.edges))
        if best is None or key < best:
            best = key
    return (g.n, best or ())


def nonisomorphic_graphs(n: int) -> list[SimpleGraph]:
    """One representative per isomorphism class of graphs on ``n`` vertices."""
    pairs = list(itertools.combinations(range(n), 2))
    seen = {}
    for mask in range(1 << len(pairs)):
        g = SimpleGraph(n, tuple(p for k, p in enumerate(pairs) if mask >> k & 1))
        seen.setdefault(canonical_form(g), g)
    return [seen[k] for k in sorted(seen)]


# -- oracles ----------------------------------------------------------------


def _check_size(g: SimpleGraph):
    if g.n > MAX_ORACLE_VERTICES:
        raise ValueError(f"subset enumeration limited to {MAX_ORACLE_VERTICES} vertices, got {g.n}")


def dominating_sets(g: SimpleGraph) -> list[int]:
    """Bitmasks of the dominating sets of ``g``."""
    _check_size(g)
    closed = [1 << v | sum(1 << u for u in g.adjacency[v]) for v in range(g.n)]
    full = (1 << g.n) - 1
    out = []
    for mask in range(1 << g.n):
        covered = 0
        for v in range(g.n):
            if mask >> v & 1:
                covered |= closed[v]
        if covered == full:
            out.append(mask)
    return out


def vertex_covers(g: SimpleGraph) -> list[int]:
    _check_size(g)
    return [mask for mask in range(1 << g.n) if all(mask >> u & 1 or mask >> v & 1 for u, v in g.edges)]


def _subset_sum(sets: list[int], n: int, domain):
    total = domain.zero
    xs = [domain.weight(Var(v + 1)) for v in range(n)]
    for mask in sets:
        term = domain.one
        for v in range(n):
            if mask >> v & 1:
                term = domain.mul(term, xs[v])
        total = domain.add(total, term)
    return total


def dsp_oracle_domain(g: SimpleGraph, domain):
    return _subset_sum(dominating_sets(g), g.n, domain)


def vcp_oracle_domain(g: SimpleGraph, domain):
    return _subset_sum(vertex_covers(g), g.n, domain)


def dsp_oracle(g: SimpleGraph, point: Sequence, field: Field = DEFAULT_FIELD):
    """Sum over dominating sets ``D`` of the product of ``point[v]`` for ``v`` in ``D``."""
    return dsp_oracle_domain(g, FieldDomain(field, point))


def vcp_oracle(g: SimpleGraph, point: Sequence, field: Field = DEFAULT_FIELD):
    """Sum over vertex covers ``S`` of the product of ``point[v]`` for ``v`` in ``S``."""
    return vcp_oracle_domain(g, FieldDomain(field, point))


class DspPoly:
    """Evaluable wrapper so the oracles can take part in identity tests."""

    def __init__(self, g: SimpleGraph, cover: bool = False):
        self.g = g
        self.cover = cover

    def evaluate(self, domain):
        return (vcp_oracle_domain if self.cover else dsp_oracle_domain)(self.g, domain)

    def max_var(self) -> int:
        return self.g.n

    def degree_bound(self) -> int:
        return self.g.n


# -- the RABP ---------------------------------------------------------------


class _Layout:
    def __init__(self):
        self.layers: list[int] = []
        self.edges: list[Edge] = []

    def vertex(self, layer: int) -> int:
        self.layers.append(layer)
        return len(self.layers) - 1

    def edge(self, u: int, v: int, weight: Weight = 1, op=NOP):
        self.edges.append(Edge(u, v, weight, op))


def build_dsp_rabp(g: SimpleGraph) -> Rabp:
    """Layered width-2 RABP over the symbols ``V`` computing ``DSP_g``.

    Stage one has a gadget per vertex ``v`` with neighbours ``v_1 .. v_d``:
    either write ``v`` (weight ``X_v``) and then each ``v_k``, or pass with
    weight 1.  Afterwards the memory holds one copy of ``u`` per chosen
    vertex dominating ``u``.  Stage two has a gadget per vertex deleting
    between 1 and ``d + 1`` copies of ``v``, one path for each count, so the
    memory empties exactly when every vertex was dominated.  Gadgets are
    chained in ascending vertex order by weight-1 nop edges.
    """
    lay = _Layout()
    symbols = tuple(str(v) for v in range(g.n))
    entry = lay.vertex(0)
    prev, layer = None, 0

    def link() -> int:
        nonlocal prev, layer
        if prev is None:
            return entry
        layer += 1
        v = lay.vertex(layer)
        lay.edge(prev, v)
        prev = v
        return v

    for v in range(g.n):
        x0 = link()
        nbrs = g.adjacency[v]
        up = down = x0
        writes = [v] + list(nbrs)
        for k, sym in enumerate(writes):
            u1, d1 = lay.vertex(layer + k + 1), lay.vertex(layer + k + 1)
            lay.edge(up, u1, Var(v + 1) if k == 0 else 1, write(sym))
            lay.edge(down, d1)
            up, down = u1, d1
        layer += len(writes) + 1
        out = lay.vertex(layer)
        lay.edge(up, out)
        lay.edge(down, out)
        prev = out

    for v in range(g.n):
        x0 = link()
        d = len(g.adjacency[v])
        low = lay.vertex(layer + 1)
        lay.edge(x0, low, 1, delete(v))
        high = None
        for k in range(2, d + 2):
            new_low, new_high = lay.vertex(layer + k), lay.vertex(layer + k)
            lay.edge(low, new_low, 1, delete(v))
            lay.edge(low, new_high)
            if high is not None:
                lay.edge(high, new_high)
            low, high = new_low, new_high
        layer += d + 2
        out = lay.vertex(layer)
        lay.edge(low, out)
        if high is not None:
            lay.edge(high, out)
        prev = out

    sink = entry if prev is None else prev
    return Rabp(len(lay.layers), tuple(lay.edges), entry, sink, symbols, tuple(lay.layers))


# -- vertex cover to dominating set -----------------------------------------


@dataclass(frozen=True)
class Projection:
    """Substitution for the variables of ``DSP_{g'}``: ``values[k]`` replaces ``X_{k+1}``."""

    values: tuple

    def apply(self, point: Sequence) -> list:
        """The point for ``g'`` induced by a point for the original graph."""
        out = []
        for w in self.values:
            out.append(point[w.index - 1] if isinstance(w, Var) else w)
        return out

    def to_json(self) -> list:
        return [f"X{w.index}" if isinstance(w, Var) else w for w in self.values]


def vcp_via_dsp(g: SimpleGraph) -> tuple[SimpleGraph, Projection]:
    """A graph ``g'`` and a projection under which ``DSP_{g'}`` equals ``VCP_g``.

    Each edge ``uv`` gets a new vertex ``v_e`` adjacent to ``u`` and ``v``;
    setting ``X_{v_e} = 0`` forces ``u`` or ``v`` into the dominating set.
    Isolated vertices would otherwise be forced in as well, so when ``g``
    has any, a hub ``z`` adjacent to all of them and a pendant ``z'`` on
    ``z`` are added with ``X_z = 1`` and ``X_{z'} = 0``: ``z'`` must then be
    dominated by ``z``, which leaves every isolated vertex free.
    """
    n = g.n
    edges = list(g.edges)
    values: list = [Var(v + 1) for v in range(n)]
    for k, (u, v) in enumerate(g.edges):
        ve = n + k
        edges += [(u, ve), (v, ve)]
        values.append(0)
    isolated = [v for v in range(n) if not g.adjacency[v]]
    if isolated:
        hub, pendant = len(values), len(values) + 1
        edges += [(v, hub) for v in isolated] + [(hub, pendant)]
        values += [1, 0]
    return SimpleGraph(len(values), tuple(edges)), Projection(tuple(values))


class ProjectedDsp:
    """``DSP_{g'}`` under a projection, as an evaluable object over the original variables."""

    def __init__(self, g: SimpleGraph, projection: Projection, n_vars: int):
        self.g = g
        self.projection = projection
        self.n_vars = n_vars

    def evaluate(self, domain):
        sets = dominating_sets(self.g)
        xs = [domain.weight(w) for w in self.projection.values]
        total = domain.zero
        for mask in sets:
            term = domain.one
            for v in range(self.g.n):
                if mask >> v & 1:
                    term = domain.mul(term, xs[v])
            total = domain.add(total, term)
        return total

    def max_var(self) -> int:
        return self.n_vars

    def degree_bound(self) -> int:
        return self.g.n
