"""Logarithmic-depth circuits for stack branching programs.

The construction works with two kinds of quantities over the nop-free
program ``H``:

* ``W(a, b, i)``: total weight of realizable paths ``a -> b`` of length ``i``;
* ``G(a, (c, d, j), b, i)``: total weight of *gap paths*, a prefix ``a -> c``
  and a suffix ``d -> b`` with ``i - j`` edges in all, whose concatenated
  operations are realizable.  Only gap paths in *closed form* are counted:
  the suffix is empty (``d = b``) or starts with a pop.

A realizable path of length ``i`` splits uniquely into an outer gap path and
a piece ``P1`` = one matched block plus everything after it on the same
nesting level, chosen so that ``P1`` is longer than ``i/2`` while both of
its parts are at most ``i/2``.  A closed gap path splits the same way,
except that ``P1`` must contain the gap; among the candidates the innermost
one longer than half the gap path's measure is taken.  Each step halves the
measure of the gap pieces, and plain pieces halve on the following step,
which gives depth ``O(log L)``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .circuits import Circuit, CircuitBuilder, circuit_stats
from .evaluators import sbp_dp_table
from .programs import Op, ProgramError, Sbp, stack_seq_realizable
from .transforms import remove_nops


class PathDescription(NamedTuple):
    a: int
    b: int
    i: int

    @property
    def measure(self) -> int:
        return self.i


class GapDescription(NamedTuple):
    a: int
    c: int
    d: int
    j: int
    b: int
    i: int

    @property
    def measure(self) -> int:
        return self.i - self.j


def stack_height(ops: Sequence[Op], position: int) -> int:
    """Number of pushes minus number of pops among the first ``position`` operations."""
    if not 0 <= position <= len(ops):
        raise ValueError(f"position {position} is not on a path of length {len(ops)}")
    h = 0
    for op in ops[:position]:
        if op.kind == "push":
            h += 1
        elif op.kind == "pop":
            h -= 1
    return h


# -- decomposition oracle ---------------------------------------------------


class Decomposition(NamedTuple):
    """Positions on the path: ``P1`` is ``[start, end]``; its block closes at ``block_end``."""

    start: int
    block_end: int
    end: int
    case: int  # 0 plain, 1 gap inside the block, 2 gap after the block


def _closed(ops: Sequence[Op], gap_end: int, end: int) -> bool:
    return gap_end == end or ops[gap_end].kind == "pop"


def decompositions(ops: Sequence[Op], gap: tuple[int, int] | None = None,
                   closed_form: bool = True) -> list[Decomposition]:
    """All splits of a realizable (gap) path allowed by the halving conditions.

    Brute force over every triple of positions; realizability of each piece is
    re-checked by stack simulation.  ``gap = (gc, gd)`` marks the positions
    bounding a balanced segment that is treated as missing.  With
    ``closed_form=False`` the outer piece may continue with any operation
    after ``P1``, which is the weaker condition under which splits are not
    unique.
    """
    ops = list(ops)
    n = len(ops)
    out = []
    if gap is None:
        for c in range(n):
            if ops[c].kind != "push":
                continue
            for f in range(c + 1, n):
                if ops[f] != Op("pop", ops[c].symbol):
                    continue
                if not stack_seq_realizable(ops[c + 1:f]):
                    continue
                for d in range(f + 1, n + 1):
                    i1, i2, j = f - c - 1, d - f - 1, d - c
                    if not (2 * i1 <= n and 2 * i2 <= n and 2 * j > n):
                        continue
                    if not stack_seq_realizable(ops[f + 1:d]):
                        continue
                    if not stack_seq_realizable(ops[:c] + ops[d:]):
                        continue
                    if closed_form and not _closed(ops, d, n):
                        continue
                    out.append(Decomposition(c, f + 1, d, 0))
        return out

    gc, gd = gap
    j = gd - gc
    mu = n - j

    def glued(lo: int, hi: int) -> list:
        return ops[lo:gc] + ops[gd:hi]

    for c in range(n):
        if ops[c].kind != "push" or c >= gc:
            continue
        for f in range(c + 1, n):
            if ops[f] != Op("pop", ops[c].symbol):
                continue
            for d in range(f + 1, n + 1):
                if not (c < gc and gd <= d):
                    continue
                p1 = (d - c) - j
                if f >= gd:
                    case, gap_piece = 1, (f - c - 1) - j
                    ok = (stack_seq_realizable(glued(c + 1, f)) and stack_seq_realizable(ops[f + 1:d])
                          and (not closed_form or _closed(ops, gd, f)))
                elif f + 1 <= gc:
                    case, gap_piece = 2, (d - f - 1) - j
                    ok = (stack_seq_realizable(ops[c + 1:f]) and stack_seq_realizable(glued(f + 1, d))
                          and (not closed_form or _closed(ops, gd, d)))
                else:
                    continue
                if not ok or not (2 * p1 > mu and 2 * gap_piece <= mu):
                    continue
                if not stack_seq_realizable(ops[:c] + ops[d:]):
                    continue
                if closed_form and not _closed(ops, d, n):
                    continue
                out.append(Decomposition(c, f + 1, d, case))
    return out


def decompose_oracle(ops: Sequence[Op], gap: tuple[int, int] | None = None) -> Decomposition:
    """The unique split of a realizable path (or closed gap path) of measure at least 2."""
    found = decompositions(ops, gap)
    if len(found) != 1:
        raise AssertionError(f"expected exactly one decomposition, found {len(found)}: {found}")
    return found[0]


# -- circuit construction ---------------------------------------------------


@dataclass(frozen=True)
class DepthReport:
    size: int
    depth: int
    longest_path: int
    depth_bound: int
    plain_gates: int
    gap_gates: int

    @property
    def within_bound(self) -> bool:
        return self.depth <= self.depth_bound

    def to_json(self) -> dict:
        return {"size": self.size, "depth": self.depth, "L": self.longest_path,
                "depth_bound": self.depth_bound, "within_bound": self.within_bound,
                "plain_descriptions": self.plain_gates, "gap_descriptions": self.gap_gates}


def depth_bound(longest_path: int) -> int:
    """Declared bound ``16 * (ceil(log2(L + 2)) + 1)``."""
    return 16 * (math.ceil(math.log2(longest_path + 2)) + 1)


class _Builder:
    def __init__(self, h: Sbp):
        self.h = h
        self.out = CircuitBuilder(semi_unbounded=True)
        n = h.n_vertices
        self.longest = self._longest_path()
        # realizable[i][a] -> set of b with a realizable path a -> b of length i
        table = sbp_dp_table(h, _BoolDomain())
        self.realizable = {i: {a: set(row[a]) for a in row} for i, row in table.rows.items()}
        # lengths[x][y]: bitmask of lengths of (not necessarily realizable) paths x -> y
        self.lengths = [[0] * n for _ in range(n)]
        for x in range(n):
            self.lengths[x][x] = 1
        for v in reversed(h.order):
            row = self.lengths[v]
            for k in h.out_edges[v]:
                succ = self.lengths[h.edges[k].dst]
                for y in range(n):
                    if succ[y]:
                        row[y] |= succ[y] << 1
        self.pushes = [(e.src, e.dst, e.op.symbol, e.weight) for e in h.edges if e.op.kind == "push"]
        self.pops_from = defaultdict(list)  # (f, symbol) -> [(g, weight)]
        for e in h.edges:
            if e.op.kind == "pop":
                self.pops_from[(e.src, e.op.symbol)].append((e.dst, e.weight))
        self.plain: dict = {}
        self.gaps: dict = {}

    def _longest_path(self) -> int:
        best = [0] * self.h.n_vertices
        for v in reversed(self.h.order):
            for k in self.h.out_edges[v]:
                best[v] = max(best[v], best[self.h.edges[k].dst] + 1)
        return max(best, default=0)

    def has_length(self, x: int, y: int, ell: int) -> bool:
        return ell >= 0 and bool(self.lengths[x][y] >> ell & 1)

    def outer_possible(self, a: int, c: int, d: int, b: int, mu: int) -> bool:
        """Can a prefix ``a -> c`` and a suffix ``d -> b`` have ``mu`` edges in total?"""
        left, right = self.lengths[a][c], self.lengths[d][b]
        if not left or not right:
            return False
        for p in range(mu + 1):
            if left >> p & 1 and right >> (mu - p) & 1:
                return True
        return False

    def product(self, *factors) -> int:
        """Fanin-2 product tree, ``((f0 f1)(f2 f3)) f4`` for five factors."""
        out = self.out
        level = list(factors)
        while len(level) > 1:
            nxt = [out.mul(level[k], level[k + 1]) for k in range(0, len(level) - 1, 2)]
            if len(level) % 2:
                nxt.append(level[-1])
            level = nxt
        return level[0]

    # plain descriptions ----------------------------------------------------

    def W(self, a: int, b: int, i: int) -> int:
        key = PathDescription(a, b, i)
        if key in self.plain:
            return self.plain[key]
        out = self.out
        if i == 0:
            gate = out.one if a == b else out.zero
        elif b not in self.realizable.get(i, {}).get(a, ()):
            gate = out.zero
        else:
            terms = []
            half = i // 2
            for c, e, s, wce in self.pushes:
                if not self.lengths[a][c]:
                    continue
                for i1 in range(0, half + 1, 2):
                    for f in sorted(self.realizable.get(i1, {}).get(e, ())):
                        for g, wfg in self.pops_from.get((f, s), ()):
                            for i2 in range(0, half + 1, 2):
                                j = i1 + i2 + 2
                                if not (2 * j > i and j <= i):
                                    continue
                                for d in sorted(self.realizable.get(i2, {}).get(g, ())):
                                    if not self.outer_possible(a, c, d, b, i - j):
                                        continue
                                    outer = self.G(a, c, d, j, b, i)
                                    if outer == out.zero:
                                        continue
                                    assert i - j < half + 1 and i1 <= half and i2 <= half
                                    terms.append(self.product(outer, out.weight(wce), self.W(e, f, i1),
                                                              out.weight(wfg), self.W(g, d, i2)))
            gate = out.add_many(terms)
        self.plain[key] = gate
        return gate

    # gap descriptions ------------------------------------------------------

    def G(self, a: int, c: int, d: int, j: int, b: int, i: int) -> int:
        key = GapDescription(a, c, d, j, b, i)
        if key in self.gaps:
            return self.gaps[key]
        out = self.out
        mu = i - j
        if mu == 0:
            gate = out.one if (a == c and b == d) else out.zero
        elif not self.outer_possible(a, c, d, b, mu):
            gate = out.zero
        else:
            terms = []
            for c1, e, s, wce in self.pushes:
                if not self.lengths[a][c1]:
                    continue
                # case 1: the gap lies inside the block c1 -> e ... f -> g1
                if self.lengths[e][c]:
                    for m1 in range(0, mu // 2 + 1, 2):
                        for f in range(self.h.n_vertices):
                            if not self.lengths[d][f]:
                                continue
                            for g1, wfg in self.pops_from.get((f, s), ()):
                                for i2 in range(0, mu - m1 - 1, 2):
                                    p1 = m1 + 2 + i2
                                    if not (2 * p1 > mu and p1 <= mu):
                                        continue
                                    for d1 in sorted(self.realizable.get(i2, {}).get(g1, ())):
                                        if not self.outer_possible(a, c1, d1, b, mu - p1):
                                            continue
                                        outer = self.G(a, c1, d1, j + p1, b, i)
                                        if outer == out.zero:
                                            continue
                                        inner = self.G(e, c, d, j, f, j + m1)
                                        if inner == out.zero:
                                            continue
                                        assert mu - p1 < mu / 2 and m1 <= mu / 2 and i2 < mu
                                        terms.append(self.product(outer, out.weight(wce), inner,
                                                                  out.weight(wfg), self.W(g1, d1, i2)))
                # case 2: the block c1 -> ... -> g1 precedes the gap
                for i1 in range(0, mu - 1, 2):
                    for f in sorted(self.realizable.get(i1, {}).get(e, ())):
                        for g1, wfg in self.pops_from.get((f, s), ()):
                            if not self.lengths[g1][c]:
                                continue
                            for m3 in range(0, mu // 2 + 1, 2):
                                p1 = i1 + 2 + m3
                                if not (2 * p1 > mu and p1 <= mu):
                                    continue
                                for d1 in range(self.h.n_vertices):
                                    if not self.lengths[d][d1] or not self.lengths[d1][b]:
                                        continue
                                    if not self.outer_possible(a, c1, d1, b, mu - p1):
                                        continue
                                    outer = self.G(a, c1, d1, j + p1, b, i)
                                    if outer == out.zero:
                                        continue
                                    rest = self.G(g1, c, d, j, d1, j + m3)
                                    if rest == out.zero:
                                        continue
                                    assert mu - p1 < mu / 2 and m3 <= mu / 2 and i1 < mu
                                    terms.append(self.product(outer, out.weight(wce), self.W(e, f, i1),
                                                              out.weight(wfg), rest))
            gate = out.add_many(terms)
        self.gaps[key] = gate
        return gate


class _BoolDomain:
    zero = False
    one = True

    @staticmethod
    def add(a, b):
        return a or b

    @staticmethod
    def mul(a, b):
        return a and b

    @staticmethod
    def weight(w):
        return True


def depth_reduce(g: Sbp) -> tuple[Circuit, DepthReport]:
    """A semi-unbounded circuit of depth ``O(log L)`` computing the polynomial of ``g``.

    ``L`` is the longest path of the nop-free program the recursion runs on.
    One sum gate is created per nonzero description reachable from the
    output ``sum_i W(s, t, i)``.
    """
    if not isinstance(g, Sbp):
        raise ProgramError("depth_reduce expects an SBP")
    h = remove_nops(g) if any(e.op.kind == "nop" for e in g.edges) else g
    b = _Builder(h)
    top = [b.W(h.source, h.sink, i) for i in range(0, b.longest + 1, 2)]
    circuit = b.out.build(b.out.add_many(top))
    stats = circuit_stats(circuit)
    plain = sum(1 for v in b.plain.values() if v not in (b.out.zero, b.out.one))
    gaps = sum(1 for v in b.gaps.values() if v not in (b.out.zero, b.out.one))
    report = DepthReport(circuit.size, stats.depth, b.longest, depth_bound(b.longest), plain, gaps)
    return circuit, report
