"""Polynomial-time evaluation of ABPs and SBPs, walk evaluation, RABP evaluation.

Each evaluator has a ``*_domain`` form that works in any evaluation domain
(see :mod:`membp.algebra`) and a convenience form taking a point.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .algebra import DEFAULT_FIELD, BudgetExceeded, Field, FieldDomain
from .programs import Abp, BranchingProgram, ProgramError, Rabp, RelaxedSbp, Sbp


def eval_abp_domain(g: BranchingProgram, domain):
    """Sum of path weights from source to sink, one pass in topological order.

    Operations on the edges are ignored, so this also gives the unconstrained
    path sum of any acyclic program.
    """
    val: dict = {g.source: domain.one}
    for v in g.order:
        x = val.get(v)
        if x is None:
            continue
        for k in g.out_edges[v]:
            e = g.edges[k]
            term = domain.mul(x, domain.weight(e.weight))
            prev = val.get(e.dst)
            val[e.dst] = term if prev is None else domain.add(prev, term)
    return val.get(g.sink, domain.zero)


def eval_abp(g: Abp, point: Sequence, field: Field = DEFAULT_FIELD):
    return eval_abp_domain(g, FieldDomain(field, point))


@dataclass
class SbpDpTable:
    """The table ``w(v, u, i)`` of realizable-path weights of a nop-free SBP.

    Only even lengths are stored (odd entries vanish) and only entries backed
    by at least one realizable path are present; ``value`` fills the rest with
    zero.  ``mul_count`` is the number of domain multiplications performed.
    """

    program: Sbp
    domain: object
    max_len: int
    rows: dict = dc_field(default_factory=dict)  # i -> {v: {u: value}}
    mul_count: int = 0

    def value(self, v: int, u: int, i: int):
        if i % 2 or i > self.max_len:
            return self.domain.zero
        return self.rows.get(i, {}).get(v, {}).get(u, self.domain.zero)

    def total(self, v: int, u: int):
        acc = None
        for i in range(0, self.max_len + 1, 2):
            x = self.rows[i].get(v, {}).get(u)
            if x is not None:
                acc = x if acc is None else self.domain.add(acc, x)
        return self.domain.zero if acc is None else acc


def sbp_dp_table(g: Sbp, domain) -> SbpDpTable:
    """Fill ``w(v, u, i)`` for a nop-free acyclic SBP.

    ``w(v, v, 0) = 1``; for even ``i >= 2``::

        w(v, u, i) = sum  w(va) * w(a, b, j) * w(bc) * w(c, u, i - j - 2)

    over push edges ``va`` and pop edges ``bc`` with the same symbol and even
    ``j <= i - 2``.  The inner factor ``w(va) w(a, b, j) w(bc)`` is the weight
    of a matched block from ``v`` to ``c`` of length ``j + 2`` and is
    tabulated once per length.
    """
    if any(e.op.kind == "nop" for e in g.edges):
        raise ProgramError("the length DP needs a nop-free SBP; apply remove_nops first")
    n = g.n_vertices
    max_len = (n - 1) - (n - 1) % 2
    table = SbpDpTable(g, domain, max_len)
    add, mul = domain.add, domain.mul

    push_out = defaultdict(list)  # v -> [(a, symbol, weight)]
    pops = defaultdict(list)      # (b, symbol) -> [(c, weight)]
    for e in g.edges:
        w = domain.weight(e.weight)
        if e.op.kind == "push":
            push_out[e.src].append((e.dst, e.op.symbol, w))
        else:
            pops[(e.src, e.op.symbol)].append((e.dst, w))

    rows = table.rows
    rows[0] = {v: {v: domain.one} for v in range(n)}
    blocks: dict[int, dict] = {}  # block length k -> {v: {c: value}}
    muls = 0
    for i in range(2, max_len + 1, 2):
        # matched blocks of length i: push, realizable path of length i - 2, pop
        block: dict = {}
        inner = rows[i - 2]
        for v, outs in push_out.items():
            acc: dict = {}
            for a, s, wp in outs:
                for b, x in inner.get(a, {}).items():
                    targets = pops.get((b, s))
                    if not targets:
                        continue
                    left = mul(wp, x)
                    muls += 1
                    for c, wq in targets:
                        term = mul(left, wq)
                        muls += 1
                        prev = acc.get(c)
                        acc[c] = term if prev is None else add(prev, term)
            if acc:
                block[v] = acc
        if block:
            blocks[i] = block

        row: dict = {}
        for k, blk in blocks.items():
            rest = rows[i - k]
            for v, heads in blk.items():
                acc = row.get(v)
                for c, x in heads.items():
                    tails = rest.get(c)
                    if not tails:
                        continue
                    if acc is None:
                        acc = row[v] = {}
                    for u, y in tails.items():
                        term = mul(x, y)
                        muls += 1
                        prev = acc.get(u)
                        acc[u] = term if prev is None else add(prev, term)
        rows[i] = row
    table.mul_count = muls
    return table


def eval_sbp_domain(g: Sbp, domain):
    from .transforms import remove_nops
    h = remove_nops(g) if any(e.op.kind == "nop" for e in g.edges) else g
    return sbp_dp_table(h, domain).total(h.source, h.sink)


def eval_sbp(g: Sbp, point: Sequence, field: Field = DEFAULT_FIELD):
    """Value of ``g`` at ``point``: nop removal, then the length DP, summing ``w(s, t, i)``."""
    return eval_sbp_domain(g, FieldDomain(field, point))


def eval_relaxed_domain(g: RelaxedSbp, m: int, domain):
    from .transforms import unwind
    if m < 0:
        raise ValueError("walk length must be non-negative")
    if m == 0:
        return domain.one if g.source == g.sink else domain.zero
    return eval_sbp_domain(unwind(g, m), domain)


def eval_relaxed(g: RelaxedSbp, m: int, point: Sequence, field: Field = DEFAULT_FIELD):
    """Sum over realizable source-sink walks of exactly ``m`` edges, via unwinding."""
    return eval_relaxed_domain(g, m, FieldDomain(field, point))


def _apply_ram(state: tuple, op) -> tuple | None:
    if op.kind == "nop":
        return state
    counts = dict(state)
    if op.kind == "write":
        counts[op.symbol] = counts.get(op.symbol, 0) + 1
    else:
        have = counts.get(op.symbol, 0)
        if have == 0:
            return None
        if have == 1:
            del counts[op.symbol]
        else:
            counts[op.symbol] = have - 1
    return tuple(sorted(counts.items()))


def _apply_stack(stack: tuple, op) -> tuple | None:
    if op.kind == "push":
        return stack + (op.symbol,)
    if op.kind == "pop":
        if not stack or stack[-1] != op.symbol:
            return None
        return stack[:-1]
    return stack


def _ram_size(state: tuple) -> int:
    return sum(c for _, c in state)


def _config_dp(g: BranchingProgram, domain, step, size, state_budget: int):
    """Forward DP over ``(vertex, memory)`` configurations in topological order.

    ``step(memory, op)`` gives the next memory or ``None``; ``size(memory)``
    is the number of stored symbols.  A configuration at ``v`` holding ``h``
    symbols is dropped unless some path from ``v`` to the sink removes
    exactly ``h`` more symbols than it stores, which is necessary for the
    memory to end empty.
    """
    low, high = _net_removal_range(g)
    states: dict[int, dict] = {g.source: {(): domain.one}}
    seen = 1
    for v in g.order:
        here = states.pop(v, None)
        if not here:
            continue
        if v == g.sink:
            states[v] = here
            continue
        for k in g.out_edges[v]:
            e = g.edges[k]
            lo, hi = low[e.dst], high[e.dst]
            if lo is None:
                continue
            w = domain.weight(e.weight)
            bucket = states.setdefault(e.dst, {})
            for mem, x in here.items():
                new = step(mem, e.op)
                if new is None or not lo <= size(new) <= hi:
                    continue
                term = domain.mul(x, w)
                prev = bucket.get(new)
                if prev is None:
                    seen += 1
                    if seen > state_budget:
                        raise BudgetExceeded(f"more than {state_budget} memory states")
                    bucket[new] = term
                else:
                    bucket[new] = domain.add(prev, term)
    return states.get(g.sink, {}).get((), domain.zero)


def eval_sbp_configs_domain(g: Sbp, domain, state_budget: int = 10**6):
    """Forward DP over ``(vertex, stack)`` pairs; exact, but the number of stacks may blow up.

    Much cheaper than the length DP on long layered programs such as the
    output of the width-2 reduction, where few stacks reach each vertex.
    """
    return _config_dp(g, domain, _apply_stack, len, state_budget)


def eval_sbp_fast_domain(g: Sbp, domain, state_budget: int = 10**6):
    """The configuration DP, falling back to the length DP once the state budget runs out."""
    try:
        return eval_sbp_configs_domain(g, domain, state_budget)
    except BudgetExceeded:
        return eval_sbp_domain(g, domain)


def eval_rabp_domain(g: Rabp, domain, state_budget: int = 10**6):
    """Forward DP over ``(vertex, memory multiset)`` pairs in topological order.

    A memory state is the sorted tuple of ``(symbol, count)`` pairs.
    """
    return _config_dp(g, domain, _apply_ram, _ram_size, state_budget)


_NET = {"pop": 1, "delete": 1, "push": -1, "write": -1, "nop": 0}


def _net_removal_range(g: BranchingProgram) -> tuple[list, list]:
    """Least and greatest (removals - insertions) over the paths from each vertex to the sink.

    ``None`` marks vertices that cannot reach the sink.
    """
    low: list = [None] * g.n_vertices
    high: list = [None] * g.n_vertices
    low[g.sink] = high[g.sink] = 0
    for v in reversed(g.order):
        if v == g.sink:
            continue
        for k in g.out_edges[v]:
            e = g.edges[k]
            if low[e.dst] is None:
                continue
            d = _NET[e.op.kind]
            a, b = low[e.dst] + d, high[e.dst] + d
            low[v] = a if low[v] is None else min(low[v], a)
            high[v] = b if high[v] is None else max(high[v], b)
    return low, high


def eval_rabp(g: Rabp, point: Sequence, field: Field = DEFAULT_FIELD, state_budget: int = 10**6):
    return eval_rabp_domain(g, FieldDomain(field, point), state_budget)
