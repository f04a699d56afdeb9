"""From a random circuit to a width-2 stack program over the bits {0, 1}.

Each step is checked against the previous one by random evaluation.
"""

from membp import (circuit_to_relaxed, circuit_to_sbp, pit_equal, random_md_circuit, width2_reduce, width_of)
from membp.circuits import circuit_stats

c = random_md_circuit(n_vars=3, n_gates=9, seed=4)
st = circuit_stats(c)
print(f"circuit: {st.size} gates, depth {st.depth}, degree {st.formal_degree}")

relaxed, trace = circuit_to_relaxed(c)
root = trace[c.output]
print(f"relaxed program: {relaxed.n_vertices} vertices (bound {trace.size_bound}), walk length {root.m}")
for rec in trace.records:
    print(f"  gate {rec.gate:2d}: m = {rec.m:3d}  <= 4*|C_v| = {4 * rec.subcircuit_size}")

g = circuit_to_sbp(c)
print(f"unwound program: {g.n_vertices} vertices, {len(g.edges)} edges")
print("circuit vs program:", pit_equal(c, g).verdict)

narrow = width2_reduce(g)
print(f"width-2 program: {narrow.n_vertices} vertices, width {width_of(narrow)}, symbols {narrow.symbols}")
print("program vs width-2 program:", pit_equal(g, narrow, trials=10).verdict)
