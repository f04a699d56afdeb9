"""Dominating sets counted by a random access branching program.

The program writes the closed neighbourhood of every chosen vertex into
memory and then deletes each vertex one or more times; memory is empty at
the end exactly when the chosen set dominates the graph.
"""

from membp import (SimpleGraph, Var, build_dsp_rabp, dsp_oracle, enumerate_realizable_paths, eval_rabp,
                   vcp_oracle, vcp_via_dsp, width_of)

path = SimpleGraph(4, ((0, 1), (1, 2), (2, 3)))
rabp = build_dsp_rabp(path)
print(f"program: {rabp.n_vertices} vertices, width {width_of(rabp)}")

for p in enumerate_realizable_paths(rabp):
    chosen = sorted(w.index - 1 for w in p.weights if isinstance(w, Var))
    print("  dominating set", chosen)

point = [2, 3, 5, 7]
print("program:", eval_rabp(rabp, point), " oracle:", dsp_oracle(path, point))

# Vertex covers become dominating sets once every edge gets a private
# neighbour whose variable is set to zero.
bigger, projection = vcp_via_dsp(path)
print("reduction graph:", bigger.n, "vertices; projection", projection.to_json())
print("projected DSP:", dsp_oracle(bigger, projection.apply(point)), " VCP:", vcp_oracle(path, point))

# An isolated vertex needs the extra hub and pendant.
lonely = SimpleGraph(3, ((0, 1),))
bigger, projection = vcp_via_dsp(lonely)
print("with an isolated vertex:", dsp_oracle(bigger, projection.apply([2, 3, 5])), "=", vcp_oracle(lonely, [2, 3, 5]))
