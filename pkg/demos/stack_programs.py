"""A small stack branching program, evaluated three ways.

Run with ``python3 demos/stack_programs.py``.
"""

from membp import Sbp, Var, depth_reduce, enumerate_realizable_paths, eval_sbp, pit_equal, sbp_to_circuit
from membp.algebra import PolyDomain, PrimeField

# Two ways to open a bracket and two ways to close it, with a plain step in between.
# Only the paths whose pushes and pops nest properly contribute.
g = Sbp.from_edges([
    (0, 1, Var(1), "push:a"),
    (0, 1, Var(2), "push:b"),
    (1, 2, Var(3), "nop"),
    (2, 3, 1, "pop:a"),
    (2, 3, 2, "pop:b"),
])

print("realizable paths:")
for path in enumerate_realizable_paths(g):
    print("  edges", path.edges, "weights", path.weights)

# As a polynomial: X1*X3 from the a-bracket, 2*X2*X3 from the b-bracket.
print("polynomial:", g.evaluate(PolyDomain(PrimeField())))
print("value at (2, 3, 5):", eval_sbp(g, [2, 3, 5]))

# The dynamic program written out as a circuit, and a shallow version of it.
circuit = sbp_to_circuit(g)
shallow, report = depth_reduce(g)
print("extracted circuit:", circuit.size, "gates")
print("depth-reduced circuit:", report.to_json())
print("identity test:", pit_equal(circuit, shallow).verdict)
