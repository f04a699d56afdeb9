"""Stack branching programs, arithmetic circuits and the constructions between them."""

from .algebra import (DEFAULT_FIELD, MERSENNE_61, BatchDomain, BudgetExceeded, FieldDomain, PitResult, PolyDomain,
                      PrimeField, RationalField, SparsePoly, Var, field_ops, pit_equal, poly_expand_small,
                      random_points)
from .circuits import (Circuit, CircuitBuilder, CircuitError, Input, Prod, Sum, circuit_stats, eval_circuit,
                       is_multiplicatively_disjoint, is_skew, random_md_circuit)
from .depth import (DepthReport, GapDescription, PathDescription, decompose_oracle, decompositions, depth_reduce,
                    stack_height)
from .evaluators import eval_abp, eval_rabp, eval_relaxed, eval_sbp, sbp_dp_table
from .hardness import (SimpleGraph, build_dsp_rabp, dsp_oracle, nonisomorphic_graphs, random_graph, vcp_oracle,
                       vcp_via_dsp)
from .programs import (NOP, Abp, Edge, Op, ProgramError, Rabp, RelaxedSbp, Sbp, delete, enumerate_realizable_paths,
                       enumerate_realizable_walks, pop, push, random_abp, random_rabp, random_relaxed_sbp,
                       random_sbp, ram_seq_realizable, stack_seq_realizable, width_of, write)
from .transforms import (CompileTrace, SizeReport, abp_to_one_symbol_sbp, circuit_to_relaxed, circuit_to_sbp,
                         one_symbol_to_abp, remove_nops, sbp_to_circuit, unwind, width2_reduce)

__version__ = "0.1.0"
