"""Command-line interface.

Exit codes: 0 success (or equal), 1 unequal, 2 usage or format error,
3 budget exceeded.  ``-`` stands for standard input or output, and every
random choice comes from ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import interchange
from .algebra import BudgetExceeded, FieldDomain, PolyDomain, pit_equal, random_points
from .circuits import Circuit, circuit_stats, is_multiplicatively_disjoint, is_skew, random_md_circuit
from .depth import depth_reduce
from .hardness import DspPoly, SimpleGraph, build_dsp_rabp, dominating_sets, random_graph, vcp_via_dsp, vertex_covers
from .interchange import FormatError
from .programs import (Abp, BranchingProgram, Rabp, RelaxedSbp, Sbp, enumerate_realizable_paths,
                       enumerate_realizable_walks, path_sum, random_abp, random_rabp, random_relaxed_sbp,
                       random_sbp, width_of)
from .transforms import (abp_to_one_symbol_sbp, circuit_to_relaxed, circuit_to_sbp, one_symbol_to_abp,
                         remove_nops, sbp_to_circuit, size_report, unwind, width2_reduce)

EXIT_OK, EXIT_UNEQUAL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load(path: str):
    return interchange.load_any(_read(path))


def _expect(obj, *types, what: str):
    if not isinstance(obj, types):
        raise UsageError(f"{what} expects {' or '.join(t.__name__ for t in types)}, got {type(obj).__name__}")


def _report(data: dict):
    sys.stderr.write(json.dumps(data, sort_keys=True) + "\n")


def _dump_json(data) -> str:
    return json.dumps(data, indent=1) + "\n"


# -- subcommands ------------------------------------------------------------


def cmd_gen(args) -> int:
    s = args.seed
    if args.kind == "circuit":
        obj = random_md_circuit(args.vars, args.gates, s)
    elif args.kind == "sbp":
        obj = random_sbp(args.vertices, args.vars, args.symbols, s, nop_prob=args.nop_prob)
    elif args.kind == "abp":
        obj = random_abp(args.vertices, args.vars, s)
    elif args.kind == "relaxed-sbp":
        obj = random_relaxed_sbp(args.vertices, args.vars, args.symbols, s)
    elif args.kind == "rabp":
        obj = random_rabp(args.vertices, args.vars, args.symbols, s)
    else:
        obj = random_graph(args.vertices, args.edge_prob, s)
    _write(args.output, interchange.dumps(obj))
    return EXIT_OK


def _parse_point(text: str, field) -> list:
    if not text:
        return []
    try:
        return [field.element(x) for x in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad point {text!r}") from None


def _evaluable(obj, m: int | None):
    if isinstance(obj, RelaxedSbp):
        if m is None:
            raise UsageError("a relaxed SBP needs --m")
        return obj.at_length(m)
    if isinstance(obj, SimpleGraph):
        return DspPoly(obj)
    return obj


def cmd_eval(args) -> int:
    obj, field = _load(args.input)
    if args.point is not None:
        point = _parse_point(args.point, field)
    else:
        point = random_points(obj.max_var(), 1, args.seed, field)[0]
    if len(point) < obj.max_var():
        raise UsageError(f"the point needs {obj.max_var()} coordinates")
    domain = FieldDomain(field, point)
    value = _evaluable(obj, args.m).evaluate(domain)
    out = {"kind": _stats(obj)["kind"],
           "point": [interchange.constant_text(x, field) for x in domain.point],
           "value": interchange.constant_text(value, field)}
    _write(args.output, _dump_json(out))
    return EXIT_OK


TRANSFORMS = ("remove-nops", "unwind", "one-symbol-to-abp", "abp-to-sbp", "width2")


def cmd_transform(args) -> int:
    obj, field = _load(args.input)
    name = args.name
    params = {}
    if name == "remove-nops":
        _expect(obj, Sbp, what=name)
        out = remove_nops(obj)
    elif name == "unwind":
        _expect(obj, RelaxedSbp, Sbp, what=name)
        if args.m is None:
            raise UsageError("unwind needs --m")
        out = unwind(obj, args.m)
        params["m"] = args.m
    elif name == "one-symbol-to-abp":
        _expect(obj, Sbp, what=name)
        out = one_symbol_to_abp(obj)
    elif name == "abp-to-sbp":
        _expect(obj, Abp, what=name)
        out = abp_to_one_symbol_sbp(obj)
    else:
        _expect(obj, Sbp, what=name)
        out = width2_reduce(obj)
    if name != "width2":
        _report(size_report(name, obj, out, **params).to_json())
    else:
        _report({"transform": name, "input_size": obj.size, "output_size": out.size, "width": width_of(out)})
    _write(args.output, interchange.dumps(out, field))
    return EXIT_OK


def cmd_compile(args) -> int:
    obj, field = _load(args.input)
    _expect(obj, Circuit, what="compile")
    if not is_multiplicatively_disjoint(obj):
        raise UsageError("compile needs a multiplicatively disjoint circuit")
    relaxed, trace = circuit_to_relaxed(obj)
    m = trace[obj.output].m
    out = relaxed if args.relaxed else circuit_to_sbp(obj)
    _report({"transform": "compile", "circuit_size": obj.size, "relaxed_size": relaxed.size,
             "relaxed_bound": trace.size_bound, "walk_length": m, "output_size": out.size})
    _write(args.output, interchange.dumps(out, field))
    return EXIT_OK


def cmd_extract(args) -> int:
    obj, field = _load(args.input)
    _expect(obj, Sbp, what="extract")
    out = sbp_to_circuit(obj)
    _report(size_report("extract", obj, out).to_json())
    _write(args.output, interchange.dumps(out, field))
    return EXIT_OK


def cmd_depth_reduce(args) -> int:
    obj, field = _load(args.input)
    _expect(obj, Sbp, what="depth-reduce")
    out, report = depth_reduce(obj)
    _report(report.to_json())
    _write(args.output, interchange.dumps(out, field))
    return EXIT_OK


def cmd_hardness(args) -> int:
    obj, field = _load(args.input)
    _expect(obj, SimpleGraph, what=f"hardness {args.task}")
    if args.task == "dsp-build":
        _write(args.output, interchange.dumps(build_dsp_rabp(obj), field))
    else:
        g2, proj = vcp_via_dsp(obj)
        doc = interchange.to_doc(g2, field)
        doc["projection"] = proj.to_json()
        _write(args.output, _dump_json(doc))
    return EXIT_OK


def _stats(obj) -> dict:
    if isinstance(obj, Circuit):
        st = circuit_stats(obj)
        return {"kind": "circuit", "size": st.size, "depth": st.depth, "degree": st.formal_degree,
                "multiplicatively_disjoint": is_multiplicatively_disjoint(obj), "skew": is_skew(obj),
                "semi_unbounded": obj.semi_unbounded, "n_vars": obj.max_var()}
    if isinstance(obj, SimpleGraph):
        return {"kind": "graph", "vertices": obj.n, "edges": len(obj.edges)}
    out = {"kind": obj.kind, "vertices": obj.n_vertices, "edges": len(obj.edges), "symbols": len(obj.symbols),
           "n_vars": obj.max_var(), "layered": obj.layers is not None}
    if obj.layers is not None:
        out["width"] = width_of(obj)
    return out


def cmd_stat(args) -> int:
    obj, _ = _load(args.input)
    _write(args.output, _dump_json(_stats(obj)))
    return EXIT_OK


def cmd_check_equiv(args) -> int:
    if args.left == "-" and args.right == "-":
        raise UsageError("only one side can be read from standard input")
    a, field = _load(args.left)
    b, _ = _load(args.right)
    fa, fb = _evaluable(a, args.m), _evaluable(b, args.m)
    n_vars = max(a.max_var(), b.max_var())
    res = pit_equal(fa, fb, trials=args.trials, seed=args.seed, field=field, n_vars=n_vars)
    report = {"verdict": res.verdict, "trials": res.trials, "seed": res.seed,
              "left": _stats(a), "right": _stats(b)}
    if not res.equal:
        report["witness"] = [interchange.constant_text(x, field) for x in res.witness]
        report["values"] = [interchange.constant_text(x, field) for x in res.values]
    _write(args.output, _dump_json(report))
    return EXIT_OK if res.equal else EXIT_UNEQUAL


def cmd_oracle(args) -> int:
    obj, field = _load(args.input)
    domain = PolyDomain(field, args.max_terms)
    if args.name == "paths":
        _expect(obj, Abp, Sbp, Rabp, what="oracle paths")
        items = enumerate_realizable_paths(obj, args.max_count)
        poly = path_sum(items, domain)
    elif args.name == "walks":
        _expect(obj, RelaxedSbp, Sbp, what="oracle walks")
        if args.m is None:
            raise UsageError("oracle walks needs --m")
        items = enumerate_realizable_walks(obj, args.m, args.max_count)
        poly = path_sum(items, domain)
    else:
        _expect(obj, SimpleGraph, what=f"oracle {args.name}")
        items = dominating_sets(obj) if args.name == "dsp" else vertex_covers(obj)
        poly = DspPoly(obj, cover=args.name == "vcp").evaluate(domain)
    _write(args.output, _dump_json({"oracle": args.name, "count": len(items), "polynomial": repr(poly)}))
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="membp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, input_arg=True):
        p = sub.add_parser(name, help=help_text)
        if input_arg:
            p.add_argument("input", help="input document, - for stdin")
        p.add_argument("-o", "--output", default="-", help="output file, - for stdout")
        p.set_defaults(func=func)
        return p

    p = add("gen", cmd_gen, "generate a seeded random instance", input_arg=False)
    p.add_argument("kind", choices=["circuit", "abp", "sbp", "relaxed-sbp", "rabp", "graph"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vertices", type=int, default=8)
    p.add_argument("--gates", type=int, default=12)
    p.add_argument("--vars", type=int, default=3)
    p.add_argument("--symbols", type=int, default=2)
    p.add_argument("--nop-prob", type=float, default=0.2)
    p.add_argument("--edge-prob", type=float, default=0.5)

    p = add("eval", cmd_eval, "evaluate a document at a point")
    p.add_argument("--point", help="comma separated values, e.g. 1,2,3/4")
    p.add_argument("--seed", type=int, default=0, help="draw the point at random when --point is absent")
    p.add_argument("--m", type=int, help="walk length for relaxed SBPs")

    p = sub.add_parser("transform", help="apply a structural transform")
    p.add_argument("name", choices=TRANSFORMS)
    p.add_argument("input")
    p.add_argument("--m", type=int, help="walk length for unwind")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_transform)

    p = add("compile", cmd_compile, "multiplicatively disjoint circuit to SBP")
    p.add_argument("--relaxed", action="store_true", help="emit the relaxed SBP instead of its unwinding")
    add("extract", cmd_extract, "SBP to circuit")
    add("depth-reduce", cmd_depth_reduce, "SBP to a logarithmic-depth semi-unbounded circuit")

    p = sub.add_parser("hardness", help="dominating-set and vertex-cover constructions")
    p.add_argument("task", choices=["dsp-build", "vcp-reduce"])
    p.add_argument("input", help="graph as JSON or edge-list text")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_hardness)

    p = sub.add_parser("check-equiv", help="randomised identity test of two documents")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, help="walk length for relaxed SBPs")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_check_equiv)

    p = sub.add_parser("oracle", help="brute-force enumerators")
    p.add_argument("name", choices=["paths", "walks", "dsp", "vcp"])
    p.add_argument("input")
    p.add_argument("--m", type=int)
    p.add_argument("--max-count", type=int, default=100_000)
    p.add_argument("--max-terms", type=int, default=10_000)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_oracle)

    add("stat", cmd_stat, "size, width and depth of a document")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, FormatError) as exc:
        sys.stderr.write(f"membp {args.command}: {exc}\n")
        return EXIT_USAGE
    except BudgetExceeded as exc:
        sys.stderr.write(f"membp {args.command}: budget exceeded: {exc}\n")
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
