"""JSON interchange documents for circuits, programs and graphs.

A document carries a header (``kind``, ``version``, ``field``, ``n_vars``)
and an explicit body.  The structure is described by
``interchange.schema.json`` next to this module; :func:`loads` checks a
document against it and then against the semantic rules of the declared
kind, reporting the offending field path.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

import jsonschema

from .algebra import DEFAULT_FIELD, Field, Var, field_from_json, format_constant, parse_constant
from .circuits import Circuit, CircuitError, Input, Prod, Sum
from .hardness import SimpleGraph
from .programs import PROGRAM_KINDS, BranchingProgram, Edge, ProgramError, parse_op

VERSION = 1


class FormatError(ValueError):
    """A document that does not follow the interchange format."""


def schema() -> dict:
    return json.loads(resources.files("membp").joinpath("interchange.schema.json").read_text())


_VALIDATOR = None


def _validator():
    global _VALIDATOR
    if _VALIDATOR is None:
        _VALIDATOR = jsonschema.Draft202012Validator(schema())
    return _VALIDATOR


def _weight_doc(w) -> dict:
    if isinstance(w, Var):
        return {"var": w.index}
    return {"const": format_constant(w)}


def _weight_obj(doc: dict):
    if "var" in doc:
        return Var(doc["var"])
    return parse_constant(doc["const"])


def to_doc(obj, field: Field = DEFAULT_FIELD) -> dict:
    head = {"kind": None, "version": VERSION, "field": field.to_json(), "n_vars": obj.max_var()}
    if isinstance(obj, Circuit):
        head["kind"] = "circuit"
        gates = []
        for k, g in enumerate(obj.gates):
            if isinstance(g, Input):
                gates.append({"id": k, "type": "input", "label": _weight_doc(g.label)})
            else:
                gates.append({"id": k, "type": "prod" if isinstance(g, Prod) else "sum",
                              "children": list(g.children)})
        head.update(semi_unbounded=obj.semi_unbounded, gates=gates, output=obj.output)
    elif isinstance(obj, BranchingProgram):
        head["kind"] = obj.kind
        head.update(vertices=obj.n_vertices, source=obj.source, sink=obj.sink, symbols=list(obj.symbols))
        if obj.layers is not None:
            head["layers"] = list(obj.layers)
        head["edges"] = [{"id": k, "from": e.src, "to": e.dst, "weight": _weight_doc(e.weight),
                          "op": obj.op_name(e.op)} for k, e in enumerate(obj.edges)]
    elif isinstance(obj, SimpleGraph):
        head.update(kind="graph", vertices=obj.n, edges=[list(e) for e in obj.edges])
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")
    return head


def dumps(obj, field: Field = DEFAULT_FIELD) -> str:
    return json.dumps(to_doc(obj, field), indent=1) + "\n"


def _path(err) -> str:
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def from_doc(doc) -> tuple[object, Field]:
    errors = sorted(_validator().iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        raise FormatError(f"field {_path(err)}: {err.message}")
    field = field_from_json(doc["field"])
    kind = doc["kind"]
    try:
        if kind == "circuit":
            obj = _circuit_from_doc(doc)
        elif kind == "graph":
            obj = SimpleGraph(doc["vertices"], tuple(tuple(e) for e in doc["edges"]))
        else:
            obj = _program_from_doc(doc)
    except (CircuitError, ProgramError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(str(exc)) from None
    if obj.max_var() > doc["n_vars"]:
        raise FormatError(f"field n_vars: declared {doc['n_vars']} but X{obj.max_var()} is used")
    return obj, field


def _circuit_from_doc(doc: dict) -> Circuit:
    gates = []
    for k, g in enumerate(doc["gates"]):
        where = f"field gates/{k}"
        if g["id"] != k:
            raise FormatError(f"{where}/id: gates must be listed in id order, expected {k}")
        if g["type"] == "input":
            if "label" not in g or "children" in g:
                raise FormatError(f"{where}: an input gate has a label and no children")
            gates.append(Input(_weight_obj(g["label"])))
            continue
        if "children" not in g or "label" in g:
            raise FormatError(f"{where}: a {g['type']} gate has children and no label")
        kids = g["children"]
        if g["type"] == "prod":
            if len(kids) != 2:
                raise FormatError(f"{where}/children: a product gate has exactly two children")
            gates.append(Prod(*kids))
        else:
            gates.append(Sum(*kids))
    return Circuit(tuple(gates), doc["output"], doc.get("semi_unbounded", False))


def _program_from_doc(doc: dict) -> BranchingProgram:
    cls = PROGRAM_KINDS[doc["kind"]]
    table = list(doc["symbols"])
    if len(set(table)) != len(table):
        raise FormatError("field symbols: duplicate names")
    edges = []
    for k, e in enumerate(doc["edges"]):
        where = f"field edges/{k}"
        if e["id"] != k:
            raise FormatError(f"{where}/id: edges must be listed in id order, expected {k}")
        op = parse_op(e["op"], table)
        if len(table) != len(doc["symbols"]):
            raise FormatError(f"{where}/op: symbol {table[-1]!r} is not declared")
        if op.kind not in cls.allowed_ops:
            raise FormatError(f"{where}/op: {e['op']!r} is not allowed in {cls.kind}")
        edges.append(Edge(e["from"], e["to"], _weight_obj(e["weight"]), op))
    layers = doc.get("layers")
    return cls(doc["vertices"], tuple(edges), doc["source"], doc["sink"], tuple(table),
               None if layers is None else tuple(layers))


def loads(text: str) -> tuple[object, Field]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return from_doc(doc)


def parse_graph_text(text: str) -> SimpleGraph:
    """Edge-list text: the vertex count on the first line, then one ``u v`` pair per line.

    Blank lines and ``#`` comments are ignored.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise FormatError("empty graph description")
    lineno, head = rows[0]
    try:
        n = int(head[0])
        if len(head) != 1:
            raise ValueError
    except ValueError:
        raise FormatError(f"line {lineno}: expected the vertex count") from None
    edges = []
    for lineno, parts in rows[1:]:
        try:
            u, v = (int(x) for x in parts)
        except ValueError:
            raise FormatError(f"line {lineno}: expected two vertex ids") from None
        edges.append((u, v))
    try:
        return SimpleGraph(n, tuple(edges))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def load_any(text: str) -> tuple[object, Field]:
    """A JSON document, or a graph in edge-list text form."""
    if text.lstrip().startswith("{"):
        return loads(text)
    return parse_graph_text(text), DEFAULT_FIELD


def constant_text(value, field: Field) -> str:
    """Decimal text of a field element."""
    if isinstance(value, Fraction):
        return format_constant(value)
    return str(value)
