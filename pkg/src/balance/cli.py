"""Command-line front end. Every command prints one JSON report on stdout.

Exit codes: 0 when the question was decided, 2 when the answer is unknown,
1 on bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import bilinear, groups
from .classify import PreconditionError, anchors, classify, is_borderless, is_net
from .decompose import decompose_borderless, decompose_net
from .figures import fixtures
from .graph import (Graph, GraphError, ParseError, WeightedGraph, format_graph, format_weighted, load_graph)
from .label import (Labeled, LabelingError, NoSolution, OracleExhaustion, Unknown, label_general,
                    label_pinned, verify_labeling)
from .oracle import BudgetExceeded, Labeled as OracleLabeled, oracle_count, oracle_solve
from .ring import RingError, RingSpec

EXIT_DECIDED, EXIT_INPUT, EXIT_UNKNOWN = 0, 1, 2


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _load(path: str, ring: Optional[str] = None):
    text = _read(path)
    try:
        g = load_graph(text)
    except ParseError as exc:
        raise InputError(f"{path}:{exc.line}:{exc.column}: {exc.message}") from exc
    except (GraphError, RingError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    if ring is not None:
        try:
            spec = RingSpec.parse(ring)
        except RingError as exc:
            raise InputError(f"--ring: {exc}") from exc
        if not isinstance(g, WeightedGraph):
            raise InputError(f"{path}: graph has no weights")
        g = WeightedGraph.build(spec, {e: int(w) for e, w in g.weight.items()}, g.base.n)
    return g, hashlib.sha256(text.encode()).hexdigest()


def _weighted(path: str, ring: Optional[str]):
    g, digest = _load(path, ring)
    if not isinstance(g, WeightedGraph):
        raise InputError(f"{path}: a weighted graph with a 'ring' line is required")
    return g, digest


def _labeling_json(lab) -> dict:
    return {str(v): [x.value, y.value] for v, (x, y) in sorted(lab.items())}


def _certificate_json(cert) -> object:
    if hasattr(cert, "as_dict"):
        return cert.as_dict()
    if isinstance(cert, tuple):
        return [_certificate_json(c) for c in cert]
    return cert


def _outcome(wg: WeightedGraph, out) -> tuple:
    if isinstance(out, Labeled):
        return {"outcome": "Labeled", "route": out.route, "labeling": _labeling_json(out.labeling),
                "verified": verify_labeling(wg, out.labeling)}, EXIT_DECIDED
    if isinstance(out, NoSolution):
        return {"outcome": "NoSolution", "route": out.route,
                "certificate": _certificate_json(out.certificate)}, EXIT_DECIDED
    return {"outcome": "Unknown", "route": out.route, "reason": out.reason}, EXIT_UNKNOWN


def _pin(text: str):
    try:
        v, ab = text.split("=")
        a, b = ab.split(",")
        return int(v), int(a), int(b)
    except ValueError as exc:
        raise InputError(f"--pin expects v=a,b, got {text!r}") from exc


def _ints(text: str, flag: str) -> List[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise InputError(f"{flag} expects comma-separated integers, got {text!r}") from exc


# ---------------------------------------------------------------- commands

def cmd_classify(args):
    g, digest = _load(args.file)
    return classify(g, args.budget), digest, EXIT_DECIDED


def cmd_decompose(args):
    g, digest = _load(args.file)
    base = g.base if isinstance(g, WeightedGraph) else g
    if not base.is_connected():
        raise InputError(f"{args.file}: graph is not connected")
    out = {}
    if is_borderless(base)[0]:
        dec = decompose_borderless(base)
        out["borderless"] = {"steps": len(dec), "first": {"kind": dec.first.kind, "edges": sorted(map(list, dec.first.edges))},
                             "glued": [{"kind": pc.kind, "edges": sorted(map(list, pc.edges)), "at": v}
                                       for pc, v in dec.steps]}
    if is_net(base):
        anchor = _ints(args.anchor, "--anchor") if args.anchor else None
        try:
            dec = decompose_net(base, anchor)
        except PreconditionError as exc:
            raise InputError(str(exc)) from exc
        out["net"] = {"steps": len(dec), "base_cycle": list(dec.base), "segments": [list(s) for s in dec.segments]}
    if not out:
        out["note"] = "graph is neither borderless nor a net"
    return out, digest, EXIT_DECIDED


def cmd_label(args):
    wg, digest = _weighted(args.file, args.ring)
    if args.pin:
        v, a, b = _pin(args.pin)
        if v not in wg.base.vertex_set:
            raise InputError(f"--pin: vertex {v} is not in the graph")
        out = label_pinned(wg, v, a, b, args.budget)
    else:
        out = label_general(wg, oracle_fallback=args.oracle_fallback, oracle_budget=args.budget)
    payload, code = _outcome(wg, out)
    return payload, digest, code


def cmd_oracle(args):
    wg, digest = _weighted(args.file, args.ring)
    if args.count:
        res = oracle_count(wg, args.budget)
        if isinstance(res, BudgetExceeded):
            return {"outcome": "BudgetExceeded", "budget": res.budget}, digest, EXIT_UNKNOWN
        return {"outcome": "Count", "count": res}, digest, EXIT_DECIDED
    res = oracle_solve(wg, args.budget)
    if isinstance(res, OracleLabeled):
        return {"outcome": "Labeled", "labeling": _labeling_json(res.labeling),
                "verified": verify_labeling(wg, res.labeling)}, digest, EXIT_DECIDED
    if isinstance(res, BudgetExceeded):
        return {"outcome": "BudgetExceeded", "budget": res.budget}, digest, EXIT_UNKNOWN
    return {"outcome": "Unsolvable", "nodes": res.nodes}, digest, EXIT_DECIDED


def _presentation(args):
    g, digest = _load(args.graph)
    base = g.base if isinstance(g, WeightedGraph) else g
    try:
        return groups.group_from_graph(base, args.p, args.r), digest
    except groups.GroupError as exc:
        raise InputError(str(exc)) from exc


def _element_json(x: groups.GroupElement) -> dict:
    return {"gen_exponents": list(x.gen_exponents), "central_exponents": list(x.central_exponents)}


def cmd_group(args):
    pres, digest = _presentation(args)
    edges = [list(e) for e in pres.edge_basis()]
    if args.action == "build":
        out = {"presentation": pres.to_json(), "edge_order": edges,
               "sizes": groups.formula_sizes(pres.graph, pres.p, pres.r)}
        return out, digest, EXIT_DECIDED
    if args.action == "kcheck":
        res = groups.full_image_check(pres, args.budget)
        if isinstance(res, groups.GroupUnknown):
            return {"kg_equals_derived": None, "reason": res.reason, "edge_order": edges}, digest, EXIT_UNKNOWN
        if res is True:
            return {"kg_equals_derived": True, "edge_order": edges}, digest, EXIT_DECIDED
        return {"kg_equals_derived": False, "missing": list(res.target), "edge_order": edges,
                "certificate": _certificate_json(res.certificate)}, digest, EXIT_DECIDED
    if not args.target:
        raise InputError("group decide needs --target")
    vec = _ints(args.target, "--target")
    if len(vec) != len(edges):
        raise InputError(f"--target needs {len(edges)} entries (edge order {edges})")
    tgt = pres.central(vec)
    res = groups.decide_commutator(pres, tgt, args.budget)
    if isinstance(res, groups.Witness):
        ok = groups.commutator(res.g, res.h) == tgt
        return {"outcome": "Witness", "route": res.route, "g": _element_json(res.g), "h": _element_json(res.h),
                "verified": ok, "edge_order": edges}, digest, EXIT_DECIDED
    if isinstance(res, groups.NotACommutator):
        return {"outcome": "NotACommutator", "route": res.route, "certificate": _certificate_json(res.certificate),
                "edge_order": edges}, digest, EXIT_DECIDED
    return {"outcome": "Unknown", "reason": res.reason}, digest, EXIT_UNKNOWN


def cmd_bilinear(args):
    text = _read(args.structure)
    digest = hashlib.sha256(text.encode()).hexdigest()
    try:
        bmap = bilinear.AlternatingMap.from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.structure}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except (KeyError, TypeError) as exc:
        raise InputError(f"{args.structure}: bad structure file: {exc}") from exc
    except bilinear.BilinearError as exc:
        raise InputError(f"{args.structure}: {type(exc).__name__}: {exc}") from exc
    if args.action == "check":
        try:
            res = bilinear.full_image_check(bmap, args.budget)
        except bilinear.BilinearError as exc:
            raise InputError(str(exc)) from exc
        if isinstance(res, bilinear.FullImage):
            return {"full_image": True}, digest, EXIT_DECIDED
        if isinstance(res, bilinear.MissingElement):
            return {"full_image": False, "missing": list(res.w),
                    "certificate": _certificate_json(res.certificate)}, digest, EXIT_DECIDED
        return {"full_image": None, "reason": res.reason}, digest, EXIT_UNKNOWN
    if not args.target:
        raise InputError("bilinear decide needs --target")
    w = _ints(args.target, "--target")
    try:
        res = bilinear.image_membership(bmap, w, args.budget)
    except bilinear.BilinearError as exc:
        raise InputError(str(exc)) from exc
    if isinstance(res, bilinear.Witness):
        ok = bmap.evaluate(res.u, res.v) == tuple(x % bmap.p for x in w)
        return {"outcome": "Witness", "route": res.route, "u": list(res.u), "v": list(res.v),
                "verified": ok}, digest, EXIT_DECIDED
    if isinstance(res, bilinear.NotInImage):
        return {"outcome": "NotInImage", "route": res.route,
                "certificate": _certificate_json(res.certificate)}, digest, EXIT_DECIDED
    return {"outcome": "Unknown", "reason": res.reason}, digest, EXIT_UNKNOWN


def cmd_fixtures(args):
    out = Path(args.directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, g in sorted(fixtures().items()):
        text = format_weighted(g) if isinstance(g, WeightedGraph) else format_graph(g)
        (out / name).write_text(text)
        written.append(name)
    return {"directory": str(out), "written": written}, None, EXIT_DECIDED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="balance", description="Balance equations, commutators and bilinear images.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="structural report for a graph")
    p.add_argument("file")
    p.add_argument("--budget", type=int, default=10**6, help="cycle enumeration budget")
    p.set_defaults(run=cmd_classify)

    p = sub.add_parser("decompose", help="borderless and net decompositions")
    p.add_argument("file")
    p.add_argument("--anchor", help="comma-separated anchor vertices for the net decomposition")
    p.set_defaults(run=cmd_decompose)

    for name, run in (("label", cmd_label), ("oracle", cmd_oracle)):
        p = sub.add_parser(name, help=f"{name} a weighted graph")
        p.add_argument("file")
        p.add_argument("--ring", help="reinterpret the weights in Z/p^k")
        p.add_argument("--budget", type=int, default=10**7, help="search node budget")
        if name == "label":
            p.add_argument("--pin", help="require vertex v to get the label (a, b): v=a,b")
            p.add_argument("--oracle-fallback", action="store_true")
        else:
            p.add_argument("--count", action="store_true", help="count all consistent labelings")
        p.set_defaults(run=run)

    p = sub.add_parser("group", help="class-2 group built from a graph")
    p.add_argument("action", choices=["build", "kcheck", "decide"])
    p.add_argument("--graph", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--target", help="central exponents, comma-separated, in the reported edge order")
    p.add_argument("--budget", type=int, default=10**6)
    p.set_defaults(run=cmd_group)

    p = sub.add_parser("bilinear", help="image of an alternating bilinear map")
    p.add_argument("action", choices=["decide", "check"])
    p.add_argument("--structure", required=True)
    p.add_argument("--target")
    p.add_argument("--budget", type=int, default=10**7)
    p.set_defaults(run=cmd_bilinear)

    p = sub.add_parser("fixtures", help="write the example graphs")
    p.add_argument("directory")
    p.set_defaults(run=cmd_fixtures)
    return ap


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_DECIDED
    try:
        payload, digest, code = args.run(args)
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except (GraphError, RingError, LabelingError, groups.GroupError, PreconditionError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    report = {"command": [args.command] + ([args.action] if hasattr(args, "action") else []),
              "input_digest": digest, "result": payload}
    json.dump(report, stdout, sort_keys=True, indent=2)
    stdout.write("\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
