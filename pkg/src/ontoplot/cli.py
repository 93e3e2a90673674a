"""Command-line entry points: stats, render, query, convert, serve."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .compress import COLLAPSE, EXPAND, mark_focus_interest, mark_interest
from .errors import OntoplotError, UnknownClassError, UnknownPropertyError
from .hierarchy import QueryEngine, build_occurrence_tree
from .layout import LayoutConfig, ViewState, layout_for_view
from .model import OntologySnapshot, local_name, summarize, write_native_document
from .owl import load_owl
from .server import make_server
from .svg import render_svg


def _resolve(candidate: str, ids, labels=None, entity: str = "class") -> str:
    """Accept an exact id, or a unique local-name / label match."""
    if candidate in ids:
        return candidate
    matches = sorted({i for i in ids if local_name(i) == candidate})
    if labels and not matches:
        matches = sorted({i for i, lab in labels.items() if lab == candidate})
    if len(matches) == 1:
        return matches[0]
    exc = UnknownClassError if entity == "class" else UnknownPropertyError
    if len(matches) > 1:
        raise exc(f"{candidate} (ambiguous: {', '.join(matches)})")
    raise exc(candidate)


def _resolve_class(snapshot: OntologySnapshot, candidate: str) -> str:
    labels = {c.id: snapshot.label_of(c.id) for c in snapshot.classes}
    return _resolve(candidate, snapshot.class_ids(), labels, "class")


def _resolve_property(snapshot: OntologySnapshot, candidate: str) -> str:
    return _resolve(candidate, snapshot.property_ids(), None, "property")


def _cmd_stats(args) -> int:
    snapshot = load_owl(args.file)
    stats = summarize(snapshot)
    print(f"classes: {stats.class_count}")
    print(f"properties: {stats.property_count}")
    print(f"associations: {stats.association_count}")
    print(f"roots: {stats.root_count}")
    print(f"max depth: {stats.max_depth}")
    if stats.per_property_counts:
        print("associations by property:")
        for pid, count in stats.per_property_counts.items():
            print(f"  {pid}: {count}")
    warnings = snapshot.provenance.warnings
    if warnings:
        print(f"warnings: {len(warnings)}", file=sys.stderr)
    return 0


def _cmd_render(args) -> int:
    snapshot = load_owl(args.file)
    prop = _resolve_property(snapshot, args.property)
    focus = _resolve_class(snapshot, args.focus) if args.focus else None
    overrides: dict[int, str] = {}
    for occ in args.expand or []:
        overrides[occ] = EXPAND
    for occ in args.collapse or []:
        overrides[occ] = COLLAPSE
    view = ViewState(
        property_id=prop,
        focus_class_id=focus,
        overrides=tuple(sorted(overrides.items())),
    )
    tree = build_occurrence_tree(snapshot)
    if focus is None:
        interest = mark_interest(snapshot, tree, prop)
    else:
        interest = mark_focus_interest(snapshot, tree, prop, focus)
    layout = layout_for_view(snapshot, tree, interest, LayoutConfig(), view)
    Path(args.out).write_text(render_svg(layout), encoding="utf-8")
    return 0


def _cmd_convert(args) -> int:
    snapshot = load_owl(args.file)
    Path(args.out).write_bytes(write_native_document(snapshot))
    return 0


def _cmd_serve(args) -> int:
    snapshot = load_owl(args.file)
    try:
        httpd = make_server(snapshot, args.port, args.host)
    except OSError as exc:
        print(f"error: cannot bind port {args.port}: {exc}", file=sys.stderr)
        return 1
    host, port = httpd.server_address[:2]
    print(f"serving on http://{host}:{port}", flush=True)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:  # pragma: no cover
        pass
    finally:
        httpd.server_close()
    return 0


def _arity(values, n: int, usage: str):
    if len(values) != n:
        raise SystemExit(f"usage: ontoplot query FILE {usage}")
    return values


def _cmd_query(args) -> int:
    snapshot = load_owl(args.file)
    engine = QueryEngine(snapshot)
    sub = args.subcommand
    rest = args.args

    def cls(s: str) -> str:
        return _resolve_class(snapshot, s)

    def prop(s: str) -> str:
        return _resolve_property(snapshot, s)

    lines: list[str] = []
    if sub in ("parents", "children", "siblings"):
        (c,) = _arity(rest, 1, f"{sub} CLASS")
        fn = {"parents": engine.parents_of, "children": engine.children_of, "siblings": engine.siblings_of}[sub]
        lines = list(fn(cls(c)))
    elif sub == "path":
        (c,) = _arity(rest, 1, "path CLASS")
        lines = [" -> ".join(p) for p in engine.paths_to_root(cls(c))]
    elif sub == "lca":
        a, b = _arity(rest, 2, "lca CLASS CLASS")
        ancestors, _dist = engine.closest_common_ancestors(cls(a), cls(b))
        lines = list(ancestors)
    elif sub == "assoc":
        c, p = _arity(rest, 2, "assoc CLASS PROPERTY")
        lines = list(engine.associated_classes(cls(c), prop(p), args.direction))
    elif sub == "count":
        c, p = _arity(rest, 2, "count CLASS PROPERTY")
        lines = [str(engine.association_count(cls(c), prop(p), args.direction))]
    elif sub == "max":
        (p,) = _arity(rest, 1, "max PROPERTY")
        classes, count = engine.max_association_classes(prop(p))
        lines = [f"{c} {count}" for c in classes]
    elif sub == "class-effect":
        c, p = _arity(rest, 2, "class-effect CLASS PROPERTY [--target CLASS] [--transitive]")
        target = cls(args.target) if args.target else None
        report = engine.class_effect(cls(c), prop(p), target=target, transitive=args.transitive)
        lines = [
            f"holds: {'true' if report.holds else 'false'}",
            f"covered: {len(report.covered)}/{report.total}",
            f"ratio: {report.ratio:.3f}",
        ]
    elif sub == "most-children":
        p, t = _arity(rest, 2, "most-children PROPERTY TARGET")
        classes, count = engine.most_associated_children(prop(p), cls(t))
        lines = [f"{c} {count}" for c in classes]
    elif sub == "outliers":
        p, t = _arity(rest, 2, "outliers PROPERTY TARGET")
        lines = list(engine.sibling_outliers(prop(p), cls(t)))
    else:
        print(f"error: unknown query subcommand: {sub}", file=sys.stderr)
        return 2
    for line in lines:
        print(line)
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ontoplot", description="Ontology association explorer")
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="print summary statistics")
    p_stats.add_argument("file")
    p_stats.set_defaults(func=_cmd_stats)

    p_render = sub.add_parser("render", help="render a compressed layout to SVG")
    p_render.add_argument("file")
    p_render.add_argument("--property", required=True)
    p_render.add_argument("--out", required=True)
    p_render.add_argument("--focus")
    p_render.add_argument("--expand", type=int, action="append", metavar="OCC")
    p_render.add_argument("--collapse", type=int, action="append", metavar="OCC")
    p_render.set_defaults(func=_cmd_render)

    p_query = sub.add_parser("query", help="run a hierarchy or association query")
    p_query.add_argument("file")
    p_query.add_argument(
        "subcommand",
        choices=[
            "parents",
            "children",
            "siblings",
            "path",
            "lca",
            "assoc",
            "count",
            "max",
            "class-effect",
            "most-children",
            "outliers",
        ],
    )
    p_query.add_argument("args", nargs="*")
    p_query.add_argument("--direction", choices=["out", "in", "both"], default="both")
    p_query.add_argument("--target")
    p_query.add_argument("--transitive", action="store_true")
    p_query.set_defaults(func=_cmd_query)

    p_convert = sub.add_parser("convert", help="convert an ontology to the native JSON format")
    p_convert.add_argument("file")
    p_convert.add_argument("--out", required=True)
    p_convert.set_defaults(func=_cmd_convert)

    p_serve = sub.add_parser("serve", help="serve the JSON API for one ontology")
    p_serve.add_argument("file")
    p_serve.add_argument("--port", type=int, required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except OntoplotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
