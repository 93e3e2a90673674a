"""Parser for the OWL 2 functional-style syntax subset that feeds the model.

Recognized constructs: Prefix declarations, the Ontology wrapper, Class and
ObjectProperty declarations, SubClassOf between named classes, SubClassOf
against ObjectSomeValuesFrom (the association source), one-level
ObjectIntersectionOf lifting in SubClassOf/EquivalentClasses, and rdfs:label
annotations. Every other construct is skipped and counted, never fatal.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError, OwlSyntaxError
from .model import Association, OntologySnapshot, build_snapshot, local_name

RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"

# Tools always emit these, but be tolerant when they are missing.
_BUILTIN_PREFIXES = {
    "owl": "http://www.w3.org/2002/07/owl#",
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
    "xml": "http://www.w3.org/XML/1998/namespace",
}

_TOKEN = re.compile(r'<[^<>]*>|"(?:[^"\\]|\\.)*"|[()]|[^\s()<>"]+')


@dataclass(frozen=True)
class RawAxiom:
    kind: str  # ClassDecl | ObjectPropertyDecl | SubClassNamed | SubClassRestriction | LabelAnnotation | Skipped
    args: tuple[str, ...]
    line: int


@dataclass
class ParseReport:
    axioms: list[RawAxiom] = field(default_factory=list)
    skipped_counts: dict[str, int] = field(default_factory=dict)
    prefixes: dict[str, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    prefix_count: int = 0
    recognized_count: int = 0
    top_level_count: int = 0

    @property
    def skipped_count(self) -> int:
        return sum(self.skipped_counts.values())


@dataclass(frozen=True)
class _Tok:
    kind: str  # "(" | ")" | "iri" | "string" | "atom"
    text: str
    line: int


class _Node:
    """One parenthesized construct: name(args...), args are tokens or nodes."""

    __slots__ = ("name", "args", "line")

    def __init__(self, name: str, args: list, line: int):
        self.name = name
        self.args = args
        self.line = line


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line = 1
    pos = 0
    for m in _TOKEN.finditer(text):
        line += text.count("\n", pos, m.start())
        pos = m.start()
        t = m.group()
        if t == "(" or t == ")":
            kind = t
        elif t.startswith("<"):
            kind = "iri"
        elif t.startswith('"'):
            kind = "string"
        else:
            kind = "atom"
        toks.append(_Tok(kind, t, line))
    return toks


class _Reader:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    def eof(self) -> bool:
        return self.i >= len(self.toks)

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def read_construct(self) -> _Node:
        head = self.next()
        if head.kind != "atom":
            raise OwlSyntaxError(f"expected construct name, got {head.text!r}", head.line)
        opener = self.next() if not self.eof() else None
        if opener is None or opener.kind != "(":
            raise OwlSyntaxError(f"expected '(' after {head.text}", head.line)
        args: list = []
        while True:
            if self.eof():
                raise OwlSyntaxError(f"unclosed {head.text}(", head.line)
            tok = self.peek()
            if tok.kind == ")":
                self.next()
                return _Node(head.text, args, head.line)
            if tok.kind == "atom" and self.i + 1 < len(self.toks) and self.toks[self.i + 1].kind == "(":
                args.append(self.read_construct())
            else:
                args.append(self.next())


def parse_functional_syntax(text: str) -> ParseReport:
    report = ParseReport()
    reader = _Reader(_tokenize(text))

    def resolve(tok: _Tok) -> str:
        if tok.kind == "iri":
            return tok.text[1:-1]
        if tok.kind == "atom" and ":" in tok.text:
            prefix, local = tok.text.split(":", 1)
            base = report.prefixes.get(prefix)
            if base is None:
                raise OwlSyntaxError(f"undeclared prefix {prefix!r} in {tok.text}", tok.line)
            return base + local
        raise OwlSyntaxError(f"expected an IRI or prefixed name, got {tok.text!r}", tok.line)

    def named(arg) -> str | None:
        if isinstance(arg, _Tok) and (arg.kind == "iri" or (arg.kind == "atom" and ":" in arg.text)):
            return resolve(arg)
        return None

    def skip(node: _Node, label: str | None = None) -> None:
        name = label or node.name
        report.skipped_counts[name] = report.skipped_counts.get(name, 0) + 1
        report.axioms.append(RawAxiom("Skipped", (name,), node.line))

    def some_values(arg) -> tuple[str, str] | None:
        """ObjectSomeValuesFrom over a named property and named filler."""
        if isinstance(arg, _Node) and arg.name == "ObjectSomeValuesFrom" and len(arg.args) == 2:
            prop = named(arg.args[0])
            filler = named(arg.args[1])
            if prop and filler:
                return prop, filler
        return None

    def lift(subject: str, expr: _Node, node: _Node) -> list[RawAxiom]:
        out: list[RawAxiom] = []
        for conjunct in expr.args:
            target = named(conjunct)
            if target:
                out.append(RawAxiom("SubClassNamed", (subject, target), node.line))
                continue
            sv = some_values(conjunct)
            if sv:
                out.append(RawAxiom("SubClassRestriction", (subject, sv[0], sv[1]), node.line))
                continue
            what = conjunct.name if isinstance(conjunct, _Node) else conjunct.text
            report.warnings.append(f"line {node.line}: skipped conjunct {what} in {node.name}")
        return out

    def literal(args: list, start: int) -> str | None:
        if start >= len(args):
            return None
        tok = args[start]
        if not (isinstance(tok, _Tok) and tok.kind == "string"):
            return None
        return re.sub(r"\\(.)", r"\1", tok.text[1:-1])

    def handle(node: _Node) -> None:
        report.top_level_count += 1
        if node.name == "Declaration" and len(node.args) == 1 and isinstance(node.args[0], _Node):
            inner = node.args[0]
            if inner.name in ("Class", "ObjectProperty"):
                entity = named(inner.args[0]) if len(inner.args) == 1 else None
                if entity:
                    kind = "ClassDecl" if inner.name == "Class" else "ObjectPropertyDecl"
                    report.axioms.append(RawAxiom(kind, (entity,), node.line))
                    report.recognized_count += 1
                    return
            skip(node, f"Declaration({inner.name})")
            return

        if node.name == "SubClassOf" and len(node.args) == 2:
            sub = named(node.args[0])
            if sub:
                sup = named(node.args[1])
                if sup:
                    report.axioms.append(RawAxiom("SubClassNamed", (sub, sup), node.line))
                    report.recognized_count += 1
                    return
                sv = some_values(node.args[1])
                if sv:
                    report.axioms.append(RawAxiom("SubClassRestriction", (sub, sv[0], sv[1]), node.line))
                    report.recognized_count += 1
                    return
                expr = node.args[1]
                if isinstance(expr, _Node) and expr.name == "ObjectIntersectionOf":
                    lifted = lift(sub, expr, node)
                    if lifted:
                        report.axioms.extend(lifted)
                        report.recognized_count += 1
                        return
            skip(node)
            return

        if node.name == "EquivalentClasses" and len(node.args) == 2:
            subject = named(node.args[0])
            expr = node.args[1]
            if subject and isinstance(expr, _Node) and expr.name == "ObjectIntersectionOf":
                lifted = lift(subject, expr, node)
                if lifted:
                    report.axioms.extend(lifted)
                    report.recognized_count += 1
                    return
            skip(node)
            return

        if node.name == "AnnotationAssertion" and len(node.args) >= 3:
            prop = named(node.args[0])
            subject = named(node.args[1])
            text_value = literal(node.args, 2)
            if prop == RDFS_LABEL and subject and text_value is not None:
                report.axioms.append(RawAxiom("LabelAnnotation", (subject, text_value), node.line))
                report.recognized_count += 1
                return
            skip(node)
            return

        skip(node)

    saw_ontology = False
    while not reader.eof():
        node = reader.read_construct()
        if node.name == "Prefix":
            if len(node.args) != 2 or not isinstance(node.args[0], _Tok) or not isinstance(node.args[1], _Tok):
                raise OwlSyntaxError("malformed Prefix declaration", node.line)
            head, iri = node.args
            if not head.text.endswith(":=") or iri.kind != "iri":
                raise OwlSyntaxError("malformed Prefix declaration", node.line)
            report.prefixes[head.text[:-2]] = iri.text[1:-1]
            report.prefix_count += 1
            report.top_level_count += 1
            continue
        if node.name == "Ontology":
            saw_ontology = True
            for arg in node.args:
                if isinstance(arg, _Tok):
                    if arg.kind == "iri":
                        continue  # ontology / version IRI
                    raise OwlSyntaxError(f"unexpected token {arg.text!r} in Ontology", arg.line)
                handle(arg)
            continue
        handle(node)  # tolerate axioms outside an Ontology wrapper

    if not saw_ontology and report.top_level_count == report.prefix_count:
        report.warnings.append("no Ontology block found")
    for prefix, base in _BUILTIN_PREFIXES.items():
        report.prefixes.setdefault(prefix, base)
    return report


def extract_associations(report: ParseReport) -> list[Association]:
    """Deduplicated (source, property, target) triples from restrictions."""
    seen: set[Association] = set()
    out: list[Association] = []
    for ax in report.axioms:
        if ax.kind == "SubClassRestriction":
            assoc = Association(*ax.args)
            if assoc not in seen:
                seen.add(assoc)
                out.append(assoc)
    return out


def resolve_labels(report: ParseReport) -> dict[str, str]:
    """Label per entity: rdfs:label wins (lexicographically smallest on
    conflict, with a warning); otherwise the IRI local name."""
    annotated: dict[str, str] = {}
    for ax in report.axioms:
        if ax.kind != "LabelAnnotation":
            continue
        subject, text = ax.args
        old = annotated.get(subject)
        if old is None:
            annotated[subject] = text
        elif old != text:
            keep = min(old, text)
            if keep != old:
                annotated[subject] = keep
            report.warnings.append(f"conflicting labels for {subject}; kept {keep!r}")

    ids: set[str] = set()
    for ax in report.axioms:
        if ax.kind in ("ClassDecl", "ObjectPropertyDecl"):
            ids.add(ax.args[0])
        elif ax.kind == "SubClassNamed":
            ids.update(ax.args)
        elif ax.kind == "SubClassRestriction":
            ids.update(ax.args)
    out = {i: local_name(i) for i in ids}
    out.update(annotated)
    return out


def snapshot_from_report(report: ParseReport, source: str = "") -> OntologySnapshot:
    classes: list[str] = []
    properties: list[str] = []
    edges: list[tuple[str, str]] = []
    for ax in report.axioms:
        if ax.kind == "ClassDecl":
            classes.append(ax.args[0])
        elif ax.kind == "ObjectPropertyDecl":
            properties.append(ax.args[0])
        elif ax.kind == "SubClassNamed":
            edges.append((ax.args[0], ax.args[1]))
    associations = extract_associations(report)

    labels = {}
    for ax in report.axioms:
        if ax.kind == "LabelAnnotation":
            labels[ax.args[0]] = None  # presence marker; text resolved below
    resolved = resolve_labels(report)
    labels = {i: resolved[i] for i in labels if i in resolved}

    return build_snapshot(
        classes,
        properties,
        edges,
        associations,
        labels=labels,
        source=source,
        warnings=report.warnings,
    )


def load_owl(path: str | Path) -> OntologySnapshot:
    """Load an ontology by extension: .ofn functional syntax, .json native."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".json":
        from .model import read_native_document

        return read_native_document(path.read_bytes(), source=str(path))
    if suffix in (".ofn", ".owl"):
        report = parse_functional_syntax(path.read_text(encoding="utf-8"))
        return snapshot_from_report(report, source=str(path))
    raise FormatError(f"unsupported file extension: {path.name} (expected .ofn or .json)")
