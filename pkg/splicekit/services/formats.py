"""Text formats: the plumbing line grammar, splice-diagram JSON and DOT renderings.

Plumbing files have one record per line:

    # comment
    v <id> <weight>
    e <id> <id>
"""

import io
from logging import getLogger
from typing import Literal

from pydantic import BaseModel, Field, ValidationError

from .errors import PlumbingFormatError, SpliceValidationError
from .plumbing import PlumbingDiagram
from .splice import OrbifoldDecoration, SpliceDiagram, require_valid_splice

logger = getLogger(__name__)


def parse_plumbing(text: str) -> PlumbingDiagram:
    """Parse the plumbing line grammar.

    Raises:
        PlumbingFormatError: With the 1-based line number of the offending record
    """
    weights: dict[str, int] = {}
    edges: list[tuple[str, str, int]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0]
        if kind == "v":
            if len(fields) != 3:
                raise PlumbingFormatError(f"expected 'v <id> <weight>', got {raw.strip()!r}", number)
            vertex = fields[1]
            try:
                weight = int(fields[2])
            except ValueError:
                raise PlumbingFormatError(f"weight {fields[2]!r} of {vertex} is not an integer", number) from None
            if vertex in weights:
                raise PlumbingFormatError(f"duplicate vertex id {vertex}", number)
            weights[vertex] = weight
        elif kind == "e":
            if len(fields) != 3:
                raise PlumbingFormatError(f"expected 'e <id> <id>', got {raw.strip()!r}", number)
            edges.append((fields[1], fields[2], number))
        else:
            raise PlumbingFormatError(f"unknown record type {kind!r}", number)

    # Edges may precede the vertices they name, so endpoints are checked once everything is read.
    for a, b, number in edges:
        for endpoint in (a, b):
            if endpoint not in weights:
                raise PlumbingFormatError(f"edge {a}-{b} names undeclared vertex {endpoint}", number)
    logger.debug("parsed plumbing with %s vertices and %s edges", len(weights), len(edges))
    return PlumbingDiagram.build(weights, [(a, b) for a, b, _ in edges])


def serialize_plumbing(diagram: PlumbingDiagram) -> str:
    lines = [f"v {v} {diagram.weights[v]}" for v in diagram.vertices]
    lines.extend(f"e {a} {b}" for a, b in diagram.edges)
    return "\n".join(lines) + "\n"


class SpliceNodeModel(BaseModel):
    id: str
    sign: Literal[1, -1]


class SpliceEdgeModel(BaseModel):
    a: str
    b: str
    wa: int | None = None
    wb: int | None = None


class SpliceDiagramModel(BaseModel):
    """JSON schema of a normalized splice diagram with optional orbifold degrees."""

    nodes: list[SpliceNodeModel]
    leaves: list[str] = Field(default_factory=list)
    edges: list[SpliceEdgeModel] = Field(default_factory=list)
    orbifold: dict[str, int] = Field(default_factory=dict)

    @classmethod
    def from_diagram(cls, diagram: SpliceDiagram, decoration: OrbifoldDecoration | None = None) -> "SpliceDiagramModel":
        edges = []
        for a, b in diagram.edges:
            edges.append(
                SpliceEdgeModel(
                    a=a,
                    b=b,
                    wa=diagram.weights.get((a, b)),
                    wb=diagram.weights.get((b, a)),
                )
            )
        return cls(
            nodes=[SpliceNodeModel(id=v, sign=1 if diagram.sign(v) > 0 else -1) for v in diagram.nodes],
            leaves=list(diagram.leaves),
            edges=edges,
            orbifold=decoration.nontrivial() if decoration else {},
        )

    def to_diagram(self) -> tuple[SpliceDiagram, OrbifoldDecoration]:
        """Build and validate the diagram.

        Raises:
            SpliceValidationError: If the diagram or its orbifold degrees are invalid
        """
        diagram = SpliceDiagram.build(
            signs={node.id: node.sign for node in self.nodes},
            leaves=self.leaves,
            weighted_edges=[(edge.a, edge.b, edge.wa, edge.wb) for edge in self.edges],
        )
        if len(set(diagram.edges)) != len(self.edges):
            raise SpliceValidationError("Splice diagram lists an edge more than once")
        require_valid_splice(diagram)
        decoration = OrbifoldDecoration(dict(sorted(self.orbifold.items())))
        decoration.validate(diagram)
        return diagram, decoration


def parse_splice_json(text: str) -> tuple[SpliceDiagram, OrbifoldDecoration]:
    """Parse splice-diagram JSON.

    Raises:
        SpliceValidationError: If the JSON does not match the schema or the diagram is invalid
    """
    try:
        model = SpliceDiagramModel.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]["msg"]
        raise SpliceValidationError(f"Invalid splice diagram JSON: {e.error_count()} error(s), first: {first}") from e
    return model.to_diagram()


def serialize_splice_json(diagram: SpliceDiagram, decoration: OrbifoldDecoration | None = None, indent: int = 2) -> str:
    return SpliceDiagramModel.from_diagram(diagram, decoration).model_dump_json(indent=indent or None)


class DotWriter:
    """Writer for the DOT language."""

    def __init__(self, fp: io.TextIOBase | io.StringIO) -> None:
        self.fp = fp

    def begin_graph(self, name: str) -> None:
        self.write("digraph ")
        self.id(name)
        self.write(" {\n")

    def end_graph(self) -> None:
        self.write("}\n")

    def attr(self, what: str, **attrs: str | int | None) -> None:
        self.write("\t")
        self.write(what)
        self.attr_list(attrs)
        self.write(";\n")

    def node(self, node: str, **attrs: str | int | None) -> None:
        self.write("\t")
        self.id(node)
        self.attr_list(attrs)
        self.write(";\n")

    def edge(self, src: str, dst: str, **attrs: str | int | None) -> None:
        self.write("\t")
        self.id(src)
        self.write(" -> ")
        self.id(dst)
        self.attr_list(attrs)
        self.write(";\n")

    def attr_list(self, attrs: dict[str, str | int | None]) -> None:
        present = [(name, value) for name, value in sorted(attrs.items()) if value is not None]
        if not present:
            return
        self.write(" [")
        for i, (name, value) in enumerate(present):
            if i:
                self.write(", ")
            self.id(name)
            self.write("=")
            self.id(value)
        self.write("]")

    def id(self, value: str | int) -> None:
        if isinstance(value, int):
            s = str(value)
        elif value.isalnum() and not value.startswith("0x"):
            s = value
        else:
            s = self.escape(value)
        self.write(s)

    @staticmethod
    def escape(s: str) -> str:
        s = s.replace("\\", r"\\")
        s = s.replace("\n", r"\n")
        s = s.replace("\t", r"\t")
        s = s.replace('"', r"\"")
        return '"' + s + '"'

    def write(self, s: str) -> None:
        self.fp.write(s)


def splice_to_dot(diagram: SpliceDiagram, name: str = "splice", decoration: OrbifoldDecoration | None = None) -> str:
    """Render a splice diagram: nodes labelled by sign, end weights as tail/head labels.

    Leaves are drawn as points, labelled with their orbifold degree when it is above 1.
    """
    buffer = io.StringIO()
    writer = DotWriter(buffer)
    writer.begin_graph(name)
    writer.attr("graph", rankdir="LR")
    writer.attr("edge", arrowhead="none")
    for v in diagram.nodes:
        writer.node(v, label="+" if diagram.sign(v) > 0 else "-", shape="circle")
    for leaf in diagram.leaves:
        degree = decoration.degree(leaf) if decoration else 1
        writer.node(leaf, shape="point", xlabel=f"({degree})" if degree > 1 else None)
    for a, b in diagram.edges:
        writer.edge(a, b, taillabel=diagram.weights.get((a, b)), headlabel=diagram.weights.get((b, a)))
    writer.end_graph()
    return buffer.getvalue()
