"""JSON reports.

Every number is exact. Integers that fit a double are JSON numbers and larger ones are
decimal strings; rationals are numerator/denominator pairs.
"""

import hashlib
from fractions import Fraction
from logging import getLogger
from typing import Annotated, Any, Literal

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer

from .cover import BrieskornCover, ConnectedSumCover, CoverPieceData, CoverSide, CoverSplit, SplitCover, UacDescriptor
from .formats import SpliceDiagramModel
from .invariants import DecompositionGraph, ReducedPlumbingMatrix
from .singularity import (
    Certificate,
    EliminationStep,
    EliminationTranscript,
    MinorWitness,
    NegativeNode,
    NonPositiveEdge,
    SingularityVerdict,
)
from .splice import OrbifoldDecoration, SpliceDiagram, edge_determinant

logger = getLogger(__name__)

JSON_SAFE_LIMIT = 2**53


def _load_int(value: Any) -> Any:
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            raise ValueError(f"{value!r} is not a decimal integer") from None
    return value


def _dump_int(value: int) -> int | str:
    return value if abs(value) < JSON_SAFE_LIMIT else str(value)


ExactInt = Annotated[int, BeforeValidator(_load_int), PlainSerializer(_dump_int, when_used="json")]


class Rational(BaseModel):
    numerator: ExactInt
    denominator: ExactInt = Field(gt=0)

    @classmethod
    def of(cls, value: Fraction | int) -> "Rational":
        value = Fraction(value)
        return cls(numerator=value.numerator, denominator=value.denominator)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)


def input_digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


class EdgeDeterminant(BaseModel):
    a: str
    b: str
    determinant: ExactInt


class NodeReport(BaseModel):
    id: str
    e: Rational
    chi: Rational


class PairingReport(BaseModel):
    a: str
    b: str
    p: Rational


class DecompositionReport(BaseModel):
    nodes: list[NodeReport]
    edges: list[PairingReport]
    order: list[str]
    matrix: list[list[Rational]]

    @classmethod
    def of(cls, graph: DecompositionGraph, reduced: ReducedPlumbingMatrix) -> "DecompositionReport":
        size = len(reduced.order)
        return cls(
            nodes=[
                NodeReport(id=v, e=Rational.of(n.e), chi=Rational.of(n.chi)) for v, n in sorted(graph.nodes.items())
            ],
            edges=[PairingReport(a=a, b=b, p=Rational.of(p)) for (a, b), p in sorted(graph.edges.items())],
            order=list(reduced.order),
            matrix=[[Rational.of(reduced.matrix[i, j]) for j in range(size)] for i in range(size)],
        )


class NegativeNodeReport(BaseModel):
    kind: Literal["negative_node"] = "negative_node"
    node: str


class NonPositiveEdgeReport(BaseModel):
    kind: Literal["non_positive_edge"] = "non_positive_edge"
    a: str
    b: str
    determinant: ExactInt


class StepReport(BaseModel):
    node: str
    pivot: Rational
    neighbor: str | None = None
    replaced: Rational | None = None
    update: Rational | None = None
    formula_update: Rational | None = None

    @classmethod
    def of(cls, step: EliminationStep) -> "StepReport":
        def optional(value: Fraction | None) -> Rational | None:
            return None if value is None else Rational.of(value)

        return cls(
            node=step.node,
            pivot=Rational.of(step.pivot),
            neighbor=step.neighbor,
            replaced=optional(step.replaced),
            update=optional(step.update),
            formula_update=optional(step.formula_update),
        )


class EliminationReport(BaseModel):
    kind: Literal["elimination"] = "elimination"
    steps: list[StepReport]
    verdict: bool


class MinorsReport(BaseModel):
    kind: Literal["minors"] = "minors"
    minors: list[Rational]


CertificateReport = Annotated[
    NegativeNodeReport | NonPositiveEdgeReport | EliminationReport | MinorsReport,
    Field(discriminator="kind"),
]


def certificate_report(certificate: Certificate) -> CertificateReport:
    if isinstance(certificate, NegativeNode):
        return NegativeNodeReport(node=certificate.node)
    if isinstance(certificate, NonPositiveEdge):
        a, b = certificate.edge
        return NonPositiveEdgeReport(a=a, b=b, determinant=certificate.determinant)
    if isinstance(certificate, EliminationTranscript):
        return EliminationReport(steps=[StepReport.of(s) for s in certificate.steps], verdict=certificate.verdict)
    if isinstance(certificate, MinorWitness):
        return MinorsReport(minors=[Rational.of(m) for m in certificate.minors])
    raise TypeError(f"Unknown certificate {certificate!r}")


class VerdictReport(BaseModel):
    verdict: bool
    route_agreement: bool
    routes: dict[str, bool] = Field(default_factory=dict)
    certificate: CertificateReport | None = None

    @classmethod
    def of(cls, verdict: SingularityVerdict) -> "VerdictReport":
        return cls(
            verdict=verdict.verdict,
            route_agreement=verdict.route_agreement,
            routes=dict(sorted(verdict.routes.items())),
            certificate=None if verdict.certificate is None else certificate_report(verdict.certificate),
        )


class SideReport(BaseModel):
    node: str
    divisor: ExactInt
    components: ExactInt
    new_leaf: str
    new_leaf_weight: ExactInt
    glue_degree: ExactInt
    order: ExactInt
    underlying_order: ExactInt
    derived_weights_agree: bool
    diagram: SpliceDiagramModel

    @classmethod
    def of(cls, side: CoverSide) -> "SideReport":
        return cls(
            node=side.node,
            divisor=side.divisor,
            components=side.components,
            new_leaf=side.new_leaf,
            new_leaf_weight=side.new_leaf_weight,
            glue_degree=side.glue_degree,
            order=side.order,
            underlying_order=side.underlying_order,
            derived_weights_agree=side.derived_weights_agree,
            diagram=SpliceDiagramModel.from_diagram(side.diagram, side.decoration),
        )


class SplitReport(BaseModel):
    edge: tuple[str, str]
    order: ExactInt
    ideal_generators: tuple[ExactInt, ExactInt]
    gluing: tuple[ExactInt, ExactInt]
    sides: list[SideReport]

    @classmethod
    def of(cls, split: CoverSplit) -> "SplitReport":
        return cls(
            edge=split.edge,
            order=split.order,
            ideal_generators=split.ideal_generators,
            gluing=split.gluing,
            sides=[SideReport.of(side) for side in split.sides],
        )


class PieceDataReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    node: str
    lambda_: ExactInt = Field(alias="lambda")
    fiber_degree: ExactInt
    base_degree: ExactInt
    euler: Rational | None = None
    cover_euler: Rational | None = None
    divisor: ExactInt
    meridian_order: ExactInt
    fiber_quotient_order: ExactInt

    @classmethod
    def of(cls, data: CoverPieceData) -> "PieceDataReport":
        return cls(
            node=data.node,
            lambda_=data.lambda_,
            fiber_degree=data.fiber_degree,
            base_degree=data.base_degree,
            euler=None if data.euler is None else Rational.of(data.euler),
            cover_euler=None if data.cover_euler is None else Rational.of(data.cover_euler),
            divisor=data.divisor,
            meridian_order=data.meridian_order,
            fiber_quotient_order=data.fiber_quotient_order,
        )


class BrieskornReport(BaseModel):
    type: Literal["brieskorn"] = "brieskorn"
    node: str
    exponents: list[ExactInt]
    orientation: Literal["standard", "reversed"]
    euler: Rational
    degree: ExactInt


class ConnectedSumReport(BaseModel):
    type: Literal["connected_sum"] = "connected_sum"
    node: str
    orders: list[ExactInt]
    degree: ExactInt
    sum_degree: ExactInt = 1


class SplitPlanReport(BaseModel):
    type: Literal["split"] = "split"
    split: SplitReport
    pieces: list[PieceDataReport]
    children: list["UacReport"]
    degree: ExactInt


UacReport = Annotated[BrieskornReport | ConnectedSumReport | SplitPlanReport, Field(discriminator="type")]
SplitPlanReport.model_rebuild()


def uac_report(descriptor: UacDescriptor) -> UacReport:
    if isinstance(descriptor, BrieskornCover):
        return BrieskornReport(
            node=descriptor.node,
            exponents=list(descriptor.exponents),
            orientation=descriptor.orientation,
            euler=Rational.of(descriptor.euler),
            degree=descriptor.degree,
        )
    if isinstance(descriptor, ConnectedSumCover):
        return ConnectedSumReport(
            node=descriptor.node,
            orders=list(descriptor.orders),
            degree=descriptor.degree,
            sum_degree=descriptor.sum_degree,
        )
    if isinstance(descriptor, SplitCover):
        return SplitPlanReport(
            split=SplitReport.of(descriptor.split),
            pieces=[PieceDataReport.of(p) for p in descriptor.pieces],
            children=[uac_report(child) for child in descriptor.children],
            degree=descriptor.degree,
        )
    raise TypeError(f"Unknown descriptor {descriptor!r}")


class Report(BaseModel):
    """Everything a command computed for one input; sections it did not compute stay None."""

    input_digest: str
    h1_order: ExactInt | None = None
    splice: SpliceDiagramModel | None = None
    edge_determinants: list[EdgeDeterminant] | None = None
    decomposition: DecompositionReport | None = None
    singularity: VerdictReport | None = None
    split: SplitReport | None = None
    pieces: list[PieceDataReport] | None = None
    cover: UacReport | None = None

    def to_json(self, indent: int = 2) -> str:
        return self.model_dump_json(indent=indent or None, exclude_none=True, by_alias=True)


def edge_determinants(diagram: SpliceDiagram) -> list[EdgeDeterminant]:
    if diagram.atomic:
        return []
    return [EdgeDeterminant(a=a, b=b, determinant=edge_determinant(diagram, a, b)) for a, b in diagram.node_edges()]


def splice_section(diagram: SpliceDiagram, decoration: OrbifoldDecoration | None = None) -> SpliceDiagramModel | None:
    """Splice JSON for a diagram; atomic diagrams have no JSON form and give None."""
    if diagram.atomic:
        return None
    return SpliceDiagramModel.from_diagram(diagram, decoration)
