from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from logging import getLogger

from .errors import AtomicDiagramError, ConsistencyError
from .invariants import decomposition_graph
from .linalg import is_positive_definite, leading_minors
from .plumbing import PlumbingDiagram, h1_order, intersection_matrix, require_nonsingular, require_normal_form
from .splice import SpliceDiagram, edge_determinant, splice_from_plumbing

logger = getLogger(__name__)


@dataclass(frozen=True)
class NegativeNode:
    node: str


@dataclass(frozen=True)
class NonPositiveEdge:
    edge: tuple[str, str]
    determinant: int


@dataclass(frozen=True)
class EliminationStep:
    """One end node split off the reduced plumbing matrix.

    `update` is what was added to the neighbor's diagonal entry. For an end node whose
    entry was still its own e(v), `formula_update` is εNd/(Ds) computed from the diagram.
    """

    node: str
    pivot: Fraction
    neighbor: str | None = None
    replaced: Fraction | None = None
    update: Fraction | None = None
    formula_update: Fraction | None = None


@dataclass(frozen=True)
class EliminationTranscript:
    steps: tuple[EliminationStep, ...]
    verdict: bool


@dataclass(frozen=True)
class MinorWitness:
    """Leading principal minors of the negated matrix; all positive iff definite."""

    minors: tuple[Fraction, ...]


Certificate = NegativeNode | NonPositiveEdge | EliminationTranscript | MinorWitness


@dataclass(frozen=True)
class SingularityVerdict:
    verdict: bool
    certificate: Certificate | None = None
    route_agreement: bool = True
    routes: Mapping[str, bool] = field(default_factory=dict)


def splice_condition(diagram: SpliceDiagram) -> SingularityVerdict:
    """No negative node signs and every edge determinant positive."""
    if diagram.atomic:
        raise AtomicDiagramError("The splice condition is not defined for an atomic diagram")
    for v in diagram.nodes:
        if diagram.sign(v) < 0:
            return SingularityVerdict(False, NegativeNode(v), routes={"splice": False})
    for a, b in diagram.node_edges():
        determinant = edge_determinant(diagram, a, b)
        if determinant <= 0:
            return SingularityVerdict(False, NonPositiveEdge((a, b), determinant), routes={"splice": False})
    return SingularityVerdict(True, routes={"splice": True})


def end_node_reduction(diagram: SpliceDiagram, d: int) -> EliminationTranscript:
    """Eliminate end nodes from the reduced plumbing matrix, lowest id first.

    Raises:
        ConsistencyError: If an elimination update disagrees with εNd/(Ds)
    """
    graph, reduced = decomposition_graph(diagram, d)
    diagonal = {v: graph.nodes[v].e for v in diagram.nodes}
    adjacency: dict[str, dict[str, Fraction]] = {v: {} for v in diagram.nodes}
    for (a, b), p in graph.edges.items():
        adjacency[a][b] = adjacency[b][a] = 1 / p
    remaining = set(diagram.nodes)
    modified: set[str] = set()
    steps: list[EliminationStep] = []
    verdict = True
    while remaining:
        v = min(x for x in remaining if sum(1 for y in adjacency[x] if y in remaining) <= 1)
        pivot = diagonal[v]
        neighbors = [y for y in adjacency[v] if y in remaining]
        remaining.remove(v)
        if pivot >= 0:
            verdict = False
        if pivot == 0 or not neighbors:
            steps.append(EliminationStep(node=v, pivot=pivot))
            if pivot == 0:
                break
            continue
        (neighbor,) = neighbors
        update = -(adjacency[v][neighbor] ** 2) / pivot
        formula = None
        if v not in modified:
            epsilon = diagram.sign(v)
            formula = Fraction(
                epsilon * diagram.leaf_product(v) * d,
                edge_determinant(diagram, v, neighbor) * diagram.weight(neighbor, v),
            )
            if formula != update:
                logger.warning("elimination of %s gives %s, formula gives %s", v, update, formula)
                raise ConsistencyError(f"Elimination update at {v} disagrees with the end-node formula")
        diagonal[neighbor] += update
        modified.add(neighbor)
        steps.append(EliminationStep(v, pivot, neighbor, diagonal[neighbor], update, formula))
        logger.debug("eliminated %s with pivot %s", v, pivot)
    return EliminationTranscript(tuple(steps), verdict)


def is_singularity_link(plumbing: PlumbingDiagram) -> SingularityVerdict:
    """Three-route singularity-link verdict.

    The routes are the splice condition, negative definiteness of the reduced plumbing
    matrix (both by end-node elimination and by leading minors), and positive
    definiteness of -A.

    Raises:
        AtomicDiagramError: If the plumbing has no node
        ConsistencyError: If the splice and reduced-matrix routes disagree
    """
    require_normal_form(plumbing)
    require_nonsingular(plumbing)
    splice = splice_from_plumbing(plumbing).splice
    if splice.atomic:
        raise AtomicDiagramError("Lens spaces are outside the singularity-link criterion")
    d = h1_order(plumbing)
    by_splice = splice_condition(splice)
    transcript = end_node_reduction(splice, d)
    _, reduced = decomposition_graph(splice, d)
    by_minors = is_positive_definite(-reduced.matrix)
    if transcript.verdict != by_minors:
        raise ConsistencyError("End-node elimination and leading minors disagree on the reduced matrix")
    if by_splice.verdict != by_minors:
        raise ConsistencyError("Splice condition and reduced-matrix definiteness disagree")
    minus_a = -intersection_matrix(plumbing)
    by_plumbing = is_positive_definite(minus_a)
    routes = {"splice": by_splice.verdict, "reduced_matrix": by_minors, "plumbing": by_plumbing}
    agreement = by_plumbing == by_splice.verdict
    if not agreement:
        logger.warning("plumbing definiteness disagrees with the splice condition: %s", routes)
    certificate: Certificate | None
    if by_splice.verdict:
        certificate = transcript
    elif by_splice.certificate is not None:
        certificate = by_splice.certificate
    else:
        certificate = MinorWitness(tuple(leading_minors(minus_a)))
    return SingularityVerdict(by_splice.verdict, certificate, agreement, routes)
