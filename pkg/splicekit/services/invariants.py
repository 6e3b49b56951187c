from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from logging import getLogger
from math import prod

from .errors import AtomicDiagramError, ConsistencyError, InputError, SingularMatrixError, SpliceValidationError
from .linalg import ExactMatrix, det_int
from .plumbing import PlumbingDiagram, det_plumbing, intersection_matrix, string_determinant
from .splice import SpliceDiagram, SpliceTree, UnnormalizedSpliceDiagram, edge_determinant, splice_from_plumbing

logger = getLogger(__name__)


@dataclass(frozen=True)
class NodeInvariants:
    e: Fraction
    chi: Fraction


@dataclass(frozen=True)
class DecompositionGraph:
    """Leafless splice tree with (e_v, χ^orb_v) at nodes and fiber pairings p_e on edges."""

    nodes: Mapping[str, NodeInvariants]
    edges: Mapping[tuple[str, str], Fraction]


@dataclass(frozen=True)
class ReducedPlumbingMatrix:
    """Symmetric matrix indexed by `order`: e_v on the diagonal, 1/p_e for adjacent nodes."""

    order: tuple[str, ...]
    matrix: ExactMatrix

    def entry(self, v: str, w: str) -> Fraction:
        return self.matrix[self.order.index(v), self.order.index(w)]


@dataclass(frozen=True)
class FiberPairingRoutes:
    unnormalized: Fraction
    normalized: Fraction
    string: int

    def agree(self) -> bool:
        return abs(self.unnormalized) == self.normalized == self.string


def _require_node(diagram: SpliceTree, v: str) -> None:
    if diagram.atomic:
        raise AtomicDiagramError("Node invariants are not defined for an atomic diagram")
    if not diagram.is_node(v):
        raise InputError(f"{v} is not a node")


def orbifold_euler_char(diagram: SpliceDiagram, v: str) -> Fraction:
    """χ^orb_v = 2 - n(v) + Σ 1/d_ve over the leaf edges at v."""
    _require_node(diagram, v)
    leaf_terms = sum((Fraction(1, diagram.weight(v, leaf)) for leaf in diagram.leaf_neighbors(v)), Fraction(0))
    return 2 - diagram.valence(v) + leaf_terms


def euler_number(diagram: SpliceDiagram, d: int, v: str, first_edge: str | None = None) -> Fraction:
    """Rational Euler number e_v of the node v from the splice diagram and d = |H_1|.

    Args:
        diagram: Validated splice diagram
        d: Order of (orbifold) first homology
        v: Node
        first_edge: Neighbor node indexed 1 in the formula; forced to the zero-weight edge if there is one

    Raises:
        InputError: If d = 0 or `first_edge` conflicts with a zero weight
        SpliceValidationError: If v carries two zero weights or a zero leaf weight
    """
    _require_node(diagram, v)
    if d == 0:
        raise InputError("Euler numbers need a finite first homology (d != 0)")
    zeros = [x for x in diagram.neighbors(v) if diagram.weight(v, x) == 0]
    if len(zeros) > 1 or any(diagram.is_leaf(x) for x in zeros):
        raise SpliceValidationError(f"Node {v} has an inadmissible zero end weight")
    epsilon = diagram.sign(v)
    leaf_product = diagram.leaf_product(v)
    neighbors = diagram.node_neighbors(v)
    if not neighbors:
        return Fraction(-d * epsilon, leaf_product)
    if zeros:
        if first_edge is not None and first_edge != zeros[0]:
            raise InputError(f"The zero-weight edge toward {zeros[0]} must be indexed first")
        first_edge = zeros[0]
    elif first_edge is None:
        first_edge = neighbors[0]
    elif first_edge not in neighbors:
        raise InputError(f"{first_edge} is not a node adjacent to {v}")
    others = [x for x in neighbors if x != first_edge]

    def determinant(w: str) -> int:
        value = edge_determinant(diagram, v, w)
        if value == 0:
            raise InputError(f"Edge {v}-{w} has edge determinant 0")
        return value

    s1 = diagram.weight(first_edge, v)
    total = Fraction(
        epsilon * s1,
        leaf_product * determinant(first_edge) * prod(diagram.weight(v, x) for x in others),
    )
    for x in others:
        total += Fraction(
            diagram.sign(x) * diagram.product_except(x, v),
            diagram.weight(v, x) * determinant(x),
        )
    return -d * total


def fiber_pairing(diagram: SpliceTree, d: int, a: str, b: str) -> Fraction:
    """Fiber intersection number across a node-edge.

    Takes D̃/det for an unnormalized diagram (d signed) and |D|/d for a normalized one.
    """
    if d == 0:
        raise InputError("Fiber pairings need d != 0")
    value = edge_determinant(diagram, a, b)
    if isinstance(diagram, UnnormalizedSpliceDiagram):
        return Fraction(value, d)
    return Fraction(abs(value), abs(d))


def fiber_pairing_routes(plumbing: PlumbingDiagram, a: str, b: str) -> FiberPairingRoutes:
    """All three routes to p_e for nodes a, b of a plumbing joined by a string."""
    det = det_plumbing(plumbing)
    splice, unnormalized, _ = splice_from_plumbing(plumbing)
    return FiberPairingRoutes(
        unnormalized=fiber_pairing(unnormalized, det, a, b),
        normalized=fiber_pairing(splice, abs(det), a, b),
        string=string_determinant(plumbing, a, b),
    )


def linking_number(plumbing: PlumbingDiagram, v: str, w: str) -> Fraction:
    """lk(v, w) = -(A^{-1})_vw, computed as adj(-A)_vw / det(-A).

    Raises:
        SingularMatrixError: If det(-A) = 0
    """
    minus_a = -intersection_matrix(plumbing)
    det = det_int(minus_a)
    if det == 0:
        raise SingularMatrixError("Linking numbers need a nonsingular intersection matrix")
    order = plumbing.vertices
    i, j = order.index(v), order.index(w)
    cofactor = (-1) ** (i + j) * det_int(minus_a.minor(j, i))
    return Fraction(cofactor, det)


def decomposition_graph(diagram: SpliceDiagram, d: int) -> tuple[DecompositionGraph, ReducedPlumbingMatrix]:
    """Decomposition graph and reduced plumbing matrix of a splice diagram with |H_1| = d."""
    if diagram.atomic:
        raise AtomicDiagramError("An atomic diagram has no decomposition graph")
    nodes = {
        v: NodeInvariants(e=euler_number(diagram, d, v), chi=orbifold_euler_char(diagram, v)) for v in diagram.nodes
    }
    edges = {(a, b): fiber_pairing(diagram, d, a, b) for a, b in diagram.node_edges()}
    for edge, p in edges.items():
        if p <= 0:
            raise ConsistencyError(f"Fiber pairing {p} on {edge} is not positive")
    order = diagram.nodes
    rows = [[Fraction(0)] * len(order) for _ in order]
    for i, v in enumerate(order):
        rows[i][i] = nodes[v].e
    for (a, b), p in edges.items():
        i, j = order.index(a), order.index(b)
        rows[i][j] = rows[j][i] = 1 / p
    logger.debug("decomposition graph on %s nodes", len(order))
    reduced = ReducedPlumbingMatrix(order, ExactMatrix.from_rows(rows, len(order)))
    return DecompositionGraph(nodes=nodes, edges=edges), reduced
