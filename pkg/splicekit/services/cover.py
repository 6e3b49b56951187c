"""Universal abelian cover plans.

A plan cuts the splice diagram along a node-edge, computes the ideal generators on
both sides, and recurses on the two cut-and-filled orbifold pieces until one node is
left. Each piece is carried as a relation presentation, so every number the recursion
needs (piece orders, ideal generators, meridian orders) is a cokernel computation.
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from logging import getLogger
from math import gcd, lcm, prod
from typing import Literal

import networkx as nx

from .errors import AtomicDiagramError, ConsistencyError, InputError, SpliceValidationError
from .invariants import euler_number
from .linalg import det_int, element_order
from .plumbing import PlumbingDiagram, require_nonsingular, require_normal_form
from .presentation import HomologyPresentation
from .splice import OrbifoldDecoration, SpliceDiagram, pairwise_coprime_at_nodes, splice_from_presentation

logger = getLogger(__name__)


@dataclass(frozen=True)
class CoverPiece:
    """A (possibly orbifold) graph manifold: presentation, splice diagram and |H_1^orb|."""

    presentation: HomologyPresentation
    diagram: SpliceDiagram
    decoration: OrbifoldDecoration
    order: int

    @classmethod
    def from_plumbing(cls, plumbing: PlumbingDiagram, decoration: Mapping[str, int] | None = None) -> "CoverPiece":
        """Wrap a normal-form plumbing, optionally with orbifold leaves.

        Raises:
            AtomicDiagramError: If the plumbing has no node
        """
        require_normal_form(plumbing)
        require_nonsingular(plumbing)
        presentation = HomologyPresentation.from_plumbing(plumbing, decoration)
        diagram = splice_from_presentation(presentation).splice
        if diagram.atomic:
            raise AtomicDiagramError("Cover plans need at least one node")
        orbifold = OrbifoldDecoration(dict(sorted((decoration or {}).items())))
        orbifold.validate(diagram)
        return cls(presentation, diagram, orbifold, abs(presentation.det()))


@dataclass(frozen=True)
class CoverSide:
    """One side of a split: the node kept, its divisor and the filled piece.

    `divisor` is |H_1(M, M_side)|, the ideal generator taken across the cut from this
    side. It divides every weight of this side that sees the cut and counts the
    components of the preimage of this side in the cover.
    """

    node: str
    divisor: int
    new_leaf: str
    new_leaf_weight: int
    glue_degree: int
    underlying_order: int
    derived_weights_agree: bool
    piece: CoverPiece = field(compare=False, repr=False)

    @property
    def diagram(self) -> SpliceDiagram:
        return self.piece.diagram

    @property
    def decoration(self) -> OrbifoldDecoration:
        return self.piece.decoration

    @property
    def order(self) -> int:
        return self.piece.order

    @property
    def components(self) -> int:
        return self.divisor


@dataclass(frozen=True)
class CoverSplit:
    edge: tuple[str, str]
    order: int
    ideal_generators: tuple[int, int]
    sides: tuple[CoverSide, CoverSide]

    @property
    def gluing(self) -> tuple[int, int]:
        """Complete bipartite gluing: components on side 0 by components on side 1."""
        return (self.sides[0].components, self.sides[1].components)

    @property
    def underlying_orders(self) -> tuple[int, int]:
        return (self.sides[0].underlying_order, self.sides[1].underlying_order)

    @property
    def derived_weights_agree(self) -> bool:
        return self.sides[0].derived_weights_agree and self.sides[1].derived_weights_agree


@dataclass(frozen=True)
class CoverPieceData:
    node: str
    lambda_: int
    fiber_degree: int
    base_degree: int
    euler: Fraction | None
    cover_euler: Fraction | None
    divisor: int
    meridian_order: int
    fiber_quotient_order: int


@dataclass(frozen=True)
class BrieskornCover:
    node: str
    exponents: tuple[int, ...]
    orientation: Literal["standard", "reversed"]
    euler: Fraction
    degree: int


@dataclass(frozen=True)
class ConnectedSumCover:
    """Lens-space quotients of orders `sum_degree * n` summed along spheres with a curve of degree `sum_degree`."""

    node: str
    orders: tuple[int, ...]
    degree: int
    sum_degree: int = 1


@dataclass(frozen=True)
class SplitCover:
    split: CoverSplit
    pieces: tuple[CoverPieceData, CoverPieceData]
    children: tuple["UacDescriptor", "UacDescriptor"]
    degree: int


UacDescriptor = BrieskornCover | ConnectedSumCover | SplitCover


def _as_piece(source: PlumbingDiagram | CoverPiece) -> CoverPiece:
    return source if isinstance(source, CoverPiece) else CoverPiece.from_plumbing(source)


def ideal_generator(source: PlumbingDiagram | CoverPiece, a: str, b: str) -> int:
    """|H_1(M, M_near)| across the plumbing edge a-b, the far side containing b."""
    presentation = (
        source.presentation if isinstance(source, CoverPiece) else HomologyPresentation.from_plumbing(source)
    )
    if not presentation.graph.has_edge(a, b):
        raise InputError(f"{a}-{b} is not a plumbing edge")
    return presentation.ideal_generator(a, b)


def _exact_div(numerator: int, denominator: int, what: str) -> int:
    if denominator == 0 or numerator % denominator:
        raise ConsistencyError(f"{what}: {numerator} is not divisible by {denominator}")
    return numerator // denominator


def _glue_relation(presentation: HomologyPresentation, v: str, s: str, far: set[str]) -> tuple[int, int, int]:
    """Kernel of H_1(T^2) -> H_1(far piece) on the torus between v and s.

    The torus classes are v's meridian (the fiber of v) and s's meridian. Returns the
    primitive direction (x, y) in those coordinates and the content p of the kernel
    generator p(x, y).
    """
    rows = sorted(far | {v})
    owners = sorted(far)
    relations = presentation.matrix(rows=rows, owners=owners)

    def unit(g: str) -> list[int]:
        return [1 if r == g else 0 for r in rows]

    along_v = det_int(relations.with_column(unit(v), position=0))
    along_s = det_int(relations.with_column(unit(s), position=0))
    x, y = along_s, -along_v
    content = gcd(x, y)
    if content == 0:
        raise ConsistencyError(f"The far side of {v}-{s} does not have rational homology of a solid torus")
    x, y = x // content, y // content
    p = element_order(relations, [x * u + y * w for u, w in zip(unit(v), unit(s))])
    if p == 0:
        raise ConsistencyError(f"Torus class across {v}-{s} has infinite order in the far piece")
    return x, y, p


def _filled_presentation(
    presentation: HomologyPresentation, near: set[str], v: str, s: str, relation: dict[str, int]
) -> HomologyPresentation:
    keep = near | {s}
    relations = {
        owner: {g: c for g, c in presentation.relations[owner].items() if g in keep} for owner in sorted(near)
    }
    relations[s] = relation
    edges = tuple(sorted([(a, b) for a, b in presentation.edges if a in near and b in near] + [(min(v, s), max(v, s))]))
    return HomologyPresentation(edges, relations)


def _towards_cut(diagram: SpliceDiagram, x: str, v: str, other: str) -> str:
    """Neighbor of node x whose direction contains the cut edge v-other."""
    if x == v:
        return other
    path = nx.shortest_path(diagram.graph, x, v)
    return str(path[1])


def _cut_side(piece: CoverPiece, v: str, other: str, divisor: int) -> CoverSide:
    presentation, diagram = piece.presentation, piece.diagram
    s = presentation.first_step(v, other)
    far = presentation.component(v, s)
    near = presentation.component(s, v)
    x, y, p = _glue_relation(presentation, v, s, far)
    filled = _filled_presentation(presentation, near, v, s, {v: p * x, s: p * y})
    underlying = _filled_presentation(presentation, near, v, s, {v: x, s: y})

    nodes = {n: diagram.sign(n) for n in diagram.nodes if n in near}
    leaves = [leaf for leaf in diagram.leaves if leaf in near] + [s]
    edges = [(a, b) for a, b in diagram.edges if a in near and b in near] + [(min(v, s), max(v, s))]
    weights: dict[tuple[str, str], int] = {}
    for n in nodes:
        toward_cut = _towards_cut(diagram, n, v, other)
        for neighbor in diagram.neighbors(n):
            w = diagram.weight(n, neighbor)
            if neighbor == toward_cut:
                w = _exact_div(w, divisor, f"weight at {n} toward {neighbor}")
            weights[(n, s if n == v and neighbor == other else neighbor)] = w
    split_diagram = SpliceDiagram(
        node_ids=tuple(sorted(nodes)),
        leaves=tuple(sorted(leaves)),
        edges=tuple(sorted(edges)),
        weights=dict(sorted(weights.items())),
        signs=dict(sorted(nodes.items())),
    )
    degrees = {leaf: deg for leaf, deg in piece.decoration.nontrivial().items() if leaf in near}
    if p > 1:
        degrees[s] = p
    decoration = OrbifoldDecoration(dict(sorted(degrees.items())))
    decoration.validate(split_diagram, filled=True)

    order = filled.order()
    expected = _exact_div(piece.order, divisor, f"order across {v}-{other}")
    if order != expected:
        raise ConsistencyError(f"Piece at {v} has order {order}, expected {expected}")
    underlying_order = underlying.order()
    if order != p * underlying_order:
        raise ConsistencyError(f"Piece at {v}: order {order} is not {p} times {underlying_order}")
    derived = splice_from_presentation(filled).splice
    agree = derived.edges == split_diagram.edges and derived.weights == split_diagram.weights
    if not agree:
        logger.warning("weights recomputed for the piece at %s differ from the divided weights", v)
    logger.debug("side %s: divisor %s, glue degree %s, order %s", v, divisor, p, order)
    return CoverSide(
        node=v,
        divisor=divisor,
        new_leaf=s,
        new_leaf_weight=split_diagram.weight(v, s),
        glue_degree=p,
        underlying_order=underlying_order,
        derived_weights_agree=agree,
        piece=CoverPiece(filled, split_diagram, decoration, order),
    )


def split_at_edge(source: PlumbingDiagram | CoverPiece, a: str, b: str) -> CoverSplit:
    """Split along the node-edge a-b into the two filled orbifold pieces.

    Raises:
        InputError: If a-b is not an edge between two nodes
        ConsistencyError: If a division that must be exact is not
    """
    piece = _as_piece(source)
    piece.diagram.require_node_edge(a, b)
    presentation = piece.presentation
    d_0 = presentation.ideal_generator(b, presentation.first_step(b, a))
    d_1 = presentation.ideal_generator(a, presentation.first_step(a, b))
    logger.debug("splitting %s-%s with ideal generators %s, %s", a, b, d_0, d_1)
    sides = (_cut_side(piece, a, b, d_1), _cut_side(piece, b, a, d_0))
    return CoverSplit(edge=(a, b), order=piece.order, ideal_generators=(d_0, d_1), sides=sides)


def cover_piece_data(source: PlumbingDiagram | CoverPiece, v: str, other: str) -> CoverPieceData:
    """λ, fiber degree, base degree and cover Euler number for the node v next to the cut v-other.

    A zero-weight leaf at v kills a multiple of the fiber, so e and ẽ are undefined
    there and come back as None.
    """
    piece = _as_piece(source)
    diagram, presentation, d = piece.diagram, piece.presentation, piece.order
    diagram.require_node_edge(v, other)
    divisor = presentation.ideal_generator(v, presentation.first_step(v, other))
    r = diagram.weight(v, other)
    arms = [x for x in diagram.neighbors(v) if x != other]
    n = {x: diagram.weight(v, x) for x in arms}
    d_j = {x: presentation.ideal_generator(v, presentation.first_step(v, x)) for x in arms}
    zeros = [x for x in arms if n[x] == 0]
    if r == 0:
        lam = divisor * prod(n.values())
    elif zeros:
        (zero,) = zeros
        lam = d_j[zero] * r * prod(n[x] for x in arms if x != zero)
    else:
        orders = [_exact_div(n[x], d_j[x], f"weight at {v} toward {x}") for x in arms]
        orders.append(_exact_div(r, divisor, f"weight at {v} toward {other}"))
        lam = _exact_div(r * prod(n.values()), lcm(*orders), "fiber quotient order")
    f = _exact_div(d, lam, f"|H_1| over λ at {v}")
    base = _exact_div(lam, divisor, f"λ over divisor at {v}")
    e: Fraction | None = None
    cover_e: Fraction | None = None
    if any(diagram.is_leaf(x) for x in zeros):
        logger.debug("node %s has a zero-weight leaf; Euler numbers are undefined", v)
    else:
        e = euler_number(diagram, d, v)
        cover_e = Fraction(d) * e / (divisor * f * f)
    return CoverPieceData(
        node=v,
        lambda_=lam,
        fiber_degree=f,
        base_degree=base,
        euler=e,
        cover_euler=cover_e,
        divisor=divisor,
        meridian_order=presentation.meridian_order(v),
        fiber_quotient_order=presentation.fiber_quotient_order(v),
    )


def connected_sum_degree(orders: Sequence[int], sum_degrees: Sequence[int] | None = None) -> int:
    """Cover degree of M_1 #_{p_2} L_2 ... by the induction d_k = n_k d_{k-1} / p_k."""
    if not orders:
        return 1
    degrees = list(sum_degrees) if sum_degrees is not None else [1] * (len(orders) - 1)
    if len(degrees) != len(orders) - 1:
        raise InputError("Need one sum degree per connected-sum step")
    degree = orders[0]
    for order, p in zip(orders[1:], degrees):
        degree = _exact_div(order * degree, p, "connected-sum degree")
    return degree


def one_node_uac(
    diagram: SpliceDiagram, d: int, decoration: OrbifoldDecoration | None = None
) -> BrieskornCover | ConnectedSumCover:
    """Base case: a Brieskorn complete intersection or a connected sum of lens-space quotients.

    With a zero-weight leaf of orbifold degree p, each other leaf of weight n bounds a
    lens-space quotient of order p n carrying a degree-p curve, and the summands are
    joined along spheres meeting that curve.

    Raises:
        SpliceValidationError: If the node has two zero weights
        ConsistencyError: If e = 0 or the connected-sum degree differs from d
    """
    if len(diagram.nodes) != 1:
        raise InputError("one_node_uac needs exactly one node")
    (v,) = diagram.nodes
    weights = [diagram.weight(v, x) for x in diagram.neighbors(v)]
    zeros = [x for x in diagram.neighbors(v) if diagram.weight(v, x) == 0]
    if len(zeros) > 1:
        raise SpliceValidationError(f"Node {v} has {len(zeros)} zero weights")
    if zeros:
        p = (decoration or OrbifoldDecoration()).degree(zeros[0])
        orders = tuple(sorted(w for w in weights if w != 0))
        degree = connected_sum_degree([p * n for n in orders], [p] * (len(orders) - 1))
        if degree != d:
            raise ConsistencyError(f"Connected-sum degree {degree} differs from |H_1| = {d}")
        return ConnectedSumCover(node=v, orders=orders, degree=degree, sum_degree=p)
    e = euler_number(diagram, d, v)
    if e == 0:
        raise ConsistencyError(f"Node {v} has rational Euler number 0")
    orientation: Literal["standard", "reversed"] = "standard" if e < 0 else "reversed"
    return BrieskornCover(node=v, exponents=tuple(sorted(weights)), orientation=orientation, euler=e, degree=d)


def _plan(piece: CoverPiece, first_edge: tuple[str, str] | None = None) -> UacDescriptor:
    diagram = piece.diagram
    if len(diagram.nodes) == 1:
        return one_node_uac(diagram, piece.order, piece.decoration)
    a, b = first_edge if first_edge is not None else min(diagram.node_edges())
    split = split_at_edge(piece, a, b)
    pieces = (cover_piece_data(piece, a, b), cover_piece_data(piece, b, a))
    children = (_plan(split.sides[0].piece), _plan(split.sides[1].piece))
    for side, child in zip(split.sides, children):
        if child.degree * side.divisor != piece.order:
            raise ConsistencyError(f"Degree {child.degree} of the piece at {side.node} does not conserve {piece.order}")
    return SplitCover(split=split, pieces=pieces, children=children, degree=piece.order)


def uac_plan(
    plumbing: PlumbingDiagram,
    decoration: Mapping[str, int] | None = None,
    first_edge: tuple[str, str] | None = None,
) -> UacDescriptor:
    """Recursive universal abelian cover plan of a plumbed (orbifold) graph manifold.

    Args:
        plumbing: Normal-form plumbing with det != 0 and at least one node
        decoration: Orbifold degree per plumbing leaf
        first_edge: Node-edge cut first; the lexicographically first node-edge otherwise
    """
    piece = CoverPiece.from_plumbing(plumbing, decoration)
    if first_edge is not None:
        piece.diagram.require_node_edge(*first_edge)
    return _plan(piece, first_edge)


def plan_leaves(descriptor: UacDescriptor) -> list[BrieskornCover | ConnectedSumCover]:
    if isinstance(descriptor, SplitCover):
        return [leaf for child in descriptor.children for leaf in plan_leaves(child)]
    return [descriptor]


def zhs_check(diagram: SpliceDiagram) -> bool:
    """Pairwise coprime weights at every node make the universal abelian cover a ZHS."""
    return pairwise_coprime_at_nodes(diagram)


@dataclass(frozen=True)
class PlanSummary:
    """What a plan must agree on whichever node-edge is cut first."""

    degree: int
    leaves: tuple[tuple[str, tuple[int, ...], int], ...]

    @classmethod
    def of(cls, descriptor: UacDescriptor) -> "PlanSummary":
        leaves = []
        for leaf in plan_leaves(descriptor):
            if isinstance(leaf, BrieskornCover):
                leaves.append(("brieskorn", leaf.exponents, leaf.degree))
            else:
                leaves.append(("connected_sum", leaf.orders, leaf.degree))
        return cls(descriptor.degree, tuple(sorted(leaves)))
