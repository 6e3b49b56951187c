from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from logging import getLogger
from math import gcd, prod
from typing import NamedTuple

import networkx as nx

from .errors import InputError, SingularMatrixError, SpliceValidationError
from .plumbing import PlumbingDiagram, Violation, walk_string
from .presentation import HomologyPresentation

logger = getLogger(__name__)

End = tuple[str, str]


def _sign(x: int) -> int:
    # A zero end weight counts as positive; no splice formula depends on that choice.
    return -1 if x < 0 else 1


@dataclass(frozen=True)
class SpliceTree:
    """Tree shape plus end weights shared by the normalized and unnormalized diagrams."""

    node_ids: tuple[str, ...]
    leaves: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    weights: Mapping[End, int]
    atomic: bool = False

    @cached_property
    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.node_ids)
        graph.add_nodes_from(self.leaves)
        graph.add_edges_from(self.edges)
        return graph

    def is_node(self, v: str) -> bool:
        return v in self.node_ids

    def is_leaf(self, v: str) -> bool:
        return v in self.leaves

    def neighbors(self, v: str) -> list[str]:
        return sorted(self.graph.neighbors(v))

    def valence(self, v: str) -> int:
        return int(self.graph.degree(v))

    def weight(self, v: str, toward: str) -> int:
        try:
            return self.weights[(v, toward)]
        except KeyError:
            raise InputError(f"No end weight at {v} toward {toward}") from None

    def leaf_neighbors(self, v: str) -> list[str]:
        return [x for x in self.neighbors(v) if self.is_leaf(x)]

    def node_neighbors(self, v: str) -> list[str]:
        return [x for x in self.neighbors(v) if self.is_node(x)]

    def node_edges(self) -> list[tuple[str, str]]:
        return [(a, b) for a, b in self.edges if self.is_node(a) and self.is_node(b)]

    def product_except(self, v: str, toward: str) -> int:
        """Product of all end weights at v other than the one toward `toward` (N_v)."""
        return prod(self.weight(v, x) for x in self.neighbors(v) if x != toward)

    def leaf_product(self, v: str) -> int:
        return prod(self.weight(v, x) for x in self.leaf_neighbors(v))

    def node_of_leaf(self, leaf: str) -> str:
        (node,) = self.graph.neighbors(leaf)
        return str(node)

    def leaf_weight(self, leaf: str) -> int:
        return self.weight(self.node_of_leaf(leaf), leaf)

    def require_node_edge(self, a: str, b: str) -> None:
        if not (self.is_node(a) and self.is_node(b) and self.graph.has_edge(a, b)):
            raise InputError(f"{a}-{b} is not an edge between two nodes")


@dataclass(frozen=True)
class SpliceDiagram(SpliceTree):
    """Normalized splice diagram: non-negative end weights and a sign per node."""

    signs: Mapping[str, int] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        signs: Mapping[str, int],
        leaves: Iterable[str],
        weighted_edges: Iterable[tuple[str, str, int | None, int | None]],
    ) -> "SpliceDiagram":
        """Assemble a diagram from (a, b, weight at a, weight at b) records.

        Leaf ends carry None.
        """
        weights: dict[End, int] = {}
        edges = []
        for a, b, wa, wb in weighted_edges:
            if wa is not None:
                weights[(a, b)] = wa
            if wb is not None:
                weights[(b, a)] = wb
            edges.append((a, b) if a <= b else (b, a))
        return cls(
            node_ids=tuple(sorted(signs)),
            leaves=tuple(sorted(leaves)),
            edges=tuple(sorted(edges)),
            weights=dict(sorted(weights.items())),
            signs=dict(sorted(signs.items())),
        )

    @classmethod
    def atomic_marker(cls) -> "SpliceDiagram":
        return cls(node_ids=(), leaves=(), edges=(), weights={}, atomic=True)

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.node_ids

    def sign(self, v: str) -> int:
        return self.signs[v]

    def replace(
        self,
        signs: Mapping[str, int] | None = None,
        leaves: Iterable[str] | None = None,
        edges: Iterable[tuple[str, str]] | None = None,
        weights: Mapping[End, int] | None = None,
    ) -> "SpliceDiagram":
        new_signs = self.signs if signs is None else signs
        return SpliceDiagram(
            node_ids=tuple(sorted(new_signs)),
            leaves=tuple(sorted(self.leaves if leaves is None else leaves)),
            edges=tuple(sorted(self.edges if edges is None else edges)),
            weights=dict(sorted((self.weights if weights is None else weights).items())),
            signs=dict(sorted(new_signs.items())),
        )


@dataclass(frozen=True)
class UnnormalizedSpliceDiagram(SpliceTree):
    """Signed end weights d̃_ve = det of the cut piece; no node signs."""

    def normalized(self, det: int) -> SpliceDiagram:
        signs = {v: _sign(det) * prod(_sign(self.weight(v, x)) for x in self.neighbors(v)) for v in self.node_ids}
        return SpliceDiagram(
            node_ids=self.node_ids,
            leaves=self.leaves,
            edges=self.edges,
            weights={end: abs(w) for end, w in self.weights.items()},
            atomic=self.atomic,
            signs=signs,
        )


@dataclass(frozen=True)
class MaximalSpliceDiagram:
    """The plumbing tree with a signed weight at every (vertex, neighbor) end."""

    edges: tuple[tuple[str, str], ...]
    weights: Mapping[End, int]

    @cached_property
    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from({v for v, _ in self.weights})
        graph.add_edges_from(self.edges)
        return graph

    def neighbors(self, v: str) -> list[str]:
        return sorted(self.graph.neighbors(v))

    def valence(self, v: str) -> int:
        return int(self.graph.degree(v))

    def to_unnormalized(self) -> UnnormalizedSpliceDiagram:
        """Erase valence-2 vertices and keep only node-adjacent end weights."""
        nodes = sorted(v for v in self.graph if self.valence(v) >= 3)
        if not nodes:
            return UnnormalizedSpliceDiagram(node_ids=(), leaves=(), edges=(), weights={}, atomic=True)
        leaves: set[str] = set()
        edges: set[tuple[str, str]] = set()
        weights: dict[End, int] = {}
        for v in nodes:
            for toward in self.neighbors(v):
                end = walk_string(self, v, toward)[-1]
                if self.valence(end) == 1:
                    leaves.add(end)
                weights[(v, end)] = self.weights[(v, toward)]
                edges.add((v, end) if v <= end else (end, v))
        return UnnormalizedSpliceDiagram(
            node_ids=tuple(nodes),
            leaves=tuple(sorted(leaves)),
            edges=tuple(sorted(edges)),
            weights=dict(sorted(weights.items())),
        )


@dataclass(frozen=True)
class OrbifoldDecoration:
    """Orbifold degree per leaf; leaves not listed are smooth (degree 1)."""

    degrees: Mapping[str, int] = field(default_factory=dict)

    def degree(self, leaf: str) -> int:
        return self.degrees.get(leaf, 1)

    @property
    def product(self) -> int:
        return prod(self.degrees.values())

    def nontrivial(self) -> dict[str, int]:
        return {leaf: p for leaf, p in sorted(self.degrees.items()) if p != 1}

    def validate(self, diagram: SpliceTree, filled: bool = False) -> None:
        """Check degrees and the zero-weight-leaf hypothesis.

        Args:
            diagram: Diagram the degrees refer to
            filled: Piece cut and filled while planning a cover, whose glued leaves may
                have weight zero and still carry a curve

        Raises:
            SpliceValidationError: On an unknown leaf, a degree below 1, or an orbifold
                curve on a leaf of weight zero
        """
        for leaf, degree in self.degrees.items():
            if not diagram.is_leaf(leaf):
                raise SpliceValidationError(f"Orbifold degree given for {leaf}, which is not a leaf")
            if degree < 1:
                raise SpliceValidationError(f"Orbifold degree of {leaf} must be at least 1")
            if degree > 1 and not filled and diagram.leaf_weight(leaf) == 0:
                raise SpliceValidationError(f"Leaf {leaf} has weight 0 and cannot carry an orbifold curve")


class SpliceDerivation(NamedTuple):
    splice: SpliceDiagram
    unnormalized: UnnormalizedSpliceDiagram
    maximal: MaximalSpliceDiagram


def splice_from_presentation(presentation: HomologyPresentation) -> SpliceDerivation:
    """Derive all three splice diagrams from a square relation presentation.

    Raises:
        SingularMatrixError: If the presentation has determinant 0
    """
    det = presentation.det()
    if det == 0:
        raise SingularMatrixError("Cannot derive a splice diagram when det = 0")
    maximal_weights = {
        (x, y): presentation.cut_determinant(x, y) for x in presentation.generators for y in presentation.neighbors(x)
    }
    maximal = MaximalSpliceDiagram(edges=presentation.edges, weights=dict(sorted(maximal_weights.items())))
    unnormalized = maximal.to_unnormalized()
    splice = SpliceDiagram.atomic_marker() if unnormalized.atomic else unnormalized.normalized(det)
    logger.debug("derived splice diagram with %s nodes, det %s", len(splice.nodes), det)
    return SpliceDerivation(splice, unnormalized, maximal)


def splice_from_plumbing(diagram: PlumbingDiagram, decoration: Mapping[str, int] | None = None) -> SpliceDerivation:
    """Splice diagrams of a plumbed manifold, or of its orbifold when decorated.

    Args:
        diagram: Normal-form plumbing with det != 0
        decoration: Orbifold degree per plumbing leaf
    """
    return splice_from_presentation(HomologyPresentation.from_plumbing(diagram, decoration))


def edge_determinant(diagram: SpliceTree, a: str, b: str) -> int:
    """D = r_0 r_1 - ε_0 ε_1 N_0 N_1, or D̃ = r̃_0 r̃_1 - Ñ_0 Ñ_1 for an unnormalized diagram.

    Raises:
        InputError: If a-b is not an edge between two nodes
    """
    diagram.require_node_edge(a, b)
    r0, r1 = diagram.weight(a, b), diagram.weight(b, a)
    n0, n1 = diagram.product_except(a, b), diagram.product_except(b, a)
    if isinstance(diagram, SpliceDiagram):
        return r0 * r1 - diagram.sign(a) * diagram.sign(b) * n0 * n1
    return r0 * r1 - n0 * n1


def validate_splice(diagram: SpliceDiagram) -> Violation | None:
    """Check the structural invariants of a normalized splice diagram."""
    if diagram.atomic:
        return None
    if not diagram.node_ids:
        return Violation("empty", "Splice diagram has no nodes and no atomic marker")
    if not nx.is_tree(diagram.graph):
        return Violation("not-a-tree", "Splice diagram is not a tree")
    for v in diagram.graph:
        if not diagram.is_node(v) and not diagram.is_leaf(v):
            return Violation("undeclared-vertex", f"{v} is neither a declared node nor a leaf", vertex=v)
        if diagram.is_node(v) and diagram.is_leaf(v):
            return Violation("ambiguous-vertex", f"{v} is both a node and a leaf", vertex=v)
        if diagram.is_leaf(v) and diagram.valence(v) != 1:
            return Violation("leaf-valence", f"Leaf {v} has valence {diagram.valence(v)}", vertex=v)
        if diagram.is_node(v) and diagram.valence(v) < 3:
            return Violation("node-valence", f"Node {v} has valence {diagram.valence(v)}", vertex=v)
    for v in diagram.node_ids:
        if diagram.signs.get(v) not in (1, -1):
            return Violation("sign", f"Node {v} needs a sign of +1 or -1", vertex=v)
        zeros = 0
        for x in diagram.neighbors(v):
            if (v, x) not in diagram.weights:
                return Violation("missing-weight", f"No end weight at {v} toward {x}", vertex=v, edge=(v, x))
            w = diagram.weights[(v, x)]
            if w < 0:
                return Violation("negative-weight", f"End weight at {v} toward {x} is negative", edge=(v, x))
            if w == 0 and diagram.is_leaf(x):
                return Violation("zero-leaf-weight", f"Leaf edge {v}-{x} has weight 0", edge=(v, x))
            zeros += w == 0
        if zeros > 1:
            return Violation("zero-weights", f"Node {v} has {zeros} zero end weights", vertex=v)
    return None


def require_valid_splice(diagram: SpliceDiagram) -> SpliceDiagram:
    violation = validate_splice(diagram)
    if violation is not None:
        raise SpliceValidationError(violation.message)
    return diagram


def sees(diagram: SpliceTree, v: str, toward: str, leaf: str) -> bool:
    """Whether the end weight at v toward `toward` sees `leaf`."""
    if leaf == toward:
        return True
    remainder = diagram.graph.copy()
    remainder.remove_node(v)
    return bool(nx.has_path(remainder, toward, leaf))


def linking_product(diagram: SpliceTree, v: str, w: str) -> int:
    """ℓ_vw: product of the end weights adjacent to, but not on, the path from v to w.

    For v = w this is the product of every end weight at v.
    """
    for x in (v, w):
        if not diagram.is_node(x):
            raise InputError(f"{x} is not a node")
    path = nx.shortest_path(diagram.graph, v, w)
    result = 1
    for i, x in enumerate(path):
        on_path = set(path[max(i - 1, 0) : i + 2]) - {x}
        result *= prod(diagram.weight(x, y) for y in diagram.neighbors(x) if y not in on_path)
    return result


def pairwise_coprime_at_nodes(diagram: SpliceDiagram) -> bool:
    for v in diagram.nodes:
        weights = [diagram.weight(v, x) for x in diagram.neighbors(v)]
        for i, a in enumerate(weights):
            if any(gcd(a, b) != 1 for b in weights[i + 1 :]):
                return False
    return True


def orbifold_adjust(diagram: SpliceDiagram, decoration: OrbifoldDecoration) -> tuple[SpliceDiagram, int]:
    """Multiply every end weight by the degrees of the orbifold leaves it sees.

    Returns:
        The adjusted diagram and P, the product of all degrees
    """
    decoration.validate(diagram)
    orbifold_leaves = decoration.nontrivial()
    weights = {
        (v, x): w * prod(p for leaf, p in orbifold_leaves.items() if sees(diagram, v, x, leaf))
        for (v, x), w in diagram.weights.items()
    }
    return diagram.replace(weights=weights), decoration.product
