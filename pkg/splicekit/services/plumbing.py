import random
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from logging import getLogger
from typing import Protocol

import networkx as nx

from .errors import InputError, NormalFormError, SingularMatrixError
from .linalg import ContinuedFraction, ExactMatrix, continuant, det_int

logger = getLogger(__name__)


def _edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class PlumbingDiagram:
    """A genus-zero plumbing tree: vertex Euler weights joined by plumbing edges."""

    weights: Mapping[str, int]
    edges: tuple[tuple[str, str], ...] = field(default=())

    @classmethod
    def build(cls, weights: Mapping[str, int], edges: Iterable[tuple[str, str]]) -> "PlumbingDiagram":
        """Normalize edge orientation and ordering so equal diagrams compare equal."""
        return cls(dict(sorted(weights.items())), tuple(sorted(_edge_key(a, b) for a, b in edges)))

    @cached_property
    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.weights)
        graph.add_edges_from(self.edges)
        return graph

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(sorted(self.weights))

    def neighbors(self, v: str) -> list[str]:
        return sorted(self.graph.neighbors(v))

    def valence(self, v: str) -> int:
        return int(self.graph.degree(v))

    def nodes(self) -> list[str]:
        return [v for v in self.vertices if self.valence(v) >= 3]

    def subdiagram(self, vertices: Iterable[str]) -> "PlumbingDiagram":
        keep = set(vertices)
        return PlumbingDiagram.build(
            {v: w for v, w in self.weights.items() if v in keep},
            [(a, b) for a, b in self.edges if a in keep and b in keep],
        )


@dataclass(frozen=True)
class Violation:
    """Why a diagram failed validation."""

    kind: str
    message: str
    vertex: str | None = None
    edge: tuple[str, str] | None = None


@dataclass(frozen=True)
class SeifertData:
    """Unnormalized Seifert invariant (0; (α_1, β_1), ..., (α_k, β_k)) of a star."""

    node_weight: int
    pairs: tuple[tuple[int, int], ...]
    e: Fraction

    @property
    def alphas(self) -> tuple[int, ...]:
        return tuple(alpha for alpha, _ in self.pairs)

    @property
    def betas(self) -> tuple[int, ...]:
        return tuple(beta for _, beta in self.pairs)


def validate_normal_form(diagram: PlumbingDiagram) -> Violation | None:
    """Check the tree and string-weight constraints of normal form.

    Returns:
        None when the diagram is in normal form, otherwise the first violation found
    """
    if not diagram.weights:
        return Violation("empty", "Plumbing diagram has no vertices")
    seen: set[tuple[str, str]] = set()
    for a, b in diagram.edges:
        for endpoint in (a, b):
            if endpoint not in diagram.weights:
                return Violation("dangling-edge", f"Edge {a}-{b} names unknown vertex {endpoint}", edge=(a, b))
        if a == b:
            return Violation("loop", f"Vertex {a} is joined to itself", vertex=a, edge=(a, b))
        if (a, b) in seen:
            return Violation("multi-edge", f"Edge {a}-{b} appears more than once", edge=(a, b))
        seen.add((a, b))
    if not nx.is_tree(diagram.graph):
        if not nx.is_connected(diagram.graph):
            return Violation("disconnected", "Plumbing diagram is not connected")
        cycle = nx.find_cycle(diagram.graph)
        a, b = cycle[0][:2]
        return Violation("cycle", "Plumbing diagram contains a cycle", edge=_edge_key(a, b))
    for v in diagram.vertices:
        if diagram.valence(v) <= 2 and diagram.weights[v] > -2:
            return Violation(
                "string-weight",
                f"Vertex {v} has valence {diagram.valence(v)} and weight {diagram.weights[v]} > -2",
                vertex=v,
            )
    return None


def require_normal_form(diagram: PlumbingDiagram) -> PlumbingDiagram:
    violation = validate_normal_form(diagram)
    if violation is not None:
        raise NormalFormError(violation.message)
    return diagram


def intersection_matrix(diagram: PlumbingDiagram) -> ExactMatrix:
    """A(Δ) in `diagram.vertices` order: weights on the diagonal, 1 for each edge."""
    order = diagram.vertices
    index = {v: i for i, v in enumerate(order)}
    rows = [[0] * len(order) for _ in order]
    for v in order:
        rows[index[v]][index[v]] = diagram.weights[v]
    for a, b in diagram.edges:
        rows[index[a]][index[b]] = 1
        rows[index[b]][index[a]] = 1
    return ExactMatrix.from_rows(rows, ncols=len(order))


def det_plumbing(diagram: PlumbingDiagram) -> int:
    """det(Δ) = det(-A(Δ)); the empty diagram has determinant 1."""
    return det_int(-intersection_matrix(diagram))


def h1_order(diagram: PlumbingDiagram) -> int:
    """|H_1(M)|, with 0 standing for an infinite group."""
    return abs(det_plumbing(diagram))


def require_nonsingular(diagram: PlumbingDiagram) -> int:
    det = det_plumbing(diagram)
    if det == 0:
        raise SingularMatrixError("Plumbing diagram has det 0, so H_1 is infinite")
    return det


def cut_after(diagram: PlumbingDiagram, v: str, toward: str) -> PlumbingDiagram:
    """The component of Δ - v containing `toward`.

    Raises:
        InputError: If `toward` is not adjacent to `v`
    """
    if not diagram.graph.has_edge(v, toward):
        raise InputError(f"Edge {v}-{toward} is not incident to {v}")
    remainder = diagram.graph.copy()
    remainder.remove_node(v)
    return diagram.subdiagram(nx.node_connected_component(remainder, toward))


class TreeLike(Protocol):
    def neighbors(self, v: str) -> list[str]: ...

    def valence(self, v: str) -> int: ...


def walk_string(diagram: TreeLike, v: str, toward: str) -> list[str]:
    """Vertices met walking from `v` through `toward` while the valence stays 2.

    The last entry is the first vertex whose valence is not 2: a leaf or another node.
    """
    path = [toward]
    previous, current = v, toward
    while diagram.valence(current) == 2:
        (following,) = (x for x in diagram.neighbors(current) if x != previous)
        previous, current = current, following
        path.append(current)
    return path


def direction_string(diagram: PlumbingDiagram, v: str, toward: str) -> list[str]:
    """String vertices feeding v's Euler number from one direction.

    A direction ending in a leaf contributes the whole arm; one ending in a node
    contributes only the vertices strictly between.
    """
    path = walk_string(diagram, v, toward)
    if diagram.valence(path[-1]) >= 3:
        return path[:-1]
    return path


def _string_values(diagram: PlumbingDiagram, vertices: Iterable[str]) -> list[int]:
    return [-diagram.weights[x] for x in vertices]


def star_center(diagram: PlumbingDiagram) -> str:
    nodes = diagram.nodes()
    if len(nodes) == 1:
        return nodes[0]
    if not nodes and len(diagram.weights) == 1:
        return diagram.vertices[0]
    raise InputError("Diagram is not a star; pass the center explicitly")


def seifert_data(diagram: PlumbingDiagram, center: str | None = None) -> SeifertData:
    """Seifert invariants of a star-shaped plumbing read from its arms.

    Args:
        diagram: Star-shaped plumbing
        center: Center vertex; inferred when the diagram has exactly one node or one vertex

    Raises:
        InputError: If the diagram is not a star around `center`
    """
    if center is None:
        center = star_center(diagram)
    if center not in diagram.weights:
        raise InputError(f"Unknown center vertex {center}")
    if any(diagram.valence(v) > 2 for v in diagram.vertices if v != center):
        raise InputError(f"Diagram is not a star around {center}")
    pairs = []
    for toward in diagram.neighbors(center):
        values = _string_values(diagram, walk_string(diagram, center, toward))
        pairs.append((continuant(values), continuant(values[1:])))
    pairs.sort()
    b = diagram.weights[center]
    e = Fraction(b) + sum((Fraction(beta, alpha) for alpha, beta in pairs), Fraction(0))
    return SeifertData(node_weight=b, pairs=tuple(pairs), e=e)


def node_euler_from_plumbing(diagram: PlumbingDiagram, v: str) -> Fraction:
    """Rational Euler number of the Seifert piece at v from continued fractions.

    Raises:
        InputError: If v is not a node and the diagram has nodes elsewhere
    """
    if v not in diagram.weights:
        raise InputError(f"Unknown vertex {v}")
    if diagram.valence(v) < 3 and diagram.nodes():
        raise InputError(f"Vertex {v} is not a node")
    minus_e = Fraction(-diagram.weights[v])
    for toward in diagram.neighbors(v):
        values = _string_values(diagram, direction_string(diagram, v, toward))
        minus_e -= ContinuedFraction(tuple(values)).reciprocal()
    return -minus_e


def string_between(diagram: PlumbingDiagram, v: str, w: str) -> list[str]:
    """Valence-2 vertices strictly between nodes v and w.

    Raises:
        InputError: If v or w is not a node or they are not joined by a string
    """
    for x in (v, w):
        if x not in diagram.weights or diagram.valence(x) < 3:
            raise InputError(f"Vertex {x} is not a node")
    path = nx.shortest_path(diagram.graph, v, w)
    interior = path[1:-1]
    if any(diagram.valence(x) != 2 for x in interior):
        raise InputError(f"Nodes {v} and {w} are not joined by a string")
    return interior


def string_determinant(diagram: PlumbingDiagram, v: str, w: str) -> int:
    """det of -A restricted to the string between nodes v and w (1 for an empty string)."""
    return det_plumbing(diagram.subdiagram(string_between(diagram, v, w)))


def arm_vertices(diagram: PlumbingDiagram) -> list[list[str]]:
    """Every maximal arm: the vertices from a node (exclusive) out to a leaf."""
    arms = []
    for node in diagram.nodes():
        for toward in diagram.neighbors(node):
            path = walk_string(diagram, node, toward)
            if diagram.valence(path[-1]) == 1:
                arms.append(path)
    return arms


def random_normal_form(
    seed: int,
    max_vertices: int = 12,
    node_weights: tuple[int, int] = (-5, -1),
    string_weights: tuple[int, int] = (-5, -2),
    min_vertices: int = 1,
) -> PlumbingDiagram:
    """Deterministic random normal-form plumbing with nonzero determinant.

    Args:
        seed: Fixes the output completely
        max_vertices: Upper bound on the vertex count
        node_weights: Inclusive range of weights for vertices of valence >= 3
        string_weights: Inclusive range for the other vertices; the top must be <= -2
        min_vertices: Lower bound on the vertex count
    """
    if max_vertices < 1 or min_vertices < 1 or min_vertices > max_vertices:
        raise InputError("Vertex bounds must be positive and ordered")
    if string_weights[1] > -2 or string_weights[0] > string_weights[1] or node_weights[0] > node_weights[1]:
        raise InputError("Weight bounds are out of order or violate normal form")
    rng = random.Random(seed)
    while True:
        count = rng.randint(min_vertices, max_vertices)
        width = len(str(max_vertices - 1))
        ids = [f"v{i:0{width}d}" for i in range(count)]
        edges = [(ids[rng.randrange(i)], ids[i]) for i in range(1, count)]
        valence = {v: 0 for v in ids}
        for a, b in edges:
            valence[a] += 1
            valence[b] += 1
        weights = {
            v: rng.randint(*node_weights) if valence[v] >= 3 else rng.randint(*string_weights) for v in ids
        }
        diagram = PlumbingDiagram.build(weights, edges)
        if det_plumbing(diagram) != 0:
            logger.debug("seed %s produced %s vertices", seed, count)
            return diagram
