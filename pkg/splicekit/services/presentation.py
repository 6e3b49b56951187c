"""Square relation presentations of first (orbifold) homology.

A presentation has one generator per tree vertex (its meridian class) and one relation
per vertex. For a plumbing the relation owned by x is column x of A(Δ). An orbifold
leaf of degree p scales its owner's relation by p: the leaf's solid torus then kills
p times the class a smooth filling would kill. The cut-and-fill pieces produced while
planning universal abelian covers keep this form, so every weight, ideal generator and
meridian order downstream is a cokernel computation on one of these.
"""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from functools import cached_property
from logging import getLogger

import networkx as nx

from .errors import InputError
from .linalg import ExactMatrix, cokernel_order, det_int, element_order, smith_invariants
from .plumbing import PlumbingDiagram

logger = getLogger(__name__)

Relation = Mapping[str, int]


@dataclass(frozen=True)
class HomologyPresentation:
    edges: tuple[tuple[str, str], ...]
    relations: Mapping[str, Relation]

    @classmethod
    def from_plumbing(
        cls, diagram: PlumbingDiagram, decoration: Mapping[str, int] | None = None
    ) -> "HomologyPresentation":
        """Presentation of H_1 (orbifold H_1 when decorated) of a plumbed manifold.

        Args:
            diagram: The plumbing tree
            decoration: Orbifold degree per plumbing leaf; missing leaves are smooth

        Raises:
            InputError: If a decorated vertex is not a leaf of the plumbing or a degree is < 1
        """
        relations: dict[str, dict[str, int]] = {}
        for v in diagram.vertices:
            relation = {v: diagram.weights[v]}
            relation.update({x: 1 for x in diagram.neighbors(v)})
            relations[v] = relation
        for leaf, degree in (decoration or {}).items():
            if leaf not in diagram.weights or diagram.valence(leaf) != 1:
                raise InputError(f"Orbifold degree given for {leaf}, which is not a plumbing leaf")
            if degree < 1:
                raise InputError(f"Orbifold degree of {leaf} must be at least 1")
            relations[leaf] = {x: degree * c for x, c in relations[leaf].items()}
        return cls(diagram.edges, relations)

    @cached_property
    def graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.relations)
        graph.add_edges_from(self.edges)
        return graph

    @property
    def generators(self) -> tuple[str, ...]:
        return tuple(sorted(self.relations))

    def neighbors(self, v: str) -> list[str]:
        return sorted(self.graph.neighbors(v))

    def valence(self, v: str) -> int:
        return int(self.graph.degree(v))

    def matrix(self, rows: Iterable[str] | None = None, owners: Iterable[str] | None = None) -> ExactMatrix:
        """Relation matrix: generator rows, one column per relation owner."""
        row_ids = list(self.generators if rows is None else rows)
        owner_ids = list(self.generators if owners is None else owners)
        return ExactMatrix.from_rows(
            ([self.relations[owner].get(g, 0) for owner in owner_ids] for g in row_ids),
            ncols=len(owner_ids),
        )

    def det(self) -> int:
        """det of minus the relation matrix; for a plumbing this is det(Δ)."""
        return det_int(-self.matrix())

    def order(self) -> int:
        return cokernel_order(self.matrix())

    def restrict(self, vertices: Iterable[str]) -> "HomologyPresentation":
        """Cut-and-fill piece on `vertices`: their relations with outside generators set to 0."""
        keep = set(vertices)
        return HomologyPresentation(
            tuple((a, b) for a, b in self.edges if a in keep and b in keep),
            {
                owner: {g: c for g, c in relation.items() if g in keep}
                for owner, relation in self.relations.items()
                if owner in keep
            },
        )

    def component(self, v: str, toward: str) -> set[str]:
        """Vertices on the `toward` side of the edge v-toward."""
        if not self.graph.has_edge(v, toward):
            raise InputError(f"Edge {v}-{toward} is not in the tree")
        remainder = self.graph.copy()
        remainder.remove_edge(v, toward)
        return set(nx.node_connected_component(remainder, toward))

    def cut_determinant(self, v: str, toward: str) -> int:
        """Unnormalized end weight at v in the direction of `toward`."""
        return self.restrict(self.component(v, toward)).det()

    def first_step(self, v: str, target: str) -> str:
        """The tree neighbor of v on the path to `target`."""
        return str(nx.shortest_path(self.graph, v, target)[1])

    def ideal_generator(self, a: str, b: str) -> int:
        """|H_1(M, M_near)| across the edge a-b, the far side being the one containing b.

        Kills the meridians of every near-side vertex and of b, leaving the far
        generators other than b under all relations.

        Raises:
            InputError: If the quotient is infinite
        """
        far = self.component(a, b)
        rows = [g for g in self.generators if g in far and g != b]
        order = cokernel_order(self.matrix(rows=rows))
        if order == 0:
            raise InputError(f"Quotient across {a}-{b} is infinite")
        logger.debug("ideal generator across %s-%s is %s", a, b, order)
        return order

    def unit(self, v: str) -> list[int]:
        return [1 if g == v else 0 for g in self.generators]

    def meridian_order(self, v: str) -> int:
        """Order of v's meridian class (the fiber class of a node) in H_1."""
        return element_order(self.matrix(), self.unit(v))

    def fiber_quotient_order(self, v: str) -> int:
        """|H_1 / <meridian of v>|, 0 when infinite."""
        return smith_invariants(self.matrix().with_column(self.unit(v))).order
