import pytest

from splicekit.services.plumbing import PlumbingDiagram
from splicekit.services.splice import SpliceDiagram

E8_TEXT = """\
# E8: the Poincare homology sphere
v n -2
v a1 -2
v b1 -2
v b2 -2
v c1 -2
v c2 -2
v c3 -2
v c4 -2
e n a1
e n b1
e b1 b2
e n c1
e c1 c2
e c2 c3
e c3 c4
"""

DUMBBELL_TEXT = """\
v u -3
v w -3
v l1 -2
v l2 -2
v r1 -2
v r2 -2
e u l1
e u l2
e u w
e w r1
e w r2
"""


@pytest.fixture
def e8() -> PlumbingDiagram:
    """Star with arms of length 1, 2 and 4; det 1."""
    return PlumbingDiagram.build(
        {"n": -2, "a1": -2, "b1": -2, "b2": -2, "c1": -2, "c2": -2, "c3": -2, "c4": -2},
        [("n", "a1"), ("n", "b1"), ("b1", "b2"), ("n", "c1"), ("c1", "c2"), ("c2", "c3"), ("c3", "c4")],
    )


@pytest.fixture
def dumbbell() -> PlumbingDiagram:
    """Two -3 nodes joined directly, each with two -2 leaves; det 48."""
    return PlumbingDiagram.build(
        {"u": -3, "w": -3, "l1": -2, "l2": -2, "r1": -2, "r2": -2},
        [("u", "l1"), ("u", "l2"), ("u", "w"), ("w", "r1"), ("w", "r2")],
    )


@pytest.fixture
def unimodular_pair() -> PlumbingDiagram:
    """Two nodes with leaves of weight -2 and -3; det 1, end weights (2, 3, 37) and (2, 3, 1)."""
    return PlumbingDiagram.build(
        {"u": -1, "ua": -2, "ub": -3, "w": -7, "wa": -2, "wb": -3},
        [("u", "ua"), ("u", "ub"), ("u", "w"), ("w", "wa"), ("w", "wb")],
    )


@pytest.fixture
def indefinite_star() -> PlumbingDiagram:
    """A -1 node with three -2 leaves; det -4."""
    return PlumbingDiagram.build({"n": -1, "a": -2, "b": -2, "c": -2}, [("n", "a"), ("n", "b"), ("n", "c")])


@pytest.fixture
def string_pair() -> PlumbingDiagram:
    """Two -3 nodes joined through a -2 string vertex; det 64."""
    return PlumbingDiagram.build(
        {"u": -3, "ul1": -2, "ul2": -2, "s": -2, "w": -3, "wl1": -2, "wl2": -2},
        [("u", "ul1"), ("u", "ul2"), ("u", "s"), ("s", "w"), ("w", "wl1"), ("w", "wl2")],
    )


@pytest.fixture
def zero_weight_cut() -> PlumbingDiagram:
    """A -1 node with three -3 leaves next to a -2 node with leaves -2 and -3; det -162.

    The weight at v02 toward v00 is 0, and the fiber of v02 has order 3 on the v00 side.
    """
    return PlumbingDiagram.build(
        {"v00": -1, "v01": -3, "v02": -2, "v03": -2, "v04": -3, "v05": -3, "v06": -3},
        [("v00", "v01"), ("v00", "v02"), ("v00", "v05"), ("v00", "v06"), ("v02", "v03"), ("v02", "v04")],
    )


@pytest.fixture
def lens_space() -> PlumbingDiagram:
    return PlumbingDiagram.build({"x": -2}, [])


@pytest.fixture
def negative_edge_splice() -> SpliceDiagram:
    """Two positive nodes with leaves 2 and 3 joined by weights 1 and 1; D = -35."""
    return SpliceDiagram.build(
        signs={"u": 1, "w": 1},
        leaves=["u2", "u3", "w2", "w3"],
        weighted_edges=[
            ("u", "u2", 2, None),
            ("u", "u3", 3, None),
            ("u", "w", 1, 1),
            ("w", "w2", 2, None),
            ("w", "w3", 3, None),
        ],
    )


@pytest.fixture
def three_node_splice() -> SpliceDiagram:
    """Chain v1 - v2 - v3 with a negative middle node; D is 430 and 432 on the two edges."""
    return SpliceDiagram.build(
        signs={"v1": 1, "v2": -1, "v3": 1},
        leaves=["a3", "a5", "b7", "c2", "c3"],
        weighted_edges=[
            ("v1", "a3", 3, None),
            ("v1", "a5", 5, None),
            ("v1", "v2", 22, 10),
            ("v2", "b7", 7, None),
            ("v2", "v3", 2, 6),
            ("v3", "c3", 3, None),
            ("v3", "c2", 2, None),
        ],
    )


@pytest.fixture
def e8_text() -> str:
    return E8_TEXT


@pytest.fixture
def dumbbell_text() -> str:
    return DUMBBELL_TEXT
