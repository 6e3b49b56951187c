from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splicekit.services.errors import InputError, NormalFormError, SingularMatrixError
from splicekit.services.plumbing import (
    PlumbingDiagram,
    arm_vertices,
    cut_after,
    det_plumbing,
    h1_order,
    intersection_matrix,
    node_euler_from_plumbing,
    random_normal_form,
    require_nonsingular,
    require_normal_form,
    seifert_data,
    string_between,
    string_determinant,
    validate_normal_form,
    walk_string,
)

from tests.strategies import stars


def test_build_normalizes_edges():
    """Edge orientation and order do not affect equality."""
    a = PlumbingDiagram.build({"x": -2, "y": -2}, [("y", "x")])
    b = PlumbingDiagram.build({"y": -2, "x": -2}, [("x", "y")])
    assert a == b
    assert a.edges == (("x", "y"),)


def test_intersection_matrix():
    """Weights on the diagonal in sorted vertex order, 1 for each edge."""
    diagram = PlumbingDiagram.build({"b": -3, "a": -2}, [("b", "a")])
    matrix = intersection_matrix(diagram)
    assert matrix.rows == ((-2, 1), (1, -3))
    assert det_plumbing(diagram) == 5


def test_det_of_e8(e8):
    """E8 is unimodular."""
    assert det_plumbing(e8) == 1


def test_det_of_dumbbell(dumbbell):
    assert det_plumbing(dumbbell) == 48
    assert h1_order(dumbbell) == 48


def test_det_of_indefinite_star(indefinite_star):
    """det is signed; |H_1| is its absolute value."""
    assert det_plumbing(indefinite_star) == -4
    assert h1_order(indefinite_star) == 4


def test_det_of_empty_diagram():
    assert det_plumbing(PlumbingDiagram.build({}, [])) == 1


def test_require_nonsingular():
    """Four -2 leaves around a -2 node have det 0."""
    diagram = PlumbingDiagram.build(
        {"n": -2, "a": -2, "b": -2, "c": -2, "d": -2}, [("n", "a"), ("n", "b"), ("n", "c"), ("n", "d")]
    )
    with pytest.raises(SingularMatrixError):
        require_nonsingular(diagram)


def test_normal_form_accepts_fixtures(e8, dumbbell, string_pair, lens_space):
    for diagram in (e8, dumbbell, string_pair, lens_space):
        assert validate_normal_form(diagram) is None


@pytest.mark.parametrize(
    ("weights", "edges", "kind"),
    [
        ({}, [], "empty"),
        ({"a": -2}, [("a", "b")], "dangling-edge"),
        ({"a": -2}, [("a", "a")], "loop"),
        ({"a": -2, "b": -2}, [("a", "b"), ("b", "a")], "multi-edge"),
        ({"a": -2, "b": -2, "c": -2}, [("a", "b"), ("b", "c"), ("a", "c")], "cycle"),
        ({"a": -2, "b": -2, "c": -2}, [("a", "b")], "disconnected"),
        ({"a": -2, "b": -1}, [("a", "b")], "string-weight"),
    ],
)
def test_normal_form_violations(weights, edges, kind):
    """Each structural problem is reported with its own kind."""
    violation = validate_normal_form(PlumbingDiagram.build(weights, edges))
    assert violation is not None
    assert violation.kind == kind


def test_string_weight_violation_names_vertex():
    violation = validate_normal_form(PlumbingDiagram.build({"a": -2, "b": -1}, [("a", "b")]))
    assert violation.vertex == "b"


def test_node_weights_are_unrestricted(indefinite_star):
    """A -1 node is allowed; only vertices of valence at most 2 need weight <= -2."""
    assert require_normal_form(indefinite_star) is indefinite_star


def test_require_normal_form_raises():
    with pytest.raises(NormalFormError):
        require_normal_form(PlumbingDiagram.build({"a": 0}, []))


def test_cut_after(dumbbell):
    """Removing u leaves the w component with its leaves."""
    assert cut_after(dumbbell, "u", "w").vertices == ("r1", "r2", "w")


def test_cut_after_requires_adjacency(dumbbell):
    with pytest.raises(InputError):
        cut_after(dumbbell, "u", "r1")


def test_walk_string_stops_at_first_non_string_vertex(e8, string_pair):
    assert walk_string(e8, "n", "c1") == ["c1", "c2", "c3", "c4"]
    assert walk_string(string_pair, "u", "s") == ["s", "w"]


def test_seifert_data_of_e8(e8):
    """Arms of length 1, 2 and 4 give (2, 1), (3, 2) and (5, 4)."""
    data = seifert_data(e8)
    assert data.pairs == ((2, 1), (3, 2), (5, 4))
    assert data.alphas == (2, 3, 5)
    assert data.node_weight == -2
    assert data.e == Fraction(-1, 30)


def test_seifert_data_requires_star(dumbbell):
    with pytest.raises(InputError):
        seifert_data(dumbbell)


def test_node_euler_from_plumbing(e8, dumbbell, unimodular_pair):
    assert node_euler_from_plumbing(e8, "n") == Fraction(-1, 30)
    assert node_euler_from_plumbing(dumbbell, "u") == -2
    assert node_euler_from_plumbing(unimodular_pair, "u") == Fraction(-1, 6)
    assert node_euler_from_plumbing(unimodular_pair, "w") == Fraction(-37, 6)


def test_node_euler_rejects_string_vertex(string_pair):
    with pytest.raises(InputError):
        node_euler_from_plumbing(string_pair, "s")


def test_string_between(string_pair, dumbbell):
    assert string_between(string_pair, "u", "w") == ["s"]
    assert string_determinant(string_pair, "u", "w") == 2
    assert string_between(dumbbell, "u", "w") == []
    assert string_determinant(dumbbell, "u", "w") == 1


def test_string_between_requires_nodes(string_pair):
    with pytest.raises(InputError):
        string_between(string_pair, "u", "ul1")


def test_arm_vertices(e8):
    arms = sorted(arm_vertices(e8))
    assert arms == [["a1"], ["b1", "b2"], ["c1", "c2", "c3", "c4"]]


def test_random_normal_form_is_deterministic():
    assert random_normal_form(7) == random_normal_form(7)


def test_random_normal_form_rejects_bad_bounds():
    with pytest.raises(InputError):
        random_normal_form(0, string_weights=(-5, -1))
    with pytest.raises(InputError):
        random_normal_form(0, max_vertices=2, min_vertices=3)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=10))
def test_random_normal_form_output(seed, max_vertices):
    """Generated diagrams are nonsingular normal-form trees within the vertex bound."""
    diagram = random_normal_form(seed, max_vertices=max_vertices)
    assert validate_normal_form(diagram) is None
    assert det_plumbing(diagram) != 0
    assert len(diagram.vertices) <= max_vertices


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=2, max_value=10))
def test_edge_split_determinant(seed, max_vertices):
    """det = det(side a) det(side b) - det(side a minus a) det(side b minus b) across every edge."""
    diagram = random_normal_form(seed, max_vertices=max_vertices)
    for a, b in diagram.edges:
        side_a = cut_after(diagram, b, a)
        side_b = cut_after(diagram, a, b)
        inner_a = diagram.subdiagram(x for x in side_a.vertices if x != a)
        inner_b = diagram.subdiagram(x for x in side_b.vertices if x != b)
        expected = det_plumbing(side_a) * det_plumbing(side_b) - det_plumbing(inner_a) * det_plumbing(inner_b)
        assert det_plumbing(diagram) == expected


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=4, max_value=12))
def test_arm_determinants_are_positive(seed, max_vertices):
    """Arms of a normal-form plumbing are strings of weights <= -2."""
    diagram = random_normal_form(seed, max_vertices=max_vertices)
    for arm in arm_vertices(diagram):
        assert det_plumbing(diagram.subdiagram(arm)) > 0


@settings(max_examples=50, deadline=None)
@given(stars())
def test_seifert_alphas_are_arm_determinants(diagram):
    data = seifert_data(diagram)
    arm_dets = sorted(abs(det_plumbing(cut_after(diagram, "c", toward))) for toward in diagram.neighbors("c"))
    assert list(data.alphas) == arm_dets


@settings(max_examples=50, deadline=None)
@given(stars())
def test_seifert_euler_matches_continued_fractions(diagram):
    assert seifert_data(diagram).e == node_euler_from_plumbing(diagram, "c")
