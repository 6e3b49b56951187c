import pytest

from splicekit.services.errors import InputError, SingularMatrixError, SpliceValidationError
from splicekit.services.plumbing import PlumbingDiagram
from splicekit.services.splice import (
    OrbifoldDecoration,
    SpliceDiagram,
    edge_determinant,
    linking_product,
    orbifold_adjust,
    pairwise_coprime_at_nodes,
    require_valid_splice,
    sees,
    splice_from_plumbing,
    validate_splice,
)


def test_e8_splice_diagram(e8):
    """One positive node with weights 2, 3, 5 on the arm ends."""
    splice = splice_from_plumbing(e8).splice
    assert splice.nodes == ("n",)
    assert splice.leaves == ("a1", "b2", "c4")
    assert splice.sign("n") == 1
    assert splice.weight("n", "a1") == 2
    assert splice.weight("n", "b2") == 3
    assert splice.weight("n", "c4") == 5


def test_dumbbell_splice_diagram(dumbbell):
    splice = splice_from_plumbing(dumbbell).splice
    assert splice.nodes == ("u", "w")
    assert splice.weight("u", "w") == 8
    assert splice.weight("w", "u") == 8
    assert splice.leaf_product("u") == 4
    assert splice.node_edges() == [("u", "w")]
    assert edge_determinant(splice, "u", "w") == 48


def test_string_is_erased(string_pair):
    """The -2 string vertex disappears and the nodes become adjacent."""
    derivation = splice_from_plumbing(string_pair)
    assert "s" not in derivation.splice.graph
    assert derivation.splice.weight("u", "w") == 12
    assert derivation.maximal.weights[("u", "s")] == 12
    assert derivation.maximal.weights[("s", "u")] == 8


def test_unnormalized_edge_determinant(string_pair):
    """D~ = det * det(string) = 64 * 2."""
    unnormalized = splice_from_plumbing(string_pair).unnormalized
    assert edge_determinant(unnormalized, "u", "w") == 128


def test_negative_determinant_flips_signs(indefinite_star):
    """det -4 with positive weights gives a negative node."""
    derivation = splice_from_plumbing(indefinite_star)
    assert derivation.splice.sign("n") == -1
    assert derivation.unnormalized.weight("n", "a") == 2


def test_lens_space_is_atomic(lens_space):
    splice = splice_from_plumbing(lens_space).splice
    assert splice.atomic
    assert splice.nodes == ()
    assert validate_splice(splice) is None


def test_singular_plumbing_has_no_splice_diagram():
    diagram = PlumbingDiagram.build(
        {"n": -2, "a": -2, "b": -2, "c": -2, "d": -2}, [("n", "a"), ("n", "b"), ("n", "c"), ("n", "d")]
    )
    with pytest.raises(SingularMatrixError):
        splice_from_plumbing(diagram)


def test_edge_determinant_with_negative_edge(negative_edge_splice):
    assert edge_determinant(negative_edge_splice, "u", "w") == -35


def test_edge_determinant_requires_node_edge(negative_edge_splice):
    with pytest.raises(InputError):
        edge_determinant(negative_edge_splice, "u", "u2")


def test_edge_determinants_of_three_node_chain(three_node_splice):
    assert edge_determinant(three_node_splice, "v1", "v2") == 430
    assert edge_determinant(three_node_splice, "v2", "v3") == 432
    assert validate_splice(three_node_splice) is None


def test_linking_product_along_chain(three_node_splice):
    """Off-path weights 3, 5 at v1, 7 at v2 and 3, 2 at v3."""
    assert linking_product(three_node_splice, "v1", "v3") == 630
    assert not pairwise_coprime_at_nodes(three_node_splice)


def test_valid_splice(negative_edge_splice):
    assert require_valid_splice(negative_edge_splice) is negative_edge_splice


def test_node_of_valence_two_is_invalid():
    diagram = SpliceDiagram.build({"v": 1}, ["a", "b"], [("v", "a", 2, None), ("v", "b", 3, None)])
    violation = validate_splice(diagram)
    assert violation is not None
    assert violation.kind == "node-valence"


def test_undeclared_vertex_is_invalid():
    """An edge endpoint that is neither a node nor a leaf is rejected."""
    diagram = SpliceDiagram.build(
        {"v": 1}, ["a", "b"], [("v", "a", 2, None), ("v", "b", 3, None), ("v", "x", 5, None)]
    )
    violation = validate_splice(diagram)
    assert violation is not None
    assert violation.kind == "undeclared-vertex"
    assert violation.vertex == "x"


def test_zero_leaf_weight_is_invalid():
    diagram = SpliceDiagram.build(
        {"v": 1}, ["a", "b", "c"], [("v", "a", 2, None), ("v", "b", 3, None), ("v", "c", 0, None)]
    )
    with pytest.raises(SpliceValidationError):
        require_valid_splice(diagram)


def test_negative_weight_is_invalid():
    diagram = SpliceDiagram.build(
        {"v": 1}, ["a", "b", "c"], [("v", "a", 2, None), ("v", "b", 3, None), ("v", "c", -5, None)]
    )
    violation = validate_splice(diagram)
    assert violation is not None
    assert violation.kind == "negative-weight"


def test_invalid_sign():
    diagram = SpliceDiagram.build(
        {"v": 2}, ["a", "b", "c"], [("v", "a", 2, None), ("v", "b", 3, None), ("v", "c", 5, None)]
    )
    assert validate_splice(diagram).kind == "sign"


def test_sees(dumbbell):
    splice = splice_from_plumbing(dumbbell).splice
    assert sees(splice, "u", "w", "r1")
    assert sees(splice, "u", "l1", "l1")
    assert not sees(splice, "u", "l1", "r1")


def test_linking_product(dumbbell):
    """Off-path weights: 2 * 2 at u and 2 * 2 at w; every weight at u for v = w."""
    splice = splice_from_plumbing(dumbbell).splice
    assert linking_product(splice, "u", "w") == 16
    assert linking_product(splice, "u", "u") == 32


def test_linking_product_requires_nodes(dumbbell):
    splice = splice_from_plumbing(dumbbell).splice
    with pytest.raises(InputError):
        linking_product(splice, "u", "l1")


def test_pairwise_coprime(dumbbell, unimodular_pair):
    assert not pairwise_coprime_at_nodes(splice_from_plumbing(dumbbell).splice)
    assert pairwise_coprime_at_nodes(splice_from_plumbing(unimodular_pair).splice)


def test_orbifold_adjust_matches_derived_diagram(dumbbell):
    """Weights that see the orbifold leaf are multiplied by its degree."""
    splice = splice_from_plumbing(dumbbell).splice
    adjusted, product = orbifold_adjust(splice, OrbifoldDecoration({"l1": 3}))
    assert product == 3
    assert adjusted.weight("u", "l1") == 6
    assert adjusted.weight("u", "l2") == 2
    assert adjusted.weight("u", "w") == 8
    assert adjusted.weight("w", "u") == 24
    assert adjusted.weight("w", "r1") == 2
    assert edge_determinant(adjusted, "u", "w") == 3 * 48
    derived = splice_from_plumbing(dumbbell, {"l1": 3}).splice
    assert derived.weights == adjusted.weights
    assert derived.signs == adjusted.signs


def test_orbifold_decoration_validation(dumbbell):
    splice = splice_from_plumbing(dumbbell).splice
    with pytest.raises(SpliceValidationError):
        OrbifoldDecoration({"u": 2}).validate(splice)
    with pytest.raises(SpliceValidationError):
        OrbifoldDecoration({"l1": 0}).validate(splice)


def test_filled_piece_may_carry_curve_on_zero_weight_leaf():
    diagram = SpliceDiagram.build(
        {"v": 1}, ["a", "b", "c"], [("v", "a", 2, None), ("v", "b", 3, None), ("v", "c", 0, None)]
    )
    decoration = OrbifoldDecoration({"c": 3})
    with pytest.raises(SpliceValidationError, match="weight 0"):
        decoration.validate(diagram)
    decoration.validate(diagram, filled=True)


def test_orbifold_decoration_nontrivial():
    decoration = OrbifoldDecoration({"b": 1, "a": 3})
    assert decoration.nontrivial() == {"a": 3}
    assert decoration.degree("c") == 1
    assert decoration.product == 3
