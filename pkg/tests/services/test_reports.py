import json
from fractions import Fraction

import pytest

from splicekit.services.cover import CoverPiece, CoverPieceData, cover_piece_data, split_at_edge, uac_plan
from splicekit.services.invariants import decomposition_graph
from splicekit.services.reports import (
    DecompositionReport,
    EdgeDeterminant,
    PieceDataReport,
    Rational,
    Report,
    SplitReport,
    VerdictReport,
    certificate_report,
    edge_determinants,
    input_digest,
    splice_section,
    uac_report,
)
from splicekit.services.singularity import NonPositiveEdge, is_singularity_link
from splicekit.services.splice import SpliceDiagram, splice_from_plumbing


def test_rational_of_fraction():
    rational = Rational.of(Fraction(-4, 3))
    assert (rational.numerator, rational.denominator) == (-4, 3)
    assert rational.to_fraction() == Fraction(-4, 3)
    assert Rational.of(5).denominator == 1


def test_rational_rejects_non_positive_denominator():
    with pytest.raises(ValueError):
        Rational(numerator=1, denominator=0)


def test_large_integers_become_strings():
    """Integers at or beyond 2**53 are written as decimal strings."""
    small = EdgeDeterminant(a="u", b="w", determinant=2**53 - 1)
    large = EdgeDeterminant(a="u", b="w", determinant=-(2**53))
    assert json.loads(small.model_dump_json())["determinant"] == 2**53 - 1
    assert json.loads(large.model_dump_json())["determinant"] == str(-(2**53))
    assert EdgeDeterminant.model_validate_json(large.model_dump_json()).determinant == -(2**53)


def test_input_digest_is_sha256():
    assert input_digest("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


def test_edge_determinants(dumbbell):
    splice = splice_from_plumbing(dumbbell).splice
    assert edge_determinants(splice) == [EdgeDeterminant(a="u", b="w", determinant=48)]
    assert edge_determinants(SpliceDiagram.atomic_marker()) == []


def test_splice_section_of_atomic_diagram():
    assert splice_section(SpliceDiagram.atomic_marker()) is None


def test_decomposition_report(dumbbell):
    graph, reduced = decomposition_graph(splice_from_plumbing(dumbbell).splice, 48)
    report = DecompositionReport.of(graph, reduced)
    assert [node.id for node in report.nodes] == ["u", "w"]
    assert report.nodes[0].e == Rational.of(-2)
    assert report.matrix[0][1] == Rational.of(1)


def test_verdict_report_with_transcript(dumbbell):
    report = VerdictReport.of(is_singularity_link(dumbbell))
    data = json.loads(report.model_dump_json(exclude_none=True))
    assert data["verdict"] is True
    assert data["routes"] == {"plumbing": True, "reduced_matrix": True, "splice": True}
    assert data["certificate"]["kind"] == "elimination"
    assert data["certificate"]["steps"][0]["update"] == {"numerator": 1, "denominator": 2}


def test_certificate_report_for_edge():
    report = certificate_report(NonPositiveEdge(("u", "w"), -35))
    assert report.kind == "non_positive_edge"
    assert report.determinant == -35


def test_certificate_report_rejects_unknown():
    with pytest.raises(TypeError):
        certificate_report("not a certificate")


def test_split_and_piece_reports(dumbbell):
    piece = CoverPiece.from_plumbing(dumbbell)
    split = SplitReport.of(split_at_edge(piece, "u", "w"))
    assert split.gluing == (2, 2)
    assert split.sides[0].diagram.orbifold == {"w": 2}
    data = json.loads(PieceDataReport.of(cover_piece_data(piece, "u", "w")).model_dump_json(by_alias=True))
    assert data["lambda"] == 8
    assert data["cover_euler"] == {"numerator": -4, "denominator": 3}


def test_uac_report_nests_children(dumbbell):
    report = uac_report(uac_plan(dumbbell))
    assert report.type == "split"
    assert report.degree == 48
    assert [child.type for child in report.children] == ["brieskorn", "brieskorn"]
    assert report.children[0].exponents == [2, 2, 4]


def test_report_json_omits_missing_sections(dumbbell):
    """Sections a command did not compute are left out, and the JSON validates back."""
    report = Report(input_digest="abc", h1_order=48, cover=uac_report(uac_plan(dumbbell)))
    data = json.loads(report.to_json())
    assert set(data) == {"input_digest", "h1_order", "cover"}
    assert data["cover"]["pieces"][0]["lambda"] == 8
    assert Report.model_validate_json(report.to_json()).cover.degree == 48


def test_report_compact_json():
    report = Report(input_digest="abc")
    assert report.to_json(indent=0) == '{"input_digest":"abc"}'


def test_connected_sum_report_keeps_sum_degree(zero_weight_cut):
    report = uac_report(uac_plan(zero_weight_cut))
    data = json.loads(report.model_dump_json(by_alias=True, exclude_none=True))
    assert data["children"][1] == {
        "type": "connected_sum",
        "node": "v02",
        "orders": [2, 3],
        "degree": 18,
        "sum_degree": 3,
    }


def test_piece_report_omits_undefined_euler_numbers():
    data = CoverPieceData(
        node="v",
        lambda_=6,
        fiber_degree=3,
        base_degree=6,
        euler=None,
        cover_euler=None,
        divisor=1,
        meridian_order=3,
        fiber_quotient_order=6,
    )
    dumped = json.loads(PieceDataReport.of(data).model_dump_json(by_alias=True, exclude_none=True))
    assert "euler" not in dumped
    assert "cover_euler" not in dumped
    assert dumped["lambda"] == 6
