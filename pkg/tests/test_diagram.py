import pytest

from klrdots import cartan, diagram
from klrdots.diagram import Crossing, DiagramWord, Dot, FloatingDot


def test_all_sequences():
    datum = cartan.a2()
    assert diagram.all_sequences(datum, (2, 1)) == ((0, 0, 1), (0, 1, 0), (1, 0, 0))
    assert diagram.content_of(datum, (0, 1, 0)) == (2, 1)


def test_sequence_tracking():
    datum = cartan.a2()
    w = DiagramWord(bottom=(0, 1, 0), gens=(Crossing(1), Crossing(2)))
    assert diagram.sequence_after(w, 0) == (0, 1, 0)
    assert diagram.sequence_after(w, 1) == (1, 0, 0)
    assert diagram.top_sequence(w) == (1, 0, 0)


def test_tight_float_degree_is_zero():
    # A floating dot right of a single strand of its own label has q-degree 0.
    datum = cartan.sl2()
    w = DiagramWord(bottom=(0,), gens=(FloatingDot(j=None, p=0, a=1),))
    deg = diagram.degree(datum, w)
    assert deg == diagram.TriDegree(q=0, lam=(2,), h=1)


def test_theta_two_degree():
    datum = cartan.sl2()
    w = DiagramWord(bottom=(0, 0), gens=diagram.tightened_theta(2, 2, 0))
    assert w.gens == (Crossing(1), FloatingDot(j=None, p=0, a=1), Crossing(1))
    assert diagram.degree(datum, w) == diagram.TriDegree(q=-4, lam=(2,), h=1)


def test_theta_identity_block():
    assert diagram.tightened_theta(3, 2, -1) == ()
    gens = diagram.tightened_theta(3, 3, 1)
    assert gens == (
        Crossing(2),
        Crossing(1),
        FloatingDot(j=None, p=0, a=1),
        Dot(1),
        Crossing(1),
        Crossing(2),
    )


def test_b2_generator_degrees():
    datum = cartan.b2()
    w = DiagramWord(bottom=(0, 1), gens=(Dot(1), Dot(2), Crossing(1)))
    # dot on long root: 4; dot on short root: 2; mixed crossing: +2
    assert diagram.degree(datum, w).q == 4 + 2 + 2
    same = DiagramWord(bottom=(0, 0), gens=(Crossing(1),))
    assert diagram.degree(datum, same).q == -4


def test_far_float_degree():
    datum = cartan.sl2()
    w = DiagramWord(bottom=(0, 0), gens=(FloatingDot(j=None, p=0, a=2),))
    assert diagram.degree(datum, w) == diagram.TriDegree(q=-2, lam=(2,), h=1)
    w = DiagramWord(bottom=(0,), gens=(FloatingDot(j=None, p=3, a=1),))
    assert diagram.degree(datum, w).q == 6


def test_compose():
    datum = cartan.a2()
    lower = DiagramWord(bottom=(0, 1), gens=(Crossing(1),))
    upper = DiagramWord(bottom=(1, 0), gens=(Dot(1),))
    both = diagram.compose(upper, lower)
    assert both.bottom == (0, 1)
    assert both.gens == (Crossing(1), Dot(1))
    with pytest.raises(ValueError):
        diagram.compose(lower, lower)


def test_validate_word():
    datum = cartan.a2()
    with pytest.raises(ValueError):
        diagram.validate_word(datum, DiagramWord(bottom=(0,), gens=(Crossing(1),)))
    with pytest.raises(ValueError):
        diagram.validate_word(datum, DiagramWord(bottom=(0, 1), gens=(Dot(3),)))
    with pytest.raises(ValueError):
        diagram.validate_word(
            datum, DiagramWord(bottom=(0, 1), gens=(FloatingDot(j=None, p=0, a=0),))
        )
    diagram.validate_word(
        datum, DiagramWord(bottom=(0, 1), gens=(FloatingDot(j=1, p=2, a=0),))
    )


def test_parse_format_roundtrip():
    datum = cartan.a2()
    text = "idem(1,2,1); x(2); tau(1); fdot(3)"
    w = diagram.parse_word(datum, text)
    assert w.bottom == (0, 1, 0)
    assert w.gens == (Dot(2), Crossing(1), FloatingDot(j=None, p=0, a=3))
    assert diagram.format_word(datum, w) == text

    text2 = "idem(2,1); fdot(0,2,3); fdot(1,1)"
    w2 = diagram.parse_word(datum, text2)
    assert w2.gens == (FloatingDot(j=1, p=3, a=0), FloatingDot(j=0, p=0, a=1))
    assert diagram.format_word(datum, w2) == text2


def test_parse_rejects_garbage():
    datum = cartan.a2()
    with pytest.raises(ValueError):
        diagram.parse_word(datum, "x(1); tau(1)")
    with pytest.raises(ValueError):
        diagram.parse_word(datum, "idem(1); y(1)")
