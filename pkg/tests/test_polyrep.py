"""Tests for the polynomial-and-exterior representation.

Every numeric expectation here was computed by hand from the defining
relations before the module was written, so these values double as frozen
regression anchors for the action used as the rewriting oracle.
"""

from fractions import Fraction

import pytest

from klrdots import cartan, diagram, polyrep
from klrdots.cartan import ScalarChoice
from klrdots.diagram import Crossing, DiagramWord, Dot, FloatingDot


def _act(datum, scalars, bottom, gens, vec):
    word = DiagramWord(bottom=tuple(bottom), gens=tuple(gens))
    return polyrep.act_word(datum, scalars, word, vec)


def _swap_sp(f, c):
    out = polyrep.sp_zero()
    for (seq, xm, ext), co in f.items():
        out = polyrep.sp_add(
            out, polyrep.sp_scale(polyrep._swap_term(seq, xm, ext, c), co)
        )
    return out


SL2 = cartan.sl2()
A2 = cartan.a2()
B2 = cartan.b2()

SL2_R2 = ScalarChoice(t=((Fraction(1),),), r=(Fraction(2),))
SL2_R5 = ScalarChoice(t=((Fraction(1),),), r=(Fraction(5),))
A2_CUSTOM = ScalarChoice(
    t=((Fraction(1), Fraction(2)), (Fraction(7), Fraction(1))),
    r=(Fraction(3), Fraction(1)),
)
B2_CUSTOM = ScalarChoice(
    t=((Fraction(1), Fraction(2)), (Fraction(7), Fraction(1))),
    r=(Fraction(1), Fraction(3)),
)


def test_exterior_signs():
    w1 = polyrep.cp_omega(0, 1)
    w2 = polyrep.cp_omega(0, 2)
    assert polyrep.cp_mul(w1, w1) == {}
    assert polyrep.cp_mul(w1, w2) == polyrep.cp_neg(polyrep.cp_mul(w2, w1))
    x = polyrep.cp_x(0, 1)
    assert polyrep.cp_mul(x, w1) == polyrep.cp_mul(w1, x)


def test_twisted_swap_is_involution():
    seq = (0, 0)
    terms = [
        polyrep.sp_term(seq, (((0, 1), 2),), ((0, 1),)),
        polyrep.sp_term(seq, (((0, 1), 1), ((0, 2), 1)), ((0, 2),)),
        polyrep.sp_term(seq, (), ((0, 1), (0, 2))),
        polyrep.sp_term(seq, (((0, 2), 3),), ()),
    ]
    for f in terms:
        assert _swap_sp(_swap_sp(f, 1), 1) == f


def test_divided_difference_values():
    seq = (0, 0)
    one = polyrep.sp_term(seq)
    x1 = polyrep.sp_term(seq, (((0, 1), 1),))
    x2 = polyrep.sp_term(seq, (((0, 2), 1),))
    x1sq = polyrep.sp_term(seq, (((0, 1), 2),))
    x1x2 = polyrep.sp_term(seq, (((0, 1), 1), ((0, 2), 1)))
    tau = [Crossing(1)]
    assert _act(SL2, SL2_R5, seq, tau, one) == {}
    assert _act(SL2, SL2_R5, seq, tau, x1) == polyrep.sp_scale(one, 5)
    assert _act(SL2, SL2_R5, seq, tau, x2) == polyrep.sp_scale(one, -5)
    assert _act(SL2, SL2_R5, seq, tau, x1sq) == polyrep.sp_scale(
        polyrep.sp_add(x1, x2), 5
    )
    assert _act(SL2, SL2_R5, seq, tau, x1x2) == {}


def test_divided_difference_on_exterior_generators():
    seq = (0, 0)
    w1 = polyrep.sp_term(seq, (), ((0, 1),))
    w2 = polyrep.sp_term(seq, (), ((0, 2),))
    tau = [Crossing(1)]
    assert _act(SL2, SL2_R2, seq, tau, w1) == polyrep.sp_scale(w2, -2)
    assert _act(SL2, SL2_R2, seq, tau, w2) == {}


def test_dot_slide_through_same_label_crossing():
    seq = (0, 0)
    r = Fraction(5)
    for f in polyrep.oracle_vectors(SL2, seq, 2):
        lhs = _act(SL2, SL2_R5, seq, [Crossing(1), Dot(1)], f)
        rhs = polyrep.sp_add(
            _act(SL2, SL2_R5, seq, [Dot(2), Crossing(1)], f),
            polyrep.sp_scale(f, r),
        )
        assert lhs == rhs
        lhs = _act(SL2, SL2_R5, seq, [Dot(1), Crossing(1)], f)
        rhs = polyrep.sp_add(
            _act(SL2, SL2_R5, seq, [Crossing(1), Dot(2)], f),
            polyrep.sp_scale(f, r),
        )
        assert lhs == rhs


def test_dot_slides_freely_through_mixed_crossing():
    seq = (0, 1)
    for f in polyrep.oracle_vectors(A2, seq, 2):
        assert _act(A2, A2_CUSTOM, seq, [Dot(1), Crossing(1)], f) == _act(
            A2, A2_CUSTOM, seq, [Crossing(1), Dot(2)], f
        )
        assert _act(A2, A2_CUSTOM, seq, [Dot(2), Crossing(1)], f) == _act(
            A2, A2_CUSTOM, seq, [Crossing(1), Dot(1)], f
        )


def test_double_crossing_same_label_vanishes():
    seq = (0, 0)
    for f in polyrep.oracle_vectors(SL2, seq, 3):
        assert _act(SL2, SL2_R2, seq, [Crossing(1), Crossing(1)], f) == {}


def test_double_crossing_mixed_becomes_dot_sum():
    one = polyrep.sp_term((0, 1))
    got = _act(A2, A2_CUSTOM, (0, 1), [Crossing(1), Crossing(1)], one)
    want = polyrep.sp_add(
        polyrep.sp_term((0, 1), (((0, 1), 1),), coeff=2),
        polyrep.sp_term((0, 1), (((1, 1), 1),), coeff=7),
    )
    assert got == want
    one = polyrep.sp_term((0, 1))
    got = _act(B2, B2_CUSTOM, (0, 1), [Crossing(1), Crossing(1)], one)
    want = polyrep.sp_add(
        polyrep.sp_term((0, 1), (((0, 1), 1),), coeff=2),
        polyrep.sp_term((0, 1), (((1, 1), 2),), coeff=7),
    )
    assert got == want


def test_braid_relation_same_label_exact():
    seq = (0, 0, 0)
    left = [Crossing(1), Crossing(2), Crossing(1)]
    right = [Crossing(2), Crossing(1), Crossing(2)]
    for f in polyrep.oracle_vectors(SL2, seq, 2):
        assert _act(SL2, SL2_R2, seq, left, f) == _act(SL2, SL2_R2, seq, right, f)


def test_braid_relation_distinct_outer_strands():
    seq = (0, 1, 1)
    left = [Crossing(1), Crossing(2), Crossing(1)]
    right = [Crossing(2), Crossing(1), Crossing(2)]
    for f in polyrep.oracle_vectors(A2, seq, 2):
        assert _act(A2, A2_CUSTOM, seq, left, f) == _act(A2, A2_CUSTOM, seq, right, f)


def test_braid_relation_equal_outer_strands_correction():
    left = [Crossing(1), Crossing(2), Crossing(1)]
    right = [Crossing(2), Crossing(1), Crossing(2)]

    seq = (0, 1, 0)
    for f in polyrep.oracle_vectors(A2, seq, 2):
        diff = polyrep.sp_sub(
            _act(A2, A2_CUSTOM, seq, left, f), _act(A2, A2_CUSTOM, seq, right, f)
        )
        # r_1 * t_12 * identity
        assert diff == polyrep.sp_scale(f, Fraction(3) * Fraction(2))

    seq = (1, 0, 1)
    mult = polyrep.cp_add(polyrep.cp_x(1, 1), polyrep.cp_x(1, 2))
    for f in polyrep.oracle_vectors(B2, seq, 2):
        diff = polyrep.sp_sub(
            _act(B2, B2_CUSTOM, seq, left, f), _act(B2, B2_CUSTOM, seq, right, f)
        )
        # r_2 * t_21 * (x_1 + x_3) * identity
        want = polyrep.sp_scale(
            polyrep.sp_mul_cp(f, mult, side="right"), Fraction(3) * Fraction(7)
        )
        assert diff == want


def test_omega_tower_values():
    w1 = polyrep.cp_omega(0, 1)
    w2 = polyrep.cp_omega(0, 2)
    x1 = polyrep.cp_x(0, 1)
    x2 = polyrep.cp_x(0, 2)
    assert polyrep.omega_tower(0, 0, 0) == {}
    assert polyrep.omega_tower(0, 1, 0) == w1
    assert polyrep.omega_tower(0, 1, 2) == polyrep.cp_mul(
        polyrep.cp_mul(x1, x1), w1
    )
    assert polyrep.omega_tower(0, 2, 1) == polyrep.cp_add(
        w1, polyrep.cp_neg(polyrep.cp_mul(x2, w2))
    )
    want = polyrep.cp_add(
        polyrep.cp_neg(polyrep.cp_mul(polyrep.cp_add(x1, x2), w1)),
        polyrep.cp_mul(polyrep.cp_mul(x2, x2), w2),
    )
    assert polyrep.omega_tower(0, 2, 2) == want


def test_region_element_closed_form_values():
    # one strand of the other label: epsilon_0 = t_ij x, epsilon_1 = t_ji
    got = polyrep.omega_jaK(A2, A2_CUSTOM, 0, 0, (1, 1))
    want = polyrep.cp_add(
        polyrep.cp_mul(
            polyrep.cp_scale(polyrep.cp_x(1, 1), 7), polyrep.cp_omega(0, 1)
        ),
        polyrep.cp_mul(
            polyrep.cp_scale(polyrep.cp_x(0, 1), 2), polyrep.cp_omega(0, 1)
        ),
    )
    assert got == want
    assert polyrep.omega_jaK(A2, A2_CUSTOM, 0, 0, (0, 3)) == {}
    assert polyrep.omega_jaK(A2, A2_CUSTOM, 0, 0, (1, 0)) == polyrep.cp_omega(0, 1)


def test_region_element_closed_form_matches_recursion():
    grid = [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (2, 2)]
    for datum, scalars in [(A2, A2_CUSTOM), (B2, B2_CUSTOM)]:
        for j in range(datum.rank):
            for a in range(3):
                for K in grid:
                    closed = polyrep.omega_jaK(datum, scalars, j, a, K)
                    peeled = polyrep.omega_jaK_recursive(datum, scalars, j, a, K)
                    assert closed == peeled, (datum.labels, j, a, K)


def test_float_peels_same_label_strand():
    seq = (0, 0)
    one = polyrep.sp_term(seq)
    lhs = _act(SL2, SL2_R2, seq, [FloatingDot(0, 1, 2)], one)
    rhs = polyrep.sp_sub(
        _act(SL2, SL2_R2, seq, [FloatingDot(0, 0, 1)], one),
        _act(SL2, SL2_R2, seq, [Dot(2), FloatingDot(0, 0, 2)], one),
    )
    assert lhs == rhs


def test_float_peels_mixed_strand():
    seq = (0, 1)
    for a in (0, 1):
        for f in polyrep.oracle_vectors(A2, seq, 1):
            lhs = _act(A2, A2_CUSTOM, seq, [FloatingDot(0, a, 2)], f)
            rhs = polyrep.sp_sub(
                polyrep.sp_scale(
                    _act(A2, A2_CUSTOM, seq, [Dot(2), FloatingDot(0, a, 1)], f), 7
                ),
                polyrep.sp_scale(
                    _act(A2, A2_CUSTOM, seq, [FloatingDot(0, a + 1, 1)], f), 2
                ),
            )
            assert lhs == rhs


def test_float_through_double_crossing():
    seq = (0, 1)
    sandwich = [Crossing(1), FloatingDot(1, 0, 1), Crossing(1)]
    plain = [FloatingDot(1, 0, 2)]
    for f in polyrep.oracle_vectors(A2, seq, 1):
        assert _act(A2, A2_CUSTOM, seq, sandwich, f) == _act(
            A2, A2_CUSTOM, seq, plain, f
        )
    # subscript resolution: the float names the strand on its left
    one = polyrep.sp_term(seq)
    implicit = [Crossing(1), FloatingDot(None, 0, 1), Crossing(1)]
    got = _act(A2, A2_CUSTOM, seq, implicit, one)
    want = polyrep.sp_mul_cp(
        one,
        polyrep.cp_mul(
            polyrep.cp_add(
                polyrep.cp_scale(polyrep.cp_x(0, 1), 2),
                polyrep.cp_scale(polyrep.cp_x(1, 1), 7),
            ),
            polyrep.cp_omega(1, 1),
        ),
        side="left",
    )
    assert got == want


def test_float_relocation_same_label():
    seq = (0, 0)
    rinv2 = Fraction(1, 4)
    vectors = [
        polyrep.sp_term(seq),
        polyrep.sp_term(seq, (((0, 1), 1),)),
        polyrep.sp_term(seq, (), ((0, 1),)),
        polyrep.sp_term(seq, (((0, 2), 1),), ((0, 2),)),
    ]
    for a in (0, 1):
        inner = [Crossing(1), FloatingDot(0, a, 1), Crossing(1)]
        for f in vectors:
            lhs = _act(SL2, SL2_R2, seq, [FloatingDot(0, a, 2)], f)
            first = _act(SL2, SL2_R2, seq, inner + [Dot(2)], f)
            second = _act(SL2, SL2_R2, seq, [Dot(1)] + inner, f)
            rhs = polyrep.sp_scale(polyrep.sp_sub(first, second), rinv2)
            assert lhs == rhs


def test_floats_anticommute():
    seq = (0, 1)
    fa = FloatingDot(0, 0, 1)
    fb = FloatingDot(1, 0, 2)
    for f in polyrep.oracle_vectors(A2, seq, 1):
        ab = _act(A2, A2_CUSTOM, seq, [fa, fb], f)
        ba = _act(A2, A2_CUSTOM, seq, [fb, fa], f)
        assert ab == polyrep.sp_neg(ba)
        assert _act(A2, A2_CUSTOM, seq, [fa, fa], f) == {}


def test_leftmost_float_vanishes():
    one = polyrep.sp_term((0, 1))
    assert _act(A2, A2_CUSTOM, (0, 1), [FloatingDot(0, 0, 0)], one) == {}
    # a float whose label is absent from its region also acts by zero
    assert _act(A2, A2_CUSTOM, (0, 1), [FloatingDot(1, 0, 1)], one) == {}


def test_action_respects_grading():
    cases = [
        (B2, B2_CUSTOM, (0, 1), [Dot(1), Dot(2), Crossing(1),
                                 FloatingDot(None, 1, 2), FloatingDot(0, 0, 1)]),
        (B2, B2_CUSTOM, (1, 1), [Crossing(1), FloatingDot(1, 0, 2)]),
    ]
    for datum, scalars, seq, gens in cases:
        for gen in gens:
            word = DiagramWord(bottom=seq, gens=(gen,))
            shift = diagram.degree(datum, word)
            for f in polyrep.oracle_vectors(datum, seq, 2):
                (key0, _), = f.items()
                base = polyrep.term_degree(datum, *key0)
                base_q = base.q + polyrep.component_shift(datum, seq)
                out = polyrep.act_word(datum, scalars, word, f)
                for (oseq, oxm, oext) in out:
                    got = polyrep.term_degree(datum, oseq, oxm, oext)
                    got_q = got.q + polyrep.component_shift(datum, oseq)
                    assert got_q == base_q + shift.q, (seq, gen, key0)
                    assert got.lam == tuple(
                        a + b for a, b in zip(base.lam, shift.lam)
                    )
                    assert got.h == base.h + shift.h


def test_term_degree_values():
    deg = polyrep.term_degree(B2, (0, 1), (((0, 1), 1),), ())
    assert deg == diagram.TriDegree(q=4, lam=(0, 0), h=0)
    deg = polyrep.term_degree(B2, (0, 1, 1), (), ((1, 2),))
    assert deg == diagram.TriDegree(q=-2, lam=(0, 2), h=1)


def test_oracle_vector_enumeration():
    vecs = polyrep.oracle_vectors(SL2, (0,), 2)
    assert len(vecs) == 6
    vecs = polyrep.oracle_vectors(A2, (0, 1), 1)
    assert len(vecs) == 12


def test_word_bottom_mismatch_raises():
    one = polyrep.sp_term((0, 1))
    word = DiagramWord(bottom=(1, 0), gens=())
    with pytest.raises(ValueError):
        polyrep.act_word(A2, A2_CUSTOM, word, one)


def test_relation_report_small_battery():
    for datum in (cartan.sl2(), cartan.a2()):
        for scalars in (
            cartan.default_scalars(datum),
            cartan.random_scalars(datum, seed=5),
        ):
            rep = polyrep.relation_report(
                datum, scalars, max_strands=3, max_degree=2
            )
            assert rep["ok"], rep["failures"][:3]
    assert rep["families"] == 8
    assert set(rep["family_names"]) == {
        "double-crossing",
        "free-dot-slide",
        "twisted-dot-exchange",
        "braid",
        "float-anticommute",
        "float-peel",
        "float-sandwich",
        "absent-label-float",
    }


def test_relation_report_detects_tampered_scalars():
    # On an orthogonal pair the two crossing orientations see t[i][j] and
    # t[j][i]; the double-crossing identity needs them equal, so breaking
    # that symmetry must show up as a failure.
    datum = cartan.a1xa1()
    good = cartan.default_scalars(datum)
    t = tuple(tuple(row) for row in good.t)
    bad_t = (
        (t[0][0], Fraction(3)),
        (t[1][0], t[1][1]),
    )
    bad = cartan.ScalarChoice(t=bad_t, r=good.r, s=good.s)
    rep = polyrep.relation_report(datum, bad, max_strands=2, max_degree=2)
    assert not rep["ok"]
    assert any(f[0] == "double-crossing" for f in rep["failures"])
