"""Basis enumeration and the rewrite engine, cross-checked two ways.

The normal form is computed purely by diagram rewriting; its correctness is
certified here against the polynomial representation, which was built and
tested first and which the engine never consults.  Frozen expectations were
derived by hand from the local relations before being run.
"""

import random
from fractions import Fraction

import pytest

from klrdots import basisrewrite as br
from klrdots import cartan, diagram, polyrep, qside
from klrdots.diagram import Crossing, DiagramWord, Dot, FloatingDot


SL2 = cartan.sl2()
SC_SL2 = cartan.ScalarChoice(t=((1,),), r=(2,), s=())
A1A1 = cartan.a1xa1()
SC_A1A1 = cartan.ScalarChoice(t=((1, 5), (5, 1)), r=(2, 3), s=())
A2 = cartan.a2()
SC_A2 = cartan.ScalarChoice(t=((1, 2), (7, 1)), r=(3, 1), s=())
B2 = cartan.b2()
SC_B2 = cartan.ScalarChoice(t=((1, 2), (7, 1)), r=(1, 3), s=())

BATTERY = [
    (SL2, SC_SL2),
    (A1A1, SC_A1A1),
    (A2, SC_A2),
    (B2, SC_B2),
]


def nf(datum, scalars, bottom, gens):
    return br.normal_form(
        datum, scalars, DiagramWord(bottom=tuple(bottom), gens=tuple(gens))
    )


def act_element(datum, scalars, bottom, elt, vec):
    out = polyrep.sp_zero()
    for key, coef in elt.terms:
        word = br.element_word(bottom, key)
        out = polyrep.sp_add(
            out, polyrep.sp_scale(polyrep.act_word(datum, scalars, word, vec), coef)
        )
    return out


def word_matches_nf(datum, scalars, word, max_deg=1, step_budget=500000):
    elt = br.normal_form(datum, scalars, word, step_budget=step_budget)
    for vec in polyrep.oracle_vectors(datum, word.bottom, max_deg):
        lhs = polyrep.act_word(datum, scalars, word, vec)
        rhs = act_element(datum, scalars, word.bottom, elt, vec)
        if not polyrep.sp_eq(lhs, rhs):
            return False
    return True


def random_word(rng, datum, m, length):
    bottom = tuple(rng.randrange(datum.rank) for _ in range(m))
    gens = []
    for _ in range(length):
        kind = rng.random()
        if kind < 0.4 and m >= 2:
            gens.append(Crossing(rng.randrange(1, m)))
        elif kind < 0.62:
            gens.append(Dot(rng.randrange(1, m + 1)))
        else:
            a = rng.randrange(0, m + 1)
            explicit = a == 0 or rng.random() < 0.5
            j = rng.randrange(datum.rank) if explicit else None
            gens.append(FloatingDot(j, rng.randrange(0, 3), a))
    return DiagramWord(bottom=bottom, gens=tuple(gens))


# ---------------------------------------------------------------------------
# Left-adjusted expressions.


def test_left_adjusted_worked_example():
    la = br.left_adjusted((3, 4, 2, 1))
    assert la.word == (2, 3, 1, 2, 1)
    assert la.inlmin == (1, 2, 1, 1)
    assert la.t == (0, 0, 3, 5)
    assert la.s == (1, 2, 3, 4)
    assert la.chunks == ((), (), (2, 3, 1), (2, 1), ())


def test_left_adjusted_is_reduced_and_attains_minima():
    rng = random.Random(11)
    for m in (2, 3, 4, 5):
        for _ in range(20):
            perm = list(range(1, m + 1))
            rng.shuffle(perm)
            la = br.left_adjusted(tuple(perm))
            inv = sum(
                1
                for a in range(m)
                for b in range(a + 1, m)
                if perm[a] > perm[b]
            )
            assert len(la.word) == inv
            # chunk products move each strand to its leftmost position: the
            # prefix of the first la.t[k-1] crossings puts strand k at
            # la.inlmin[k-1]
            for k in range(1, m + 1):
                pos = k
                for c in la.word[: la.t[k - 1]]:
                    strands_hit = (pos == c, pos == c + 1)
                    if strands_hit[0]:
                        pos = c + 1
                    elif strands_hit[1]:
                        pos = c
                assert pos == la.inlmin[k - 1]
            # positions only get as small as the recorded minimum
            positions = list(range(m + 1))
            strand_at = list(range(m + 1))
            for c in la.word:
                sa, sb = strand_at[c], strand_at[c + 1]
                strand_at[c], strand_at[c + 1] = sb, sa
                positions[sa], positions[sb] = c + 1, c
                assert positions[sb] >= la.inlmin[sb - 1]
            assert tuple(positions[1:]) == tuple(perm)


def test_left_adjusted_identity():
    la = br.left_adjusted((1, 2, 3))
    assert la.word == ()
    assert la.chunks == ((), (), (), ())
    assert la.s == (1, 2, 3)


# ---------------------------------------------------------------------------
# Canonical words.


def test_canonical_skeletons_width_two():
    F = FloatingDot(0, 0, 1)
    assert br.canonical_skeleton((0, 0), (1, 2), ()) == ()
    assert br.canonical_skeleton((0, 0), (2, 1), ()) == (Crossing(1),)
    assert br.canonical_skeleton((0, 0), (1, 2), (1,)) == (F,)
    assert br.canonical_skeleton((0, 0), (1, 2), (2,)) == (
        Crossing(1),
        F,
        Crossing(1),
    )
    assert br.canonical_skeleton((0, 0), (2, 1), (1,)) == (F, Crossing(1))
    assert br.canonical_skeleton((0, 0), (2, 1), (2,)) == (Crossing(1), F)
    assert br.canonical_skeleton((0, 0), (1, 2), (1, 2)) == (
        F,
        Crossing(1),
        F,
        Crossing(1),
    )


def test_canonical_skeleton_subscripts_follow_strand_labels():
    # bottom (0, 1): the float hooked on strand 2 is pulled to the far left,
    # so its subscript is strand 2's label
    skel = br.canonical_skeleton((0, 1), (1, 2), (2,))
    assert skel == (Crossing(1), FloatingDot(1, 0, 1), Crossing(1))
    skel = br.canonical_skeleton((0, 1), (1, 2), (1,))
    assert skel == (FloatingDot(0, 0, 1),)


def test_basis_word_appends_dots_at_top():
    be = br.BasisElement(bottom=(0, 0), perm=(2, 1), dots=(1, 2), floats=(1,))
    word = br.basis_word(be)
    assert word.gens == (
        FloatingDot(0, 0, 1),
        Crossing(1),
        Dot(1),
        Dot(2),
        Dot(2),
    )


# ---------------------------------------------------------------------------
# Enumeration.


def test_enumerate_empty_diagram():
    els = br.enumerate_basis(SL2, (0,), (), (), 0)
    assert len(els) == 1
    assert els[0] == br.BasisElement(bottom=(), perm=(), dots=(), floats=())


def test_enumerate_one_strand_bound_four():
    els = br.enumerate_basis(SL2, (1,), (0,), (0,), 4)
    keys = {(b.perm, b.dots, b.floats) for b in els}
    # dots cost 2; the float costs 0 here; six elements in degree <= 4
    assert keys == {
        ((1,), (0,), ()),
        ((1,), (1,), ()),
        ((1,), (2,), ()),
        ((1,), (0,), (1,)),
        ((1,), (1,), (1,)),
        ((1,), (2,), (1,)),
    }


def test_enumerate_degrees_are_bounded():
    for datum, nu, i, j, bound in (
        (SL2, (2,), (0, 0), (0, 0), 4),
        (A2, (1, 1), (0, 1), (1, 0), 6),
    ):
        for be in br.enumerate_basis(datum, nu, i, j, bound):
            deg = diagram.degree(datum, br.basis_word(be))
            assert deg.q <= bound


def test_enumerate_resource_error():
    with pytest.raises(RuntimeError, match="elements"):
        br.enumerate_basis(SL2, (3,), (0, 0, 0), (0, 0, 0), 40, max_elements=10)


def test_enumerate_rejects_wrong_content():
    with pytest.raises(ValueError):
        br.enumerate_basis(SL2, (2,), (0,), (0,), 4)


# ---------------------------------------------------------------------------
# Normal form: frozen small cases.


def test_double_crossing_same_label_is_zero():
    elt = nf(SL2, SC_SL2, (0, 0), (Crossing(1), Crossing(1)))
    assert elt.is_zero()


def test_double_crossing_mixed_becomes_dots():
    elt = nf(A2, SC_A2, (0, 1), (Crossing(1), Crossing(1)))
    # 2 x_1 + 7 x_2 on vertical strands, from the crossing-resolution pair
    assert elt.as_dict() == {
        ((1, 2), (1, 0), ()): Fraction(2),
        ((1, 2), (0, 1), ()): Fraction(7),
    }


def test_dot_slides_through_crossing_with_correction():
    # crossing above a dot on the incoming left strand: the dot exits on the
    # right, plus the identity times the slide constant
    elt = nf(SL2, SC_SL2, (0, 0), (Dot(1), Crossing(1)))
    assert elt.as_dict() == {
        ((2, 1), (0, 1), ()): Fraction(1),
        ((1, 2), (0, 0), ()): Fraction(2),
    }
    elt = nf(SL2, SC_SL2, (0, 0), (Dot(2), Crossing(1)))
    assert elt.as_dict() == {
        ((2, 1), (1, 0), ()): Fraction(1),
        ((1, 2), (0, 0), ()): Fraction(-2),
    }


def test_repeated_float_on_one_strand_is_zero():
    theta = (FloatingDot(None, 0, 1),)
    elt = nf(SL2, SC_SL2, (0,), theta + theta)
    assert elt.is_zero()


def test_dot_and_float_commute_on_one_strand():
    a = nf(SL2, SC_SL2, (0,), (FloatingDot(None, 0, 1), Dot(1)))
    b = nf(SL2, SC_SL2, (0,), (Dot(1), FloatingDot(None, 0, 1)))
    assert a == b
    assert a.as_dict() == {((1,), (1,), (1,)): Fraction(1)}


def test_hooked_floats_anticommute_here():
    theta1 = (FloatingDot(None, 0, 1),)
    theta2 = (Crossing(1), FloatingDot(None, 0, 1), Crossing(1))
    down = nf(SL2, SC_SL2, (0, 0), theta1 + theta2)
    up = nf(SL2, SC_SL2, (0, 0), theta2 + theta1)
    assert down.as_dict() == {((1, 2), (0, 0), (1, 2)): Fraction(1)}
    assert up.as_dict() == {((1, 2), (0, 0), (1, 2)): Fraction(-1)}


def test_float_with_superscript_dissolves():
    # a superscript-1 float right of a single strand equals minus a dot under
    # the plain float
    elt = nf(SL2, SC_SL2, (0,), (FloatingDot(None, 1, 1),))
    assert elt.as_dict() == {((1,), (1,), (1,)): Fraction(-1)}


def test_leftmost_region_float_is_zero():
    elt = nf(SL2, SC_SL2, (0,), (FloatingDot(0, 0, 0),))
    assert elt.is_zero()


def test_mismatched_subscript_pushes_to_zero():
    # a float whose subscript does not occur to its left dies on the far wall
    elt = nf(A2, SC_A2, (0,), (FloatingDot(1, 0, 1),))
    assert elt.is_zero()


def test_normal_form_is_idempotent_on_basis_words():
    for datum, scalars in BATTERY:
        seqs = [
            (0,) * 2,
            tuple(k % datum.rank for k in range(2)),
        ]
        for i in seqs:
            nu = diagram.content_of(datum, i)
            for be in br.enumerate_basis(datum, nu, i, i, 4):
                elt = br.normal_form(datum, scalars, br.basis_word(be))
                assert elt.as_dict() == {
                    (be.perm, be.dots, be.floats): Fraction(1)
                }


# ---------------------------------------------------------------------------
# Normal form against the polynomial representation.


@pytest.mark.parametrize("datum,scalars", BATTERY)
def test_normal_form_matches_action_on_random_words(datum, scalars):
    rng = random.Random(hash(datum.labels) & 0xFFFF)
    for _ in range(25):
        m = rng.choice([1, 2, 2, 3])
        word = random_word(rng, datum, m, rng.randrange(1, 7))
        assert word_matches_nf(datum, scalars, word), diagram.format_word(
            datum, word
        )


def test_normal_form_matches_action_on_longer_words():
    # beyond the guaranteed ceiling on purpose, so allow a larger budget
    rng = random.Random(20260822)
    for datum, scalars in BATTERY:
        for _ in range(6):
            word = random_word(rng, datum, 3, rng.randrange(6, 10))
            assert word_matches_nf(
                datum, scalars, word, step_budget=4_000_000
            ), diagram.format_word(datum, word)


def test_linear_independence_of_basis_images():
    # the faithfulness route: images of basis words under the action stay
    # linearly independent, so the rewrite target really is a basis
    for datum, scalars, i, bound, maxdeg in (
        (SL2, SC_SL2, (0, 0), 2, 3),
        (A2, SC_A2, (0, 1), 4, 3),
        (B2, SC_B2, (1, 0), 4, 3),
    ):
        nu = diagram.content_of(datum, i)
        els = br.enumerate_basis(datum, nu, i, i, bound)
        vecs = polyrep.oracle_vectors(datum, i, maxdeg)
        used = []
        rank = 0
        for be in els:
            col = {}
            for vi, vec in enumerate(vecs):
                img = polyrep.act_word(
                    datum, scalars, br.basis_word(be), vec
                )
                for key, cf in img.items():
                    col[(vi, key)] = cf
            for pivot_key, pivot_col in used:
                if pivot_key in col:
                    f = col[pivot_key] / pivot_col[pivot_key]
                    for k, v in pivot_col.items():
                        nv = col.get(k, Fraction(0)) - f * v
                        if nv:
                            col[k] = nv
                        else:
                            col.pop(k, None)
            assert col, "basis image became dependent"
            pk = sorted(col)[0]
            used.append((pk, col))
            rank += 1
        assert rank == len(els)


# ---------------------------------------------------------------------------
# Products and the mirror map.


def test_multiply_unit_and_zero():
    u = br.unit((0, 0))
    w = nf(SL2, SC_SL2, (0, 0), (Crossing(1), Dot(1)))
    assert br.multiply(SL2, SC_SL2, u, w) == w
    assert br.multiply(SL2, SC_SL2, w, u) == w
    mismatched = br.unit((0,))
    prod = br.multiply(SL2, SC_SL2, mismatched, br.unit((0, 0)))
    assert prod.is_zero()


def test_multiply_matches_concatenated_action():
    rng = random.Random(5)
    for datum, scalars in BATTERY:
        for _ in range(8):
            m = 2
            bottom = tuple(rng.randrange(datum.rank) for _ in range(m))
            w1 = random_word(rng, datum, m, rng.randrange(1, 4))
            w1 = DiagramWord(bottom=bottom, gens=w1.gens)
            top1 = diagram.top_sequence(w1)
            w2 = random_word(rng, datum, m, rng.randrange(1, 4))
            w2 = DiagramWord(bottom=top1, gens=w2.gens)
            e1 = br.normal_form(datum, scalars, w1)
            e2 = br.normal_form(datum, scalars, w2)
            prod = br.multiply(datum, scalars, e2, e1)
            stacked = diagram.compose(w2, w1)
            direct = br.normal_form(datum, scalars, stacked)
            assert prod == direct


def test_multiply_is_associative():
    rng = random.Random(9)
    for _ in range(10):
        els = []
        for _ in range(3):
            w = random_word(rng, SL2, 2, rng.randrange(1, 4))
            w = DiagramWord(bottom=(0, 0), gens=w.gens)
            els.append(br.normal_form(SL2, SC_SL2, w))
        a, b, c = els
        left = br.multiply(SL2, SC_SL2, br.multiply(SL2, SC_SL2, a, b), c)
        right = br.multiply(SL2, SC_SL2, a, br.multiply(SL2, SC_SL2, b, c))
        assert left == right


def test_mirror_is_an_involution():
    rng = random.Random(4)
    for datum, scalars in ((SL2, SC_SL2), (A2, SC_A2)):
        for _ in range(10):
            w = random_word(rng, datum, 2, rng.randrange(1, 5))
            elt = br.normal_form(datum, scalars, w)
            twice = br.mirror(
                datum, scalars, br.mirror(datum, scalars, elt)
            )
            assert twice == elt


def test_mirror_swaps_top_and_bottom():
    w = DiagramWord(bottom=(0, 1), gens=(Crossing(1),))
    elt = br.normal_form(A2, SC_A2, w)
    m = br.mirror(A2, SC_A2, elt)
    assert m.bottom == (1, 0)
    assert m.top == (0, 1)


# ---------------------------------------------------------------------------
# Graded dimensions.


def test_graded_dimension_one_strand_closed_forms():
    signed = br.graded_dimension(SL2, (1,), (0,), (0,), mode="signed")
    want = qside.RationalFunction(
        num=qside.lp_sub(qside.lp_monomial((0, 0)), qside.lp_monomial((0, 2))),
        den=qside.lp_sub(qside.lp_monomial((0, 0)), qside.lp_monomial((2, 0))),
    )
    assert qside.rf_eq(signed.rf, want)
    unsigned = br.graded_dimension(SL2, (1,), (0,), (0,), mode="unsigned")
    wantu = qside.RationalFunction(
        num=qside.lp_add(
            qside.lp_monomial((0, 0, 0)), qside.lp_monomial((0, 2, 1))
        ),
        den=qside.lp_sub(
            qside.lp_monomial((0, 0, 0)), qside.lp_monomial((2, 0, 0))
        ),
    )
    assert qside.rf_eq(unsigned.rf, wantu)


def test_graded_dimension_counts_match_enumeration():
    cases = [
        (SL2, (1,), (0,), (0,), 4),
        (SL2, (2,), (0, 0), (0, 0), 4),
        (A2, (1, 1), (0, 1), (0, 1), 6),
        (A2, (1, 1), (0, 1), (1, 0), 6),
        (B2, (1, 1), (0, 1), (1, 0), 6),
    ]
    for datum, nu, i, j, bound in cases:
        series = br.graded_dimension(
            datum, nu, i, j, mode="unsigned", truncation=bound
        )
        total = sum(int(c) for e, c in series.terms.items() if e[0] <= bound)
        assert total == len(br.enumerate_basis(datum, nu, i, j, bound))


def test_graded_dimension_divided_power_identity():
    # at content 2a_i + a_j the two divided-power column sums agree:
    # G(jii) + G(iij) = (q + 1/q) G(iji) for every top sequence
    nu = (2, 1)
    for mode, nv in (("unsigned", 4), ("signed", 3)):
        q = qside.rf_monomial(tuple([1] + [0] * (nv - 1)))
        qinv = qside.rf_monomial(tuple([-1] + [0] * (nv - 1)))
        for top in ((0, 0, 1), (0, 1, 0), (1, 0, 0)):
            g_jii = br.graded_dimension(
                A2, nu, (1, 0, 0), top, mode=mode, truncation=20
            ).rf
            g_iij = br.graded_dimension(
                A2, nu, (0, 0, 1), top, mode=mode, truncation=20
            ).rf
            g_iji = br.graded_dimension(
                A2, nu, (0, 1, 0), top, mode=mode, truncation=20
            ).rf
            lhs = qside.rf_add(g_jii, g_iij)
            rhs = qside.rf_mul(qside.rf_add(q, qinv), g_iji)
            assert qside.rf_eq(lhs, rhs)


def test_graded_dimension_validates_input():
    with pytest.raises(ValueError):
        br.graded_dimension(SL2, (1,), (0,), (0,), mode="weird")
    with pytest.raises(ValueError):
        br.graded_dimension(SL2, (2,), (0,), (0,))


# ---------------------------------------------------------------------------
# Resource guard.


def test_step_budget_raises():
    word = DiagramWord(
        bottom=(0, 0, 0),
        gens=(
            Crossing(1),
            Crossing(2),
            Crossing(1),
            Crossing(2),
            Crossing(1),
            Crossing(2),
        ),
    )
    with pytest.raises(RuntimeError, match="budget"):
        br.normal_form(SL2, SC_SL2, word, step_budget=3)
