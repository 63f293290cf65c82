from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import analysis_of
from pastdecide.exactnum import ComplexAlgebraic, Ordering, RealAlgebraic
from pastdecide.spectral import (
    Direction,
    GroupKey,
    RealForm,
    compare_index,
    compare_index_by_logs,
    compare_index_exact,
    dominant_group_at,
    explain_report,
    explain_text,
    group_coefficient,
    lex_compare_groups,
    necessary_condition,
)

F = Fraction
rationals = st.fractions(min_value=-6, max_value=6, max_denominator=5)
FIXTURES = ["spiral", "rotation", "oned", "neg2", "zero"]


def vec(draw_list, n):
    return [RealAlgebraic(v) for v in draw_list[:n]]


def test_spiral_gamma_coefficients_reference_values(spiral):
    g11 = spiral.gamma.form(0, 0).coeffs
    g12 = spiral.gamma.form(0, 1).coeffs
    g13 = spiral.gamma.form(0, 2).coeffs
    assert g11 == (ComplexAlgebraic(F(-1, 20), F(7, 20)), ComplexAlgebraic(F(-1, 20), F(-3, 20)), ComplexAlgebraic(F(1, 2)))
    assert g12 == tuple(z.conj() for z in g11)
    assert g13 == (ComplexAlgebraic(F(11, 10)), ComplexAlgebraic(F(11, 10)), ComplexAlgebraic(0))


def test_spiral_groups(spiral):
    groups = spiral.groups.groups
    assert [g.indices for g in groups] == [(0, 1), (2,)]
    assert [(g.key.mod_a, g.key.mod_b) for g in groups] == [(10, 20), (20, 10)]
    assert [g.key.ratio for g in groups] == [F(1, 2), 2]
    # growth index |a|^(1/2) |b|^(1/2) = 10 sqrt 2 for both groups
    ten_sqrt2 = RealAlgebraic(200).sqrt()
    for g in groups:
        assert (g.key.mod_a * g.key.mod_b).sqrt() == ten_sqrt2
        lo, hi = g.key.index_enclosure(spiral.loop.p)
        assert RealAlgebraic(F(lo)) < ten_sqrt2 < RealAlgebraic(F(hi))
    assert groups[0].real_indices == () and groups[1].real_indices == (2,)


def test_spiral_zero_conditions_and_order(spiral):
    x1, x2, x3 = (RealForm(tuple(F(int(i == k)) for k in range(3))) for i in range(3))
    assert spiral.zero_condition(0, 1).forms == (x1.scale(F(11, 10)) + x2.scale(F(11, 10)),)
    forms = spiral.zero_condition(0, 0).forms
    expected = {
        x1.scale(F(-1, 20)) + x2.scale(F(-1, 20)) + x3.scale(F(1, 2)),
        x1.scale(F(7, 20)) + x2.scale(F(-3, 20)),
    }
    assert set(forms) == expected
    assert spiral.order(Direction.P) == (0, 1)
    assert spiral.order(Direction.N) == (1, 0)


def test_dominant_group_on_spiral_loop(spiral):
    assert dominant_group_at([1, 1, 0], 0, Direction.P, spiral) == 1
    assert dominant_group_at([1, -1, 0], 0, Direction.P, spiral) == 0
    assert dominant_group_at([1, 1, 0], 0, Direction.N, spiral) == 0
    assert dominant_group_at([0, 0, 0], 0, Direction.P, spiral) is None
    assert necessary_condition([1, 1, 0], spiral)
    assert not necessary_condition([-1, -1, 0], spiral)


def test_explain_outputs(spiral):
    report = explain_report(spiral)
    assert report["eigenvalues"]["a"][2] == "20"
    assert report["groups"][1]["growth_index_enclosure"] == ["14.142135623730950", "14.142135623730951"]
    assert report["lex_order"] == {"p": [0, 1], "n": [1, 0]}
    text = explain_text(spiral)
    assert "6-8i" in text and "14.142135623730" in text


def test_zero_eigenvalues_are_excluded():
    an = analysis_of("zero")
    assert an.groups.groups == () and an.groups.excluded == (0, 1)


# -- properties over every fixture ---------------------------------------------


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(FIXTURES), st.lists(rationals, min_size=3, max_size=3))
def test_gamma_recomposes_the_guard(name, xs):
    an = analysis_of(name)
    x = vec(xs, an.loop.n)
    cx = an.loop.C.apply(x)
    for c in range(an.loop.m):
        total = ComplexAlgebraic(0)
        for i in range(an.loop.n):
            total = total + an.gamma.evaluate(c, i, x)
        assert total == cx[c]


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(FIXTURES), st.lists(rationals, min_size=3, max_size=3), st.lists(rationals, min_size=3, max_size=3))
def test_gamma_is_compatible_with_updates(name, xs, ys):
    an = analysis_of(name)
    x, y = vec(xs, an.loop.n), vec(ys, an.loop.n)
    ax = [z.re for z in an.loop.A.apply(x)]
    bx = [z.re for z in an.loop.B.apply(x)]
    for c in range(an.loop.m):
        for i in range(an.loop.n):
            gx, gy = an.gamma.evaluate(c, i, x), an.gamma.evaluate(c, i, y)
            assert an.gamma.evaluate(c, i, [u + v for u, v in zip(ax, y)]) == an.spectral.a[i] * gx + gy
            assert an.gamma.evaluate(c, i, [u + v for u, v in zip(bx, y)]) == an.spectral.b[i] * gx + gy


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from(FIXTURES),
    st.lists(rationals, min_size=3, max_size=3),
    st.integers(min_value=0, max_value=8),
    st.integers(min_value=0, max_value=8),
)
def test_group_coefficients_are_real(name, xs, j, k):
    an = analysis_of(name)
    x = vec(xs, an.loop.n)
    for c in range(an.loop.m):
        for group in an.groups.groups:
            assert group_coefficient(c, group, an.gamma, x, j, k).im.is_zero()


# -- lexicographic order -------------------------------------------------------

moduli = st.sampled_from([F(1, 2), F(1), F(2), F(3), F(4), F(1, 3), F(6), F(9), F(3, 2)])
SQRT2 = RealAlgebraic(2).sqrt()
probabilities = st.sampled_from([RealAlgebraic(F(1, 2)), RealAlgebraic(F(1, 3)), RealAlgebraic(F(3, 4)), SQRT2 - F(1, 2)])


def key(a, b) -> GroupKey:
    return GroupKey(RealAlgebraic(a), RealAlgebraic(b))


@settings(max_examples=100, deadline=None)
@given(
    st.tuples(moduli, moduli),
    st.tuples(moduli, moduli),
    st.tuples(moduli, moduli),
    probabilities,
    st.sampled_from(list(Direction)),
)
def test_lex_compare_is_a_total_order(k1, k2, k3, p, d):
    keys = [key(*k1), key(*k2), key(*k3)]
    cmp = {(u, v): lex_compare_groups(keys[u], keys[v], p, d) for u in range(3) for v in range(3)}
    for u, v in itertools.product(range(3), repeat=2):
        assert cmp[(u, v)] is Ordering(-cmp[(v, u)])  # antisymmetry
        assert (cmp[(u, v)] is Ordering.EQ) == (keys[u] == keys[v])  # distinct keys are comparable
    for u, v, w in itertools.permutations(range(3)):
        if cmp[(u, v)] is not Ordering.GT and cmp[(v, w)] is not Ordering.GT:
            assert cmp[(u, w)] is not Ordering.GT  # transitivity


def test_ratio_breaks_ties_in_opposite_directions():
    p = RealAlgebraic(F(1, 2))
    low_ratio, high_ratio = key(10, 20), key(20, 10)
    assert compare_index(low_ratio, high_ratio, p) is Ordering.EQ
    assert lex_compare_groups(low_ratio, high_ratio, p, Direction.P) is Ordering.LT
    assert lex_compare_groups(low_ratio, high_ratio, p, Direction.N) is Ordering.GT


@settings(max_examples=50, deadline=None)
@given(
    st.tuples(moduli, moduli),
    st.tuples(moduli, moduli),
    st.fractions(min_value=F(1, 20), max_value=F(19, 20), max_denominator=20),
)
def test_log_path_agrees_with_exact_powers(k1, k2, p):
    a, b = key(*k1), key(*k2)
    exact = compare_index_exact(a, b, p)
    logs = compare_index_by_logs(a, b, RealAlgebraic(p), max_bits=512)
    if exact is Ordering.EQ:
        assert logs in (None, Ordering.EQ)
    else:
        assert logs is exact
