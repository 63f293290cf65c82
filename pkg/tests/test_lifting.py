from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import analysis_of
from pastdecide.errors import NoCertificate
from pastdecide.loopmodel import apply_updates, guard_values, parse_loop
from pastdecide.lifting import LiftConstants, check_band, compute_lift_constants, lift_witness
from pastdecide.spectral import Direction, analyze, necessary_condition
from pastdecide.witness import membership_check

F = Fraction


def test_spiral_constants(spiral):
    c = compute_lift_constants(spiral, [1, 1, 0])
    # t = 11/10, same-index ratio 4: least r with (11/10) 4^r > sum |gamma| = 11/5 + 2 |gamma_11| is 1
    assert (c.d, c.epsilon, c.r, c.l, c.j, c.k) == (Direction.P, F(1, 2), 1, 6, 5, 1)
    assert check_band(c, spiral.loop.p)


def test_one_dimensional_constants(oned):
    c = compute_lift_constants(oned, [1])
    assert (c.epsilon, c.r, c.l, c.j, c.k) == (F(1, 2), 0, 4, 3, 1)
    cert = lift_witness(oned, [1], c)
    assert cert.y == (4,) and cert.guard == (4,)


def test_invalid_start_has_no_certificate(spiral):
    with pytest.raises(NoCertificate):
        compute_lift_constants(spiral, [1, -1, 0])
    with pytest.raises(NoCertificate):
        lift_witness(spiral, [-1, -1, 0])


def test_spiral_lift_is_exact(spiral):
    cert = lift_witness(spiral, [1, 1, 0])
    c = cert.constants
    assert cert.y == apply_updates(spiral.loop, [1, 1, 0], c.j, c.k)
    assert cert.guard == guard_values(spiral.loop, cert.y)
    assert all(v.sign() > 0 for v in cert.guard)
    assert membership_check(cert.y, spiral) is not None
    assert necessary_condition(cert.y, spiral)
    doc = cert.to_json()
    assert doc["epsilon"] == "1/2" and (doc["l"], doc["j"], doc["k"]) == (6, 5, 1)


def test_lifting_jumps_over_an_initially_violated_guard(spiral):
    x = [1, 1, -5]  # C x = -3 but x1 + x2 > 0
    assert guard_values(spiral.loop, x)[0] < 0
    cert = lift_witness(spiral, x)
    assert all(v.sign() > 0 for v in cert.guard)


def test_check_band_rejects_bad_constants(spiral):
    p = spiral.loop.p
    good = compute_lift_constants(spiral, [1, 1, 0])
    assert not check_band(LiftConstants(Direction.P, F(1, 2), 1, (1,), 6, 4, 1), p)  # j + k != l
    assert not check_band(LiftConstants(Direction.P, F(1, 2), 1, (1,), 4, 3, 1), p)  # eps l < r + 2
    assert not check_band(LiftConstants(Direction.P, F(3, 4), 1, (1,), 8, 7, 1), p)  # eps > 1 - p
    assert not check_band(LiftConstants(Direction.P, F(1, 2), 1, (1,), 6, 2, 4), p)  # below the band
    assert check_band(good, p)


def test_negative_direction_mirrors_the_band():
    # both groups have growth index 2; x = (1, -1) is only positive when the B-heavy group dominates
    loop = parse_loop(json.dumps({"p": "1/2", "C": [[1, 1]], "A": [[1, 0], [0, 4]], "B": [[4, 0], [0, 1]]}))
    an = analyze(loop)
    cert = membership_check([1, -1], an)
    assert cert is not None and cert.d is Direction.N
    lift = lift_witness(an, [1, -1])
    assert lift.constants.d is Direction.N
    assert check_band(lift.constants, loop.p)
    assert all(v.sign() > 0 for v in lift.guard)


MIXED = analyze(parse_loop(json.dumps({"p": "1/2", "C": [[1, 1]], "A": [[3, 0], [0, 2]], "B": [[1, 0], [0, 2]]})))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=4), min_size=2, max_size=2))
def test_every_member_lifts_to_a_live_start(xs):
    cert = membership_check(xs, MIXED)
    if cert is None:
        with pytest.raises(NoCertificate):
            lift_witness(MIXED, xs)
        return
    lift = lift_witness(MIXED, xs)
    assert check_band(lift.constants, MIXED.loop.p)
    assert all(v.sign() > 0 for v in lift.guard)
    assert necessary_condition(lift.y, MIXED)


def test_spiral_fixture_cache_is_shared():
    assert analysis_of("spiral") is analysis_of("spiral")
