"""Lift an eventual witness x to a start vector y = A^j B^k x.

For a witness x with direction d and dominant group per constraint, the
guard value along an execution with l steps, j of them A, is a sum of
group terms (idx * ratio^u)^l * coefficient, where u = j/l - p.  Inside the
band r <= u*l <= eps*l (mirrored for d = n) the dominant group's term
outweighs everything else once l is large enough.  The constants below are
chosen so that this can be checked with exact arithmetic and certified log
enclosures, and y is the state after an execution in the middle of the band.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Sequence

from .errors import GuardViolatedAtLift, NoCertificate
from .exactnum import DyadicInterval, Ordering, RealAlgebraic, log_interval
from .loopmodel import apply_updates, as_real_vector, guard_values
from .spectral import Analysis, Direction, compare_index
from .witness.membership import Certificate, membership_check

_MAX_BITS = 1 << 12


@dataclass(frozen=True)
class LiftConstants:
    d: Direction
    epsilon: Fraction
    r: int
    r_per_constraint: tuple[int, ...]
    l: int
    j: int
    k: int


@dataclass(frozen=True)
class LiftCertificate:
    constants: LiftConstants
    y: tuple[RealAlgebraic, ...]
    margins: tuple[RealAlgebraic, ...]
    guard: tuple[RealAlgebraic, ...]

    @property
    def epsilon(self) -> Fraction:
        return self.constants.epsilon

    def to_json(self) -> dict:
        c = self.constants
        return {
            "d": c.d.value,
            "epsilon": str(c.epsilon),
            "r": c.r,
            "l": c.l,
            "j": c.j,
            "k": c.k,
            "y": [v.to_json() for v in self.y],
            "guard_at_y": [v.to_json() for v in self.guard],
            "margins": [m.to_json() for m in self.margins],
        }


def _omega(analysis: Analysis, gi: int, d: Direction) -> RealAlgebraic:
    """|a|/|b| for d = p and its reciprocal for d = n."""
    ratio = analysis.groups.groups[gi].key.ratio
    return ratio if d is Direction.P else ratio.inverse()


def _active_groups(analysis: Analysis, c: int, x: Sequence[RealAlgebraic]) -> list[int]:
    return [gi for gi in range(len(analysis.groups)) if not analysis.zero_condition(c, gi).holds_at(x)]


def _abs_gamma_sum(analysis: Analysis, c: int, x: Sequence[RealAlgebraic]) -> RealAlgebraic:
    total = RealAlgebraic(0)
    for i in range(analysis.loop.n):
        g = analysis.gamma.evaluate(c, i, x)
        if not g.is_zero():
            total = total + g.modulus()
    return total


def _least_r(t: RealAlgebraic, w_max: RealAlgebraic, w_2: RealAlgebraic | None, total: RealAlgebraic) -> int:
    """Least natural r with t * w_max^r > w_2^r * total (0 if there is no second ratio)."""
    if w_2 is None:
        return 0
    q = w_max / w_2  # > 1
    r = 0
    lhs = t
    rhs = total
    while lhs <= rhs:
        lhs = lhs * q
        r += 1
    return r


def _phi(analysis: Analysis, gi: int, d: Direction, u: Fraction, bits: int) -> DyadicInterval:
    """Enclosure of ln(idx) + u ln(omega) for group gi."""
    key = analysis.groups.groups[gi].key
    out = key.log_index(analysis.loop.p, bits)
    if u:
        out = out + log_interval(_omega(analysis, gi, d), bits + 4) * u
    return out


def _certified_less(lhs, rhs) -> bool:
    """Decide lhs(bits) < rhs(bits) for enclosures; False if never separated."""
    bits = 32
    while bits <= _MAX_BITS:
        a, b = lhs(bits), rhs(bits)
        if a.hi < b.lo:
            return True
        if b.hi < a.lo:
            return False
        bits *= 2
    return False


def _mid_band_j(p: RealAlgebraic, l: int, offset: Fraction, d: Direction) -> int:
    """round(p*l + offset) for d = p, round(p*l - offset) for d = n, exactly."""
    target = p * l + (offset if d is Direction.P else -offset)
    base = floor(target.bracket(Fraction(1, 8))[0])
    # choose the integer nearest to target; ties round up
    for cand in (base, base + 1, base + 2):
        if (target - cand).compare(Fraction(1, 2)) is not Ordering.GT and (target - cand).compare(Fraction(-1, 2)) is Ordering.GT:
            return cand
    return base + 1  # pragma: no cover


def compute_lift_constants(
    analysis: Analysis, x: Sequence, certificate: Certificate | None = None
) -> LiftConstants:
    xv = as_real_vector(x, analysis.loop.n)
    if certificate is None:
        certificate = membership_check(xv, analysis)
    if certificate is None:
        raise NoCertificate("x is not in the witness set")
    d = certificate.d
    p = analysis.loop.p
    side = 1 - p if d is Direction.P else p

    rs = []
    lower_by_c: list[tuple[int, list[int], RealAlgebraic, RealAlgebraic]] = []
    for c, (gmax, margin) in enumerate(zip(certificate.assignment, certificate.margins)):
        t = margin / 2
        total = _abs_gamma_sum(analysis, c, xv)
        active = _active_groups(analysis, c, xv)
        key_max = analysis.groups.groups[gmax].key
        same, lower = [], []
        for gi in active:
            if gi == gmax:
                continue
            if compare_index(analysis.groups.groups[gi].key, key_max, p) is Ordering.EQ:
                same.append(gi)
            else:
                lower.append(gi)
        w_max = _omega(analysis, gmax, d)
        w_2 = max((_omega(analysis, gi, d) for gi in same), default=None)
        rs.append(_least_r(t, w_max, w_2, total))
        lower_by_c.append((gmax, lower, t, total))

    # epsilon: largest power of two below the side bound keeping every lower group behind
    eps = Fraction(1)
    while RealAlgebraic(eps) > side:
        eps /= 2
    while True:
        ok = True
        for gmax, lower, _, _ in lower_by_c:
            for gi in lower:
                if not _certified_less(
                    lambda b, gi=gi: _phi(analysis, gi, d, eps, b),
                    lambda b, gmax=gmax: _phi(analysis, gmax, d, eps, b),
                ):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            break
        eps /= 2

    r = max(rs, default=0)
    l = max(1, ceil((r + 2) / eps))
    # grow l until the dominant term beats all lower groups at both band ends
    while True:
        good = True
        for gmax, lower, t, total in lower_by_c:
            if not lower:
                continue
            for u in (Fraction(0), eps):
                def lhs(b, u=u, gmax=gmax, t=t):
                    return log_interval(t, b) + _phi(analysis, gmax, d, u, b) * l

                def rhs(b, u=u, lower=lower, total=total):
                    worst = None
                    for gi in lower:
                        e = _phi(analysis, gi, d, u, b)
                        worst = e if worst is None else DyadicInterval(max(worst.lo, e.lo), max(worst.hi, e.hi))
                    return log_interval(total, b) + worst * l

                if not _certified_less(rhs, lhs):
                    good = False
                    break
            if not good:
                break
        if good:
            break
        l *= 2

    j = _mid_band_j(p, l, (eps * l + r) / 2, d)
    return LiftConstants(d, eps, r, tuple(rs), l, j, l - j)


def check_band(constants: LiftConstants, p: RealAlgebraic) -> bool:
    """The exact integer/rational inequalities a lift must satisfy."""
    c = constants
    if c.j < 0 or c.k < 0 or c.j + c.k != c.l:
        return False
    if not (c.epsilon > 0 and c.epsilon * c.l >= c.r + 2):
        return False
    side = 1 - p if c.d is Direction.P else p
    if RealAlgebraic(c.epsilon) > side:
        return False
    dev = c.j - p * c.l if c.d is Direction.P else p * c.l - c.j
    if dev.sign() < 0 or dev > c.epsilon * c.l:
        return False
    mid = (c.epsilon * c.l + c.r) / 2
    gap = dev - mid
    return abs(gap) <= 1


def lift_witness(analysis: Analysis, x: Sequence, constants: LiftConstants | None = None) -> LiftCertificate:
    xv = as_real_vector(x, analysis.loop.n)
    cert = membership_check(xv, analysis)
    if cert is None:
        raise NoCertificate("x is not in the witness set")
    if constants is None:
        constants = compute_lift_constants(analysis, xv, cert)
    y = apply_updates(analysis.loop, xv, constants.j, constants.k)
    guard = guard_values(analysis.loop, y)
    if not all(v.sign() > 0 for v in guard):
        raise GuardViolatedAtLift(
            f"C*y is not positive after j={constants.j}, k={constants.k}: {[str(v) for v in guard]}"
        )
    return LiftCertificate(constants, y, cert.margins, guard)
