"""Constraint terms, their groups, the lexicographic group order and the
linear conditions that describe where a group dominates.

For every constraint c and eigen-index i the guard value after j A-steps
and k B-steps is sum_i a_i^j b_i^k gamma_{c,i}(x).  Indices sharing the
pair (|a_i|, |b_i|) form a group; within a group, indices whose eigenvalues
are both positive reals form the "real part", all others the "complex part".
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Sequence

import mpmath

from .exactnum import ComplexAlgebraic, DyadicInterval, Ordering, RealAlgebraic, log_interval
from .linalg import SpectralDecomposition, simultaneous_diagonalize
from .loopmodel import Loop, as_real_vector


class Direction(enum.Enum):
    """Which way the A-fraction drifts: above p (P) or below p (N)."""

    P = "p"
    N = "n"


# ---------------------------------------------------------------------------
# linear forms


@dataclass(frozen=True)
class RealForm:
    """x -> sum_k coeffs[k] * x_k with real algebraic coefficients."""

    coeffs: tuple[RealAlgebraic, ...]

    @classmethod
    def zero(cls, n: int) -> "RealForm":
        return cls(tuple(RealAlgebraic(0) for _ in range(n)))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __add__(self, other: "RealForm") -> "RealForm":
        return RealForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, s: RealAlgebraic | Fraction | int) -> "RealForm":
        return RealForm(tuple(c * s for c in self.coeffs))

    def evaluate(self, x: Sequence[RealAlgebraic]) -> RealAlgebraic:
        acc = RealAlgebraic(0)
        for c, v in zip(self.coeffs, x):
            if c.is_zero() or v.is_zero():
                continue
            acc = acc + c * v
        return acc

    def is_rational(self) -> bool:
        return all(c.is_rational for c in self.coeffs)

    def proportional_to(self, other: "RealForm") -> bool:
        """True if one form is a nonzero multiple of the other."""
        pivot = next((k for k, c in enumerate(self.coeffs) if not c.is_zero()), None)
        if pivot is None or other.coeffs[pivot].is_zero():
            return self.is_zero() and other.is_zero()
        ratio = other.coeffs[pivot] / self.coeffs[pivot]
        return all(a * ratio == b for a, b in zip(self.coeffs, other.coeffs))

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]

    def __str__(self) -> str:
        terms = [f"{c}*x{k + 1}" for k, c in enumerate(self.coeffs) if not c.is_zero()]
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class ComplexForm:
    """x -> sum_k coeffs[k] * x_k with complex algebraic coefficients."""

    coeffs: tuple[ComplexAlgebraic, ...]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __add__(self, other: "ComplexForm") -> "ComplexForm":
        return ComplexForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, s: ComplexAlgebraic) -> "ComplexForm":
        return ComplexForm(tuple(c * s for c in self.coeffs))

    def conj(self) -> "ComplexForm":
        return ComplexForm(tuple(c.conj() for c in self.coeffs))

    @property
    def real(self) -> RealForm:
        return RealForm(tuple(c.re for c in self.coeffs))

    @property
    def imag(self) -> RealForm:
        return RealForm(tuple(c.im for c in self.coeffs))

    def evaluate(self, x: Sequence[RealAlgebraic]) -> ComplexAlgebraic:
        return ComplexAlgebraic(self.real.evaluate(x), self.imag.evaluate(x))

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]

    def __str__(self) -> str:
        terms = [f"({c})*x{k + 1}" for k, c in enumerate(self.coeffs) if not c.is_zero()]
        return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# gamma maps


@dataclass(frozen=True)
class GammaTable:
    g: tuple[tuple[ComplexForm, ...], ...]  # g[c][i]

    @property
    def m(self) -> int:
        return len(self.g)

    @property
    def n(self) -> int:
        return len(self.g[0]) if self.g else 0

    def form(self, c: int, i: int) -> ComplexForm:
        return self.g[c][i]

    def evaluate(self, c: int, i: int, x: Sequence) -> ComplexAlgebraic:
        return self.g[c][i].evaluate(as_real_vector(x, self.n))

    def to_json(self) -> list:
        return [[f.to_json() for f in row] for row in self.g]


def compute_gamma(loop: Loop, spectral: SpectralDecomposition) -> GammaTable:
    """g[c][i][k] = (C S)_{c,i} * (S^-1)_{i,k}."""
    cs = loop.C @ spectral.S
    rows = []
    for c in range(loop.m):
        row = []
        for i in range(loop.n):
            w = cs[c, i]
            row.append(ComplexForm(tuple(w * spectral.S_inv[i, k] for k in range(loop.n))))
        rows.append(tuple(row))
    return GammaTable(tuple(rows))


# ---------------------------------------------------------------------------
# groups


def _mpf_to_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    value = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -value if sign else value


def _decimal(q: Fraction, digits: int, floor: bool) -> str:
    """q rounded down (or up) to ``digits`` decimal places."""
    scaled = q * 10**digits
    k = scaled.numerator // scaled.denominator
    if not floor and k != scaled:
        k += 1
    sign = "-" if k < 0 else ""
    k = abs(k)
    whole, frac = divmod(k, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


@dataclass(frozen=True)
class GroupKey:
    mod_a: RealAlgebraic
    mod_b: RealAlgebraic

    @property
    def ratio(self) -> RealAlgebraic:
        """The second lexicographic component, |a| / |b|."""
        return self.mod_a / self.mod_b

    def log_index(self, p: RealAlgebraic, bits: int) -> DyadicInterval:
        """Enclosure of p ln|a| + (1-p) ln|b|, the log of the growth index."""
        plo, phi = p.bracket(Fraction(1, 2 ** (bits + 4)))
        pint = DyadicInterval(plo, phi)
        qint = DyadicInterval(1 - phi, 1 - plo)
        return pint * log_interval(self.mod_a, bits + 4) + qint * log_interval(self.mod_b, bits + 4)

    def index_enclosure(self, p: RealAlgebraic, digits: int = 15) -> tuple[str, str]:
        """Certified decimal enclosure of |a|^p |b|^(1-p), rounded outward."""
        bits = int(digits * 3.33) + 8
        li = self.log_index(p, bits)
        with mpmath.workprec(bits + 32):
            ctx = mpmath.iv
            ctx.prec = bits + 32
            lo = ctx.mpf(li.lo.numerator) / li.lo.denominator
            hi = ctx.mpf(li.hi.numerator) / li.hi.denominator
            e_lo = _mpf_to_fraction(ctx.exp(lo)._mpi_[0])
            e_hi = _mpf_to_fraction(ctx.exp(hi)._mpi_[1])
        return _decimal(e_lo, digits, floor=True), _decimal(e_hi, digits, floor=False)

    def to_json(self) -> list:
        return [self.mod_a.to_json(), self.mod_b.to_json()]

    def __str__(self) -> str:
        return f"(|a|={self.mod_a}, |b|={self.mod_b})"


@dataclass(frozen=True)
class Group:
    key: GroupKey
    indices: tuple[int, ...]
    units: tuple[tuple[ComplexAlgebraic, ComplexAlgebraic], ...]  # aligned with indices

    @property
    def real_indices(self) -> tuple[int, ...]:
        return tuple(i for i, (ua, ub) in zip(self.indices, self.units) if ua == 1 and ub == 1)

    @property
    def complex_indices(self) -> tuple[int, ...]:
        real = set(self.real_indices)
        return tuple(i for i in self.indices if i not in real)

    def unit_classes(self) -> list[tuple[tuple[ComplexAlgebraic, ComplexAlgebraic], tuple[int, ...]]]:
        """Complex-part indices bucketed by their unit pair, in index order."""
        classes: list[tuple[tuple[ComplexAlgebraic, ComplexAlgebraic], list[int]]] = []
        real = set(self.real_indices)
        for i, u in zip(self.indices, self.units):
            if i in real:
                continue
            for cu, members in classes:
                if cu[0] == u[0] and cu[1] == u[1]:
                    members.append(i)
                    break
            else:
                classes.append((u, [i]))
        return [(u, tuple(ms)) for u, ms in classes]


@dataclass(frozen=True)
class GroupTable:
    groups: tuple[Group, ...]
    excluded: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.groups)

    def find(self, key: GroupKey) -> int:
        for gi, g in enumerate(self.groups):
            if g.key == key:
                return gi
        raise KeyError(key)


def build_groups(spectral: SpectralDecomposition) -> GroupTable:
    buckets: list[tuple[GroupKey, list[int]]] = []
    excluded = []
    for i, (a, b) in enumerate(zip(spectral.a, spectral.b)):
        if a.is_zero() or b.is_zero():
            excluded.append(i)
            continue
        key = GroupKey(a.modulus(), b.modulus())
        for k, members in buckets:
            if k == key:
                members.append(i)
                break
        else:
            buckets.append((key, [i]))
    buckets.sort(key=lambda kv: (kv[0].mod_a, kv[0].mod_b))
    groups = []
    for key, members in buckets:
        units = tuple((spectral.a[i] / key.mod_a, spectral.b[i] / key.mod_b) for i in members)
        groups.append(Group(key, tuple(members), units))
    return GroupTable(tuple(groups), tuple(excluded))


# ---------------------------------------------------------------------------
# lexicographic order


def compare_index_by_logs(k1: GroupKey, k2: GroupKey, p: RealAlgebraic, max_bits: int = 4096) -> Ordering | None:
    """Order of the growth indices through certified log enclosures.

    Refines with doubling precision; returns None if the enclosures still
    overlap at ``max_bits`` (which happens exactly when the indices are equal).
    """
    ra = None if k1.mod_a == k2.mod_a else k1.mod_a / k2.mod_a
    rb = None if k1.mod_b == k2.mod_b else k1.mod_b / k2.mod_b
    if ra is None and rb is None:
        return Ordering.EQ
    bits = 16
    while bits <= max_bits:
        plo, phi = p.bracket(Fraction(1, 2 ** (bits + 2)))
        pint = DyadicInterval(plo, phi)
        qint = DyadicInterval(1 - phi, 1 - plo)
        total = DyadicInterval(Fraction(0), Fraction(0))
        if ra is not None:
            total = total + pint * log_interval(ra, bits + 2)
        if rb is not None:
            total = total + qint * log_interval(rb, bits + 2)
        if total.lo > 0:
            return Ordering.GT
        if total.hi < 0:
            return Ordering.LT
        bits *= 2
    return None


def compare_index_exact(k1: GroupKey, k2: GroupKey, p: Fraction) -> Ordering:
    """Order of the growth indices for rational p = u/v via integer powers."""
    u, v = p.numerator, p.denominator
    lhs = k1.mod_a**u * k1.mod_b ** (v - u)
    rhs = k2.mod_a**u * k2.mod_b ** (v - u)
    return lhs.compare(rhs)


def compare_index(k1: GroupKey, k2: GroupKey, p: RealAlgebraic) -> Ordering:
    if k1 == k2:
        return Ordering.EQ
    if p.is_rational:
        return compare_index_exact(k1, k2, p.rational)
    # irrational algebraic p: distinct keys have distinct indices
    res = compare_index_by_logs(k1, k2, p)
    if res is None or res is Ordering.EQ:  # pragma: no cover - excluded by transcendence
        raise ArithmeticError("log enclosures failed to separate distinct growth indices")
    return res


def lex_compare_groups(k1: GroupKey, k2: GroupKey, p: RealAlgebraic, d: Direction) -> Ordering:
    """Growth index first, then |a|/|b| ascending for P and descending for N."""
    if k1.mod_a == k2.mod_a and k1.mod_b == k2.mod_b:
        return Ordering.EQ
    first = compare_index(k1, k2, p)
    if first is not Ordering.EQ:
        return first
    second = k1.ratio.compare(k2.ratio)
    return second if d is Direction.P else Ordering(-second)


# ---------------------------------------------------------------------------
# conditions


@dataclass(frozen=True)
class EqualityCondition:
    """Conjunction of real-linear forms that must all vanish."""

    forms: tuple[RealForm, ...]

    def holds_at(self, x: Sequence[RealAlgebraic]) -> bool:
        return all(f.evaluate(x).is_zero() for f in self.forms)

    def to_json(self) -> list:
        return [f.to_json() for f in self.forms]


@dataclass(frozen=True)
class PositivityCondition:
    """lhs(x) > sum of |mod(x)| over the moduli forms."""

    lhs: RealForm
    moduli: tuple[ComplexForm, ...]

    def margin(self, x: Sequence[RealAlgebraic]) -> RealAlgebraic:
        total = self.lhs.evaluate(x)
        for f in self.moduli:
            total = total - f.evaluate(x).modulus()
        return total

    def holds_at(self, x: Sequence[RealAlgebraic]) -> bool:
        return self.margin(x).sign() > 0

    def to_json(self) -> dict:
        return {"lhs": self.lhs.to_json(), "moduli": [f.to_json() for f in self.moduli]}


def zero_coefficient_condition(c: int, group: Group, gamma: GammaTable) -> EqualityCondition:
    """Forms whose joint vanishing makes the group's coefficient 0 for all (j, k).

    The maps (j, k) -> u_A^j u_B^k of distinct unit pairs are linearly
    independent, so the coefficient vanishes identically iff the gamma sum of
    every unit class does.  Real classes give one real equation; a pair of
    conjugate classes has conjugate sums, so the real and imaginary parts of
    one representative suffice.
    """
    n = gamma.n
    forms: list[RealForm] = []
    real_sum = RealForm.zero(n)
    for i in group.real_indices:
        real_sum = real_sum + gamma.form(c, i).real
    if not real_sum.is_zero():
        forms.append(real_sum)
    seen: list[tuple[ComplexAlgebraic, ComplexAlgebraic]] = []
    for unit, members in group.unit_classes():
        if any(unit[0] == s[0].conj() and unit[1] == s[1].conj() for s in seen):
            continue
        seen.append(unit)
        total = gamma.form(c, members[0])
        for i in members[1:]:
            total = total + gamma.form(c, i)
        for part in (total.real, total.imag):
            if not part.is_zero():
                forms.append(part)
    return EqualityCondition(tuple(forms))


def positivity_condition(c: int, group: Group, gamma: GammaTable) -> PositivityCondition:
    lhs = RealForm.zero(gamma.n)
    for i in group.real_indices:
        lhs = lhs + gamma.form(c, i).real
    moduli = tuple(gamma.form(c, i) for i in group.complex_indices)
    return PositivityCondition(lhs, moduli)


def group_coefficient(
    c: int, group: Group, gamma: GammaTable, x: Sequence[RealAlgebraic], j: int, k: int
) -> ComplexAlgebraic:
    """sum over the group of zeta_A^j zeta_B^k gamma_{c,i}(x)."""
    acc = ComplexAlgebraic(0)
    for i, (ua, ub) in zip(group.indices, group.units):
        g = gamma.evaluate(c, i, x)
        if g.is_zero():
            continue
        acc = acc + ua**j * ub**k * g
    return acc


# ---------------------------------------------------------------------------
# bundled analysis


@dataclass
class Analysis:
    """Everything derived from a loop's spectrum, computed once."""

    loop: Loop
    spectral: SpectralDecomposition
    gamma: GammaTable
    groups: GroupTable
    zero: dict[tuple[int, int], EqualityCondition] = field(default_factory=dict)
    positive: dict[tuple[int, int], PositivityCondition] = field(default_factory=dict)
    _orders: dict[Direction, tuple[int, ...]] = field(default_factory=dict)

    def zero_condition(self, c: int, gi: int) -> EqualityCondition:
        if (c, gi) not in self.zero:
            self.zero[(c, gi)] = zero_coefficient_condition(c, self.groups.groups[gi], self.gamma)
        return self.zero[(c, gi)]

    def positivity(self, c: int, gi: int) -> PositivityCondition:
        if (c, gi) not in self.positive:
            self.positive[(c, gi)] = positivity_condition(c, self.groups.groups[gi], self.gamma)
        return self.positive[(c, gi)]

    def order(self, d: Direction) -> tuple[int, ...]:
        """Group indices in ascending lexicographic order for direction d."""
        if d not in self._orders:
            keys = [g.key for g in self.groups.groups]
            p = self.loop.p
            idx = sorted(range(len(keys)), key=cmp_to_key(lambda u, v: int(lex_compare_groups(keys[u], keys[v], p, d))))
            self._orders[d] = tuple(idx)
        return self._orders[d]

    def greater_groups(self, gi: int, d: Direction) -> tuple[int, ...]:
        order = self.order(d)
        return order[order.index(gi) + 1:]


def analyze(loop: Loop) -> Analysis:
    spectral = simultaneous_diagonalize(loop.A, loop.B)
    return Analysis(loop, spectral, compute_gamma(loop, spectral), build_groups(spectral))


def dominant_group_at(x: Sequence, c: int, d: Direction, analysis: Analysis) -> int | None:
    """Index of the lex-maximal group whose coefficient does not vanish at x."""
    xv = as_real_vector(x, analysis.loop.n)
    for gi in reversed(analysis.order(d)):
        if not analysis.zero_condition(c, gi).holds_at(xv):
            return gi
    return None


def necessary_condition(x: Sequence, analysis: Analysis) -> bool:
    """Some direction where every constraint's dominant group has positive real-part sum."""
    xv = as_real_vector(x, analysis.loop.n)
    for d in (Direction.P, Direction.N):
        ok = True
        for c in range(analysis.loop.m):
            gi = dominant_group_at(xv, c, d, analysis)
            if gi is None or analysis.positivity(c, gi).lhs.evaluate(xv).sign() <= 0:
                ok = False
                break
        if ok:
            return True
    return False


# ---------------------------------------------------------------------------
# explain report


def explain_report(analysis: Analysis) -> dict:
    sd = analysis.spectral
    p = analysis.loop.p
    groups = []
    for gi, g in enumerate(analysis.groups.groups):
        lo, hi = g.key.index_enclosure(p)
        groups.append(
            {
                "index": gi,
                "key": g.key.to_json(),
                "growth_index_enclosure": [lo, hi],
                "ratio": g.key.ratio.to_json(),
                "indices": [i + 1 for i in g.indices],
                "real_part": [i + 1 for i in g.real_indices],
                "complex_part": [i + 1 for i in g.complex_indices],
            }
        )
    return {
        "n": analysis.loop.n,
        "m": analysis.loop.m,
        "p": p.to_json(),
        "eigenvalues": {
            "a": [z.to_json() for z in sd.a],
            "b": [z.to_json() for z in sd.b],
        },
        "S": sd.S.to_json(),
        "S_inv": sd.S_inv.to_json(),
        "conjugate_pairing": [s + 1 for s in sd.conj_pairing],
        "gamma": analysis.gamma.to_json(),
        "groups": groups,
        "excluded": [i + 1 for i in analysis.groups.excluded],
        "lex_order": {d.value: list(analysis.order(d)) for d in (Direction.P, Direction.N)},
    }


def explain_text(analysis: Analysis) -> str:
    sd = analysis.spectral
    lines = ["eigenpairs (a_i, b_i):"]
    for i, (a, b) in enumerate(zip(sd.a, sd.b)):
        lines.append(f"  {i + 1}: a = {a}, b = {b}")
    lines.append("gamma maps:")
    for c in range(analysis.gamma.m):
        for i in range(analysis.gamma.n):
            lines.append(f"  gamma[{c + 1},{i + 1}](x) = {analysis.gamma.form(c, i)}")
    lines.append("groups:")
    lines.append(f"  {'#':>2}  {'|a|':>14}  {'|b|':>14}  {'|a|/|b|':>10}  {'growth index':>36}  R / C")
    for gi, g in enumerate(analysis.groups.groups):
        lo, hi = g.key.index_enclosure(analysis.loop.p, 12)
        lines.append(
            f"  {gi:>2}  {str(g.key.mod_a):>14}  {str(g.key.mod_b):>14}  {str(g.key.ratio):>10}  "
            f"[{lo}, {hi}]  {[i + 1 for i in g.real_indices]} / {[i + 1 for i in g.complex_indices]}"
        )
    if analysis.groups.excluded:
        lines.append(f"excluded (zero eigenvalue): {[i + 1 for i in analysis.groups.excluded]}")
    for d in (Direction.P, Direction.N):
        lines.append(f"ascending order for d={d.value}: {list(analysis.order(d))}")
    return "\n".join(lines)
