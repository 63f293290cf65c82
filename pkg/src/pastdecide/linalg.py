"""Exact dense linear algebra and simultaneous diagonalization.

Matrices hold ComplexAlgebraic entries.  Characteristic and minimal
polynomials are only computed for rational matrices, which is all the loop
model admits for its update matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import sympy

from .errors import DimensionMismatch, NonSquare, NotCommuting, NotDiagonalizable, SingularMatrix
from .exactnum import ComplexAlgebraic, IntPolynomial, RealAlgebraic, isolate_real_roots
from .exactnum.poly import factor_irreducible, factor_with_multiplicity

Entry = ComplexAlgebraic | RealAlgebraic | Fraction | int


@dataclass(frozen=True)
class ExactMatrix:
    entries: tuple[tuple[ComplexAlgebraic, ...], ...]
    rows: int
    cols: int

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Entry]], cols: int | None = None) -> "ExactMatrix":
        data = tuple(tuple(ComplexAlgebraic.coerce(v) for v in row) for row in rows)
        ncols = len(data[0]) if data else (cols or 0)
        if any(len(r) != ncols for r in data):
            raise DimensionMismatch("ragged matrix rows")
        return cls(data, len(data), ncols)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls.from_rows([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def diag(cls, values: Sequence[Entry]) -> "ExactMatrix":
        n = len(values)
        return cls.from_rows([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Entry]]) -> "ExactMatrix":
        n = len(columns[0]) if columns else 0
        return cls.from_rows([[col[i] for col in columns] for i in range(n)], len(columns))

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> ComplexAlgebraic:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[ComplexAlgebraic, ...]:
        return self.entries[i]

    def col(self, j: int) -> tuple[ComplexAlgebraic, ...]:
        return tuple(r[j] for r in self.entries)

    def is_real(self) -> bool:
        return all(v.is_real() for r in self.entries for v in r)

    def is_rational(self) -> bool:
        return all(v.is_rational() for r in self.entries for v in r)

    def to_fractions(self) -> list[list[Fraction]]:
        if not self.is_rational():
            raise ValueError("matrix has irrational or non-real entries")
        return [[v.re.rational for v in r] for r in self.entries]

    def conj(self) -> "ExactMatrix":
        return ExactMatrix.from_rows([[v.conj() for v in r] for r in self.entries], self.cols)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix.from_rows([self.col(j) for j in range(self.cols)], self.rows)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix sum of different shapes")
        return ExactMatrix.from_rows(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + other.scale(-1)

    def scale(self, s: Entry) -> "ExactMatrix":
        s = ComplexAlgebraic.coerce(s)
        return ExactMatrix.from_rows([[v * s for v in r] for r in self.entries], self.cols)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        cols = [other.col(j) for j in range(other.cols)]
        return ExactMatrix.from_rows([[_dot(r, c) for c in cols] for r in self.entries], other.cols)

    def apply(self, vec: Sequence[Entry]) -> tuple[ComplexAlgebraic, ...]:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.cols} columns")
        v = [ComplexAlgebraic.coerce(x) for x in vec]
        return tuple(_dot(r, v) for r in self.entries)

    def pow(self, k: int) -> "ExactMatrix":
        if not self.is_square:
            raise NonSquare("power of a non-square matrix")
        if k < 0:
            return self.inverse().pow(-k)
        result = ExactMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    def inverse(self) -> "ExactMatrix":
        if not self.is_square:
            raise NonSquare("inverse of a non-square matrix")
        n = self.rows
        aug = [list(r) + [ComplexAlgebraic(1 if i == j else 0) for j in range(n)] for i, r in enumerate(self.entries)]
        red, pivots = _rref(aug, n)
        if pivots != list(range(n)):
            raise SingularMatrix("matrix is not invertible")
        return ExactMatrix.from_rows([r[n:] for r in red], n)

    def to_json(self) -> list:
        return [[v.to_json() for v in r] for r in self.entries]

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(v) for v in r) + "]" for r in self.entries) + "]"


def _dot(r: Sequence[ComplexAlgebraic], c: Sequence[ComplexAlgebraic]) -> ComplexAlgebraic:
    acc = ComplexAlgebraic(0)
    for a, b in zip(r, c):
        if a.is_zero() or b.is_zero():
            continue
        acc = acc + a * b
    return acc


def _rref(rows: list[list[ComplexAlgebraic]], ncols: int) -> tuple[list[list[ComplexAlgebraic]], list[int]]:
    """Reduced row echelon form, pivoting only within the first ``ncols`` columns."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [v * inv if not v.is_zero() else v for v in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [a - f * b if not b.is_zero() else a for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def nullspace(rows: list[list[ComplexAlgebraic]], ncols: int) -> list[tuple[ComplexAlgebraic, ...]]:
    """Basis of the kernel; one vector per free column, with a 1 in that column."""
    red, pivots = _rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ComplexAlgebraic(0)] * ncols
        v[f] = ComplexAlgebraic(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][f]
        basis.append(tuple(v))
    return basis


def mat_ops(op: str, *args):
    """Dispatcher over mul, pow, inverse and apply."""
    if op == "mul":
        return args[0] @ args[1]
    if op == "pow":
        return args[0].pow(args[1])
    if op == "inverse":
        return args[0].inverse()
    if op == "apply":
        return args[0].apply(args[1])
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# characteristic and minimal polynomials (rational matrices)


def _frac_matmul(x: list[list[Fraction]], y: list[list[Fraction]]) -> list[list[Fraction]]:
    cols = list(zip(*y))
    return [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in x]


def _frac_identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def char_poly(M: ExactMatrix) -> IntPolynomial:
    """det(tI - M) via Faddeev-LeVerrier, returned in primitive integer form."""
    if not M.is_square:
        raise NonSquare("characteristic polynomial of a non-square matrix")
    a = M.to_fractions()
    n = M.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = [[Fraction(0)] * n for _ in range(n)]
    ident = _frac_identity(n)
    for k in range(1, n + 1):
        am = _frac_matmul(a, mk)
        mk = [[am[i][j] + coeffs[n - k + 1] * ident[i][j] for j in range(n)] for i in range(n)]
        amk = _frac_matmul(a, mk)
        coeffs[n - k] = -sum(amk[i][i] for i in range(n)) / k
    return IntPolynomial.from_rationals(coeffs)


def _poly_at_matrix(p: sympy.Poly, a: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(a)
    acc = [[Fraction(0)] * n for _ in range(n)]
    for c in p.all_coeffs():
        acc = _frac_matmul(acc, a)
        cf = Fraction(int(c.p), int(c.q))
        for i in range(n):
            acc[i][i] += cf
    return acc


def _annihilates(factors: list[tuple[IntPolynomial, int]], a: list[list[Fraction]]) -> bool:
    t = sympy.Symbol("t")
    expr = sympy.Integer(1)
    for f, e in factors:
        expr *= f.to_sympy(t) ** e
    val = _poly_at_matrix(sympy.Poly(sympy.expand(expr), t, domain="QQ"), a)
    return all(v == 0 for r in val for v in r)


def min_poly(M: ExactMatrix) -> IntPolynomial:
    """Minimal polynomial: shrink each factor's exponent while it still annihilates M."""
    cp = char_poly(M)
    a = M.to_fractions()
    facs = [list(fe) for fe in factor_with_multiplicity(cp)]
    for item in facs:
        while item[1] > 1:
            item[1] -= 1
            if not _annihilates([tuple(x) for x in facs], a):
                item[1] += 1
                break
    t = sympy.Symbol("t")
    expr = sympy.Integer(1)
    for f, e in facs:
        expr *= f.to_sympy(t) ** e
    return IntPolynomial.from_sympy(expr, t)


def char_and_min_poly(M: ExactMatrix) -> tuple[IntPolynomial, IntPolynomial]:
    return char_poly(M), min_poly(M)


def is_diagonalizable(M: ExactMatrix) -> bool:
    """Diagonalizable over C iff the product of the distinct irreducible factors annihilates M."""
    cp = char_poly(M)
    return _annihilates([(f, 1) for f in factor_irreducible(cp)], M.to_fractions())


@dataclass(frozen=True)
class Violation:
    kind: str  # "NotCommuting" or "NotDiagonalizable"
    matrix: str | None
    message: str

    def to_error(self) -> Exception:
        cls = NotCommuting if self.kind == "NotCommuting" else NotDiagonalizable
        return cls(self.message)


def check_commuting_diagonalizable(A: ExactMatrix, B: ExactMatrix) -> Violation | None:
    """None when A, B commute and are both diagonalizable, else the first failure."""
    if not (A.is_square and B.is_square) or A.rows != B.rows:
        raise DimensionMismatch("update matrices must be square of equal size")
    fa, fb = A.to_fractions(), B.to_fractions()
    if _frac_matmul(fa, fb) != _frac_matmul(fb, fa):
        return Violation("NotCommuting", None, "A and B do not commute (AB != BA)")
    for name, M in (("A", A), ("B", B)):
        if not is_diagonalizable(M):
            return Violation("NotDiagonalizable", name, f"{name} is not diagonalizable (minimal polynomial has a repeated factor)")
    return None


# ---------------------------------------------------------------------------
# eigenvalues


def _quadratic_roots(f: IntPolynomial) -> list[ComplexAlgebraic]:
    c, b, a = (Fraction(x) for x in f.coeffs)
    disc = b * b - 4 * a * c
    if disc >= 0:
        return [ComplexAlgebraic(r) for r in isolate_real_roots(f)]
    re = RealAlgebraic(-b / (2 * a))
    im = RealAlgebraic(-disc).sqrt() * RealAlgebraic(1 / (2 * a))
    return [ComplexAlgebraic(re, -im), ComplexAlgebraic(re, im)]


def _eval_complex(f: IntPolynomial, z: ComplexAlgebraic) -> ComplexAlgebraic:
    acc = ComplexAlgebraic(0)
    for c in reversed(f.coeffs):
        acc = acc * z + c
    return acc


def _pick(candidates: list[RealAlgebraic], target: mpmath.mpf) -> RealAlgebraic:
    """The unique candidate whose refined interval contains the numeric target."""
    width = Fraction(1, 2**20)
    tol = mpmath.mpf(2) ** -150
    while True:
        hits = []
        for cand in candidates:
            lo, hi = cand.bracket(width)
            if mpmath.mpf(lo.numerator) / lo.denominator - tol <= target <= mpmath.mpf(hi.numerator) / hi.denominator + tol:
                hits.append(cand)
        if len(hits) == 1:
            return hits[0]
        if not hits or width < Fraction(1, 2**120):
            raise ArithmeticError("could not match numeric root to an exact candidate")
        width /= 2**10


def _general_roots(f: IntPolynomial) -> list[ComplexAlgebraic]:
    real = [ComplexAlgebraic(r) for r in isolate_real_roots(f)]
    if len(real) == f.degree:
        return real
    x, y = sympy.symbols("x y")
    fy = f.to_sympy(y)
    re_poly = IntPolynomial.from_sympy(sympy.resultant(fy, f.to_sympy(2 * x - y), y), x)
    diff = sympy.Poly(sympy.resultant(fy, f.to_sympy(y + x), y), x)
    # diff(x) = H(x^2) * x^deg; the conjugate pair z, conj(z) gives x^2 = -4 Im(z)^2
    coeffs = diff.all_coeffs()[::-1]
    coeffs = coeffs[f.degree:]
    h = [coeffs[k] for k in range(0, len(coeffs), 2)]
    u = sympy.Symbol("u")
    k_expr = sum(c * (-4 * u) ** i for i, c in enumerate(h))
    im_sq = [r for r in isolate_real_roots(IntPolynomial.from_sympy(k_expr, u)) if r.sign() > 0]
    re_cands = isolate_real_roots(re_poly)
    im_cands = [r.sqrt() for r in im_sq]
    with mpmath.workdps(80):
        numeric = mpmath.polyroots([int(c) for c in reversed(f.coeffs)], maxsteps=400, extraprec=400)
        out = []
        for z in numeric:
            if mpmath.im(z) <= mpmath.mpf(10) ** -40:
                continue
            re = _pick(re_cands, mpmath.re(z))
            im = _pick(im_cands, mpmath.im(z))
            root = ComplexAlgebraic(re, im)
            if not _eval_complex(f, root).is_zero():
                raise ArithmeticError(f"failed to certify a complex root of {f}")
            out.extend([root.conj(), root])
    return real + out


def complex_roots(f: IntPolynomial) -> list[ComplexAlgebraic]:
    """All complex roots of an irreducible polynomial, exactly."""
    if f.degree == 1:
        return [ComplexAlgebraic(Fraction(-f.coeffs[0], f.coeffs[1]))]
    if f.degree == 2:
        return _quadratic_roots(f)
    return _general_roots(f)


def eigenvalues(M: ExactMatrix) -> list[ComplexAlgebraic]:
    """Distinct eigenvalues of a rational matrix."""
    out: list[ComplexAlgebraic] = []
    for f in factor_irreducible(char_poly(M)):
        out.extend(complex_roots(f))
    return out


# ---------------------------------------------------------------------------
# simultaneous diagonalization


@dataclass(frozen=True)
class SpectralDecomposition:
    S: ExactMatrix
    S_inv: ExactMatrix
    a: tuple[ComplexAlgebraic, ...]
    b: tuple[ComplexAlgebraic, ...]
    conj_pairing: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.a)


def eigenpair_key(a: ComplexAlgebraic, b: ComplexAlgebraic) -> tuple:
    """Canonical sort key: moduli, then parts, conjugates adjacent with -Im first."""
    return (
        a.modulus(),
        b.modulus(),
        a.re,
        abs(a.im),
        b.re,
        abs(b.im),
        a.im.sign(),
        b.im.sign(),
    )


def _upper(z: ComplexAlgebraic) -> int:
    return z.im.sign()


def simultaneous_diagonalize(A: ExactMatrix, B: ExactMatrix) -> SpectralDecomposition:
    violation = check_commuting_diagonalizable(A, B)
    if violation is not None:
        raise violation.to_error()
    n = A.rows
    blocks: list[tuple[ComplexAlgebraic, ComplexAlgebraic, list[tuple[ComplexAlgebraic, ...]]]] = []
    for lam in eigenvalues(A):
        for mu in eigenvalues(B):
            # conjugate pairs are derived from the member with positive Im
            sa, sb = _upper(lam), _upper(mu)
            if sa < 0 or (sa == 0 and sb < 0):
                continue
            rows = [
                [A[i, j] - (lam if i == j else 0) for j in range(n)] for i in range(n)
            ] + [
                [B[i, j] - (mu if i == j else 0) for j in range(n)] for i in range(n)
            ]
            basis = nullspace(rows, n)
            if not basis:
                continue
            blocks.append((lam, mu, basis))
            if sa > 0 or sb > 0:
                blocks.append((lam.conj(), mu.conj(), [tuple(v.conj() for v in vec) for vec in basis]))
    if sum(len(bl[2]) for bl in blocks) != n:
        raise NotDiagonalizable("joint eigenspaces do not span the space")  # pragma: no cover
    blocks.sort(key=lambda bl: eigenpair_key(bl[0], bl[1]))
    columns, a_vals, b_vals, owner = [], [], [], []
    for idx, (lam, mu, basis) in enumerate(blocks):
        for pos, vec in enumerate(basis):
            columns.append(vec)
            a_vals.append(lam)
            b_vals.append(mu)
            owner.append((idx, pos))
    sigma = []
    for k in range(n):
        lam, mu = a_vals[k], b_vals[k]
        _, pos = owner[k]
        partner = next(
            j for j in range(n)
            if owner[j][1] == pos and a_vals[j] == lam.conj() and b_vals[j] == mu.conj()
        )
        sigma.append(partner)
    S = ExactMatrix.from_columns(columns)
    return SpectralDecomposition(S, S.inverse(), tuple(a_vals), tuple(b_vals), tuple(sigma))
