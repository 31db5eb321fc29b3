"""
Dense matrices of exact rational functions
Determinant and rank use fraction-free elimination over Q[z]; inverse and kernel use
Gauss-Jordan over the rational-function field.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from sympy import Matrix, Poly, Rational

from netident.errors import DivisionByZero, ImproperEntry, InvariantError, SingularMatrix
from netident.ratfun.rational import ONE, ZERO, RationalFunction, Scalar, _coerce, parse_rational, poly
from netident.settings import get_settings

logger = logging.getLogger(__name__)

Row = Tuple[RationalFunction, ...]


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: Tuple[Row, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise InvariantError(f"bad matrix shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise InvariantError(f"entries do not match shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "RatMatrix":
        """Build from nested rows of RationalFunction, int, Fraction or literal strings"""
        data = tuple(tuple(_entry(x) for x in r) for r in rows)
        width = cols if cols is not None else (len(data[0]) if data else 0)
        return cls(len(data), width, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, tuple(tuple(ZERO for _ in range(cols)) for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, tuple(tuple(ONE if r == c else ZERO for c in range(n)) for r in range(n)))

    @classmethod
    def column_vector(cls, values: Sequence[RationalFunction]) -> "RatMatrix":
        return cls(len(values), 1, tuple((_coerce(v),) for v in values))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx: Tuple[int, int]) -> RationalFunction:
        r, c = idx
        return self.entries[r][c]

    def row(self, r: int) -> Row:
        return self.entries[r]

    def column(self, c: int) -> Row:
        return tuple(self.entries[r][c] for r in range(self.rows))

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "RatMatrix":
        """Rows and columns picked by 0-based index, in the order given"""
        data = tuple(tuple(self.entries[r][c] for c in col_idx) for r in row_idx)
        return RatMatrix(len(row_idx), len(col_idx), data)

    def with_entry(self, r: int, c: int, value) -> "RatMatrix":
        data = [list(row) for row in self.entries]
        data[r][c] = _entry(value)
        return RatMatrix(self.rows, self.cols, tuple(tuple(row) for row in data))

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows, tuple(self.column(c) for c in range(self.cols)))

    def scale(self, f) -> "RatMatrix":
        f = _coerce(f)
        return RatMatrix(self.rows, self.cols, tuple(tuple(f * x for x in row) for row in self.entries))

    def _check_same_shape(self, other: "RatMatrix") -> None:
        if self.shape != other.shape:
            raise InvariantError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same_shape(other)
        return RatMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)
        ))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(tuple(-x for x in row) for row in self.entries))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise InvariantError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for r in range(self.rows):
            row = []
            for c in range(other.cols):
                acc = ZERO
                for k in range(self.cols):
                    a = self.entries[r][k]
                    if a.is_zero:
                        continue
                    b = other.entries[k][c]
                    if b.is_zero:
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(tuple(row))
        return RatMatrix(self.rows, other.cols, tuple(out))

    def is_zero(self) -> bool:
        return all(x.is_zero for row in self.entries for x in row)

    def nonzero_positions(self) -> List[Tuple[int, int]]:
        return [(r, c) for r in range(self.rows) for c in range(self.cols) if not self.entries[r][c].is_zero]

    def to_literals(self) -> List[List[str]]:
        return [[x.to_literal() for x in row] for row in self.entries]

    def __str__(self) -> str:
        return "\n".join("[" + ", ".join(row) + "]" for row in self.to_literals())


def _entry(x) -> RationalFunction:
    if isinstance(x, str):
        return parse_rational(x)
    return _coerce(x)


# --- fraction-free elimination over Q[z] ---


def _poly_rows(a: RatMatrix) -> Tuple[List[List[Poly]], Poly]:
    """Clear denominators row by row; returns polynomial rows and the product of row multipliers"""
    rows = []
    scale = poly([1])
    for row in a.entries:
        mult = poly([1])
        for x in row:
            if not x.is_zero:
                mult = mult.lcm(x.den)
        rows.append([x.num * mult.exquo(x.den) for x in row])
        scale = scale * mult
    return rows, scale


def determinant(a: RatMatrix) -> RationalFunction:
    """Bareiss elimination on the denominator-cleared matrix"""
    if not a.is_square:
        raise InvariantError(f"determinant of non-square {a.shape} matrix")
    n = a.rows
    if n == 0:
        return ONE
    m, scale = _poly_rows(a)
    sign = 1
    prev = poly([1])
    for k in range(n - 1):
        if m[k][k].is_zero:
            swap = next((r for r in range(k + 1, n) if not m[r][k].is_zero), None)
            if swap is None:
                return ZERO
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                m[r][c] = (m[r][c] * pivot - m[r][k] * m[k][c]).exquo(prev)
            m[r][k] = poly([0])
        prev = pivot
    det = m[n - 1][n - 1]
    if det.is_zero:
        return ZERO
    return RationalFunction.make(det * sign, scale)


def normal_rank(a: RatMatrix) -> int:
    """Rank over the field Q(z), by fraction-free row echelon with primitive rows"""
    if a.rows == 0 or a.cols == 0:
        return 0
    m, _ = _poly_rows(a)
    rank = 0
    for c in range(a.cols):
        pivot_row = next((r for r in range(rank, a.rows) if not m[r][c].is_zero), None)
        if pivot_row is None:
            continue
        m[rank], m[pivot_row] = m[pivot_row], m[rank]
        pivot = m[rank][c]
        for r in range(rank + 1, a.rows):
            factor = m[r][c]
            if factor.is_zero:
                continue
            m[r] = [x * pivot - factor * y for x, y in zip(m[r], m[rank])]
            m[r] = _primitive(m[r])
        rank += 1
        if rank == a.rows:
            break
    return rank


def _primitive(row: List[Poly]) -> List[Poly]:
    g = None
    for p in row:
        if p.is_zero:
            continue
        g = p if g is None else g.gcd(p)
        if g.is_one:
            return row
    if g is None or g.is_one:
        return row
    return [p if p.is_zero else p.exquo(g) for p in row]


# --- Gauss-Jordan over the field ---


def _rref(a: RatMatrix) -> Tuple[List[List[RationalFunction]], List[int]]:
    m = [list(row) for row in a.entries]
    pivots: List[int] = []
    r = 0
    for c in range(a.cols):
        pivot_row = next((k for k in range(r, a.rows) if not m[k][c].is_zero), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for k in range(a.rows):
            if k == r or m[k][c].is_zero:
                continue
            factor = m[k][c]
            m[k] = [x - factor * y if not y.is_zero else x for x, y in zip(m[k], m[r])]
        pivots.append(c)
        r += 1
        if r == a.rows:
            break
    return m, pivots


def mat_inverse(a: RatMatrix) -> RatMatrix:
    """Exact inverse; SingularMatrix when det a is identically zero"""
    if not a.is_square:
        raise InvariantError(f"cannot invert non-square {a.shape} matrix")
    n = a.rows
    eye = RatMatrix.identity(n)
    augmented = RatMatrix(n, 2 * n, tuple(ra + re for ra, re in zip(a.entries, eye.entries)))
    m, pivots = _rref(augmented)
    if pivots[:n] != list(range(n)):
        raise SingularMatrix(f"{n}x{n} matrix is singular over Q(z)")
    return RatMatrix(n, n, tuple(tuple(row[n:]) for row in m))


def kernel_basis(a: RatMatrix) -> List[Tuple[RationalFunction, ...]]:
    """
    Right kernel basis, one vector per free column in increasing column order.
    Each vector has a 1 at its free column and zeros at the other free columns.
    """
    m, pivots = _rref(a)
    free = [c for c in range(a.cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [ZERO] * a.cols
        vec[f] = ONE
        for r, p in enumerate(pivots):
            vec[p] = -m[r][f]
        basis.append(tuple(vec))
    return basis


def cofactor(a: RatMatrix, r: int, c: int) -> RationalFunction:
    """(-1)^(r+c) times the minor with row r and column c removed (0-based)"""
    rows = [k for k in range(a.rows) if k != r]
    cols = [k for k in range(a.cols) if k != c]
    minor = determinant(a.submatrix(rows, cols))
    return -minor if (r + c) % 2 else minor


def adjugate(a: RatMatrix) -> RatMatrix:
    if not a.is_square:
        raise InvariantError(f"adjugate of non-square {a.shape} matrix")
    n = a.rows
    if n == 1:
        return RatMatrix.identity(1)
    return RatMatrix(n, n, tuple(tuple(cofactor(a, c, r) for c in range(n)) for r in range(n)))


def limit_at_infinity(a: RatMatrix) -> List[List[Fraction]]:
    """Entrywise limit z -> infinity; ImproperEntry if any entry is improper"""
    out = []
    for r, row in enumerate(a.entries):
        vals = []
        for c, x in enumerate(row):
            if not x.is_proper:
                raise ImproperEntry(f"entry ({r + 1},{c + 1}) = {x} is improper")
            vals.append(x.limit_at_infinity())
        out.append(vals)
    return out


# --- evaluation ---


def evaluate(a: RatMatrix, x: Scalar) -> List[List[Fraction]]:
    return [[f.evaluate(x) for f in row] for row in a.entries]


def sympy_matrix(values: Sequence[Sequence[Fraction]]) -> Matrix:
    return Matrix([[Rational(v.numerator, v.denominator) for v in row] for row in values])


def fraction_det(values: Sequence[Sequence[Fraction]]) -> Fraction:
    if not values:
        return Fraction(1)
    d = sympy_matrix(values).det()
    return Fraction(int(d.p), int(d.q))


def sampled_rank(
    values_at: Callable[[int], Matrix],
    points: int,
    bound: int,
    seed: int,
    coefficient_bound: int,
) -> int:
    """
    Largest rank of values_at(x) over random integer points x with coefficient_bound < |x| <= bound.
    values_at raises DivisionByZero or SingularMatrix to reject a point.
    """
    rng = random.Random(seed)
    best = 0
    tried = 0
    attempts = 0
    while tried < points:
        attempts += 1
        if attempts > 100 * points:
            raise InvariantError("could not find evaluation points avoiding the poles")
        x = rng.randint(-bound, bound)
        if abs(x) <= coefficient_bound:
            continue
        try:
            values = values_at(x)
        except (DivisionByZero, SingularMatrix):
            continue
        tried += 1
        best = max(best, int(values.rank()))
    return best


def probabilistic_rank(
    a: RatMatrix,
    points: Optional[int] = None,
    bound: Optional[int] = None,
    seed: int = 0,
    coefficient_bound: Optional[int] = None,
) -> int:
    """
    Largest evaluation rank over random integer points; unset arguments come from the oracle settings.
    Never exceeds normal_rank; equal to it with high probability.
    """
    settings = get_settings().oracle
    points = points if points is not None else settings.probabilistic_points
    bound = bound if bound is not None else settings.evaluation_bound
    coeff = coefficient_bound if coefficient_bound is not None else settings.coefficient_bound
    if not a.rows or not a.cols:
        return 0
    best = sampled_rank(lambda x: sympy_matrix(evaluate(a, x)), points, bound, seed, coeff)
    logger.debug("probabilistic rank of %dx%d matrix over %d points: %d", a.rows, a.cols, points, best)
    return best

