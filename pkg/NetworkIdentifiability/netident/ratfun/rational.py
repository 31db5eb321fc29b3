"""
Exact rational functions in one indeterminate z
Numerator and denominator are sympy polynomials over QQ, kept in canonical form:
gcd(num, den) = 1, den monic, and the zero function stored as 0/1.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Union

from sympy import QQ, Poly, Rational, Symbol, fraction, together
from sympy.core.sympify import SympifyError
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.polyerrors import BasePolynomialError
from tokenize import TokenError

from netident.errors import DegreeOverflow, DivisionByZero, ImproperEntry, LiteralSyntaxError

Z = Symbol("z")
DEGREE_CAP = 64

Scalar = Union[int, Fraction]

_LITERAL_CHARS = re.compile(r"^[0-9z+\-*/^() .]*$")
_TRANSFORMS = standard_transformations + (convert_xor,)


def poly(coeffs: Sequence[Scalar]) -> Poly:
    """Polynomial from ascending coefficients"""
    desc = [Rational(Fraction(c).numerator, Fraction(c).denominator) for c in reversed(list(coeffs))] or [0]
    return Poly.from_list(desc, Z, domain=QQ)


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.p), int(value.q))


def _check_degree(p: Poly) -> None:
    if not p.is_zero and p.degree() > DEGREE_CAP:
        raise DegreeOverflow(f"polynomial degree {p.degree()} exceeds cap {DEGREE_CAP}")


def _degree(p: Poly) -> int:
    return -1 if p.is_zero else int(p.degree())


@dataclass(frozen=True)
class RationalFunction:
    num: Poly
    den: Poly

    def __post_init__(self):
        if self.den.is_zero:
            raise DivisionByZero("denominator is the zero polynomial")

    @classmethod
    def make(cls, num: Poly, den: Poly) -> "RationalFunction":
        if den.is_zero:
            raise DivisionByZero("division by the zero rational function")
        if num.is_zero:
            return cls(Poly(0, Z, domain=QQ), Poly(1, Z, domain=QQ))
        g = num.gcd(den)
        if not g.is_one:
            num = num.exquo(g)
            den = den.exquo(g)
        lc = den.LC()
        if lc != 1:
            num = num.quo_ground(lc)
            den = den.quo_ground(lc)
        _check_degree(num)
        _check_degree(den)
        return cls(num, den)

    @classmethod
    def const(cls, c: Scalar) -> "RationalFunction":
        return cls.make(poly([c]), poly([1]))

    @classmethod
    def from_coeffs(cls, num: Sequence[Scalar], den: Sequence[Scalar] = (1,)) -> "RationalFunction":
        return cls.make(poly(num), poly(den))

    @classmethod
    def z_power(cls, k: int) -> "RationalFunction":
        """z**k for any integer k"""
        mono = poly([0] * abs(k) + [1])
        return cls.make(mono, poly([1])) if k >= 0 else cls.make(poly([1]), mono)

    # --- predicates ---

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_one(self) -> bool:
        return self.num.is_one and self.den.is_one

    @property
    def relative_degree(self) -> int:
        """deg num - deg den (undefined for zero; returns -1 there)"""
        if self.is_zero:
            return -1
        return _degree(self.num) - _degree(self.den)

    @property
    def is_proper(self) -> bool:
        return self.is_zero or self.relative_degree <= 0

    @property
    def is_strictly_proper(self) -> bool:
        return self.is_zero or self.relative_degree < 0

    def is_canonical(self) -> bool:
        if self.is_zero:
            return self.den.is_one
        return self.num.gcd(self.den).is_one and self.den.LC() == 1

    def numerator_coeffs(self) -> List[Fraction]:
        return [_to_fraction(c) for c in reversed(self.num.all_coeffs())]

    def denominator_coeffs(self) -> List[Fraction]:
        return [_to_fraction(c) for c in reversed(self.den.all_coeffs())]

    # --- field operations ---

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        other = _coerce(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.den == other.den:
            return RationalFunction.make(self.num + other.num, self.den)
        return RationalFunction.make(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "RationalFunction":
        return _coerce(other) - self

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return ZERO
        if self.is_one:
            return other
        if other.is_one:
            return self
        return RationalFunction.make(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero:
            raise DivisionByZero("inverse of the zero rational function")
        return RationalFunction.make(self.den, self.num)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        other = _coerce(other)
        if other.is_zero:
            raise DivisionByZero("division by the zero rational function")
        return self * other.inverse()

    def __rtruediv__(self, other) -> "RationalFunction":
        return _coerce(other) / self

    def __pow__(self, k: int) -> "RationalFunction":
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction.make(self.num ** k, self.den ** k)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalFunction.const(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((tuple(self.numerator_coeffs()), tuple(self.denominator_coeffs())))

    # --- evaluation ---

    def evaluate(self, x: Scalar) -> Fraction:
        """Exact value at a rational point; DivisionByZero at a pole"""
        point = Rational(Fraction(x).numerator, Fraction(x).denominator)
        den = self.den.eval(point)
        if den == 0:
            raise DivisionByZero(f"{self} has a pole at z={x}")
        return _to_fraction(self.num.eval(point)) / _to_fraction(den)

    def limit_at_infinity(self) -> Fraction:
        """0 if strictly proper, ratio of leading coefficients if biproper"""
        if self.is_zero or self.relative_degree < 0:
            return Fraction(0)
        if self.relative_degree > 0:
            raise ImproperEntry(f"{self} is improper; no finite limit at infinity")
        return _to_fraction(self.num.LC()) / _to_fraction(self.den.LC())

    def to_literal(self) -> str:
        num = format_poly(self.num)
        if self.den.is_one:
            return num
        return f"({num})/({format_poly(self.den)})"

    def __str__(self) -> str:
        return self.to_literal()

    def __repr__(self) -> str:
        return f"RationalFunction({self.to_literal()!r})"


ZERO = RationalFunction(Poly(0, Z, domain=QQ), Poly(1, Z, domain=QQ))
ONE = RationalFunction(Poly(1, Z, domain=QQ), Poly(1, Z, domain=QQ))


def _coerce(value) -> RationalFunction:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, (int, Fraction)):
        return RationalFunction.const(value)
    raise TypeError(f"cannot combine RationalFunction with {type(value).__name__}")


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly) -> str:
    """Literal text such as 2*z^2-z+1/3, highest degree first"""
    if p.is_zero:
        return "0"
    terms = []
    coeffs = [_to_fraction(c) for c in p.all_coeffs()]
    deg = len(coeffs) - 1
    for k, c in enumerate(coeffs):
        power = deg - k
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if power == 0:
            body = _format_coeff(mag)
        else:
            mono = "z" if power == 1 else f"z^{power}"
            body = mono if mag == 1 else f"{_format_coeff(mag)}*{mono}"
        terms.append((sign, body))
    first_sign, first_body = terms[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in terms[1:]:
        text += f"{sign}{body}"
    return text


def parse_rational(text: str) -> RationalFunction:
    """
    Parse a literal such as "(2*z+1)/(z^2-3)" or "3/2*z/(z+1)"

    Only digits, z, + - * / ^ ( ) and spaces are accepted; coefficients are exact.
    """
    if not isinstance(text, str) or not text.strip():
        raise LiteralSyntaxError("empty rational-function literal")
    if not _LITERAL_CHARS.match(text):
        raise LiteralSyntaxError(f"unexpected characters in literal {text!r}")
    try:
        expr = parse_expr(text, local_dict={"z": Z}, transformations=_TRANSFORMS, evaluate=True)
        if expr.free_symbols - {Z}:
            raise LiteralSyntaxError(f"literal {text!r} uses symbols other than z")
        num, den = fraction(together(expr))
        num_poly = Poly(num, Z, domain=QQ)
        den_poly = Poly(den, Z, domain=QQ)
    except LiteralSyntaxError:
        raise
    except (SympifyError, BasePolynomialError, ZeroDivisionError, SyntaxError, TypeError, ValueError, TokenError) as e:
        raise LiteralSyntaxError(f"cannot parse literal {text!r}: {e}") from e
    if den_poly.is_zero:
        raise LiteralSyntaxError(f"literal {text!r} divides by zero")
    return RationalFunction.make(num_poly, den_poly)


def first_order(a: Scalar, b: Scalar) -> RationalFunction:
    """a / (z - b)"""
    return RationalFunction.from_coeffs([a], [-Fraction(b), 1])


def product(factors: Iterable[RationalFunction]) -> RationalFunction:
    out = ONE
    for f in factors:
        out = out * f
    return out
