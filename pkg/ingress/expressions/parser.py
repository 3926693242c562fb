"""
Recursive-descent parser for the object grammar:

    object   := term (('+'|'-') term)*
    term     := [polyexpr '*'] basis | polyexpr
    basis    := ('dx'|'Dx') '[' int (',' int)* ']'
    polyexpr := rationals, x<k>, '+', '-', '*', '^', parentheses

Evaluation happens while parsing: every sub-expression is either a `Poly` or an exterior object,
so scaling a bracketed sum of basis terms by a polynomial is accepted too.
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from kernel.errors import ParseError
from kernel.exterior import DiffForm, ExteriorObject, MultiVector
from kernel.ratpoly import Poly


Kind = Literal["form", "multivector"]

_TOKEN = re.compile(r"""
    (?P<space>\s+)
  | (?P<basis>(?:dx|Dx)\[(?P<indices>[^\]]*)\])
  | (?P<number>\d+(?:/\d+)?)
  | (?P<variable>[xu](?P<var_index>\d+))
  | (?P<op>[-+*^()])
""", re.VERBOSE)

_INDICES = re.compile(r"^\s*\d+\s*(,\s*\d+\s*)*$")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise ParseError(f"Unexpected character {text[position]!r}", position)
        kind = match.lastgroup
        if kind != "space":
            tokens.append(Token(kind, match.group(0), position))
        position = match.end()
    return tokens


Value = Poly | ExteriorObject


class _Parser:
    def __init__(self, text: str, n: int, allow_basis: bool = True):
        self.text = text
        self.n = n
        self.allow_basis = allow_basis
        self.tokens = tokenize(text)
        self.index = 0

    # Token helpers

    def _peek(self) -> Token | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _position(self) -> int:
        token = self._peek()
        return token.position if token else len(self.text)

    def _accept(self, text: str) -> Token | None:
        token = self._peek()
        if token is not None and token.kind == "op" and token.text == text:
            self.index += 1
            return token
        return None

    def _expect(self, text: str) -> Token:
        token = self._accept(text)
        if token is None:
            found = self._peek()
            raise ParseError(f"Expected {text!r}, found {found.text if found else 'end of input'!r}", self._position())
        return token

    # Grammar

    def parse(self) -> Value:
        if not self.tokens:
            raise ParseError("Empty expression", 0)
        value = self._sum()
        if self._peek() is not None:
            raise ParseError(f"Unexpected {self._peek().text!r}", self._position())
        return value

    def _sum(self) -> Value:
        value = self._product()
        while True:
            position = self._position()
            if self._accept("+"):
                value = self._add(value, self._product(), position)
            elif self._accept("-"):
                value = self._add(value, -self._product(), position)
            else:
                return value

    def _product(self) -> Value:
        value = self._unary()
        while True:
            position = self._position()
            if self._accept("*"):
                value = self._multiply(value, self._unary(), position)
            else:
                return value

    def _unary(self) -> Value:
        if self._accept("-"):
            return -self._unary()
        if self._accept("+"):
            return self._unary()
        return self._power()

    def _power(self) -> Value:
        value = self._atom()
        position = self._position()
        if self._accept("^"):
            token = self._peek()
            if token is None or token.kind != "number" or "/" in token.text:
                raise ParseError("Exponent must be a non-negative integer", self._position())
            self.index += 1
            if not isinstance(value, Poly):
                raise ParseError("Basis elements cannot be raised to a power", position)
            value = value ** int(token.text)
        return value

    def _atom(self) -> Value:
        token = self._peek()
        if token is None:
            raise ParseError("Unexpected end of input", len(self.text))

        if token.kind == "number":
            self.index += 1
            try:
                return Poly.constant(self.n, Fraction(token.text))
            except ZeroDivisionError:
                raise ParseError(f"Zero denominator in {token.text!r}", token.position)

        if token.kind == "variable":
            self.index += 1
            k = int(token.text[1:])
            if not 1 <= k <= self.n:
                raise ParseError(f"Variable {token.text} out of range 1..{self.n}", token.position)
            return Poly.variable(self.n, k)

        if token.kind == "basis":
            self.index += 1
            return self._basis(token)

        if self._accept("("):
            value = self._sum()
            self._expect(")")
            return value

        raise ParseError(f"Unexpected {token.text!r}", token.position)

    def _basis(self, token: Token) -> ExteriorObject:
        if not self.allow_basis:
            raise ParseError("Basis elements are not allowed in a polynomial", token.position)
        inner = token.text[3:-1]
        if not _INDICES.match(inner):
            raise ParseError(f"Malformed basis indices in {token.text!r}", token.position)
        indices = [int(part) for part in inner.split(",")]
        for k in indices:
            if not 1 <= k <= self.n:
                raise ParseError(f"Index {k} out of range 1..{self.n}", token.position)
        cls = DiffForm if token.text.startswith("dx") else MultiVector
        return cls.basis(self.n, indices)

    # Semantic actions

    def _add(self, left: Value, right: Value, position: int) -> Value:
        if isinstance(left, Poly) and isinstance(right, Poly):
            return left + right
        if isinstance(left, ExteriorObject) and isinstance(right, ExteriorObject):
            if type(left) is not type(right):
                raise ParseError("Mixed variance: dx and Dx terms in one object", position)
            if left.degree != right.degree:
                raise ParseError(f"Degree inhomogeneity: degree {left.degree} and {right.degree} terms", position)
            return left + right
        raise ParseError("Degree inhomogeneity: a function term added to basis terms", position)

    def _multiply(self, left: Value, right: Value, position: int) -> Value:
        if isinstance(left, ExteriorObject) and isinstance(right, ExteriorObject):
            raise ParseError("Products of basis elements are not part of the grammar", position)
        if isinstance(left, ExteriorObject):
            return left * right
        if isinstance(right, ExteriorObject):
            return right * left
        return left * right


def parse_poly(text: str, n: int) -> Poly:
    """Parse a polynomial in `x1..xn` (the names `u1..un` are accepted as aliases)."""
    return _Parser(text, n, allow_basis=False).parse()


def parse_object(text: str, n: int, kind: Kind | None = None, degree: int | None = None) -> DiffForm | MultiVector:
    """
    Parse a form or multivector on R^n. A bare polynomial is read as a degree-0 object of the
    requested `kind` (forms by default), or as the zero object of `degree` when it is zero.
    """
    if n < 1:
        raise ValueError(f"Dimension must be positive, got {n}")
    value = _Parser(text, n).parse()

    cls = MultiVector if kind == "multivector" else DiffForm
    if isinstance(value, Poly):
        if degree and value.is_zero():
            return cls.zero(n, degree)
        return cls.function(value)

    if kind is not None and value.kind != kind:
        raise ParseError(f"Expected a {kind}, got a {value.kind}", 0)
    if degree is not None and value.degree != degree:
        raise ParseError(f"Expected degree {degree}, got {value.degree}", 0)
    return value


def parse_point(text: str, n: int) -> tuple[Fraction, ...]:
    """Comma-separated rationals such as `0,1/2,-3`."""
    try:
        point = tuple(Fraction(part.strip()) for part in text.split(","))
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"Invalid point {text!r}: {e}") from e
    if len(point) != n:
        raise ParseError(f"Point {text!r} has {len(point)} coordinates, expected {n}")
    return point
