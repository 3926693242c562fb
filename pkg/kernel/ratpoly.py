"""
Exact multivariate polynomials over the rationals.

A `Poly` is a sparse map from exponent tuples to nonzero `Fraction` coefficients, bound to a fixed
number of variables. Variables are addressed 1-based (`x1 .. xn`), matching the index convention of
the exterior algebra built on top of this module.
"""
from fractions import Fraction
from functools import reduce
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, VariableOutOfRange


Exponent = tuple[int, ...]
Scalar = int | Fraction


def _graded_lex_key(exponent: Exponent):
    return (sum(exponent), exponent)


class Poly:
    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Scalar] | None = None):
        if nvars < 0:
            raise ValueError(f"Variable count must be non-negative, got {nvars}")

        normalized: dict[Exponent, Fraction] = {}
        for exponent, coefficient in (terms or {}).items():
            exponent = tuple(exponent)
            if len(exponent) != nvars:
                raise DimensionMismatch(f"Exponent {exponent} does not match {nvars} variables")
            if any(e < 0 for e in exponent):
                raise ValueError(f"Negative exponent in {exponent}")
            coefficient = Fraction(coefficient)
            if coefficient != 0:
                normalized[exponent] = normalized.get(exponent, Fraction(0)) + coefficient
                if normalized[exponent] == 0:
                    del normalized[exponent]

        self.nvars = nvars
        self._terms = normalized
        self._hash = None

    # Construction

    @classmethod
    def zero(cls, nvars: int) -> 'Poly':
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value: Scalar) -> 'Poly':
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def one(cls, nvars: int) -> 'Poly':
        return cls.constant(nvars, 1)

    @classmethod
    def variable(cls, nvars: int, index: int) -> 'Poly':
        _check_variable(index, nvars)
        exponent = [0] * nvars
        exponent[index - 1] = 1
        return cls(nvars, {tuple(exponent): 1})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coefficient: Scalar = 1) -> 'Poly':
        return cls(len(exponent), {tuple(exponent): coefficient})

    # Inspection

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return MappingProxyType(self._terms)

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda item: _graded_lex_key(item[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(exponent) for exponent in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"Polynomial {self} is not constant")
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        return max((sum(exponent) for exponent in self._terms), default=-1)

    def degree_in(self, index: int) -> int:
        _check_variable(index, self.nvars)
        return max((exponent[index - 1] for exponent in self._terms), default=-1)

    def depends_on(self, index: int) -> bool:
        return self.degree_in(index) > 0

    def variables(self) -> list[int]:
        return [k for k in range(1, self.nvars + 1) if self.depends_on(k)]

    def leading_term(self) -> tuple[Exponent, Fraction]:
        if self.is_zero():
            raise ValueError("The zero polynomial has no leading term")
        exponent = max(self._terms, key=_graded_lex_key)
        return exponent, self._terms[exponent]

    def coefficient_in(self, index: int, power: int) -> 'Poly':
        """The coefficient of `x_index^power`, as a polynomial in the remaining variables."""
        _check_variable(index, self.nvars)
        position = index - 1
        result = {}
        for exponent, coefficient in self._terms.items():
            if exponent[position] == power:
                reduced = exponent[:position] + (0,) + exponent[position + 1:]
                result[reduced] = coefficient
        return Poly(self.nvars, result)

    # Arithmetic

    def _coerce(self, other) -> 'Poly':
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionMismatch(f"Cannot combine polynomials in {self.nvars} and {other.nvars} variables")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other) -> 'Poly':
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        result = dict(self._terms)
        for exponent, coefficient in other._terms.items():
            result[exponent] = result.get(exponent, Fraction(0)) + coefficient
        return Poly(self.nvars, result)

    __radd__ = __add__

    def __neg__(self) -> 'Poly':
        return Poly(self.nvars, {exponent: -coefficient for exponent, coefficient in self._terms.items()})

    def __sub__(self, other) -> 'Poly':
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> 'Poly':
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other) -> 'Poly':
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        result: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exponent = tuple(a + b for a, b in zip(e1, e2))
                result[exponent] = result.get(exponent, Fraction(0)) + c1 * c2
        return Poly(self.nvars, result)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> 'Poly':
        if not isinstance(power, int) or power < 0:
            raise ValueError(f"Exponent must be a non-negative integer, got {power}")
        result = Poly.one(self.nvars)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def __truediv__(self, other) -> 'Poly':
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("Division of a polynomial by zero")
            return Poly(self.nvars, {e: c / Fraction(other) for e, c in self._terms.items()})
        if isinstance(other, Poly):
            return poly_divide_exact(self, other)
        return NotImplemented

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # Calculus and substitution

    def diff(self, index: int) -> 'Poly':
        _check_variable(index, self.nvars)
        position = index - 1
        result = {}
        for exponent, coefficient in self._terms.items():
            power = exponent[position]
            if power:
                reduced = exponent[:position] + (power - 1,) + exponent[position + 1:]
                result[reduced] = coefficient * power
        return Poly(self.nvars, result)

    def integrate(self, index: int) -> 'Poly':
        """Antiderivative in `x_index` with zero constant of integration."""
        _check_variable(index, self.nvars)
        position = index - 1
        result = {}
        for exponent, coefficient in self._terms.items():
            power = exponent[position]
            raised = exponent[:position] + (power + 1,) + exponent[position + 1:]
            result[raised] = coefficient / (power + 1)
        return Poly(self.nvars, result)

    def compose(self, substitution: Sequence['Poly']) -> 'Poly':
        """Substitute `substitution[k-1]` for `x_k`. All substitutes must share a variable count."""
        if len(substitution) != self.nvars:
            raise DimensionMismatch(f"Expected {self.nvars} substitutes, got {len(substitution)}")
        if not substitution:
            return Poly(0, self._terms)

        target = substitution[0].nvars
        if any(s.nvars != target for s in substitution):
            raise DimensionMismatch("Substitutes must all live in the same number of variables")

        powers: list[list[Poly]] = [[Poly.one(target)] for _ in substitution]

        def power_of(position: int, power: int) -> Poly:
            cache = powers[position]
            while len(cache) <= power:
                cache.append(cache[-1] * substitution[position])
            return cache[power]

        result = Poly.zero(target)
        for exponent, coefficient in self._terms.items():
            term = Poly.constant(target, coefficient)
            for position, power in enumerate(exponent):
                if power:
                    term = term * power_of(position, power)
            result = result + term
        return result

    def eval(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.nvars:
            raise DimensionMismatch(f"Expected a point with {self.nvars} coordinates, got {len(point)}")
        point = [Fraction(c) for c in point]
        total = Fraction(0)
        for exponent, coefficient in self._terms.items():
            value = coefficient
            for c, power in zip(point, exponent):
                if power:
                    value *= c ** power
            total += value
        return total

    def map_coefficients(self, fn) -> 'Poly':
        return Poly(self.nvars, {e: fn(c) for e, c in self._terms.items()})

    # Rendering

    def render(self, variable: str = "x") -> str:
        if self.is_zero():
            return "0"

        parts = []
        for exponent, coefficient in self.sorted_terms():
            monomial = "*".join(
                f"{variable}{k}" if power == 1 else f"{variable}{k}^{power}"
                for k, power in enumerate(exponent, start=1)
                if power
            )
            magnitude = abs(coefficient)
            if not monomial:
                text = str(magnitude)
            elif magnitude == 1:
                text = monomial
            else:
                text = f"{magnitude}*{monomial}"
            parts.append((coefficient < 0, text))

        negative, text = parts[0]
        rendered = f"-{text}" if negative else text
        for negative, text in parts[1:]:
            rendered += f" - {text}" if negative else f" + {text}"
        return rendered

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Poly({self.render()!r}, nvars={self.nvars})"


def _check_variable(index: int, nvars: int):
    if not 1 <= index <= nvars:
        raise VariableOutOfRange(f"Variable x{index} does not exist in {nvars} variables")


# Module-level operations, mirroring the operator overloads

def poly_add(a: Poly, b: Poly) -> Poly:
    return a + b


def poly_neg(a: Poly) -> Poly:
    return -a


def poly_mul(a: Poly, b: Poly) -> Poly:
    return a * b


def poly_diff(a: Poly, index: int) -> Poly:
    return a.diff(index)


def poly_integrate(a: Poly, index: int) -> Poly:
    return a.integrate(index)


def poly_compose(a: Poly, substitution: Sequence[Poly]) -> Poly:
    return a.compose(substitution)


def poly_eval(a: Poly, point: Sequence[Scalar]) -> Fraction:
    return a.eval(point)


# Division and gcd

def poly_divide_exact(a: Poly, b: Poly) -> Poly:
    """
    Exact quotient `a / b`.

    :raises ZeroDivisionError: If `b` is zero.
    :raises ValueError: If `b` does not divide `a`.
    """
    a = b._coerce(a)
    if b.is_zero():
        raise ZeroDivisionError("Division by the zero polynomial")

    lead_exponent, lead_coefficient = b.leading_term()
    quotient = Poly.zero(a.nvars)
    remainder = a
    while remainder:
        exponent, coefficient = remainder.leading_term()
        shift = tuple(e - f for e, f in zip(exponent, lead_exponent))
        if any(s < 0 for s in shift):
            raise ValueError(f"{b} does not divide {a}")
        step = Poly(a.nvars, {shift: coefficient / lead_coefficient})
        quotient = quotient + step
        remainder = remainder - step * b
    return quotient


def poly_monic(a: Poly) -> Poly:
    if a.is_zero():
        return a
    _, coefficient = a.leading_term()
    return a / coefficient


def _pseudo_remainder(a: Poly, b: Poly, index: int) -> Poly:
    degree_b = b.degree_in(index)
    lead_b = b.coefficient_in(index, degree_b)
    x = Poly.variable(a.nvars, index)
    remainder = a
    while remainder and remainder.degree_in(index) >= degree_b:
        degree_r = remainder.degree_in(index)
        lead_r = remainder.coefficient_in(index, degree_r)
        remainder = lead_b * remainder - lead_r * x ** (degree_r - degree_b) * b
    return remainder


def _content_in(a: Poly, index: int) -> Poly:
    coefficients = [a.coefficient_in(index, power) for power in range(a.degree_in(index) + 1)]
    return reduce(poly_gcd, [c for c in coefficients if c], Poly.zero(a.nvars))


def _primitive_in(a: Poly, index: int) -> Poly:
    return poly_divide_exact(a, _content_in(a, index))


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """
    Monic greatest common divisor, computed recursively by variable with primitive pseudo-remainder
    sequences. `gcd(0, 0)` is zero.
    """
    b = a._coerce(b)
    if a.is_zero():
        return poly_monic(b)
    if b.is_zero():
        return poly_monic(a)
    if a.is_constant() or b.is_constant():
        return Poly.one(a.nvars)

    index = max(set(a.variables()) | set(b.variables()))
    if not a.depends_on(index):
        return poly_gcd(a, _content_in(b, index))
    if not b.depends_on(index):
        return poly_gcd(_content_in(a, index), b)

    content_a, content_b = _content_in(a, index), _content_in(b, index)
    content = poly_gcd(content_a, content_b)
    first, second = poly_divide_exact(a, content_a), poly_divide_exact(b, content_b)
    if first.degree_in(index) < second.degree_in(index):
        first, second = second, first

    while True:
        remainder = _pseudo_remainder(first, second, index)
        if remainder.is_zero():
            break
        if not remainder.depends_on(index):
            second = Poly.one(a.nvars)
            break
        first, second = second, _primitive_in(remainder, index)

    return poly_monic(content * _primitive_in(second, index))


def poly_content(polys: Iterable[Poly]) -> Poly:
    """The monic gcd of a family of polynomials."""
    polys = list(polys)
    if not polys:
        raise ValueError("Content of an empty family is undefined")
    return reduce(poly_gcd, polys)
