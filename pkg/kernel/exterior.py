"""
Differential forms and multivector fields with polynomial coefficients on a single chart of R^n.

Both kinds of object store a sparse map from strictly increasing multi-indices (1-based) to `Poly`
coefficients. Index lists that are unsorted or repeat an entry are normalized through
`sort_with_sign`, which is the only place the wedge sign rules live.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from types import MappingProxyType
from typing import ClassVar, Iterable, Mapping, Sequence, TypeVar

from .errors import ChartError, DegreeError, DimensionMismatch, VariableOutOfRange
from .ratpoly import Poly, Scalar, poly_content, poly_divide_exact


MultiIndex = tuple[int, ...]


def sort_with_sign(indices: Iterable[int]) -> tuple[int, MultiIndex]:
    """Sort an index list, returning the permutation sign, or `(0, ())` if an index repeats."""
    entries = list(indices)
    if len(set(entries)) != len(entries):
        return 0, ()

    sign = 1
    for i in range(1, len(entries)):
        j = i
        while j > 0 and entries[j - 1] > entries[j]:
            entries[j - 1], entries[j] = entries[j], entries[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(entries)


def multi_indices(n: int, degree: int) -> list[MultiIndex]:
    """All strictly increasing multi-indices of the given degree over 1..n, in lexicographic order."""
    return list(combinations(range(1, n + 1), degree))


def _as_poly(value: Poly | Scalar, n: int) -> Poly:
    if isinstance(value, Poly):
        if value.nvars != n:
            raise DimensionMismatch(f"Coefficient in {value.nvars} variables on a space of dimension {n}")
        return value
    return Poly.constant(n, value)


def _check_index(index: MultiIndex, n: int, degree: int):
    if len(index) != degree:
        raise DegreeError(f"Multi-index {list(index)} does not have degree {degree}")
    for k in index:
        if not 1 <= k <= n:
            raise VariableOutOfRange(f"Index {k} out of range 1..{n}")
    if any(a >= b for a, b in zip(index, index[1:])):
        raise ValueError(f"Multi-index {list(index)} is not strictly increasing")


Self = TypeVar("Self", bound="ExteriorObject")


class ExteriorObject:
    """Shared machinery of `DiffForm` and `MultiVector`; never instantiated directly."""

    token: ClassVar[str]
    kind: ClassVar[str]

    __slots__ = ("n", "degree", "_coeffs")

    def __init__(self, n: int, degree: int, coeffs: Mapping[Sequence[int], Poly | Scalar] | None = None):
        if n < 1:
            raise ValueError(f"Dimension must be positive, got {n}")
        if degree < 0:
            raise DegreeError(f"Degree must be non-negative, got {degree}")

        normalized: dict[MultiIndex, Poly] = {}
        for index, coefficient in (coeffs or {}).items():
            index = tuple(index)
            _check_index(index, n, degree)
            coefficient = _as_poly(coefficient, n)
            if coefficient:
                normalized[index] = coefficient

        self.n = n
        self.degree = degree
        self._coeffs = normalized

    # Construction

    @classmethod
    def zero(cls: type[Self], n: int, degree: int) -> Self:
        return cls(n, degree)

    @classmethod
    def from_terms(cls: type[Self], n: int, degree: int, terms: Iterable[tuple[Sequence[int], Poly | Scalar]]) -> Self:
        """Accumulate terms whose index lists may be unsorted or repeat entries."""
        accumulated: dict[MultiIndex, Poly] = {}
        for indices, coefficient in terms:
            sign, index = sort_with_sign(indices)
            if sign == 0:
                continue
            _check_index(index, n, degree)
            coefficient = _as_poly(coefficient, n)
            if sign < 0:
                coefficient = -coefficient
            accumulated[index] = accumulated[index] + coefficient if index in accumulated else coefficient
        return cls(n, degree, accumulated)

    @classmethod
    def basis(cls: type[Self], n: int, indices: Sequence[int], coefficient: Poly | Scalar = 1) -> Self:
        return cls.from_terms(n, len(indices), [(indices, coefficient)])

    @classmethod
    def volume(cls: type[Self], n: int, coefficient: Poly | Scalar = 1) -> Self:
        return cls.basis(n, range(1, n + 1), coefficient)

    @classmethod
    def function(cls: type[Self], value: Poly) -> Self:
        return cls(value.nvars, 0, {(): value})

    # Inspection

    @property
    def coeffs(self) -> Mapping[MultiIndex, Poly]:
        return MappingProxyType(self._coeffs)

    def coefficient(self, index: Sequence[int]) -> Poly:
        return self._coeffs.get(tuple(index), Poly.zero(self.n))

    def items(self):
        return sorted(self._coeffs.items())

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_constant(self) -> bool:
        return all(coefficient.is_constant() for coefficient in self._coeffs.values())

    def evaluate(self, point: Sequence[Scalar]) -> dict[MultiIndex, Fraction]:
        values = {index: coefficient.eval(point) for index, coefficient in self._coeffs.items()}
        return {index: value for index, value in values.items() if value != 0}

    def vanishes_at(self, point: Sequence[Scalar]) -> bool:
        return not self.evaluate(point)

    def content(self) -> Poly:
        """Monic gcd of all coefficients."""
        if self.is_zero():
            raise ValueError("The zero object has no content")
        return poly_content(self._coeffs.values())

    # Arithmetic

    def _check_compatible(self, other: 'ExteriorObject'):
        if type(other) is not type(self):
            raise TypeError(f"Cannot combine a {self.kind} with a {other.kind}")
        if other.n != self.n:
            raise DimensionMismatch(f"Cannot combine objects on R^{self.n} and R^{other.n}")

    def map_coefficients(self: Self, fn) -> Self:
        return type(self)(self.n, self.degree, {index: fn(c) for index, c in self._coeffs.items()})

    def compose(self: Self, substitution: Sequence[Poly]) -> Self:
        return self.map_coefficients(lambda coefficient: coefficient.compose(substitution))

    def divide(self: Self, factor: Poly) -> Self:
        return self.map_coefficients(lambda coefficient: poly_divide_exact(coefficient, factor))

    def __add__(self: Self, other: Self) -> Self:
        self._check_compatible(other)
        if other.degree != self.degree:
            raise DegreeError(f"Cannot add objects of degree {self.degree} and {other.degree}")
        result = dict(self._coeffs)
        for index, coefficient in other._coeffs.items():
            result[index] = result[index] + coefficient if index in result else coefficient
        return type(self)(self.n, self.degree, result)

    def __neg__(self: Self) -> Self:
        return self.map_coefficients(lambda coefficient: -coefficient)

    def __sub__(self: Self, other: Self) -> Self:
        return self + (-other)

    def __mul__(self: Self, factor: Poly | Scalar) -> Self:
        if not isinstance(factor, (Poly, int, Fraction)):
            return NotImplemented
        factor = _as_poly(factor, self.n)
        return self.map_coefficients(lambda coefficient: coefficient * factor)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExteriorObject):
            return NotImplemented
        return type(self) is type(other) and self.n == other.n and self.degree == other.degree and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.kind, self.n, self.degree, frozenset(self._coeffs.items())))

    # Rendering

    def render(self) -> str:
        if self.degree == 0:
            return str(self.coefficient(()))
        if self.is_zero():
            return "0"

        parts = []
        for index, coefficient in self.items():
            basis = f"{self.token}[{','.join(str(k) for k in index)}]"
            if coefficient.is_constant():
                value = coefficient.constant_value()
                text = basis if abs(value) == 1 else f"{abs(value)}*{basis}"
                parts.append((value < 0, text))
            elif len(coefficient.terms) == 1:
                (exponent, value), = coefficient.terms.items()
                magnitude = Poly(self.n, {exponent: abs(value)})
                parts.append((value < 0, f"{magnitude}*{basis}"))
            else:
                parts.append((False, f"({coefficient})*{basis}"))

        negative, text = parts[0]
        rendered = f"-{text}" if negative else text
        for negative, text in parts[1:]:
            rendered += f" - {text}" if negative else f" + {text}"
        return rendered

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.render()!r}, n={self.n}, degree={self.degree})"


class DiffForm(ExteriorObject):
    token = "dx"
    kind = "form"
    __slots__ = ()

    @property
    def p(self) -> int:
        return self.degree


class MultiVector(ExteriorObject):
    token = "Dx"
    kind = "multivector"
    __slots__ = ()

    @property
    def q(self) -> int:
        return self.degree


# Products and derivatives

def wedge(a: Self, b: Self) -> Self:
    a._check_compatible(b)
    terms = [
        (I + J, F * G)
        for I, F in a.coeffs.items()
        for J, G in b.coeffs.items()
    ]
    return type(a).from_terms(a.n, a.degree + b.degree, terms)


def exterior_derivative(a: DiffForm) -> DiffForm:
    if not isinstance(a, DiffForm):
        raise TypeError("The exterior derivative is defined on forms only")
    terms = [
        ((j,) + I, F.diff(j))
        for I, F in a.coeffs.items()
        for j in range(1, a.n + 1)
    ]
    return DiffForm.from_terms(a.n, a.degree + 1, terms)


def _contract(pairing: Mapping[int, Poly], obj: Self) -> Self:
    if obj.degree == 0:
        raise DegreeError("Cannot contract into an object of degree 0")
    terms = []
    for index, coefficient in obj.coeffs.items():
        for position, k in enumerate(index):
            if k in pairing:
                sign = -1 if position % 2 else 1
                terms.append((index[:position] + index[position + 1:], pairing[k] * coefficient * sign))
    return type(obj).from_terms(obj.n, obj.degree - 1, terms)


def interior_vec_form(X: MultiVector, a: DiffForm) -> DiffForm:
    """Contract the vector field `X` into the first slot of `a`."""
    if not isinstance(X, MultiVector) or X.degree != 1:
        raise DegreeError("interior_vec_form expects a vector field (degree-1 multivector)")
    if not isinstance(a, DiffForm):
        raise TypeError("interior_vec_form contracts into a form")
    if X.n != a.n:
        raise DimensionMismatch(f"Cannot contract a field on R^{X.n} into a form on R^{a.n}")
    return _contract({index[0]: coefficient for index, coefficient in X.coeffs.items()}, a)


def interior_form_vec(w: DiffForm, V: MultiVector) -> MultiVector:
    """Contract the 1-form `w` into the first slot of `V`."""
    if not isinstance(w, DiffForm) or w.degree != 1:
        raise DegreeError("interior_form_vec expects a 1-form")
    if not isinstance(V, MultiVector):
        raise TypeError("interior_form_vec contracts into a multivector")
    if w.n != V.n:
        raise DimensionMismatch(f"Cannot contract a form on R^{w.n} into a multivector on R^{V.n}")
    return _contract({index[0]: coefficient for index, coefficient in w.coeffs.items()}, V)


def _contract_index(contracting: MultiIndex, index: MultiIndex) -> tuple[int, MultiIndex] | None:
    # Innermost contraction uses the last entry of `contracting`
    remaining = list(index)
    sign = 1
    for k in reversed(contracting):
        if k not in remaining:
            return None
        position = remaining.index(k)
        if position % 2:
            sign = -sign
        remaining.pop(position)
    return sign, tuple(remaining)


def _iterated_contraction(contracting: ExteriorObject, target: Self) -> Self:
    if contracting.n != target.n:
        raise DimensionMismatch(f"Cannot contract an object on R^{contracting.n} into one on R^{target.n}")
    if contracting.degree > target.degree:
        raise DegreeError(f"Cannot contract degree {contracting.degree} into degree {target.degree}")

    terms = []
    for I, G in contracting.coeffs.items():
        for K, F in target.coeffs.items():
            contracted = _contract_index(I, K)
            if contracted is not None:
                sign, remaining = contracted
                terms.append((remaining, G * F * sign))
    return type(target).from_terms(target.n, target.degree - contracting.degree, terms)


def interior_multivector(V: MultiVector, a: DiffForm) -> DiffForm:
    """
    Iterated contraction i_{X1}(i_{X2}(... i_{Xq}(a))) of `V = X1 ^ ... ^ Xq` into `a`, extended
    bilinearly over monomials.
    """
    if not isinstance(V, MultiVector) or not isinstance(a, DiffForm):
        raise TypeError("interior_multivector contracts a multivector into a form")
    return _iterated_contraction(V, a)


def interior_form(w: DiffForm, V: MultiVector) -> MultiVector:
    """Iterated contraction of the form `w` into the multivector `V`; mirror of `interior_multivector`."""
    if not isinstance(w, DiffForm) or not isinstance(V, MultiVector):
        raise TypeError("interior_form contracts a form into a multivector")
    return _iterated_contraction(w, V)


def iota_pq(V: MultiVector, vol: DiffForm) -> DiffForm:
    """
    The isomorphism from q-vectors to (n-q)-forms induced by a volume form.

    On a basis monomial the iterated contraction gives
    `iota(dx^I, rho dx^1..n) = (-1)^(i1+...+iq - q) rho dx^([n] minus I)`; the sign agrees with the
    closed-form expression for every multi-index.
    """
    if not isinstance(vol, DiffForm) or vol.degree != vol.n:
        raise DegreeError("iota_pq needs a volume form (degree n)")
    if V.degree > vol.n:
        raise DegreeError(f"Degree {V.degree} exceeds the dimension {vol.n}")
    return interior_multivector(V, vol)


def iota_star_qp(w: DiffForm, Vn: MultiVector) -> MultiVector:
    """Dual of `iota_pq`: p-forms to (n-p)-vectors through an n-vector field."""
    if not isinstance(Vn, MultiVector) or Vn.degree != Vn.n:
        raise DegreeError("iota_star_qp needs an n-vector field")
    if w.degree > Vn.n:
        raise DegreeError(f"Degree {w.degree} exceeds the dimension {Vn.n}")
    return interior_form(w, Vn)


# Brackets

def lie_bracket(X: MultiVector, Y: MultiVector) -> MultiVector:
    if X.degree != 1 or Y.degree != 1:
        raise DegreeError("The Lie bracket is defined on vector fields")
    X._check_compatible(Y)

    n = X.n
    components = {}
    for k in range(1, n + 1):
        component = Poly.zero(n)
        for i in range(1, n + 1):
            component = component + X.coefficient((i,)) * Y.coefficient((k,)).diff(i)
            component = component - Y.coefficient((i,)) * X.coefficient((k,)).diff(i)
        components[(k,)] = component
    return MultiVector(n, 1, components)


def schouten_bracket(A: MultiVector, B: MultiVector) -> MultiVector:
    """
    Schouten-Nijenhuis bracket of multivector fields of degrees q, r >= 1; result has degree q+r-1.

    Each monomial `F Dx^I` is treated as the decomposable product `(F d_{i1}) ^ d_{i2} ^ ...` and the
    decomposable formula `sum (-1)^(i+j) [X_i, Y_j] ^ X_1 ^ ..^X_i^.. ^ Y_1 ^ ..^Y_j^..` is applied.
    Only brackets involving a coefficient-carrying factor can be nonzero.
    """
    if not isinstance(A, MultiVector) or not isinstance(B, MultiVector):
        raise TypeError("The Schouten bracket is defined on multivector fields")
    A._check_compatible(B)
    if A.degree < 1 or B.degree < 1:
        raise DegreeError("The Schouten bracket needs degrees of at least 1")

    terms = []
    for I, F in A.coeffs.items():
        a, I_rest = I[0], I[1:]
        for J, G in B.coeffs.items():
            b, J_rest = J[0], J[1:]

            # [F d_a, G d_b] = F dG/dx_a d_b - G dF/dx_b d_a
            terms.append(((b,) + I_rest + J_rest, F * G.diff(a)))
            terms.append(((a,) + I_rest + J_rest, -(G * F.diff(b))))

            # i = 1, j > 1: [F d_a, d_bj] = -dF/dx_bj d_a
            for j in range(2, len(J) + 1):
                remaining = (b,) + J_rest[:j - 2] + J_rest[j - 1:]
                sign = -1 if (1 + j) % 2 else 1
                terms.append(((a,) + I_rest + remaining, -(F.diff(J[j - 1]) * G) * sign))

            # i > 1, j = 1: [d_ai, G d_b] = dG/dx_ai d_b
            for i in range(2, len(I) + 1):
                remaining = (a,) + I_rest[:i - 2] + I_rest[i - 1:]
                sign = -1 if (i + 1) % 2 else 1
                terms.append(((b,) + remaining + J_rest, G.diff(I[i - 1]) * F * sign))

    return MultiVector.from_terms(A.n, A.degree + B.degree - 1, terms)


# Charts

def _identity_map(n: int) -> tuple[Poly, ...]:
    return tuple(Poly.variable(n, k) for k in range(1, n + 1))


@dataclass(frozen=True)
class Chart:
    """
    A polynomial coordinate change `u = forward(x)` centred at `base` (`forward(base) == 0`), with
    its polynomial inverse `x = inverse(u)`.

    Formal charts carry only one polynomial direction: constructive charts whose other direction is
    not polynomial keep `inverse=None` (or `forward=None`) and are verified in the direction they
    have.
    """
    n: int
    forward: tuple[Poly, ...] | None
    inverse: tuple[Poly, ...] | None
    base: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.forward is None and self.inverse is None:
            raise ChartError("A chart needs at least one polynomial direction")

        for name in ("forward", "inverse"):
            component = getattr(self, name)
            if component is None:
                continue
            component = tuple(component)
            object.__setattr__(self, name, component)
            if len(component) != self.n or any(c.nvars != self.n for c in component):
                raise DimensionMismatch(f"Chart {name} map must have {self.n} components in {self.n} variables")

        base = tuple(Fraction(c) for c in self.base) if self.base is not None else (Fraction(0),) * self.n
        if len(base) != self.n:
            raise DimensionMismatch(f"Chart base point must have {self.n} coordinates")
        object.__setattr__(self, "base", base)

        if self.forward is not None and any(u.eval(base) != 0 for u in self.forward):
            raise ChartError("Chart is not centred: forward(base) != 0")
        if self.forward is None and tuple(x.eval((0,) * self.n) for x in self.inverse) != base:
            raise ChartError("Chart is not centred: inverse(0) != base")
        if self.forward is not None and self.inverse is not None:
            identity = _identity_map(self.n)
            if tuple(x.compose(self.forward) for x in self.inverse) != identity:
                raise ChartError("Chart round trip violated: inverse(forward(x)) != x")
            if tuple(u.compose(self.inverse) for u in self.forward) != identity:
                raise ChartError("Chart round trip violated: forward(inverse(u)) != u")

    @classmethod
    def identity(cls, n: int) -> 'Chart':
        return cls(n, _identity_map(n), _identity_map(n))

    @classmethod
    def from_shears(cls, n: int, shears: Sequence[tuple[int, Poly]]) -> 'Chart':
        """
        Compose shears `x_i -> x_i + g(x_others)`, applied in order. Each `g` must not depend on
        `x_i` and must vanish at the origin.
        """
        forward = _identity_map(n)
        inverse = _identity_map(n)
        for target, g in shears:
            if g.depends_on(target):
                raise ChartError(f"Shear of x{target} must not depend on x{target}")
            step = list(_identity_map(n))
            step[target - 1] = step[target - 1] + g
            step_inverse = list(_identity_map(n))
            step_inverse[target - 1] = step_inverse[target - 1] - g
            forward = tuple(s.compose(forward) for s in step)
            inverse = tuple(x.compose(step_inverse) for x in inverse)
        return cls(n, forward, inverse)

    @property
    def is_formal(self) -> bool:
        return self.forward is None or self.inverse is None

    def require_forward(self) -> tuple[Poly, ...]:
        if self.forward is None:
            raise ChartError("Chart has no polynomial forward map")
        return self.forward

    def require_inverse(self) -> tuple[Poly, ...]:
        if self.inverse is None:
            raise ChartError("Chart has no polynomial inverse map")
        return self.inverse

    def inverted(self) -> 'Chart':
        """The chart `x = inverse(u)` read as a coordinate change from u to x."""
        forward, inverse = self.require_forward(), self.require_inverse()
        origin = (0,) * self.n
        return Chart(self.n, inverse, forward, tuple(u.eval(origin) for u in forward))

    def compose(self, other: 'Chart') -> 'Chart':
        """The chart `x -> self.forward(other.forward(x))`."""
        if other.n != self.n:
            raise DimensionMismatch(f"Cannot compose charts on R^{self.n} and R^{other.n}")
        forward = tuple(u.compose(other.require_forward()) for u in self.require_forward())
        inverse = tuple(x.compose(self.require_inverse()) for x in other.require_inverse())
        return Chart(self.n, forward, inverse, other.base)


def _differential(u: Poly) -> DiffForm:
    return exterior_derivative(DiffForm.function(u))


def pullback_along(maps: Sequence[Poly], a: DiffForm) -> DiffForm:
    """Substitute `u = maps(x)` into a form written in u-coordinates, including `du = d(maps)`."""
    if not isinstance(a, DiffForm):
        raise TypeError("pullback is defined on forms")
    if len(maps) != a.n:
        raise DimensionMismatch(f"Cannot pull back a form on R^{a.n} along a map with {len(maps)} components")
    differentials = [_differential(u) for u in maps]

    result = DiffForm.zero(a.n, a.degree)
    for index, coefficient in a.coeffs.items():
        term = DiffForm.function(coefficient.compose(maps))
        for i in index:
            term = wedge(term, differentials[i - 1])
        result = result + term
    return result


def pullback(phi: Chart, a: DiffForm) -> DiffForm:
    """
    Pull a form written in the u-coordinates back along `u = phi.forward(x)`, so
    `pullback(phi, du^I)` is `du^I` expanded in the x-coordinates.
    """
    if a.n != phi.n:
        raise DimensionMismatch(f"Cannot pull back a form on R^{a.n} along a chart of R^{phi.n}")
    return pullback_along(phi.require_forward(), a)


def pushforward_coefficients(forward: Sequence[Poly], V: MultiVector) -> MultiVector:
    """`V` expressed in the basis of u-coordinate fields, with coefficients still functions of x."""
    n = V.n
    if len(forward) != n:
        raise DimensionMismatch(f"Forward map has {len(forward)} components on R^{n}")
    images = [
        MultiVector(n, 1, {(i,): forward[i - 1].diff(j) for i in range(1, n + 1)})
        for j in range(1, n + 1)
    ]

    result = MultiVector.zero(n, V.degree)
    for index, coefficient in V.coeffs.items():
        term = MultiVector.function(coefficient)
        for j in index:
            term = wedge(term, images[j - 1])
        result = result + term
    return result


def pushforward(phi: Chart, V: MultiVector) -> MultiVector:
    """Push a multivector written in x-coordinates forward to the u-coordinates."""
    if not isinstance(V, MultiVector):
        raise TypeError("pushforward is defined on multivectors")
    if V.n != phi.n:
        raise DimensionMismatch(f"Cannot push forward a multivector on R^{V.n} along a chart of R^{phi.n}")
    return pushforward_coefficients(phi.require_forward(), V).compose(phi.require_inverse())
