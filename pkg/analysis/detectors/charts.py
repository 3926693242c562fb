"""
Chart witnesses: exact verification of a candidate chart, and the constructive charts available for
top-degree forms, closed 1-forms, aligned (n-1)-forms and aligned (n-1)-vectors.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from kernel.errors import ChartError, DegreeError, DimensionMismatch, VanishingError
from kernel.exterior import (
    Chart, DiffForm, ExteriorObject, MultiVector,
    exterior_derivative, multi_indices, pullback_along, pushforward_coefficients,
)
from kernel.linalg import solve
from kernel.ratpoly import Poly


logger = logging.getLogger('analysis.detectors.charts')


@dataclass(frozen=True)
class ChartVerification:
    """
    `expressed` is the object in the chart's coordinates (as functions of the chart variables when
    the inverse map is available, otherwise the constant object reconstructed from the base point).
    `residual` is zero exactly when the chart is a witness.
    """
    verified: bool
    direction: Literal["inverse", "forward"]
    expressed: ExteriorObject
    residual: ExteriorObject

    def __bool__(self) -> bool:
        return self.verified


def _non_constant_part(obj: ExteriorObject) -> ExteriorObject:
    return obj.map_coefficients(lambda c: c - c.constant_term())


def _constant_object(cls, n: int, degree: int, values: Sequence[Fraction]) -> ExteriorObject:
    return cls(n, degree, {index: value for index, value in zip(multi_indices(n, degree), values) if value})


def _reconstruct_constant(images: list[ExteriorObject], value_at_base: ExteriorObject, base: Sequence[Fraction]) -> list[Fraction] | None:
    """Solve `value_at_base(base) = sum lambda_I images[I](base)` for the constants lambda_I."""
    n, degree = value_at_base.n, value_at_base.degree
    rows = multi_indices(n, degree)
    evaluated = [image.evaluate(base) for image in images]
    target = value_at_base.evaluate(base)
    matrix = [[values.get(row, Fraction(0)) for values in evaluated] for row in rows]
    return solve(matrix, [target.get(row, Fraction(0)) for row in rows], len(images))


def _basis_images_forms(maps: Sequence[Poly], n: int, degree: int) -> list[DiffForm]:
    return [pullback_along(maps, DiffForm.basis(n, index)) for index in multi_indices(n, degree)]


def _basis_images_vectors(maps: Sequence[Poly], n: int, degree: int) -> list[MultiVector]:
    return [pushforward_coefficients(maps, MultiVector.basis(n, index)) for index in multi_indices(n, degree)]


def verify_chart(obj: ExteriorObject, phi: Chart, target: ExteriorObject | None = None) -> ChartVerification:
    """
    Decide exactly whether `obj` has constant coefficients in the coordinates of `phi`.

    Forms are pulled back along the inverse map when it exists; multivectors are pushed forward
    along the forward map. Formal charts missing that direction are checked by comparing `obj`
    with the image of a constant object, either the supplied `target` or the one forced by the
    values at the chart's base point.
    """
    if obj.n != phi.n:
        raise DimensionMismatch(f"Object on R^{obj.n}, chart on R^{phi.n}")
    n, degree = obj.n, obj.degree

    if isinstance(obj, DiffForm) and phi.inverse is not None:
        expressed = pullback_along(phi.inverse, obj)
        residual = _non_constant_part(expressed)
        return ChartVerification(residual.is_zero(), "inverse", expressed, residual)

    if isinstance(obj, MultiVector) and phi.forward is not None:
        expressed = pushforward_coefficients(phi.forward, obj)
        residual = _non_constant_part(expressed)
        if phi.inverse is not None:
            expressed = expressed.compose(phi.inverse)
        return ChartVerification(residual.is_zero(), "forward", expressed, residual)

    if isinstance(obj, DiffForm):
        # u = forward(x): obj must equal the pullback of a constant form in u
        maps, base = phi.forward, phi.base
        images = _basis_images_forms(maps, n, degree)
        compared = obj
    else:
        # x = inverse(y): obj(inverse(y)) must equal the pushforward coefficients of a constant multivector
        maps, base = phi.inverse, (Fraction(0),) * n
        images = _basis_images_vectors(maps, n, degree)
        compared = obj.compose(maps)

    if target is not None:
        if type(target) is not type(obj) or target.degree != degree or not target.is_constant():
            raise ValueError("Chart target must be a constant object of the same kind and degree")
        values = [target.coefficient(index).constant_term() for index in multi_indices(n, degree)]
    else:
        values = _reconstruct_constant(images, compared, base)
        if values is None:
            raise ChartError("Chart differential is singular at its base point")

    expressed = _constant_object(type(obj), n, degree, values)
    reconstructed = type(obj).zero(n, degree)
    for value, image in zip(values, images):
        if value:
            reconstructed = reconstructed + image * value
    residual = compared - reconstructed
    return ChartVerification(residual.is_zero(), "forward" if isinstance(obj, DiffForm) else "inverse", expressed, residual)


# Constructive charts

def _shifted_coordinates(n: int, base: Sequence[Fraction]) -> list[Poly]:
    return [Poly.variable(n, k) - base[k - 1] for k in range(1, n + 1)]


def _antiderivative_from(f: Poly, index: int, start: Fraction) -> Poly:
    """Integral of f in x_index from `start`, as a polynomial in all variables."""
    F = f.integrate(index)
    lower = [Poly.variable(f.nvars, k) for k in range(1, f.nvars + 1)]
    lower[index - 1] = Poly.constant(f.nvars, start)
    return F - F.compose(lower)


def _require_nonvanishing(value: Poly, base: Sequence[Fraction], what: str):
    if value.eval(base) == 0:
        raise VanishingError(f"{what} vanishes at the base point {tuple(str(c) for c in base)}")


def chart_from_volume_form(a: DiffForm, base: Sequence[Fraction] | None = None) -> Chart:
    """
    For `a = f dx^1..n` with f(base) != 0: u1 = integral of f in x1 from base_1, u_i = x_i - base_i,
    so that `a == du^1..n`. The inverse is polynomial only when f is constant.
    """
    n = a.n
    if not isinstance(a, DiffForm) or a.degree != n:
        raise DegreeError("chart_from_volume_form needs an n-form")
    base = tuple(Fraction(c) for c in base) if base is not None else (Fraction(0),) * n
    f = a.coefficient(range(1, n + 1))
    _require_nonvanishing(f, base, "Volume coefficient")

    forward = _shifted_coordinates(n, base)
    forward[0] = _antiderivative_from(f, 1, base[0])

    inverse = None
    if f.is_constant():
        c = f.constant_value()
        inverse = [Poly.variable(n, k) + base[k - 1] for k in range(1, n + 1)]
        inverse[0] = Poly.variable(n, 1) / c + base[0]

    logger.debug(f"Volume-form chart: u1 = {forward[0]}, polynomial inverse: {inverse is not None}")
    return Chart(n, tuple(forward), tuple(inverse) if inverse else None, base)


def potential(a: DiffForm) -> Poly:
    """
    A polynomial f with df == a for a closed 1-form, built by integrating one variable at a time.

    :raises ValueError: If `a` is not closed.
    """
    if not isinstance(a, DiffForm) or a.degree != 1:
        raise DegreeError("potential needs a 1-form")
    if not exterior_derivative(a).is_zero():
        raise ValueError(f"{a} is not closed")

    f = Poly.zero(a.n)
    for k in range(1, a.n + 1):
        f = f + (a.coefficient((k,)) - f.diff(k)).integrate(k)
    return f


def chart_from_exact_1form(a: DiffForm, base: Sequence[Fraction] | None = None) -> tuple[Chart, DiffForm]:
    """
    Chart `u = (f - f(base), remaining coordinates shifted)` for a closed 1-form nonvanishing at
    `base`, where f is a potential and the remaining coordinates drop the first x_k with
    `a_k(base) != 0`.

    :returns: The chart together with the target `du1`, the constant form `a` becomes in it.
    :raises VanishingError: If `a` vanishes at `base`.
    """
    n = a.n
    base = tuple(Fraction(c) for c in base) if base is not None else (Fraction(0),) * n
    f = potential(a)
    values = a.evaluate(base)
    if not values:
        raise VanishingError(f"{a} vanishes at the base point")
    k = min(index[0] for index in values)

    others = [i for i in range(1, n + 1) if i != k]
    shifted = _shifted_coordinates(n, base)
    forward = [f - f.eval(base)] + [shifted[i - 1] for i in others]

    inverse = None
    if f.degree_in(k) == 1 and f.coefficient_in(k, 1).is_constant():
        # f = c x_k + h(others): x_k = (u1 + f(base) - h(x_others)) / c
        c = f.coefficient_in(k, 1).constant_value()
        h = f.coefficient_in(k, 0)
        u = [Poly.variable(n, i) for i in range(1, n + 1)]
        x_of_u = [None] * n
        for position, i in enumerate(others, start=2):
            x_of_u[i - 1] = u[position - 1] + base[i - 1]
        substitution = [x if x is not None else Poly.zero(n) for x in x_of_u]
        x_of_u[k - 1] = (u[0] + f.eval(base) - h.compose(substitution)) / c
        inverse = tuple(x_of_u)

    return Chart(n, tuple(forward), inverse, base), DiffForm.basis(n, (1,))


def chart_from_codegree_one_form(a: DiffForm, base: Sequence[Fraction] | None = None) -> tuple[Chart, DiffForm]:
    """
    Chart for an aligned closed (n-1)-form `F dx^([n] minus k)` with F(base) != 0: integrate F in
    the first remaining variable. Returns the chart and the target `du^([n] minus k)`.
    """
    n = a.n
    if not isinstance(a, DiffForm) or a.degree != n - 1 or n < 2:
        raise DegreeError("chart_from_codegree_one_form needs an (n-1)-form with n >= 2")
    if len(a.coeffs) != 1:
        raise ValueError(f"{a} is not aligned with a coordinate hyperplane")
    if not exterior_derivative(a).is_zero():
        raise ValueError(f"{a} is not closed")

    base = tuple(Fraction(c) for c in base) if base is not None else (Fraction(0),) * n
    (index, F), = a.coeffs.items()
    _require_nonvanishing(F, base, "Coefficient")

    m = index[0]
    forward = _shifted_coordinates(n, base)
    forward[m - 1] = _antiderivative_from(F, m, base[m - 1])

    inverse = None
    if F.is_constant():
        inverse = [Poly.variable(n, i) + base[i - 1] for i in range(1, n + 1)]
        inverse[m - 1] = Poly.variable(n, m) / F.constant_value() + base[m - 1]

    return Chart(n, tuple(forward), tuple(inverse) if inverse else None, base), DiffForm.basis(n, index)


def aligned_direction(V: MultiVector) -> tuple[int, Poly] | None:
    """For `V = F Dx^([n] minus k)` return `(k, F)`, else None."""
    if V.degree != V.n - 1 or len(V.coeffs) != 1:
        return None
    (index, F), = V.coeffs.items()
    k = next(i for i in range(1, V.n + 1) if i not in index)
    return k, F


def chart_from_aligned_nminus1_vector(V: MultiVector, base: Sequence[Fraction] | None = None) -> tuple[Chart, MultiVector]:
    """
    For `V = F(x_k) Dx^([n] minus k)` with F(base) != 0, the formal chart
    `x_a = F(y_k + b_k) (y_a + b_a / F(b_k))`, `x_i = y_i + b_i` (a the first index other than k)
    in which V becomes `Dx^([n] minus k)`. Only the inverse direction is polynomial.
    """
    n = V.n
    aligned = aligned_direction(V)
    if aligned is None:
        raise ValueError(f"{V} is not an aligned (n-1)-vector")
    k, F = aligned
    if any(i != k for i in F.variables()):
        raise ValueError(f"Coefficient {F} depends on variables other than x{k}")

    base = tuple(Fraction(c) for c in base) if base is not None else (Fraction(0),) * n
    _require_nonvanishing(F, base, "Coefficient")

    y = [Poly.variable(n, i) for i in range(1, n + 1)]
    inverse = [y[i - 1] + base[i - 1] for i in range(1, n + 1)]
    a = 1 if k != 1 else 2
    F_of_y = F.compose(inverse)
    inverse[a - 1] = F_of_y * (y[a - 1] + base[a - 1] / F.eval(base))

    index = tuple(i for i in range(1, n + 1) if i != k)
    return Chart(n, None, tuple(inverse), base), MultiVector.basis(n, index)
