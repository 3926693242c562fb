"""
(n-1)-vector fields `V = sum F_i Dx^([n] minus i)`: the derivation-law test, and the underdetermined
Christoffel system with its rank claim and (for n = 3) the constraint identities.
"""
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from kernel.errors import DegreeError, VanishingError
from kernel.exterior import DiffForm, MultiVector, exterior_derivative, schouten_bracket, wedge
from kernel.linalg import rank
from kernel.ratpoly import Poly

from .charts import aligned_direction, chart_from_aligned_nminus1_vector, verify_chart
from .counting import counting
from .distributions import kernel_system
from .rank import Point, random_point, sample_points
from .reports import DetectionReport, Evidence, Verdict
from .systems import GammaSystem, assemble_system


logger = logging.getLogger('analysis.detectors.nminus1')


def _check_degree(V: MultiVector):
    if not isinstance(V, MultiVector) or V.n < 2 or V.degree != V.n - 1:
        raise DegreeError(f"Expected an (n-1)-vector field with n >= 2, got degree {V.degree} on R^{V.n}")


def coefficient_functions(V: MultiVector) -> list[Poly]:
    """`[F_1, ..., F_n]` with F_i the coefficient of the monomial omitting index i."""
    _check_degree(V)
    n = V.n
    return [V.coefficient(tuple(k for k in range(1, n + 1) if k != i)) for i in range(1, n + 1)]


def associated_form(V: MultiVector) -> DiffForm:
    """The 1-form `sum (-1)^(i-1) F_i dx^i` spanning the Pfaffian system of V."""
    F = coefficient_functions(V)
    return DiffForm(V.n, 1, {(i,): f * (-1) ** (i - 1) for i, f in enumerate(F, start=1) if f})


def detect_vec_n_minus_1(V: MultiVector, flat_derivation: DiffForm | None = None, base: Sequence[Fraction] | None = None) -> DetectionReport:
    """
    Decide an (n-1)-vector field through a flat derivation law.

    With `alpha` the associated 1-form and `theta` a closed 1-form (zero by default), the covariant
    differential of the dual section is `(d alpha + theta ^ alpha) (x) Dx^1..n`; its vanishing means
    V has constant coefficients. In the aligned case `V = F(x_k) Dx^([n] minus k)` the chart is
    constructed.

    :raises DegreeError: Unless V has degree n-1.
    :raises VanishingError: If V vanishes at the base point.
    """
    _check_degree(V)
    n = V.n
    base = tuple(Fraction(c) for c in base) if base is not None else (Fraction(0),) * n
    if V.vanishes_at(base):
        raise VanishingError(f"{V} vanishes at the base point")

    theta = flat_derivation if flat_derivation is not None else DiffForm.zero(n, 1)
    if not isinstance(theta, DiffForm) or theta.degree != 1 or theta.n != n:
        raise DegreeError("The flat derivation is given by a 1-form on the same space")
    if not exterior_derivative(theta).is_zero():
        raise ValueError(f"Derivation form {theta} is not closed, so the derivation law is not flat")

    evidence = Evidence()
    kernel = kernel_system(V, base)
    evidence.add(
        "nminus1-derivation-law", "note",
        f"Pfaffian system at the base point has rank {n - kernel.rank}",
        ", ".join(str(w) for w in kernel.basis) or "0",
    )

    alpha = associated_form(V)
    integrability = wedge(alpha, exterior_derivative(alpha))
    if not integrability.is_zero():
        logger.debug(f"Pfaffian system of {V} is not integrable: {integrability}")
        evidence.add(
            "nminus1-derivation-law", "obstruction",
            "The Pfaffian system is not integrable (alpha ^ d alpha != 0)",
            integrability,
        )
        return evidence.report(Verdict.NOT_CONSTANT)

    covariant = exterior_derivative(alpha) + wedge(theta, alpha)
    if covariant.is_zero():
        evidence.add(
            "nminus1-derivation-law", "theorem",
            "d alpha + theta ^ alpha = 0: the derivation law is flat and parallelizes V",
        )
        chart = None
        aligned = aligned_direction(V)
        if aligned is not None and all(i == aligned[0] for i in aligned[1].variables()):
            chart, target = chart_from_aligned_nminus1_vector(V, base)
            verification = verify_chart(V, chart, target)
            if verification:
                evidence.add("chart-witness", "witness", "V in the constructed chart", verification.expressed)
            else:
                chart = None
        return evidence.report(Verdict.CONSTANT, chart)

    aligned = aligned_direction(V)
    if aligned is not None:
        k, F = aligned
        witness = wedge(exterior_derivative(DiffForm.function(F)), DiffForm.basis(n, (k,)))
        message = f"Coefficient depends on variables other than x{k}"
    else:
        witness = covariant
        message = "d alpha + theta ^ alpha does not vanish for the supplied derivation"
    evidence.add("nminus1-derivation-law", "note", message, witness)
    return evidence.report(Verdict.INCONCLUSIVE)


@dataclass(frozen=True)
class ConstraintReport:
    """
    Rank of the (n-1)-vector system at points where every F_i is nonzero, plus the joined-system
    counts. For n = 3 also the bracket coefficient C (computed twice) and the numerators of the
    constraints C1 = F2 d/dx3 (C/F2), C2 = F2 d/dx2 (C/F2).
    """
    n: int
    equations: int
    unknowns: int
    joined_equations: int
    joined_unknowns: int
    ranks: tuple[tuple[Point, int], ...]
    bracket_coefficient: Poly | None = None
    bracket_coefficient_from_curl: Poly | None = None
    c1_numerator: Poly | None = None
    c2_numerator: Poly | None = None
    c3_bracket_term: Poly | None = field(default=None, compare=False)

    @property
    def full_row_rank(self) -> bool:
        return bool(self.ranks) and all(r == self.equations for _, r in self.ranks)

    def constraints_vanish(self) -> bool:
        return all(c is None or c.is_zero() for c in (self.c1_numerator, self.c2_numerator))


def _nonvanishing_points(F: list[Poly], count: int, seed: int, bound: int, base: Sequence[Fraction] | None) -> list[Point]:
    n = len(F)
    candidates = sample_points(n, count, seed, bound, base)
    rng = random.Random(seed + 1)
    points = []
    attempts = 0
    while len(points) < count and attempts < 20 * (count + 1):
        point = candidates[attempts] if attempts < len(candidates) else random_point(rng, n, bound)
        attempts += 1
        if all(f.eval(point) != 0 for f in F):
            points.append(point)
    return points


def _three_dimensional_constraints(V: MultiVector, F: list[Poly]) -> dict:
    bracket = schouten_bracket(V, V)
    C = bracket.coefficient((1, 2, 3)) * Fraction(-1, 2)

    Z = (F[0], -F[1], F[2])
    curl = (
        Z[2].diff(2) - Z[1].diff(3),
        Z[0].diff(3) - Z[2].diff(1),
        Z[1].diff(1) - Z[0].diff(2),
    )
    from_curl = Z[0] * curl[0] + Z[1] * curl[1] + Z[2] * curl[2]

    F2 = F[1]
    return {
        "bracket_coefficient": C,
        "bracket_coefficient_from_curl": from_curl,
        "c1_numerator": F2 * C.diff(3) - C * F2.diff(3),
        "c2_numerator": F2 * C.diff(2) - C * F2.diff(2),
        "c3_bracket_term": F2 * C.diff(1) - C * F2.diff(1),
    }


def nminus1_vector_system(V: MultiVector, samples: int = 5, seed: int = 0, bound: int = 10, base: Sequence[Fraction] | None = None) -> tuple[GammaSystem, ConstraintReport]:
    """The n^2 x n^2(n+1)/2 system for an (n-1)-vector field and its constraint report."""
    F = coefficient_functions(V)
    n = V.n
    system = assemble_system(V)

    ranks = []
    for point in _nonvanishing_points(F, samples, seed, bound, base):
        matrix, _ = system.matrix_at(point)
        ranks.append((point, rank(matrix, len(system.unknowns))))
    logger.debug(f"(n-1)-vector system ranks: {[r for _, r in ranks]}")

    counts = counting(n, n - 1)
    extra = _three_dimensional_constraints(V, F) if n == 3 else {}
    report = ConstraintReport(
        n=n,
        equations=counts.nminus1_equations,
        unknowns=counts.nminus1_unknowns,
        joined_equations=counts.joined_equations,
        joined_unknowns=counts.joined_unknowns,
        ranks=tuple(ranks),
        **extra,
    )
    return system, report
