from fractions import Fraction

import pytest

from analysis.detectors.nminus1 import (
    associated_form, coefficient_functions, detect_vec_n_minus_1, nminus1_vector_system,
)
from analysis.detectors.reports import Verdict
from ingress.expressions.parser import parse_object
from kernel.errors import DegreeError, VanishingError
from kernel.exterior import DiffForm
from kernel.ratpoly import Poly


def x(n, k):
    return Poly.variable(n, k)


class TestCoefficients:
    def test_coefficient_functions(self):
        V = parse_object("Dx[1,2] + x2*Dx[2,3]", 3)
        assert coefficient_functions(V) == [x(3, 2), Poly.zero(3), Poly.one(3)]
        assert associated_form(V) == parse_object("x2*dx[1] + dx[3]", 3)

    def test_degree_is_checked(self):
        with pytest.raises(DegreeError):
            coefficient_functions(parse_object("Dx[1]", 3))


class TestDerivationLaw:
    def test_aligned_vector(self):
        V = parse_object("(1 + x3)*Dx[1,2]", 3)
        report = detect_vec_n_minus_1(V)
        assert report.verdict == Verdict.CONSTANT
        assert report.chart is not None
        assert [reason.kind for reason in report.reasons] == ["note", "theorem", "witness"]

    def test_non_integrable_pfaffian_system(self):
        report = detect_vec_n_minus_1(parse_object("Dx[1,2] + x2*Dx[2,3]", 3))
        assert report.verdict == Verdict.NOT_CONSTANT
        assert report.reasons[-1].kind == "obstruction"
        assert report.reasons[-1].witness == "-dx[1,2,3]"

    def test_aligned_coefficient_in_the_wrong_variable(self):
        report = detect_vec_n_minus_1(parse_object("x1*Dx[1,2]", 3), base=(Fraction(1), Fraction(0), Fraction(0)))
        assert report.verdict == Verdict.INCONCLUSIVE
        assert report.reasons[-1].witness == "dx[1,3]"

    def test_flat_derivation_parallelizes(self):
        # alpha = dx1 + x1 dx2, d(alpha) + dx2 ^ alpha = 0
        V = parse_object("Dx[2,3] - x1*Dx[1,3]", 3)
        assert associated_form(V) == parse_object("dx[1] + x1*dx[2]", 3)
        assert detect_vec_n_minus_1(V).verdict == Verdict.INCONCLUSIVE

        report = detect_vec_n_minus_1(V, DiffForm.basis(3, (2,)))
        assert report.verdict == Verdict.CONSTANT
        assert report.chart is None

    def test_derivation_must_be_closed(self):
        V = parse_object("Dx[1,2]", 3)
        with pytest.raises(ValueError):
            detect_vec_n_minus_1(V, parse_object("x2*dx[1]", 3))
        with pytest.raises(DegreeError):
            detect_vec_n_minus_1(V, parse_object("dx[1,2]", 3))

    def test_vanishing_at_the_base(self):
        with pytest.raises(VanishingError):
            detect_vec_n_minus_1(parse_object("x1*Dx[1,2]", 3))


class TestConstraintReport:
    @pytest.mark.parametrize("text, n", [
        ("Dx[1,2] + 2*Dx[1,3] + 3*Dx[2,3]", 3),
        ("(1 + x1)*Dx[1,2] + Dx[1,3] - x2*Dx[2,3] + x3*Dx[2,3]", 3),
        ("Dx[1,2,3] + 2*Dx[1,2,4] - Dx[1,3,4] + 5*Dx[2,3,4]", 4),
    ])
    def test_full_row_rank_where_no_coefficient_vanishes(self, text, n):
        system, report = nminus1_vector_system(parse_object(text, n), samples=3)
        assert system.shape == (n * n, n * n * (n + 1) // 2)
        assert report.ranks
        assert report.full_row_rank

    def test_bracket_coefficient_two_ways(self):
        _, report = nminus1_vector_system(parse_object("Dx[1,2] + x2*Dx[2,3]", 3), samples=1)
        assert report.bracket_coefficient == Poly.constant(3, -1)
        assert report.bracket_coefficient_from_curl == report.bracket_coefficient

    def test_constraints_vanish_for_poisson_vectors(self):
        _, report = nminus1_vector_system(parse_object("(1 + x3)*Dx[1,2] + Dx[1,3]", 3), samples=1)
        assert report.bracket_coefficient.is_zero()
        assert report.constraints_vanish()

    def test_joined_counts(self):
        _, report = nminus1_vector_system(parse_object("Dx[1,2]", 3), samples=1)
        assert (report.equations, report.unknowns) == (9, 18)
        assert (report.joined_equations, report.joined_unknowns) == (51, 72)

    def test_four_variables_have_no_constraint_identities(self):
        _, report = nminus1_vector_system(parse_object("Dx[1,2,3]", 4), samples=1)
        assert report.bracket_coefficient is None
        assert report.constraints_vanish()
