import random
from fractions import Fraction

import pytest

from analysis.detectors.charts import (
    aligned_direction, chart_from_aligned_nminus1_vector, chart_from_codegree_one_form, chart_from_exact_1form,
    chart_from_volume_form, potential, verify_chart,
)
from analysis.detectors.distributions import contraction_rank, kernel_system
from analysis.detectors.rank import generic_inconsistency, rank_analysis, sample_points
from analysis.detectors.reports import RankReport
from analysis.detectors.systems import assemble_system
from ingress.expressions.parser import parse_object
from ingress.oracle.charts import random_chart, random_poly
from kernel.errors import DegreeError, DimensionMismatch, VanishingError
from kernel.exterior import Chart, DiffForm, MultiVector, pullback, pushforward
from kernel.ratpoly import Poly


def x(n, k):
    return Poly.variable(n, k)


def at(*coords):
    return tuple(Fraction(c) for c in coords)


class TestVerifyChart:
    def test_identity_chart_on_a_constant_form(self):
        verification = verify_chart(parse_object("dx[1,2] + 3*dx[2,3]", 3), Chart.identity(3))
        assert verification
        assert verification.residual.is_zero()

    def test_shear_witness(self):
        a = parse_object("dx[1,2] - 2*x3*dx[2,3] + dx[3,4]", 4)
        phi = Chart.from_shears(4, [(1, x(4, 3) ** 2)])
        verification = verify_chart(a, phi)
        assert verification.verified
        assert verification.direction == "inverse"
        assert verification.expressed == parse_object("dx[1,2] + dx[3,4]", 4)

    def test_identity_chart_on_a_non_constant_form(self):
        verification = verify_chart(parse_object("x1*dx[1]", 2), Chart.identity(2))
        assert not verification
        assert verification.residual == parse_object("x1*dx[1]", 2)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_chart_witnesses(self, seed):
        phi = random_chart(3, num_shears=3, seed=seed)
        a = pullback(phi, DiffForm(3, 2, {(1, 2): 1, (1, 3): -2}))
        V = pushforward(phi.inverted(), MultiVector(3, 1, {(2,): 4}))
        assert verify_chart(a, phi)
        assert verify_chart(V, phi)
        assert not verify_chart(a + DiffForm.basis(3, (1, 2), x(3, 1)), phi)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            verify_chart(DiffForm.basis(3, (1,)), Chart.identity(2))

    def test_target_must_be_constant(self):
        chart, _ = chart_from_exact_1form(parse_object("x1*dx[1]", 2), at(1, 0))
        with pytest.raises(ValueError):
            verify_chart(parse_object("x1*dx[1]", 2), chart, parse_object("x1*dx[1]", 2))


class TestConstructiveCharts:
    def test_volume_form_chart(self):
        a = parse_object("(1 + x1)*dx[1,2]", 2)
        chart = chart_from_volume_form(a)
        assert chart.forward[0] == x(2, 1) + x(2, 1) ** 2 / 2
        assert chart.forward[1] == x(2, 2)
        assert chart.inverse is None
        assert verify_chart(a, chart, DiffForm.volume(2))

    def test_constant_volume_form_has_an_inverse(self):
        chart = chart_from_volume_form(parse_object("2*dx[1,2]", 2))
        assert chart.inverse[0] == x(2, 1) / 2

    def test_volume_form_vanishing_at_the_base(self):
        with pytest.raises(VanishingError):
            chart_from_volume_form(parse_object("x1*dx[1,2]", 2))

    def test_volume_form_off_the_origin(self):
        a = parse_object("x1*dx[1,2]", 2)
        chart = chart_from_volume_form(a, at(2, 0))
        assert chart.base == at(2, 0)
        assert verify_chart(a, chart, DiffForm.volume(2))

    def test_potential(self):
        assert potential(parse_object("x2*dx[1] + x1*dx[2]", 2)) == x(2, 1) * x(2, 2)
        with pytest.raises(ValueError):
            potential(parse_object("x2*dx[1]", 2))

    def test_exact_1form_with_polynomial_inverse(self):
        a = parse_object("dx[1] + x2*dx[2]", 2)
        chart, target = chart_from_exact_1form(a)
        assert target == DiffForm.basis(2, (1,))
        assert chart.inverse is not None
        assert verify_chart(a, chart, target)

    def test_exact_1form_vanishing(self):
        with pytest.raises(VanishingError):
            chart_from_exact_1form(parse_object("x1*dx[1]", 2))

    def test_codegree_one_form(self):
        a = parse_object("(1 + x2^2)*dx[2,3]", 3)
        chart, target = chart_from_codegree_one_form(a)
        assert target == DiffForm.basis(3, (2, 3))
        assert chart.forward[1] == x(3, 2) + x(3, 2) ** 3 / 3
        assert verify_chart(a, chart, target)

    def test_codegree_one_form_must_be_aligned(self):
        with pytest.raises(ValueError):
            chart_from_codegree_one_form(parse_object("dx[1,2] + dx[2,3]", 3))
        with pytest.raises(DegreeError):
            chart_from_codegree_one_form(parse_object("dx[1]", 3))

    def test_aligned_nminus1_vector(self):
        V = parse_object("(1 + x3)*Dx[1,2]", 3)
        assert aligned_direction(V) == (3, x(3, 3) + 1)
        chart, target = chart_from_aligned_nminus1_vector(V)
        assert chart.forward is None
        assert target == MultiVector.basis(3, (1, 2))
        assert verify_chart(V, chart, target)

    def test_aligned_nminus1_vector_off_the_origin(self):
        V = parse_object("x3*Dx[1,2]", 3)
        chart, target = chart_from_aligned_nminus1_vector(V, at(1, 2, 3))
        assert verify_chart(V, chart, target)

    def test_aligned_coefficient_must_depend_on_the_missing_variable_only(self):
        with pytest.raises(ValueError):
            chart_from_aligned_nminus1_vector(parse_object("(1 + x1)*Dx[1,2]", 3))
        assert aligned_direction(parse_object("Dx[1,2] + Dx[2,3]", 3)) is None


class TestDistributions:
    def test_bivector_kernel_is_a_covector(self):
        kernel = kernel_system(MultiVector.basis(3, (1, 2)), at(0, 0, 0))
        assert kernel.rank == 2
        assert kernel.basis == (DiffForm.basis(3, (3,)),)

    def test_form_kernel_is_a_vector(self):
        kernel = kernel_system(DiffForm.basis(3, (1, 2)), at(0, 0, 0))
        assert kernel.basis == (MultiVector.basis(3, (3,)),)

    def test_symplectic_ranks(self):
        assert contraction_rank(parse_object("Dx[1,2] + Dx[3,4]", 4), at(0, 0, 0, 0)) == 4
        assert contraction_rank(parse_object("dx[1,2] + x3*dx[3,4]", 4), at(0, 0, 0, 0)) == 2
        assert contraction_rank(parse_object("dx[1,2] + x3*dx[3,4]", 4), at(0, 0, 1, 0)) == 4

    def test_degree_zero_has_no_kernel_system(self):
        with pytest.raises(ValueError):
            kernel_system(DiffForm.function(x(2, 1)), at(0, 0))


class TestRankAnalysis:
    def test_sample_points_start_at_the_base(self):
        points = sample_points(3, 4, seed=1, base=at(1, 2, 3))
        assert points[0] == at(1, 2, 3)
        assert len(points) == 5
        assert points == sample_points(3, 4, seed=1, base=at(1, 2, 3))

    def test_inconsistent_at_the_base(self):
        reports = rank_analysis(assemble_system(parse_object("x2*dx[1]", 2)), [at(0, 0)])
        assert reports[0].rank_M == 0
        assert reports[0].rank_M_aug == 1
        assert not reports[0].consistent

    def test_constant_objects_are_consistent(self):
        system = assemble_system(parse_object("dx[1,2,3] + dx[3,4,5]", 5))
        assert all(report.consistent for report in rank_analysis(system, sample_points(5, 2)))

    def test_needs_a_point(self):
        with pytest.raises(ValueError):
            rank_analysis(assemble_system(parse_object("dx[1]", 1)), [])

    def test_generic_inconsistency(self):
        def report(rank_M, rank_M_aug):
            return RankReport(point=at(0), rank_M=rank_M, rank_M_aug=rank_M_aug, consistent=rank_M == rank_M_aug)

        assert generic_inconsistency([report(2, 2), report(3, 4)])
        assert not generic_inconsistency([report(2, 3), report(4, 4)])


class TestGeneratedCharts:
    @pytest.mark.parametrize("seed", range(20))
    def test_volume_form_chart(self, seed):
        rng = random.Random(seed)
        n = 2 + seed % 3
        base = tuple(Fraction(rng.randint(-2, 2)) for _ in range(n))
        g = random_poly(rng, n, 2, terms=3)
        g = g - g.eval(base) + rng.choice([-3, -1, 1, 2])
        a = DiffForm.volume(n, g)
        chart = chart_from_volume_form(a, base)
        assert verify_chart(a, chart, DiffForm.volume(n))

    @pytest.mark.parametrize("seed", range(20))
    def test_exact_1form_chart(self, seed):
        n = 2 + seed % 3
        constant = DiffForm.basis(n, (1,)) + DiffForm.basis(n, (n,), 1 + seed % 4)
        a = pullback(random_chart(n, seed=seed), constant)
        chart, target = chart_from_exact_1form(a)
        assert target.is_constant()
        assert verify_chart(a, chart, target)
