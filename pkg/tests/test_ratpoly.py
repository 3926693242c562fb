from fractions import Fraction

import pytest
from hypothesis import given, settings

from kernel.errors import DimensionMismatch, VariableOutOfRange
from kernel.ratpoly import Poly, poly_content, poly_divide_exact, poly_gcd

from .strategies import points, polys


def x(n, k):
    return Poly.variable(n, k)


class TestArithmetic:
    def test_zero_coefficients_are_dropped(self):
        p = Poly(2, {(1, 0): 1, (0, 1): 0})
        assert p.terms == {(1, 0): Fraction(1)}
        assert (p - p).is_zero()

    def test_mixing_with_scalars(self):
        p = x(2, 1) + 1
        assert p * 2 == 2 * x(2, 1) + 2
        assert 3 - p == 2 - x(2, 1)
        assert (p / 2).eval((1, 0)) == 1

    def test_power_expands(self):
        assert (x(2, 1) + x(2, 2)) ** 2 == x(2, 1) ** 2 + 2 * x(2, 1) * x(2, 2) + x(2, 2) ** 2

    def test_combining_different_variable_counts_is_rejected(self):
        with pytest.raises(DimensionMismatch):
            x(2, 1) + x(3, 1)

    def test_variable_out_of_range(self):
        with pytest.raises(VariableOutOfRange):
            Poly.variable(2, 3)

    @settings(max_examples=500, deadline=None)
    @given(polys(3), polys(3), polys(3))
    def test_ring_axioms(self, a, b, c):
        assert a + b == b + a
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)


class TestCalculus:
    def test_diff_and_integrate(self):
        p = 3 * x(2, 1) ** 2 * x(2, 2)
        assert p.diff(1) == 6 * x(2, 1) * x(2, 2)
        assert p.diff(2).integrate(2) == p

    @given(polys(3), polys(3))
    def test_product_rule(self, a, b):
        for k in (1, 2, 3):
            assert (a * b).diff(k) == a.diff(k) * b + a * b.diff(k)

    @given(polys(2), polys(2), polys(2), points(2))
    def test_compose_then_evaluate(self, p, u, v, point):
        composed = p.compose([u, v])
        assert composed.eval(point) == p.eval((u.eval(point), v.eval(point)))

    def test_render(self):
        p = Fraction(3, 2) * x(3, 1) ** 2 - x(3, 3) + 1
        assert p.render() == "3/2*x1^2 - x3 + 1"
        assert Poly.zero(3).render() == "0"
        assert x(2, 2).render("u") == "u2"


class TestDivision:
    def test_exact_division(self):
        a = (x(2, 1) + 1) * (x(2, 2) - 2)
        assert poly_divide_exact(a, x(2, 2) - 2) == x(2, 1) + 1

    def test_inexact_division_raises(self):
        with pytest.raises(ValueError):
            poly_divide_exact(x(2, 1) + 1, x(2, 2))

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            poly_divide_exact(x(2, 1), Poly.zero(2))

    def test_gcd_of_products(self):
        g = x(3, 1) * x(3, 3) + 1
        a = g * (x(3, 2) + 2)
        b = g * (x(3, 1) - x(3, 2))
        assert poly_gcd(a, b) == g

    def test_gcd_is_monic(self):
        assert poly_gcd(4 * x(2, 1), 6 * x(2, 1) * x(2, 2)) == x(2, 1)
        assert poly_gcd(Poly.zero(2), Poly.zero(2)).is_zero()

    def test_content_of_a_family(self):
        factor = 1 + x(3, 3) ** 2
        family = [factor * x(3, 1), factor * 3, factor * (x(3, 2) - 1)]
        assert poly_content(family) == factor

    @settings(max_examples=30, deadline=None)
    @given(polys(2, max_degree=2), polys(2, max_degree=2), polys(2, max_degree=1))
    def test_common_factor_divides_gcd(self, a, b, g):
        if g.is_zero() or a.is_zero() or b.is_zero():
            return
        d = poly_gcd(a * g, b * g)
        poly_divide_exact(d, poly_gcd(g, g))
        poly_divide_exact(a * g, d)
        poly_divide_exact(b * g, d)
