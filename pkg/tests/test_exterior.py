import pytest
from hypothesis import given, settings, strategies as st

from ingress.oracle.brute_force import brute_force_sn_bracket
from kernel.errors import DegreeError
from kernel.exterior import (
    DiffForm, MultiVector,
    exterior_derivative, interior_form_vec, interior_vec_form, iota_pq, iota_star_qp, lie_bracket,
    schouten_bracket, sort_with_sign, wedge,
)
from kernel.ratpoly import Poly

from .strategies import forms, multivectors, polys


def x(n, k):
    return Poly.variable(n, k)


def test_sort_with_sign():
    assert sort_with_sign((2, 1)) == (-1, (1, 2))
    assert sort_with_sign((3, 1, 2)) == (1, (1, 2, 3))
    assert sort_with_sign((1, 2, 1))[0] == 0


def test_basis_normalization():
    assert DiffForm.basis(3, (2, 1)) == -DiffForm.basis(3, (1, 2))
    assert DiffForm.basis(3, (2, 2)).is_zero()


def test_mixing_kinds_is_rejected():
    with pytest.raises(TypeError):
        wedge(DiffForm.basis(2, (1,)), MultiVector.basis(2, (2,)))


def test_exterior_derivative_of_a_1form():
    a = DiffForm.basis(2, (2,), x(2, 1))
    assert exterior_derivative(a) == DiffForm.basis(2, (1, 2))
    assert str(exterior_derivative(a)) == "dx[1,2]"


class TestFormIdentities:
    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_d_squared_is_zero(self, data):
        n = data.draw(st.integers(min_value=2, max_value=5))
        p = data.draw(st.integers(min_value=0, max_value=n - 1))
        a = data.draw(forms(n, p))
        assert exterior_derivative(exterior_derivative(a)).is_zero()

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_leibniz_rule(self, data):
        n = data.draw(st.integers(min_value=2, max_value=4))
        p = data.draw(st.integers(min_value=0, max_value=n - 1))
        q = data.draw(st.integers(min_value=0, max_value=n - 1 - p))
        a, b = data.draw(forms(n, p)), data.draw(forms(n, q))
        left = exterior_derivative(wedge(a, b))
        right = wedge(exterior_derivative(a), b) + wedge(a, exterior_derivative(b)) * (-1) ** p
        assert left == right

    @settings(max_examples=80, deadline=None)
    @given(st.data())
    def test_graded_anticommutativity(self, data):
        n = data.draw(st.integers(min_value=2, max_value=4))
        p = data.draw(st.integers(min_value=0, max_value=n))
        q = data.draw(st.integers(min_value=0, max_value=n - p))
        a, b = data.draw(forms(n, p)), data.draw(forms(n, q))
        assert wedge(a, b) == wedge(b, a) * (-1) ** (p * q)

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_interior_product_is_an_antiderivation(self, data):
        n = data.draw(st.integers(min_value=2, max_value=4))
        p = data.draw(st.integers(min_value=1, max_value=n - 1))
        q = data.draw(st.integers(min_value=1, max_value=n - p))
        X = data.draw(multivectors(n, 1))
        a, b = data.draw(forms(n, p)), data.draw(forms(n, q))
        left = interior_vec_form(X, wedge(a, b))
        right = wedge(interior_vec_form(X, a), b) + wedge(a, interior_vec_form(X, b)) * (-1) ** p
        assert left == right


class TestSchouten:
    def test_degree_one_is_the_lie_bracket(self):
        X = MultiVector(2, 1, {(1,): x(2, 2), (2,): 1})
        Y = MultiVector(2, 1, {(1,): x(2, 1) * x(2, 2)})
        assert schouten_bracket(X, Y) == lie_bracket(X, Y)

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_lie_bracket_agreement(self, data):
        n = data.draw(st.integers(min_value=1, max_value=3))
        X, Y = data.draw(multivectors(n, 1)), data.draw(multivectors(n, 1))
        assert schouten_bracket(X, Y) == lie_bracket(X, Y)

    @settings(max_examples=80, deadline=None)
    @given(st.data())
    def test_matches_decomposable_expansion(self, data):
        n = data.draw(st.integers(min_value=2, max_value=4))
        q = data.draw(st.integers(min_value=1, max_value=n))
        r = data.draw(st.integers(min_value=1, max_value=n + 1 - q))
        A, B = data.draw(multivectors(n, q)), data.draw(multivectors(n, r))
        assert schouten_bracket(A, B) == brute_force_sn_bracket(A, B)

    @settings(max_examples=80, deadline=None)
    @given(st.data())
    def test_graded_symmetry(self, data):
        n = data.draw(st.integers(min_value=2, max_value=4))
        q = data.draw(st.integers(min_value=1, max_value=n))
        r = data.draw(st.integers(min_value=1, max_value=n + 1 - q))
        A, B = data.draw(multivectors(n, q)), data.draw(multivectors(n, r))
        assert schouten_bracket(A, B) == schouten_bracket(B, A) * (-(-1) ** ((q - 1) * (r - 1)))

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_self_bracket_vanishes_above_the_dimension(self, data):
        n = data.draw(st.integers(min_value=2, max_value=4))
        q = data.draw(st.integers(min_value=(n + 1) // 2 + 1, max_value=n))
        V = data.draw(multivectors(n, q))
        assert 2 * q - 1 > n
        assert schouten_bracket(V, V).is_zero()

    def test_self_bracket_of_a_non_poisson_bivector(self):
        V = MultiVector(3, 2, {(1, 2): 1, (2, 3): x(3, 2)})
        assert schouten_bracket(V, V).coefficient((1, 2, 3)) == 2

    def test_linear_poisson_bivector(self):
        # so(3)*: x3 d1^d2 + x1 d2^d3 + x2 d3^d1
        V = MultiVector.from_terms(3, 2, [((1, 2), x(3, 3)), ((2, 3), x(3, 1)), ((3, 1), x(3, 2))])
        assert schouten_bracket(V, V).is_zero()


class TestDualities:
    def test_iota_of_a_vector(self):
        vol = DiffForm.volume(3)
        assert iota_pq(MultiVector.basis(3, (1,)), vol) == DiffForm.basis(3, (2, 3))
        assert iota_pq(MultiVector.basis(3, (2,)), vol) == -DiffForm.basis(3, (1, 3))

    def test_iota_star_of_a_covector(self):
        Vn = MultiVector.volume(3)
        assert iota_star_qp(DiffForm.basis(3, (1,)), Vn) == MultiVector.basis(3, (2, 3))

    def test_iota_needs_a_volume_form(self):
        with pytest.raises(DegreeError):
            iota_pq(MultiVector.basis(3, (1,)), DiffForm.basis(3, (1, 2)))

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_iota_is_linear_over_functions(self, data):
        n = data.draw(st.integers(min_value=2, max_value=4))
        q = data.draw(st.integers(min_value=1, max_value=n))
        V = data.draw(multivectors(n, q))
        f = data.draw(polys(n))
        vol = DiffForm.volume(n)
        assert iota_pq(V * f, vol) == iota_pq(V, vol) * f

    def test_covector_contraction_into_a_bivector(self):
        V = MultiVector.basis(3, (1, 2), x(3, 3))
        assert interior_form_vec(DiffForm.basis(3, (1,)), V) == MultiVector.basis(3, (2,), x(3, 3))
        assert interior_form_vec(DiffForm.basis(3, (2,)), V) == -MultiVector.basis(3, (1,), x(3, 3))
