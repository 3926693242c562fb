import random
from math import comb

import pytest

from analysis.detectors.systems import (
    assemble_phi, assemble_system, gamma_unknowns, integrability_residual, phi_curl, symmetric_key,
)
from ingress.oracle.charts import random_chart, random_poly
from kernel.connection import (
    Connection, christoffel_from_chart, covariant_derivative_form, covariant_derivative_multivector,
)
from kernel.exterior import DiffForm, MultiVector, multi_indices, pullback, pushforward
from kernel.ratpoly import Poly


def x(n, k):
    return Poly.variable(n, k)


def random_object(cls, n, degree, seed):
    rng = random.Random(seed)
    return cls(n, degree, {index: random_poly(rng, n, 2, terms=2) for index in multi_indices(n, degree)})


@pytest.mark.parametrize("n, degree", [(2, 1), (3, 2), (4, 2), (5, 3)])
def test_system_shape(n, degree):
    system = assemble_system(random_object(DiffForm, n, degree, seed=n))
    assert system.shape == (n * comb(n, degree), n * n * (n + 1) // 2)
    assert len(gamma_unknowns(n)) == n * n * (n + 1) // 2
    assert symmetric_key((1, 3, 2)) == (1, 2, 3)


def test_three_form_in_five_variables_expansion():
    """
    Phi_{j,123} for a 3-form on R^5 equals
    Gamma^h_{j1}(F_{h23} - F_{2h3} + F_{23h}) + Gamma^h_{j2}(F_{1h3} - F_{h13} - F_{13h})
    + Gamma^h_{j3}(F_{h12} - F_{1h2} + F_{12h}), reading F_{abc} as zero unless a < b < c.
    """
    n = 5
    indices = multi_indices(n, 3)
    markers = {index: x(n, 1) ** position for position, index in enumerate(indices)}
    a = DiffForm(n, 3, markers)

    def F(*index):
        return markers.get(index, Poly.zero(n)) if list(index) == sorted(set(index)) else Poly.zero(n)

    phi = assemble_phi(a)
    for j in range(1, n + 1):
        expected = {}
        for h in range(1, n + 1):
            expected[(h, j, 1)] = F(h, 2, 3) - F(2, h, 3) + F(2, 3, h)
            expected[(h, j, 2)] = F(1, h, 3) - F(h, 1, 3) - F(1, 3, h)
            expected[(h, j, 3)] = F(h, 1, 2) - F(1, h, 2) + F(1, 2, h)
        expected = {key: value for key, value in expected.items() if value}
        assert phi[(j, (1, 2, 3))] == expected


def test_three_form_in_five_variables_expansion_124():
    # Phi_{j,124} follows the same pattern: Gamma^h_{j1}(F_{h24} - F_{2h4} + F_{24h}) + ...
    n = 5
    markers = {index: x(n, 2) ** position for position, index in enumerate(multi_indices(n, 3))}
    phi = assemble_phi(DiffForm(n, 3, markers))

    def F(*index):
        return markers.get(index, Poly.zero(n)) if list(index) == sorted(set(index)) else Poly.zero(n)

    for j in range(1, n + 1):
        expected = {}
        for h in range(1, n + 1):
            expected[(h, j, 1)] = F(h, 2, 4) - F(2, h, 4) + F(2, 4, h)
            expected[(h, j, 2)] = F(1, h, 4) - F(h, 1, 4) - F(1, 4, h)
            expected[(h, j, 4)] = F(h, 1, 2) - F(1, h, 2) + F(1, 2, h)
        assert phi[(j, (1, 2, 4))] == {key: value for key, value in expected.items() if value}


@pytest.mark.parametrize("seed", range(8))
def test_phi_is_the_connection_part_of_the_covariant_derivative(seed):
    n = 3 + seed % 2
    conn = christoffel_from_chart(random_chart(n, num_shears=3, seed=seed))
    a = random_object(DiffForm, n, 2, seed)
    V = random_object(MultiVector, n, 2, seed + 1)

    phi_a, phi_V = assemble_phi(a), assemble_phi(V)
    nabla_a, nabla_V = covariant_derivative_form(conn, a), covariant_derivative_multivector(conn, V)
    for (j, J), expression in phi_a.items():
        assert nabla_a[j - 1].coefficient(J) == a.coefficient(J).diff(j) - conn.substitute(expression)
    for (j, J), expression in phi_V.items():
        assert nabla_V[j - 1].coefficient(J) == V.coefficient(J).diff(j) + conn.substitute(expression)


@pytest.mark.parametrize("seed", range(20))
def test_chart_connection_solves_the_system_of_a_constant_object(seed):
    n = 2 + seed % 3
    degree = 1 + seed % n
    phi = random_chart(n, num_shears=3, seed=seed)
    conn = christoffel_from_chart(phi)

    constants = {index: k + 1 for k, index in enumerate(multi_indices(n, degree))}

    a = pullback(phi, DiffForm(n, degree, constants))
    assert assemble_system(a).residual(conn) == {}
    assert phi_curl(conn, a) == {}

    V = pushforward(phi.inverted(), MultiVector(n, degree, constants))
    assert assemble_system(V).residual(conn) == {}


@pytest.mark.parametrize("seed", range(20))
def test_chart_connections_are_formally_integrable(seed):
    n = 2 + seed % 3
    conn = christoffel_from_chart(random_chart(n, num_shears=3, seed=seed))
    for degree in range(1, n + 1):
        assert integrability_residual(conn, degree, "form") == {}
        assert integrability_residual(conn, degree, "multivector") == {}


def test_curved_connection_is_not_integrable():
    conn = Connection(2, {(1, 2, 2): x(2, 1)})
    assert integrability_residual(conn, 1, "form")


def test_inconsistent_system_residual():
    # x2*dx[1] is not closed, so no connection makes it parallel; the zero connection leaves dF as residual
    a = DiffForm.basis(2, (1,), x(2, 2))
    assert assemble_system(a).residual(Connection.zero(2)) == {(2, (1,)): Poly.constant(2, -1)}
