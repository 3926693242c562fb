import pytest

from ingress.expressions.chart_file import parse_gamma
from ingress.oracle.charts import random_chart
from kernel.connection import (
    Connection,
    christoffel_from_chart, christoffel_from_inverse_jacobian, covariant_derivative_form,
    covariant_derivative_multivector, curvature, torsion,
)
from kernel.errors import ChartError, VariableOutOfRange
from kernel.exterior import Chart, DiffForm, MultiVector, pullback, pushforward
from kernel.ratpoly import Poly


def x(n, k):
    return Poly.variable(n, k)


def test_identity_chart_has_zero_symbols():
    conn = christoffel_from_chart(Chart.identity(3))
    assert not conn.gamma
    assert conn.dump() == ""


def test_shear_symbols():
    # u1 = x1 + x2^2: the only second derivative is d^2u1/dx2^2 = 2
    conn = christoffel_from_chart(Chart.from_shears(2, [(1, x(2, 2) ** 2)]))
    assert conn.gamma == {(1, 2, 2): Poly.constant(2, 2)}
    assert conn.dump() == "Gamma[1][2][2] = 2\n"


@pytest.mark.parametrize("seed", range(50))
def test_chart_connections_are_flat_and_torsion_free(seed):
    n = 2 + seed % 3
    conn = christoffel_from_chart(random_chart(n, degree_bound=2, num_shears=3, seed=seed))
    assert torsion(conn).is_zero()
    assert curvature(conn).is_zero()
    assert conn.is_symmetric() and conn.is_flat()


@pytest.mark.parametrize("seed", range(20))
def test_inverse_jacobian_formula_agrees(seed):
    phi = random_chart(2 + seed % 3, degree_bound=2, num_shears=2, seed=100 + seed)
    assert christoffel_from_inverse_jacobian(phi) == christoffel_from_chart(phi)


def test_formal_chart_has_no_christoffel_symbols():
    with pytest.raises(ChartError):
        christoffel_from_chart(Chart(2, None, (x(2, 1), x(2, 2))))


def test_curvature_of_a_non_flat_connection():
    # Gamma^1_{22} = x1 gives R^1_{212} = dGamma^1_{22}/dx1 != 0
    conn = Connection(2, {(1, 2, 2): x(2, 1)})
    assert torsion(conn).is_zero()
    R = curvature(conn)
    assert not R.is_zero()
    assert R[(1, 2, 1, 2)] == -R[(1, 2, 2, 1)]
    assert R[(1, 2, 1, 2)] != 0


def test_torsion_of_an_asymmetric_connection():
    T = torsion(Connection(2, {(1, 1, 2): 1}))
    assert T[(1, 1, 2)] == 1
    assert T[(1, 2, 1)] == -1


def test_index_out_of_range():
    with pytest.raises(VariableOutOfRange):
        Connection(2, {(1, 2, 3): 1})


@pytest.mark.parametrize("seed", range(10))
def test_constant_objects_are_parallel(seed):
    phi = random_chart(3, degree_bound=2, num_shears=3, seed=seed)
    conn = christoffel_from_chart(phi)

    a = pullback(phi, DiffForm(3, 2, {(1, 2): 2, (2, 3): -1}))
    assert all(component.is_zero() for component in covariant_derivative_form(conn, a))

    V = pushforward(phi.inverted(), MultiVector(3, 1, {(1,): 1, (3,): 5}))
    assert all(component.is_zero() for component in covariant_derivative_multivector(conn, V))


def test_dump_and_parse():
    conn = christoffel_from_chart(random_chart(3, seed=4))
    assert parse_gamma(conn.dump(), 3) == conn
