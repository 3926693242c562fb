"""
The linear system in the Christoffel symbols whose solvability characterizes constant coefficients.

For a form `sum F_I dx^I`, parallelism under a connection reads `dF_J/dx^j = Phi_{j,J}`, where
`Phi_{j,J}` collects `Gamma^{i_h}_{j i} F_I` over every way of replacing slot `h` of `I` by `i`
such that the result normalizes (with sign) to `J`. Multivectors use `Gamma^i_{j i_h}` and the
equation `dF_J/dx^j = -Phi_{j,J}`. Torsion-freeness is imposed by folding `Gamma^a_{bc}` and
`Gamma^a_{cb}` into one unknown.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Mapping, Sequence

from kernel.connection import Connection, GammaKey
from kernel.errors import DegreeError, DimensionMismatch
from kernel.exterior import DiffForm, ExteriorObject, MultiIndex, MultiVector, multi_indices, sort_with_sign
from kernel.ratpoly import Poly


Variance = Literal["form", "multivector"]
LinearExpr = dict[GammaKey, Poly]
RowKey = tuple[int, MultiIndex]


def _variance(obj: ExteriorObject) -> Variance:
    if isinstance(obj, DiffForm):
        return "form"
    if isinstance(obj, MultiVector):
        return "multivector"
    raise TypeError(f"Expected a form or multivector, got {type(obj).__name__}")


def _gamma_key(variance: Variance, slot: int, j: int, inserted: int) -> GammaKey:
    return (slot, j, inserted) if variance == "form" else (inserted, j, slot)


def symmetric_key(key: GammaKey) -> GammaKey:
    a, b, c = key
    return (a, min(b, c), max(b, c))


def gamma_unknowns(n: int) -> list[GammaKey]:
    """Unknowns after imposing torsion-freeness: Gamma^a_{bc} with b <= c."""
    return [(a, b, c) for a in range(1, n + 1) for b in range(1, n + 1) for c in range(b, n + 1)]


def _accumulate(expression: LinearExpr, key: GammaKey, value: Poly):
    expression[key] = expression[key] + value if key in expression else value


def insertion_terms(index: MultiIndex, n: int, variance: Variance, j: int):
    """Yield `(gamma_key, sign, J)` for every slot replacement of `index` that survives normalization."""
    for h, slot in enumerate(index):
        for i in range(1, n + 1):
            sign, J = sort_with_sign(index[:h] + (i,) + index[h + 1:])
            if sign:
                yield _gamma_key(variance, slot, j, i), sign, J


def assemble_phi(obj: ExteriorObject) -> dict[RowKey, LinearExpr]:
    """
    `Phi_{j,J}` for every `j` and every multi-index `J` of the object's degree, as linear
    expressions over all n^3 Christoffel unknowns.
    """
    variance = _variance(obj)
    n = obj.n
    phi: dict[RowKey, LinearExpr] = {
        (j, J): {} for j in range(1, n + 1) for J in multi_indices(n, obj.degree)
    }
    for index, coefficient in obj.coeffs.items():
        for j in range(1, n + 1):
            for key, sign, J in insertion_terms(index, n, variance, j):
                _accumulate(phi[(j, J)], key, coefficient * sign)

    for expression in phi.values():
        for key in [key for key, value in expression.items() if not value]:
            del expression[key]
    return phi


@dataclass(frozen=True)
class GammaSystem:
    n: int
    degree: int
    variance: Variance
    unknowns: tuple[GammaKey, ...]
    row_keys: tuple[RowKey, ...]
    rows: tuple[LinearExpr, ...]
    rhs: tuple[Poly, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.unknowns)

    def matrix_at(self, point: Sequence[Fraction]) -> tuple[list[list[Fraction]], list[Fraction]]:
        column = {key: position for position, key in enumerate(self.unknowns)}
        matrix = []
        for row in self.rows:
            values = [Fraction(0)] * len(self.unknowns)
            for key, coefficient in row.items():
                values[column[key]] = coefficient.eval(point)
            matrix.append(values)
        return matrix, [value.eval(point) for value in self.rhs]

    def residual(self, conn: Connection) -> dict[RowKey, Poly]:
        """Nonzero `row(Gamma) - rhs` entries for a torsion-free connection."""
        result = {}
        for key, row, rhs in zip(self.row_keys, self.rows, self.rhs):
            value = conn.substitute(row) - rhs
            if value:
                result[key] = value
        return result


def assemble_system(obj: ExteriorObject) -> GammaSystem:
    variance = _variance(obj)
    n, degree = obj.n, obj.degree
    if not 1 <= degree <= n:
        raise DegreeError(f"Degree {degree} outside 1..{n}")

    phi = assemble_phi(obj)
    row_keys, rows, rhs = [], [], []
    for (j, J), expression in phi.items():
        folded: LinearExpr = {}
        for key, value in expression.items():
            _accumulate(folded, symmetric_key(key), value)
        derivative = obj.coefficient(J).diff(j)

        row_keys.append((j, J))
        rows.append({key: value for key, value in folded.items() if value})
        rhs.append(derivative if variance == "form" else -derivative)

    return GammaSystem(n, degree, variance, tuple(gamma_unknowns(n)), tuple(row_keys), tuple(rows), tuple(rhs))


# Formal integrability of the system

def transfer_matrices(conn: Connection, degree: int, variance: Variance) -> list[dict[tuple[MultiIndex, MultiIndex], Poly]]:
    """
    For each j, the matrix `A^j` with `dF_J/dx^j = sum_I A^j_{J,I} F_I` when the system holds.
    """
    n = conn.n
    matrices = []
    for j in range(1, n + 1):
        matrix: dict[tuple[MultiIndex, MultiIndex], Poly] = {}
        for I in multi_indices(n, degree):
            for key, sign, J in insertion_terms(I, n, variance, j):
                value = conn[key] * (sign if variance == "form" else -sign)
                if value:
                    _accumulate(matrix, (J, I), value)
        matrices.append({entry: value for entry, value in matrix.items() if value})
    return matrices


def _matrix_product(left: Mapping, right: Mapping) -> dict:
    result = {}
    for (J, K), a in left.items():
        for (K2, I), b in right.items():
            if K == K2:
                _accumulate(result, (J, I), a * b)
    return result


def integrability_residual(conn: Connection, degree: int, variance: Variance = "form") -> dict[tuple[int, int, MultiIndex, MultiIndex], Poly]:
    """
    Nonzero entries of `dA^j/dx^l - dA^l/dx^j + A^j A^l - A^l A^j`, the condition for mixed second
    derivatives of F to agree when the coefficients F are treated as unknowns.
    """
    n = conn.n
    A = transfer_matrices(conn, degree, variance)
    residual = {}
    for j in range(1, n + 1):
        for l in range(j + 1, n + 1):
            entries: dict[tuple[MultiIndex, MultiIndex], Poly] = {}
            for entry, value in A[j - 1].items():
                _accumulate(entries, entry, value.diff(l))
            for entry, value in A[l - 1].items():
                _accumulate(entries, entry, -value.diff(j))
            for entry, value in _matrix_product(A[j - 1], A[l - 1]).items():
                _accumulate(entries, entry, value)
            for entry, value in _matrix_product(A[l - 1], A[j - 1]).items():
                _accumulate(entries, entry, -value)
            for (J, I), value in entries.items():
                if value:
                    residual[(j, l, J, I)] = value
    return residual


def phi_curl(conn: Connection, obj: ExteriorObject) -> dict[tuple[int, int, MultiIndex], Poly]:
    """Nonzero `dPhi_{j,J}/dx^l - dPhi_{l,J}/dx^j` with the connection substituted into Phi."""
    if conn.n != obj.n:
        raise DimensionMismatch(f"Connection on R^{conn.n}, object on R^{obj.n}")
    phi = assemble_phi(obj)
    values = {key: conn.substitute(expression) for key, expression in phi.items()}

    n = obj.n
    result = {}
    for J in multi_indices(n, obj.degree):
        for j in range(1, n + 1):
            for l in range(j + 1, n + 1):
                value = values[(j, J)].diff(l) - values[(l, J)].diff(j)
                if value:
                    result[(j, l, J)] = value
    return result
