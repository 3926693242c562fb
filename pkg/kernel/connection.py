"""
Christoffel symbols of the flat torsion-free connection that parallelizes a chart, covariant
derivatives of forms and multivectors, and the torsion and curvature tests.

Index conventions: `gamma[(a, b, c)]` is Gamma^a_{bc}, with `nabla_{d_b} d_c = Gamma^a_{bc} d_a`.
All indices are 1-based.
"""
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

from .errors import DimensionMismatch, VariableOutOfRange
from .exterior import Chart, DiffForm, MultiVector
from .ratpoly import Poly


GammaKey = tuple[int, int, int]
CurvatureKey = tuple[int, int, int, int]


class Connection:
    __slots__ = ("n", "_gamma")

    def __init__(self, n: int, gamma: Mapping[GammaKey, Poly] | None = None):
        normalized = {}
        for key, value in (gamma or {}).items():
            key = tuple(key)
            if len(key) != 3 or any(not 1 <= k <= n for k in key):
                raise VariableOutOfRange(f"Christoffel index {key} out of range 1..{n}")
            if not isinstance(value, Poly):
                value = Poly.constant(n, value)
            if value.nvars != n:
                raise DimensionMismatch(f"Christoffel symbol in {value.nvars} variables on R^{n}")
            if value:
                normalized[key] = value
        self.n = n
        self._gamma = normalized

    @classmethod
    def zero(cls, n: int) -> 'Connection':
        return cls(n)

    def __getitem__(self, key: GammaKey) -> Poly:
        return self._gamma.get(tuple(key), Poly.zero(self.n))

    @property
    def gamma(self) -> Mapping[GammaKey, Poly]:
        return MappingProxyType(self._gamma)

    def items(self) -> list[tuple[GammaKey, Poly]]:
        return sorted(self._gamma.items())

    def is_symmetric(self) -> bool:
        return torsion(self).is_zero()

    def is_flat(self) -> bool:
        return curvature(self).is_zero()

    def substitute(self, expression: Mapping[GammaKey, Poly]) -> Poly:
        """Evaluate a linear expression in the Christoffel unknowns with this connection's symbols."""
        total = Poly.zero(self.n)
        for key, coefficient in expression.items():
            total = total + coefficient * self[key]
        return total

    def dump(self) -> str:
        return "".join(f"Gamma[{a}][{b}][{c}] = {value}\n" for (a, b, c), value in self.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Connection):
            return NotImplemented
        return self.n == other.n and self._gamma == other._gamma

    def __repr__(self) -> str:
        return f"Connection(n={self.n}, nonzero={len(self._gamma)})"


@dataclass(frozen=True)
class TorsionTensor:
    n: int
    components: Mapping[GammaKey, Poly] = field(default_factory=dict)

    def __getitem__(self, key: GammaKey) -> Poly:
        return self.components.get(tuple(key), Poly.zero(self.n))

    def is_zero(self) -> bool:
        return not self.components


@dataclass(frozen=True)
class CurvatureTensor:
    """Components are the violation of the flatness condition; antisymmetric in the last two indices."""
    n: int
    components: Mapping[CurvatureKey, Poly] = field(default_factory=dict)

    def __getitem__(self, key: CurvatureKey) -> Poly:
        return self.components.get(tuple(key), Poly.zero(self.n))

    def is_zero(self) -> bool:
        return not self.components

    def items(self) -> list[tuple[CurvatureKey, Poly]]:
        return sorted(self.components.items())


def torsion(conn: Connection) -> TorsionTensor:
    n = conn.n
    components = {}
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            for c in range(1, n + 1):
                value = conn[(a, b, c)] - conn[(a, c, b)]
                if value:
                    components[(a, b, c)] = value
    return TorsionTensor(n, components)


def curvature(conn: Connection) -> CurvatureTensor:
    """
    R^a_{bcd} = dGamma^a_{bd}/dx^c - dGamma^a_{bc}/dx^d - (Gamma^e_{bc} Gamma^a_{de} - Gamma^e_{bd} Gamma^a_{ce})
    """
    n = conn.n
    components = {}
    indices = range(1, n + 1)
    for a in indices:
        for b in indices:
            for c in indices:
                for d in indices:
                    if c == d:
                        continue
                    value = conn[(a, b, d)].diff(c) - conn[(a, b, c)].diff(d)
                    for e in indices:
                        value = value - conn[(e, b, c)] * conn[(a, d, e)] + conn[(e, b, d)] * conn[(a, c, e)]
                    if value:
                        components[(a, b, c, d)] = value
    return CurvatureTensor(n, components)


def jacobian(maps: Sequence[Poly]) -> list[list[Poly]]:
    """`J[i][j] = d maps[i] / dx_(j+1)`."""
    return [[m.diff(j) for j in range(1, m.nvars + 1)] for m in maps]


def inverse_jacobian(phi: Chart) -> list[list[Poly]]:
    """The inverse of the forward Jacobian as functions of x, via the explicit inverse map."""
    forward = phi.require_forward()
    return [[entry.compose(forward) for entry in row] for row in jacobian(phi.require_inverse())]


def christoffel_from_chart(phi: Chart) -> Connection:
    """Gamma^b_{ij} = v^b_h d^2u^h / dx^i dx^j, with v the inverse Jacobian."""
    n = phi.n
    forward = phi.require_forward()
    v = inverse_jacobian(phi)
    hessians = [[[u.diff(i).diff(j) for j in range(1, n + 1)] for i in range(1, n + 1)] for u in forward]

    gamma = {}
    for b in range(1, n + 1):
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                value = Poly.zero(n)
                for h in range(n):
                    if hessians[h][i - 1][j - 1]:
                        value = value + v[b - 1][h] * hessians[h][i - 1][j - 1]
                gamma[(b, i, j)] = value
    return Connection(n, gamma)


def christoffel_from_inverse_jacobian(phi: Chart) -> Connection:
    """The same symbols written as Gamma^a_{cd} = -(dv^a_b/dx^d) J^b_c."""
    n = phi.n
    v = inverse_jacobian(phi)
    J = jacobian(phi.require_forward())

    gamma = {}
    for a in range(1, n + 1):
        for c in range(1, n + 1):
            for d in range(1, n + 1):
                value = Poly.zero(n)
                for b in range(n):
                    value = value - v[a - 1][b].diff(d) * J[b][c - 1]
                gamma[(a, c, d)] = value
    return Connection(n, gamma)


def covariant_derivative_form(conn: Connection, a: DiffForm) -> list[DiffForm]:
    """
    Components `nabla_j a` for j = 1..n, using `nabla_j dx^k = -Gamma^k_{ji} dx^i` in every slot.
    """
    if conn.n != a.n:
        raise DimensionMismatch(f"Connection on R^{conn.n}, form on R^{a.n}")
    n = a.n
    components = []
    for j in range(1, n + 1):
        terms = []
        for index, coefficient in a.coeffs.items():
            terms.append((index, coefficient.diff(j)))
            for h, slot in enumerate(index):
                for i in range(1, n + 1):
                    g = conn[(slot, j, i)]
                    if g:
                        terms.append((index[:h] + (i,) + index[h + 1:], -(g * coefficient)))
        components.append(DiffForm.from_terms(n, a.degree, terms))
    return components


def covariant_derivative_multivector(conn: Connection, V: MultiVector) -> list[MultiVector]:
    """Components `nabla_j V`, using `nabla_j d_k = Gamma^i_{jk} d_i` in every slot."""
    if conn.n != V.n:
        raise DimensionMismatch(f"Connection on R^{conn.n}, multivector on R^{V.n}")
    n = V.n
    components = []
    for j in range(1, n + 1):
        terms = []
        for index, coefficient in V.coeffs.items():
            terms.append((index, coefficient.diff(j)))
            for h, slot in enumerate(index):
                for i in range(1, n + 1):
                    g = conn[(i, j, slot)]
                    if g:
                        terms.append((index[:h] + (i,) + index[h + 1:], g * coefficient))
        components.append(MultiVector.from_terms(n, V.degree, terms))
    return components
