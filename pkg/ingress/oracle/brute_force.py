"""
Literal reference expansion of the Schouten-Nijenhuis bracket, used to cross-check the kernel.

Every monomial `F Dx^(i1..iq)` is split into the vector fields `d_i1, ..., d_i(q-1), F d_iq` and
`[X_1^..^X_q, Y_1^..^Y_r] = sum (-1)^(i+j) [X_i, Y_j] ^ X_1^..X_i^..^X_q ^ Y_1^..Y_j^..^Y_r`
is applied term by term.
"""
from kernel.exterior import MultiVector, wedge
from kernel.ratpoly import Poly


VectorField = dict[int, Poly]


def _factors(n: int, index: tuple[int, ...], coefficient: Poly) -> list[VectorField]:
    one = Poly.one(n)
    factors = [{k: one} for k in index]
    factors[-1] = {index[-1]: coefficient}
    return factors


def _lie(n: int, X: VectorField, Y: VectorField) -> VectorField:
    result: VectorField = {}
    for k in range(1, n + 1):
        value = Poly.zero(n)
        for i, a in X.items():
            if k in Y:
                value = value + a * Y[k].diff(i)
        for i, b in Y.items():
            if k in X:
                value = value - b * X[k].diff(i)
        if value:
            result[k] = value
    return result


def _as_multivector(n: int, X: VectorField) -> MultiVector:
    return MultiVector(n, 1, {(k,): value for k, value in X.items()})


def _wedge_all(n: int, fields: list[VectorField], start: MultiVector) -> MultiVector:
    result = start
    for X in fields:
        result = wedge(result, _as_multivector(n, X))
    return result


def brute_force_sn_bracket(A: MultiVector, B: MultiVector) -> MultiVector:
    n = A.n
    result = MultiVector.zero(n, A.degree + B.degree - 1)
    for I, F in A.coeffs.items():
        X = _factors(n, I, F)
        for J, G in B.coeffs.items():
            Y = _factors(n, J, G)
            for i in range(len(X)):
                for j in range(len(Y)):
                    bracket = _lie(n, X[i], Y[j])
                    if not bracket:
                        continue
                    rest = X[:i] + X[i + 1:] + Y[:j] + Y[j + 1:]
                    term = _wedge_all(n, rest, _as_multivector(n, bracket))
                    # 0-based positions: (-1)^((i+1)+(j+1)) == (-1)^(i+j)
                    result = result + (term if (i + j) % 2 == 0 else -term)
    return result
