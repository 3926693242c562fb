"""Kernel distributions of forms (vectors killed by contraction) and Pfaffian systems of multivectors."""
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from kernel.exterior import DiffForm, ExteriorObject, MultiVector, interior_form_vec, interior_vec_form, multi_indices
from kernel.linalg import null_space, rank


@dataclass(frozen=True)
class KernelBasis:
    point: tuple[Fraction, ...]
    rank: int
    basis: tuple[ExteriorObject, ...]


def contraction_matrix(obj: ExteriorObject, point: Sequence[Fraction]) -> list[list[Fraction]]:
    """Column k holds the coefficients of the contraction of the k-th coordinate (co)vector into `obj`."""
    n = obj.n
    if isinstance(obj, DiffForm):
        contractions = [interior_vec_form(MultiVector.basis(n, (k,)), obj) for k in range(1, n + 1)]
    else:
        contractions = [interior_form_vec(DiffForm.basis(n, (k,)), obj) for k in range(1, n + 1)]

    rows = []
    for index in multi_indices(n, obj.degree - 1):
        rows.append([c.coefficient(index).eval(point) for c in contractions])
    return rows


def contraction_rank(obj: ExteriorObject, point: Sequence[Fraction]) -> int:
    return rank(contraction_matrix(obj, point), obj.n)


def kernel_system(obj: ExteriorObject, point: Sequence[Fraction]) -> KernelBasis:
    """
    Exact basis at `point` of the vectors X with i_X(obj) = 0 (forms) or the covectors w with
    i_w(obj) = 0 (multivectors). Basis elements have constant coefficients.
    """
    if obj.degree < 1:
        raise ValueError("Kernel systems need an object of degree at least 1")
    n = obj.n
    point = tuple(Fraction(c) for c in point)
    vectors = null_space(contraction_matrix(obj, point), n)

    dual = MultiVector if isinstance(obj, DiffForm) else DiffForm
    basis = tuple(
        dual(n, 1, {(k,): value for k, value in enumerate(vector, start=1) if value})
        for vector in vectors
    )
    return KernelBasis(point, n - len(vectors), basis)
