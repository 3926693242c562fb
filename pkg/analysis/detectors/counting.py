"""Equation and unknown counts of the Christoffel systems, and how they compare."""
from math import comb
from typing import Literal

from pydantic import BaseModel, ConfigDict

from kernel.errors import DegreeError


Relation = Literal["<", "==", ">"]


def _relation(left: int, right: int) -> Relation:
    if left < right:
        return "<"
    if left > right:
        return ">"
    return "=="


def predicted_first_order(n: int, degree: int) -> Literal["<", ">="] | None:
    """
    The tabulated classification of `n C(n,p)` against `n^3`, or None outside the table
    (the first-order system for p in {0, 1, n-1, n} with n <= 8 is not tabulated).
    """
    if 2 <= n <= 7 and 2 <= degree <= n - 2:
        return "<"
    if n == 8 and degree in (2, 3, 5, 6):
        return "<"
    if n == 8 and degree == 4:
        return ">="
    if n >= 9 and n - 2 <= degree <= n:
        return "<"
    if n >= 9 and 3 <= degree <= n - 3:
        return ">="
    return None


def predicted_second_order(n: int, degree: int) -> Literal["==", ">="] | None:
    """`n C(n,p) + n C(n,2)` against `n^2 + n^3` for n >= 7 and 3 <= p <= n-3."""
    if n < 7 or not 3 <= degree <= n - 3:
        return None
    return "==" if n == 7 else ">="


class CountingRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    degree: int
    rows_first_order: int
    unknowns_gamma: int
    unknowns_gamma_symmetric: int
    rows_second_order: int
    unknowns_v: int
    nminus1_equations: int
    nminus1_unknowns: int
    joined_equations: int
    joined_unknowns: int

    @property
    def first_order(self) -> Relation:
        return _relation(self.rows_first_order, self.unknowns_gamma)

    @property
    def second_order(self) -> Relation:
        return _relation(self.rows_second_order, self.unknowns_v)

    def agrees_with_table(self) -> bool:
        """Whether both comparisons match the tabulated classifications wherever those apply."""
        first = predicted_first_order(self.n, self.degree)
        if first == "<" and self.first_order != "<":
            return False
        if first == ">=" and self.first_order == "<":
            return False

        second = predicted_second_order(self.n, self.degree)
        if second == "==" and self.second_order != "==":
            return False
        if second == ">=" and self.second_order == "<":
            return False
        return True

    def comparisons(self) -> list[str]:
        return [
            f"first order: {self.rows_first_order} {self.first_order} {self.unknowns_gamma}",
            f"second order: {self.rows_second_order} {self.second_order} {self.unknowns_v}",
        ]

    def render(self) -> str:
        lines = [
            f"n = {self.n}, degree = {self.degree}",
            f"first-order system: {self.rows_first_order} equations, {self.unknowns_gamma} unknowns Gamma "
            f"({self.unknowns_gamma_symmetric} torsion-free)",
            f"second-order system: {self.rows_second_order} equations, {self.unknowns_v} unknowns v, dv",
            f"{self.rows_second_order} {self.second_order} {self.unknowns_v}",
            f"{self.rows_first_order} {self.first_order} {self.unknowns_gamma}",
        ]
        if self.n >= 2:
            lines.append(
                f"(n-1)-vector system: {self.nminus1_equations} equations, {self.nminus1_unknowns} unknowns; "
                f"joined: {self.joined_equations} equations, {self.joined_unknowns} unknowns"
            )
        return "\n".join(lines)


def counting(n: int, degree: int) -> CountingRecord:
    if n < 1:
        raise ValueError(f"Dimension must be positive, got {n}")
    if not 1 <= degree <= n:
        raise DegreeError(f"Degree {degree} outside 1..{n}")

    return CountingRecord(
        n=n,
        degree=degree,
        rows_first_order=n * comb(n, degree),
        unknowns_gamma=n ** 3,
        unknowns_gamma_symmetric=n * n * (n + 1) // 2,
        rows_second_order=n * comb(n, degree) + n * comb(n, 2),
        unknowns_v=n ** 2 + n ** 3,
        nminus1_equations=n * n,
        nminus1_unknowns=n * n * (n + 1) // 2,
        joined_equations=n * n * (2 * n * n + 3 * n + 7) // 6,
        joined_unknowns=n * n * (n + 1) ** 2 // 2,
    )
