import random
from itertools import combinations_with_replacement

from pydantic import BaseModel, ConfigDict

from kernel.exterior import Chart
from kernel.ratpoly import Poly


COEFFICIENT_RANGE = (-9, 9)


def random_coefficient(rng: random.Random, nonzero: bool = True) -> int:
    low, high = COEFFICIENT_RANGE
    while True:
        value = rng.randint(low, high)
        if value or not nonzero:
            return value


def random_poly(
    rng: random.Random,
    n: int,
    degree_bound: int,
    terms: int = 3,
    variables: list[int] | None = None,
    min_degree: int = 0,
) -> Poly:
    """A sparse polynomial in `variables` (all by default) with monomials of degree `min_degree..degree_bound`."""
    variables = variables if variables is not None else list(range(1, n + 1))
    monomials = []
    for degree in range(min_degree, degree_bound + 1):
        for combo in combinations_with_replacement(variables, degree):
            exponent = [0] * n
            for k in combo:
                exponent[k - 1] += 1
            monomials.append(tuple(exponent))
    if not monomials:
        return Poly.zero(n)

    chosen = rng.sample(monomials, min(terms, len(monomials)))
    return Poly(n, {exponent: random_coefficient(rng) for exponent in chosen})


class UnipotentChart(BaseModel):
    """A composition of shears `x_i -> x_i + g(x_others)`, each g vanishing at the origin."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int
    shears: tuple[tuple[int, Poly], ...] = ()

    def to_chart(self) -> Chart:
        return Chart.from_shears(self.n, self.shears)


def random_unipotent(n: int, degree_bound: int = 2, num_shears: int = 2, seed: int = 0) -> UnipotentChart:
    if n < 1 or degree_bound < 1 or num_shears < 0:
        raise ValueError(f"Invalid chart parameters n={n}, degree_bound={degree_bound}, num_shears={num_shears}")
    rng = random.Random(seed)
    shears = []
    if n == 1:
        return UnipotentChart(n=n)

    for _ in range(num_shears):
        target = rng.randint(1, n)
        others = [k for k in range(1, n + 1) if k != target]
        g = random_poly(rng, n, degree_bound, terms=rng.randint(1, 2), variables=others, min_degree=1)
        shears.append((target, g))
    return UnipotentChart(n=n, shears=tuple(shears))


def random_chart(n: int, degree_bound: int = 2, num_shears: int = 2, seed: int = 0) -> Chart:
    """A centred chart with an exact polynomial inverse, deterministic in `seed`."""
    return random_unipotent(n, degree_bound, num_shears, seed).to_chart()
