import logging
import random
from fractions import Fraction
from typing import Sequence

from kernel.linalg import augmented_rank, rank

from .reports import RankReport
from .systems import GammaSystem


logger = logging.getLogger('analysis.detectors.rank')

Point = tuple[Fraction, ...]


def random_point(rng: random.Random, n: int, bound: int) -> Point:
    return tuple(Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in range(n))


def sample_points(n: int, count: int, seed: int = 0, bound: int = 10, base: Sequence[Fraction] | None = None) -> list[Point]:
    """The base point (origin by default) followed by `count` seeded random rational points."""
    rng = random.Random(seed)
    base = tuple(Fraction(c) for c in base) if base is not None else (Fraction(0),) * n
    return [base] + [random_point(rng, n, bound) for _ in range(count)]


def rank_analysis(system: GammaSystem, points: Sequence[Sequence[Fraction]]) -> list[RankReport]:
    """Exact ranks of the coefficient and augmented matrices at each point."""
    if not points:
        raise ValueError("rank_analysis needs at least one point")

    reports = []
    for point in points:
        point = tuple(Fraction(c) for c in point)
        matrix, rhs = system.matrix_at(point)
        rank_M = rank(matrix, len(system.unknowns))
        rank_M_aug = augmented_rank(matrix, rhs)
        logger.debug(f"Rank at {point}: M={rank_M}, M'={rank_M_aug}")
        reports.append(RankReport(point=point, rank_M=rank_M, rank_M_aug=rank_M_aug, consistent=rank_M == rank_M_aug))
    return reports


def generic_inconsistency(reports: Sequence[RankReport]) -> bool:
    """Whether the generic ranks (maxima over the samples) already violate consistency."""
    return max(r.rank_M_aug for r in reports) > max(r.rank_M for r in reports)
