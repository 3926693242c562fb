"""Conformal constant coefficients: the object is a function times an object with constant coefficients."""
import logging

from kernel.errors import VanishingError
from kernel.exterior import DiffForm, ExteriorObject, MultiVector, exterior_derivative, iota_pq, multi_indices, wedge
from kernel.linalg import fraction_free_solve

from .distributions import contraction_rank
from .engine import detect
from .rank import sample_points
from .reports import DetectConfig, DetectionReport, Evidence, Verdict


logger = logging.getLogger('analysis.detectors.conformal')


def _wedge_criterion(a: DiffForm, config: DetectConfig, evidence: Evidence) -> DetectionReport | None:
    """
    `a ^ da = 0` for nonvanishing 1-forms and 2-forms of rank 2. A nonzero `a ^ da` rules out
    conformal constancy in both cases. 2-forms of rank 4 or more go to the Lee form.
    """
    n = a.n
    if a.degree == 2:
        points = sample_points(n, config.samples, config.seed, config.coefficient_bound, config.base_point(n))
        if len({contraction_rank(a, point) for point in points}) != 1:
            evidence.add("conformal-wedge", "note", "Rank is not constant over the sample points; the wedge criterion does not apply")
            return None
        if not wedge(a, a).is_zero():
            return _lee_form(a, config, evidence)

    criterion = wedge(a, exterior_derivative(a))
    if criterion.is_zero():
        evidence.add("conformal-wedge", "theorem", "A nonvanishing 1-form or rank-2 form with omega ^ d(omega) = 0 is conformally constant")
        return evidence.report(Verdict.CONFORMAL_CONSTANT)

    evidence.add("conformal-wedge", "obstruction", "A conformally constant form of rank at most 2 satisfies omega ^ d(omega) = 0", criterion)
    return evidence.report(Verdict.NOT_CONSTANT)


def _lee_form(a: DiffForm, config: DetectConfig, evidence: Evidence) -> DetectionReport | None:
    """
    For rank at least 4, `d(a) = theta ^ a` has at most one solution. `a = h * a0` with `a0` closed
    forces `theta = d(log h)`, so `a` is conformally constant iff theta exists and is closed.
    """
    n = a.n
    triples = multi_indices(n, 3)
    columns = [wedge(DiffForm.basis(n, (i,)), a) for i in range(1, n + 1)]
    da = exterior_derivative(a)
    solution = fraction_free_solve(
        [[column.coefficient(J) for column in columns] for J in triples],
        [da.coefficient(J) for J in triples],
    )
    if solution is None:
        evidence.add("conformal-lee-form", "obstruction", "d(omega) = theta ^ omega has no solution theta", da)
        return evidence.report(Verdict.NOT_CONSTANT)

    numerators, denominator = solution
    N = DiffForm(n, 1, {(i,): F for i, F in enumerate(numerators, start=1)})
    theta = f"({N}) / ({denominator})"
    # theta = N / D is closed iff D dN - dD ^ N = 0
    curl = exterior_derivative(N) * denominator - wedge(exterior_derivative(DiffForm.function(denominator)), N)
    logger.debug(f"Lee form {theta}")
    if not curl.is_zero():
        evidence.add("conformal-lee-form", "obstruction", f"The Lee form {theta} is not closed", curl)
        return evidence.report(Verdict.NOT_CONSTANT)

    if denominator.eval(config.base_point(n)) == 0:
        evidence.add("conformal-lee-form", "note", f"The Lee form {theta} is closed but singular at the base point")
        return None
    evidence.add(
        "conformal-lee-form", "theorem",
        "A 2-form of constant rank at least 4 with a closed Lee form is conformally constant", theta,
    )
    return evidence.report(Verdict.CONFORMAL_CONSTANT)


def _factor_out(obj: ExteriorObject, config: DetectConfig, evidence: Evidence) -> DetectionReport | None:
    g = obj.content()
    primitive = obj.divide(g)
    # a chart supplied for obj does not apply to its primitive part unless g is constant
    sub_config = config if g.is_constant() else config.model_copy(update={"chart": None, "target": None})
    if primitive.vanishes_at(sub_config.base_point(obj.n)):
        evidence.add("conformal-factor", "note", f"The primitive part after removing {g} vanishes at the base point")
        return None

    result = detect(primitive, sub_config)
    logger.debug(f"Primitive part {primitive} after removing {g}: {result.verdict.value}")
    evidence.add("conformal-factor", "note", f"Content {g}, primitive part {primitive}: {result.verdict.value}")
    if result.verdict == Verdict.CONSTANT:
        evidence.extend(result)
        evidence.add("conformal-factor", "theorem", f"The object is {g} times an object with constant coefficients", primitive)
        return evidence.report(Verdict.CONFORMAL_CONSTANT, result.chart)
    return None


def _transfer(V: MultiVector, config: DetectConfig, evidence: Evidence) -> DetectionReport | None:
    """For n - q in {1, 2}: a conformally constant V has `w = iota(V, vol)` with `w ^ dw = h dh ^ w0 ^ w0`."""
    n, q = V.n, V.degree
    w = iota_pq(V, DiffForm.volume(n))
    criterion = wedge(w, exterior_derivative(w))

    if not criterion.is_zero():
        if n - q == 1 or wedge(w, w).is_zero():
            evidence.add(
                "conformal-transfer", "obstruction",
                "The dual form of a conformally constant multivector satisfies w ^ dw = 0", criterion,
            )
            return evidence.report(Verdict.NOT_CONSTANT)
        evidence.add("conformal-transfer", "note", "w ^ dw != 0 for a dual 2-form of rank 4 or more; not decisive", criterion)
        return None

    if q == n - 1 and not V.vanishes_at(config.base_point(n)):
        evidence.add(
            "conformal-transfer", "theorem",
            "A nonvanishing (n-1)-vector whose dual 1-form w satisfies w ^ dw = 0 is conformally constant", w,
        )
        return evidence.report(Verdict.CONFORMAL_CONSTANT)
    return None


def detect_conformal(obj: ExteriorObject, config: DetectConfig | None = None) -> DetectionReport:
    """
    Decide conformal constancy. Forms of degree 1 and 2 nonvanishing at the base point use the wedge
    criterion; every object then goes through the content factor-out, and (n-1)- and (n-2)-vectors
    through the dual form.

    :raises VanishingError: For the zero object.
    """
    config = config or DetectConfig()
    if obj.is_zero():
        raise VanishingError("Conformal constancy is not defined for the zero object")

    base = config.base_point(obj.n)
    evidence = Evidence()

    if isinstance(obj, DiffForm) and obj.degree in (1, 2) and not obj.vanishes_at(base):
        report = _wedge_criterion(obj, config, evidence)
        if report is not None:
            return report

    if obj.degree >= 1:
        report = _factor_out(obj, config, evidence)
        if report is not None:
            return report

    if isinstance(obj, MultiVector) and obj.n - obj.degree in (1, 2) and obj.degree >= 1:
        report = _transfer(obj, config, evidence)
        if report is not None:
            return report

    evidence.add("conformal-factor", "note", "No conformal criterion decided the object")
    return evidence.report(Verdict.INCONCLUSIVE)
