import logging

from kernel.errors import DegreeError
from kernel.exterior import (
    DiffForm, ExteriorObject, MultiVector,
    exterior_derivative, iota_pq, schouten_bracket, wedge,
)

from .charts import (
    chart_from_codegree_one_form, chart_from_exact_1form, chart_from_volume_form, verify_chart,
)
from .distributions import contraction_rank
from .nminus1 import detect_vec_n_minus_1
from .rank import Point, generic_inconsistency, rank_analysis, sample_points
from .reports import DetectConfig, DetectionReport, Evidence, Verdict
from .systems import assemble_system


logger = logging.getLogger('analysis.detectors.engine')


def _format_point(point: Point) -> str:
    return "(" + ",".join(str(c) for c in point) + ")"


def _necessary_conditions(obj: ExteriorObject, evidence: Evidence) -> bool:
    """Closedness for forms, vanishing self-bracket for multivectors. False if an obstruction was found."""
    if isinstance(obj, DiffForm):
        differential = exterior_derivative(obj)
        if not differential.is_zero():
            evidence.add("closedness", "obstruction", "A form with constant coefficients is closed, but d(omega) != 0", differential)
            return False
        evidence.add("closedness", "screen", "d(omega) = 0")
        return True

    n, q = obj.n, obj.degree
    if 2 * q - 1 > n:
        evidence.add("bracket-auto-vanishing", "note", f"[V,V] has degree {2 * q - 1} > {n} and vanishes identically")
        return True
    bracket = schouten_bracket(obj, obj)
    if not bracket.is_zero():
        evidence.add("schouten-self-bracket", "obstruction", "A multivector with constant coefficients satisfies [V,V] = 0", bracket)
        return False
    evidence.add("schouten-self-bracket", "screen", "[V,V] = 0")
    return True


def _kernel_ranks(obj: ExteriorObject, points: list[Point], evidence: Evidence) -> list[int] | None:
    """Contraction ranks at the sample points, or None if the rank at the base is not generic."""
    ranks = [contraction_rank(obj, point) for point in points]
    generic = max(ranks)
    if ranks[0] < generic:
        where = points[ranks.index(generic)]
        distribution = "kernel distribution" if isinstance(obj, DiffForm) else "Pfaffian system"
        evidence.add(
            "kernel-rank", "obstruction",
            f"The {distribution} has non-constant rank near the base point",
            f"rank {ranks[0]} at {_format_point(points[0])}, rank {generic} at {_format_point(where)}",
        )
        return None
    evidence.add("kernel-rank", "screen", f"Contraction rank {ranks[0]} at the base point is generic over {len(points)} points")
    return ranks


def _form_rules(a: DiffForm, base: Point, ranks: list[int], evidence: Evidence) -> DetectionReport | None:
    n, p = a.n, a.degree

    if p == n:
        chart = chart_from_volume_form(a, base)
        evidence.add("volume-form", "theorem", "A top-degree form nonvanishing at the base point has constant coefficients")
        verification = verify_chart(a, chart, DiffForm.volume(n))
        if verification:
            evidence.add("chart-witness", "witness", "Form in the constructed chart", verification.expressed)
        return evidence.report(Verdict.CONSTANT, chart)

    if p == 1:
        chart, target = chart_from_exact_1form(a, base)
        evidence.add("exact-1form", "theorem", "A closed 1-form nonvanishing at the base point has constant coefficients")
        verification = verify_chart(a, chart, target)
        if verification:
            evidence.add("chart-witness", "witness", "Form in the constructed chart", verification.expressed)
        return evidence.report(Verdict.CONSTANT, chart)

    if p == n - 1:
        evidence.add("codegree-one-form", "theorem", "A closed (n-1)-form nonvanishing at the base point has constant coefficients")
        chart = None
        if len(a.coeffs) == 1:
            chart, target = chart_from_codegree_one_form(a, base)
            verification = verify_chart(a, chart, target)
            if verification:
                evidence.add("chart-witness", "witness", "Form in the constructed chart", verification.expressed)
            else:
                chart = None
        return evidence.report(Verdict.CONSTANT, chart)

    if p == 2 and len(set(ranks)) == 1:
        evidence.add(
            "darboux-2form", "theorem",
            f"A closed 2-form of constant rank {ranks[0]} has constant coefficients (Darboux)",
        )
        return evidence.report(Verdict.CONSTANT)

    return None


def _bivector_rule(V: MultiVector, ranks: list[int], evidence: Evidence) -> DetectionReport | None:
    n, r = V.n, ranks[0]
    if n % 2 == 0 and r == n:
        evidence.add("bivector-max-rank", "theorem", f"A bivector with [V,V] = 0 and rank {n} is symplectic, hence constant (Darboux)")
        return evidence.report(Verdict.CONSTANT)

    if n % 2 == 1 and r == n - 1:
        power = V
        for _ in range((n - 1) // 2 - 1):
            power = wedge(power, V)
        w = iota_pq(power, DiffForm.volume(n))
        integrability = wedge(w, exterior_derivative(w))
        if not integrability.is_zero():
            evidence.add(
                "bivector-max-rank", "obstruction",
                "The kernel covector w of a rank n-1 bivector with constant coefficients satisfies w ^ dw = 0",
                integrability,
            )
            return evidence.report(Verdict.NOT_CONSTANT)
        evidence.add(
            "bivector-max-rank", "theorem",
            f"A bivector with [V,V] = 0, rank {r} and integrable kernel has constant coefficients",
        )
        return evidence.report(Verdict.CONSTANT)

    return None


def _multivector_rules(V: MultiVector, base: Point, ranks: list[int], config: DetectConfig, evidence: Evidence) -> DetectionReport | None:
    n, q = V.n, V.degree

    if q == n:
        evidence.add("top-multivector", "theorem", "An n-vector field nonvanishing at the base point has constant coefficients")
        return evidence.report(Verdict.CONSTANT)

    if q == 1:
        evidence.add("flow-box", "theorem", "A vector field nonvanishing at the base point is straightened by the flow-box theorem")
        return evidence.report(Verdict.CONSTANT)

    if q == n - 1:
        result = detect_vec_n_minus_1(V, config.flat_derivation, base)
        if result.verdict != Verdict.INCONCLUSIVE:
            evidence.extend(result)
            return evidence.report(result.verdict, result.chart)
        evidence.extend(result)

    if q == 2:
        return _bivector_rule(V, ranks, evidence)

    return None


def _general_path(obj: ExteriorObject, points: list[Point], evidence: Evidence) -> DetectionReport:
    system = assemble_system(obj)
    logger.debug(f"Christoffel system of shape {system.shape}")
    reports = rank_analysis(system, points)
    evidence.rank_data.extend(reports)

    at_base = reports[0]
    if not at_base.consistent:
        evidence.add(
            "rank-consistency", "obstruction",
            "The Christoffel system is inconsistent at the base point, hence on a neighbourhood of it",
            f"rank M = {at_base.rank_M}, rank M' = {at_base.rank_M_aug} at {_format_point(at_base.point)}",
        )
        return evidence.report(Verdict.NOT_CONSTANT)

    if generic_inconsistency(reports):
        rank_M = max(r.rank_M for r in reports)
        rank_M_aug = max(r.rank_M_aug for r in reports)
        evidence.add(
            "rank-consistency", "obstruction",
            f"Generic ranks over {len(reports)} sample points are inconsistent (probabilistic certificate)",
            f"generic rank M = {rank_M}, generic rank M' = {rank_M_aug}",
        )
        return evidence.report(Verdict.NOT_CONSTANT)

    evidence.add(
        "rank-consistency", "note",
        "The Christoffel system is consistent at every sample point; flatness of a solution is not decided",
    )
    return evidence.report(Verdict.INCONCLUSIVE)


def detect(obj: ExteriorObject, config: DetectConfig | None = None) -> DetectionReport:
    """
    Decide whether a form or multivector field has constant coefficients near the base point.

    Necessary conditions and rank screens run first; a supplied chart is then verified exactly;
    the degree-special theorems follow, and the remaining cases go through the rank analysis of
    the Christoffel system.
    """
    config = config or DetectConfig()
    if not isinstance(obj, (DiffForm, MultiVector)):
        raise TypeError(f"Expected a form or multivector, got {type(obj).__name__}")
    n, degree = obj.n, obj.degree
    if not 1 <= degree <= n:
        raise DegreeError(f"Degree {degree} outside 1..{n}")

    base = config.base_point(n)
    evidence = Evidence()
    logger.debug(f"Detecting {obj.kind} of degree {degree} on R^{n} at {_format_point(base)}")

    if obj.is_zero():
        evidence.add("zero-object", "theorem", "The zero object has constant coefficients in every chart")
        return evidence.report(Verdict.CONSTANT)

    if not _necessary_conditions(obj, evidence):
        logger.debug("Necessary condition failed")
        return evidence.report(Verdict.NOT_CONSTANT)

    if obj.vanishes_at(base):
        evidence.add(
            "vanishing-at-base", "obstruction",
            "A nonzero object with constant coefficients does not vanish near the base point",
            f"{obj} vanishes at {_format_point(base)}",
        )
        return evidence.report(Verdict.NOT_CONSTANT)

    points = sample_points(n, config.samples, config.seed, config.coefficient_bound, base)
    ranks = _kernel_ranks(obj, points, evidence)
    if ranks is None:
        logger.debug("Kernel rank screen failed")
        return evidence.report(Verdict.NOT_CONSTANT)

    if config.chart is not None:
        verification = verify_chart(obj, config.chart, config.target)
        if verification:
            evidence.add("chart-witness", "witness", "Object in the supplied chart", verification.expressed)
            return evidence.report(Verdict.CONSTANT, config.chart)
        evidence.add("chart-witness", "note", "The supplied chart does not make the coefficients constant", verification.residual)

    if isinstance(obj, DiffForm):
        report = _form_rules(obj, base, ranks, evidence)
    else:
        report = _multivector_rules(obj, base, ranks, config, evidence)
    if report is not None:
        logger.debug(f"Decided by {report.reasons[-1].rule}")
        return report

    return _general_path(obj, points, evidence)


def screens_pass(obj: ExteriorObject, config: DetectConfig | None = None) -> bool:
    """
    Whether the necessary-condition screens (closedness or vanishing self-bracket, and rank
    consistency of the Christoffel system at every sample point) all pass.
    """
    config = config or DetectConfig()
    evidence = Evidence()
    if not _necessary_conditions(obj, evidence):
        return False
    if obj.is_zero():
        return True
    points = sample_points(obj.n, config.samples, config.seed, config.coefficient_bound, config.base_point(obj.n))
    return all(report.consistent for report in rank_analysis(assemble_system(obj), points))
