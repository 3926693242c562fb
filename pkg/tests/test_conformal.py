from fractions import Fraction

import pytest

from analysis.detectors.conformal import detect_conformal
from analysis.detectors.reports import DetectConfig, Verdict
from ingress.expressions.parser import parse_object
from kernel.errors import VanishingError
from kernel.exterior import DiffForm, MultiVector


def rules(report):
    return [reason.rule for reason in report.reasons]


def test_conformal_1form():
    report = detect_conformal(parse_object("(1 + x1)*dx[2]", 2))
    assert report.verdict == Verdict.CONFORMAL_CONSTANT
    assert report.exit_code == 0
    assert rules(report) == ["conformal-wedge"]


def test_contact_form_is_not_conformally_constant():
    report = detect_conformal(parse_object("dx[1] + x3*dx[2]", 3))
    assert report.verdict == Verdict.NOT_CONSTANT
    obstruction, = report.reasons
    assert obstruction.kind == "obstruction"
    assert obstruction.witness == "-dx[1,2,3]"


def test_conformal_symplectic_form():
    report = detect_conformal(parse_object("(1 + x1^2)*dx[1,2] + (1 + x1^2)*dx[3,4]", 4), DetectConfig(samples=2))
    assert report.verdict == Verdict.CONFORMAL_CONSTANT


def test_factor_out_of_a_bivector():
    report = detect_conformal(parse_object("x1*Dx[1,2]", 3))
    assert report.verdict == Verdict.CONFORMAL_CONSTANT
    assert rules(report)[-1] == "conformal-factor"
    assert report.reasons[-1].witness == "Dx[1,2]"
    assert report.is_auditable()


def test_factor_out_of_a_form_vanishing_at_the_base():
    a = parse_object("x3*dx[1,2] + x3*dx[1,4]", 4)
    report = detect_conformal(a)
    assert report.verdict == Verdict.CONFORMAL_CONSTANT


def test_factor_out_of_a_codegree_one_vector():
    report = detect_conformal(parse_object("(1 + x1^2 + x2^2)*Dx[1,2]", 3))
    assert report.verdict == Verdict.CONFORMAL_CONSTANT
    assert report.reasons[-1].witness == "Dx[1,2]"


def test_transfer_for_codegree_one_vectors():
    # coprime coefficients, dual 1-form x2 dx1 - x1 dx2 up to sign, so w ^ dw = 0
    V = parse_object("x2*Dx[2,3,4] + x1*Dx[1,3,4]", 4)
    report = detect_conformal(V, DetectConfig(point=(Fraction(1), Fraction(0), Fraction(0), Fraction(0)), samples=2))
    assert report.verdict == Verdict.CONFORMAL_CONSTANT
    assert rules(report)[-1] in ("conformal-factor", "conformal-transfer")


def test_transfer_obstruction():
    report = detect_conformal(parse_object("Dx[1,2] + x2*Dx[2,3]", 3))
    assert report.verdict == Verdict.NOT_CONSTANT
    assert rules(report)[-1] == "conformal-transfer"


def test_zero_object_is_rejected():
    with pytest.raises(VanishingError):
        detect_conformal(DiffForm.zero(3, 1))
    with pytest.raises(VanishingError):
        detect_conformal(MultiVector.zero(3, 2))


def test_point_selects_the_wedge_criterion():
    a = parse_object("x1*dx[2]", 2)
    report = detect_conformal(a, DetectConfig(point=(Fraction(1), Fraction(0))))
    assert rules(report) == ["conformal-wedge"]
    assert report.verdict == Verdict.CONFORMAL_CONSTANT


class TestRankFourForms:
    def test_symplectic_form_with_a_non_closed_lee_form(self):
        # d(a) = x3 dx[1,3,4], so theta = x3 / (1 + x1*x3) dx[1] with d(theta) != 0
        a = parse_object("dx[1,2] + (1 + x1*x3)*dx[3,4]", 4)
        report = detect_conformal(a, DetectConfig(samples=1))
        assert report.verdict == Verdict.NOT_CONSTANT
        assert rules(report) == ["conformal-lee-form"]
        assert report.reasons[0].kind == "obstruction"
        assert report.reasons[0].witness is not None

    def test_conformal_symplectic_form_uses_the_lee_form(self):
        a = parse_object("(1 + x1^2)*dx[1,2] + (1 + x1^2)*dx[3,4]", 4)
        report = detect_conformal(a, DetectConfig(samples=2))
        assert rules(report) == ["conformal-lee-form"]
        assert report.reasons[0].kind == "theorem"

    def test_closed_symplectic_form_has_a_zero_lee_form(self):
        report = detect_conformal(parse_object("dx[1,2] + dx[3,4]", 4), DetectConfig(samples=1))
        assert report.verdict == Verdict.CONFORMAL_CONSTANT
        assert report.reasons[0].witness.startswith("(0) / ")

    def test_closed_lee_form_in_six_variables(self):
        a = parse_object("(2 + x5)*dx[1,2] + (2 + x5)*dx[3,4] + (2 + x5)*dx[5,6]", 6)
        report = detect_conformal(a, DetectConfig(samples=1))
        assert report.verdict == Verdict.CONFORMAL_CONSTANT
        assert rules(report) == ["conformal-lee-form"]

    def test_rank_two_form_keeps_the_wedge_criterion(self):
        report = detect_conformal(parse_object("(1 + x3)*dx[1,2]", 4), DetectConfig(samples=1))
        assert report.verdict == Verdict.CONFORMAL_CONSTANT
        assert rules(report) == ["conformal-wedge"]
