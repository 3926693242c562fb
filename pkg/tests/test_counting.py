import pytest

from analysis.detectors.counting import counting, predicted_first_order, predicted_second_order
from kernel.errors import DegreeError


def test_second_order_balance_in_seven_variables():
    record = counting(7, 3)
    assert record.rows_second_order == record.unknowns_v == 392
    assert "392 == 392" in record.render()


def test_first_order_in_eight_variables():
    assert counting(8, 4).comparisons()[0] == "first order: 560 > 512"
    assert counting(8, 3).comparisons()[0] == "first order: 448 < 512"
    assert predicted_first_order(8, 4) == ">="
    assert predicted_first_order(8, 3) == "<"


def test_unknown_counts():
    record = counting(5, 3)
    assert record.unknowns_gamma == 125
    assert record.unknowns_gamma_symmetric == 75
    assert record.rows_first_order == 50


@pytest.mark.parametrize("n", range(2, 11))
def test_agrees_with_the_table(n):
    for degree in range(1, n + 1):
        assert counting(n, degree).agrees_with_table(), (n, degree)


def test_outside_the_table():
    assert predicted_first_order(5, 1) is None
    assert predicted_second_order(6, 3) is None
    assert predicted_second_order(7, 3) == "=="
    assert predicted_second_order(9, 4) == ">="


def test_invalid_arguments():
    with pytest.raises(DegreeError):
        counting(3, 0)
    with pytest.raises(DegreeError):
        counting(3, 4)
    with pytest.raises(ValueError):
        counting(0, 1)
