"""Threshold-efficiency formulas and the exact symmetrization solution."""

import math
from fractions import Fraction
from itertools import product

import pytest

from lhvmodels.bounds import (
    eta_all_click,
    eta_dimension,
    eta_multiparty,
    eta_two_party,
    solve_symmetrization,
    solve_threshold_angle,
)
from lhvmodels.errors import DomainError


@pytest.mark.parametrize(
    "m_a, m_b, expected",
    [
        (2, 2, Fraction(2, 3)),
        (2, 3, Fraction(3, 5)),
        (3, 2, Fraction(3, 5)),
        (3, 3, Fraction(1, 2)),
        (2, 4, Fraction(4, 7)),
        (4, 4, Fraction(2, 5)),
        (1, 2, Fraction(1)),
    ],
)
def test_two_party_threshold_values(m_a, m_b, expected):
    value = eta_two_party(m_a, m_b)
    assert isinstance(value, Fraction)
    assert value == expected


@pytest.mark.parametrize("m_a, m_b", [(0, 2), (2, 0), (1, 1), (-3, 2)])
def test_two_party_threshold_rejects_degenerate(m_a, m_b):
    with pytest.raises(DomainError):
        eta_two_party(m_a, m_b)


def test_symmetrization_at_two_settings_each():
    sol = solve_symmetrization(2, 2)
    assert (sol.eta, sol.proceed_prob, sol.role_prob) == (
        Fraction(2, 3),
        Fraction(8, 9),
        Fraction(1, 2),
    )
    assert sol.residuals() == (0, 0, 0, 0)


def test_symmetrization_asymmetric_settings():
    sol = solve_symmetrization(2, 3)
    assert (sol.eta, sol.proceed_prob, sol.role_prob) == (
        Fraction(3, 5),
        Fraction(21, 25),
        Fraction(4, 7),
    )


@pytest.mark.parametrize("m_a, m_b", list(product(range(2, 7), repeat=2)))
def test_symmetrization_grid_is_exact(m_a, m_b):
    sol = solve_symmetrization(m_a, m_b)
    assert sol.eta == eta_two_party(m_a, m_b)
    assert all(res == 0 for res in sol.residuals())
    for value in (sol.eta, sol.proceed_prob, sol.role_prob):
        assert 0 <= value <= 1
    if m_a == m_b:
        assert sol.role_prob == Fraction(1, 2)


def test_multiparty_threshold_closed_form():
    for n in range(2, 101):
        assert eta_multiparty(n, 2) == Fraction(n, 2 * n - 1)
    assert eta_multiparty(3, 2) == Fraction(3, 5)
    assert eta_multiparty(2, 5) == Fraction(1, 3)


def test_multiparty_matches_two_party_symmetric_case():
    for m in range(2, 30):
        assert eta_multiparty(2, m) == eta_two_party(m, m)


def test_multiparty_threshold_decreases_with_settings():
    values = [eta_multiparty(4, m) for m in range(2, 20)]
    assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("n, m", [(1, 2), (0, 3), (2, 0)])
def test_multiparty_threshold_rejects_degenerate(n, m):
    with pytest.raises(DomainError):
        eta_multiparty(n, m)


def test_all_click_threshold_values():
    assert abs(eta_all_click(2, 2) - 0.707107) < 1e-6
    assert abs(eta_all_click(2, 4) - 0.5) < 1e-12
    assert abs(eta_all_click(3, 2) - 2 ** (-2 / 3)) < 1e-12


def test_all_click_requirement_is_weaker():
    """Reproducing only all-click statistics tolerates lower efficiency
    than never reproducing them at all would require -- the threshold for
    the all-click model always exceeds the full-statistics threshold."""
    for n, m in product(range(2, 8), range(2, 8)):
        assert eta_all_click(n, m) > float(eta_multiparty(n, m))


def test_two_party_ratio_property():
    for m in range(2, 101):
        ratio = eta_multiparty(2, m) * m
        assert ratio == Fraction(2 * m, m + 1)
        assert ratio <= 2


def test_threshold_angle_round_trip():
    for d, delta in [(2, math.pi / 6), (3, 0.3), (5, 1.2)]:
        s = math.sin(delta)
        eps = d * (s * s + 2 * s)
        if eps >= 2 * d:
            continue
        assert abs(solve_threshold_angle(d, eps) - delta) < 1e-9


def test_threshold_angle_rejects_out_of_range():
    with pytest.raises(DomainError):
        solve_threshold_angle(2, 0.0)
    with pytest.raises(DomainError):
        solve_threshold_angle(2, 4.0)
    with pytest.raises(DomainError):
        solve_threshold_angle(1, 0.5)


def test_dimension_bound_closed_form():
    assert abs(eta_dimension(2, 1.0) - (1 / 8) ** 2) < 1e-15
    assert abs(eta_dimension(3, 1.0) - (1 / 12) ** 4) < 1e-15


def test_dimension_exact_dominates_lower_bound():
    for d, eps in product((2, 3, 4), (0.25, 0.5, 1.0, 2.0)):
        exact = eta_dimension(d, eps, mode="exact_from_delta")
        assert exact >= eta_dimension(d, eps, mode="lower_bound")


def test_dimension_exact_value_at_pi_over_six():
    """sin(pi/6) = 1/2 gives Q = 1/4 and eta = 2Q/(1+Q) = 2/5 for d = 2."""
    s = 0.5
    eps = 2 * (s * s + 2 * s)
    assert abs(eta_dimension(2, eps, mode="exact_from_delta") - 0.4) < 1e-9


def test_dimension_bound_rejects_bad_mode():
    with pytest.raises(DomainError):
        eta_dimension(2, 1.0, mode="nope")
