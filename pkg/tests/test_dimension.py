"""Dimension-dependent approximate model: parameters, single-draw
responses, and the vectorized Monte Carlo report."""

import math

import numpy as np
import pytest

from lhvmodels.dimension import (
    DimensionModelParams,
    alice_respond,
    bob_respond,
    run_dimension_model,
    symmetrized_efficiency,
)
from lhvmodels.errors import DomainError, ZeroFiringError
from lhvmodels.presets import computational_povm, random_povm
from lhvmodels.quantum import NO_CLICK, refine_to_rank_one


def test_params_derived_quantities():
    params = DimensionModelParams(2, math.pi / 6)
    assert params.fire_prob == pytest.approx(0.25)
    assert params.epsilon == pytest.approx(2.5)
    assert params.eta == pytest.approx(0.4)
    assert params.efficiency_lower_bound == pytest.approx((2.5 / 8) ** 2)


def test_params_bound_vanishes_outside_regime():
    # at delta = pi/2 the error scale reaches 3d >= 2d: no closed-form bound
    assert DimensionModelParams(3, math.pi / 2).efficiency_lower_bound is None


@pytest.mark.parametrize("d, delta", [(1, 0.5), (2, 0.0), (2, 2.0)])
def test_params_rejects_bad_arguments(d, delta):
    with pytest.raises(DomainError):
        DimensionModelParams(d, delta)


def test_symmetrized_efficiency_solves_matching_conditions():
    assert symmetrized_efficiency(0.25) == pytest.approx(0.4)
    for q in (0.01, 0.25, 0.5, 0.9):
        eta = symmetrized_efficiency(q)
        proceed = 1 - (1 - eta) ** 2
        assert eta**2 == pytest.approx(proceed * q, abs=1e-12)
        assert eta * (1 - eta) == pytest.approx(
            proceed * (1 - q) / 2, abs=1e-12
        )
    with pytest.raises(DomainError):
        symmetrized_efficiency(0.0)
    with pytest.raises(DomainError):
        symmetrized_efficiency(1.0)


def test_alice_always_fires_at_right_angle(rng):
    elements = refine_to_rank_one(computational_povm(2))
    phi = np.array([0.6, 0.8], dtype=complex)
    outcomes = {
        alice_respond(phi, elements, math.pi / 2, rng) for _ in range(100)
    }
    assert NO_CLICK not in outcomes


def test_alice_threshold_gates_mismatched_directions(rng):
    elements = refine_to_rank_one(computational_povm(2))
    phi = np.array([1.0, 0.0], dtype=complex)
    outcomes = [alice_respond(phi, elements, 0.01, rng) for _ in range(200)]
    assert set(outcomes) == {0, NO_CLICK}  # outcome 1 needs overlap ~ 1


def test_bob_answers_from_conjugated_overlap(rng):
    elements = refine_to_rank_one(computational_povm(3))
    phi = np.array([0.0, 1.0, 0.0], dtype=complex)
    draws = {bob_respond(phi, elements, rng) for _ in range(50)}
    assert draws == {1}


def test_bob_distribution_follows_weights(rng):
    elements = refine_to_rank_one(computational_povm(2))
    phi = np.array([0.8, 0.6], dtype=complex)  # real: conjugation-free
    n = 4000
    draws = [bob_respond(phi, elements, rng) for _ in range(n)]
    p_hat = draws.count(0) / n
    sigma = math.sqrt(0.64 * 0.36 / n)
    assert abs(p_hat - 0.64) < 4 * sigma


def test_monte_carlo_report_passes_for_qubits(rng):
    povm = computational_povm(2)
    report = run_dimension_model(2, math.pi / 6, povm, povm, 30_000, rng)
    assert report.passed
    assert report.q_passed and report.eta_above_bound
    assert abs(report.q_hat - 0.25) < 3 * report.q_sigma
    assert report.eta == pytest.approx(0.4)
    assert len(report.cells) == 4
    assert {c.passed for c in report.cells} == {True}
    for check in report.bob_marginal:
        assert check.target == pytest.approx(0.5)
        assert check.passed
    # diagnostic-only conditional marginal: entries but no verdicts
    assert len(report.bob_marginal_given_fire) == 2


def test_monte_carlo_with_refined_random_povms(rng):
    x_povm = random_povm(3, 4, rng)
    y_povm = random_povm(3, 4, rng)
    report = run_dimension_model(3, math.pi / 4, x_povm, y_povm, 40_000, rng)
    assert report.passed, [c.to_dict() for c in report.cells if not c.passed]
    assert len(report.cells) == 16
    assert report.n_fired > 0


def test_monte_carlo_is_seed_reproducible():
    povm = computational_povm(2)
    a = run_dimension_model(
        2, 0.7, povm, povm, 5_000, np.random.default_rng(99)
    )
    b = run_dimension_model(
        2, 0.7, povm, povm, 5_000, np.random.default_rng(99)
    )
    assert a.q_hat == b.q_hat
    assert [c.empirical for c in a.cells] == [c.empirical for c in b.cells]


def test_monte_carlo_rejects_dimension_mismatch(rng):
    with pytest.raises(DomainError):
        run_dimension_model(
            3, 0.5, computational_povm(2), computational_povm(2), 100, rng
        )
    with pytest.raises(DomainError):
        run_dimension_model(
            2, 0.5, computational_povm(2), computational_povm(2), 0, rng
        )


def test_monte_carlo_raises_when_nothing_fires(rng):
    povm = computational_povm(2)
    with pytest.raises(ZeroFiringError):
        run_dimension_model(2, 1e-9, povm, povm, 200, rng)
