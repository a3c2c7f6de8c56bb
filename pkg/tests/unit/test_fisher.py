import math

import numpy as np
import pytest

from squeezed_fisher.errors import ComputationError, InvalidParameterError, PhaseMatchingError
from squeezed_fisher.fisher import (
    component_cfi,
    conditional_probabilities,
    finite_resolution_qfi,
    ideal_qfi,
    lost_qfi_asymptotic,
    lost_qfi_numeric,
    optimize_split,
    probability_derivative,
    retained_ratio_limit,
    rotated_distribution,
    split_qfi,
    total_cfi,
    weighted_component_qfi,
)
from squeezed_fisher.nphoton_analysis import beam_splitter_distribution, component_qfi
from squeezed_fisher.special_fn import wigner_d
from squeezed_fisher.states import InterferometerInput, generation_probability

PHASES = np.linspace(0.1, math.pi - 0.1, 9)


@pytest.mark.parametrize("n", [1, 4, 9])
@pytest.mark.parametrize("phi", [0.0, 0.4, 2.2])
def test_conditional_probabilities_normalized(n, phi):
    dist = conditional_probabilities(n, 1.3, phi)
    assert dist.probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert dist.context == "output"
    assert dist.phi == phi


def test_probability_derivative_matches_finite_difference():
    n, x, phi, h = 6, 2.0, 0.9, 1e-6
    _, derivative = probability_derivative(n, x, phi)
    upper = conditional_probabilities(n, x, phi + h).probs
    lower = conditional_probabilities(n, x, phi - h).probs
    np.testing.assert_allclose(derivative, (upper - lower) / (2 * h), atol=1e-7)


def test_rotated_distribution_about_y_matches_output():
    n, x, phi = 5, 1.7, 0.6
    rotated = rotated_distribution(n, x, phi, eta=math.pi / 2)
    np.testing.assert_allclose(
        rotated.probs, conditional_probabilities(n, x, phi).probs, atol=1e-12
    )
    about_x = rotated_distribution(n, x, phi, eta=0.0)
    assert about_x.probs.sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 5, 13, 30])
@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_cfi_equals_qfi(n, x):
    qfi = component_qfi(n, x, method="amplitudes")
    for phi in PHASES:
        assert component_cfi(n, x, phi) == pytest.approx(qfi, rel=1e-8)


def test_cfi_reference_values():
    assert component_cfi(4, math.sqrt(3), 0.3) == pytest.approx(0.933 * 16, rel=1e-3)
    values = [component_cfi(7, 2.856, phi) for phi in PHASES]
    np.testing.assert_allclose(values, values[0], rtol=1e-8)
    assert values[0] / 49 == pytest.approx(0.938, abs=1e-3)


def test_cfi_at_zero_phase_uses_limit():
    # at phi = 0 odd-parity outcomes have P = 0 exactly
    assert component_cfi(4, 1.0, 0.0) == pytest.approx(component_qfi(4, 1.0), rel=1e-10)
    assert component_cfi(0, 1.0, 0.5) == 0.0


def test_cfi_rejects_nan_phase():
    with pytest.raises(InvalidParameterError):
        component_cfi(3, 1.0, math.nan)


def test_ideal_qfi_closed_forms():
    inp = InterferometerInput.balanced(100.0)
    assert ideal_qfi(inp) == pytest.approx(100 * 101.5, rel=1e-4)
    coherent = InterferometerInput(alpha_mag=2.0, xi_mag=0.0)
    assert ideal_qfi(coherent) == pytest.approx(4.0)
    squeezed = InterferometerInput(alpha_mag=0.0, xi_mag=1.0)
    assert ideal_qfi(squeezed) == pytest.approx(math.sinh(1.0) ** 2)


def test_ideal_qfi_depends_on_phases():
    matched = InterferometerInput(alpha_mag=1.0, xi_mag=0.6)
    anti = InterferometerInput(alpha_mag=1.0, xi_mag=0.6, theta_b=math.pi)
    assert ideal_qfi(matched) == pytest.approx(math.exp(1.2) + math.sinh(0.6) ** 2)
    assert ideal_qfi(anti) == pytest.approx(math.exp(-1.2) + math.sinh(0.6) ** 2)


def test_sum_rule_small_input():
    inp = InterferometerInput.balanced(2.0)
    report = finite_resolution_qfi(inp, math.inf)
    assert report.total_qfi == pytest.approx(ideal_qfi(inp), rel=1e-6)
    assert report.lost_qfi_asymptotic is None


def test_weighted_component_matches_product():
    inp = InterferometerInput.from_split(3.0, 1.2)
    for n in range(1, 15):
        expected = generation_probability(inp, n) * component_qfi(n, inp.x)
        assert weighted_component_qfi(inp, n) == pytest.approx(expected, rel=1e-9)


def test_weighted_component_without_squeezing():
    inp = InterferometerInput(alpha_mag=1.5, xi_mag=0.0)
    for n in range(6):
        assert weighted_component_qfi(inp, n) == pytest.approx(
            n * generation_probability(inp, n)
        )


def test_finite_resolution_report():
    inp = InterferometerInput.balanced(4.0)
    report = finite_resolution_qfi(inp, 10)
    assert report.n_max == 10
    assert report.per_n.shape == (11, 4)
    assert report.per_n[0, 2] == 0.0
    assert report.total_qfi < report.ideal_qfi_closed_form
    assert report.lost_qfi_asymptotic > 0
    assert report.mean_photon_number == pytest.approx(4.0)

    data = report.to_dict()
    assert data["n_res"] == 10
    assert len(data["per_n"]) == 11
    assert finite_resolution_qfi(inp, math.inf).to_dict()["n_res"] == "inf"


def test_finite_resolution_is_monotone():
    inp = InterferometerInput.balanced(3.0)
    totals = [finite_resolution_qfi(inp, n_res).total_qfi for n_res in (0, 2, 5, 10, 20)]
    assert totals[0] == 0.0
    assert np.all(np.diff(totals) > 0)


def test_total_cfi_equals_finite_resolution_qfi():
    inp = InterferometerInput.balanced(2.0)
    expected = finite_resolution_qfi(inp, 12).total_qfi
    for phi in (0.3, math.pi / 4, 2.0):
        assert total_cfi(inp, phi, 12) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("n_res", [-1, 2.5, math.nan])
def test_bad_resolution(n_res):
    with pytest.raises(InvalidParameterError):
        finite_resolution_qfi(InterferometerInput.balanced(2.0), n_res)


def test_finite_resolution_needs_phase_matching():
    inp = InterferometerInput(alpha_mag=1.0, xi_mag=0.5, theta_b=1.0)
    with pytest.raises(PhaseMatchingError):
        finite_resolution_qfi(inp, 10)
    # the closed form takes any phases
    assert ideal_qfi(inp) > 0


def test_retained_ratio_limit():
    assert retained_ratio_limit(5.0) == pytest.approx(0.9707, abs=1e-4)
    assert retained_ratio_limit(0.5) == 0.0
    assert retained_ratio_limit(math.inf) == 1.0
    xs = np.linspace(0.5, 10, 40)
    assert np.all(np.diff([retained_ratio_limit(x) for x in xs]) > 0)
    with pytest.raises(InvalidParameterError):
        retained_ratio_limit(0.4)


def test_lost_qfi_asymptotic():
    assert lost_qfi_asymptotic(25, 5.0) == pytest.approx(retained_ratio_limit(5.0))
    losses = [lost_qfi_asymptotic(n_res, 5.0, (2.5, 2.5)) for n_res in (10, 20, 40)]
    assert all(loss > 0 for loss in losses)
    assert losses[0] > losses[1] > losses[2]
    with pytest.raises(InvalidParameterError):
        lost_qfi_asymptotic(10, 5.0, (5.0, 0.0))
    with pytest.raises(InvalidParameterError):
        lost_qfi_asymptotic(2, 5.0, (2.5, 2.5))


def test_lost_qfi_numeric():
    inp = InterferometerInput.balanced(3.0)
    lost = lost_qfi_numeric(inp, 9)
    assert lost == pytest.approx(ideal_qfi(inp) - finite_resolution_qfi(inp, 9).total_qfi)
    assert lost > 0


def test_split_qfi_edges():
    assert split_qfi(3.0, 3.0, math.inf) == pytest.approx(3.0)
    assert split_qfi(3.0, 0.0, math.inf) == pytest.approx(3.0)
    assert split_qfi(3.0, 1.5, 40) < split_qfi(3.0, 1.5, math.inf)


def test_cfi_detects_inconsistent_rotation(mocker):
    n, x, phi = 4, math.sqrt(3), 0.7
    d = wigner_d(n / 2, phi)
    entries = d.entries.copy()
    # a sign flip keeps P normalized but no longer commutes with K
    entries[2] *= -1
    mocker.patch("squeezed_fisher.fisher.wigner_d", return_value=mocker.Mock(entries=entries))
    with pytest.raises(ComputationError, match="CFI terms disagree"):
        component_cfi(n, x, phi)


@pytest.mark.parametrize("n", [4, 6, 9])
def test_zero_phase_support(n):
    dist = conditional_probabilities(n, 1.5, 0.0)
    mu = np.arange(n + 1) - n / 2
    on_grid = ((n / 2 - mu) % 2) == 0
    assert np.all(dist.probs[on_grid] > 0)
    assert np.all(dist.probs[~on_grid] == 0)


@pytest.mark.parametrize("n, x", [(4, 1.0), (7, 2.856), (12, 4.0)])
def test_rotation_about_x_is_the_beam_splitter(n, x):
    rotated = rotated_distribution(n, x, math.pi / 2, eta=0.0)
    np.testing.assert_allclose(
        rotated.probs, beam_splitter_distribution(n, x).probs, atol=1e-12
    )


@pytest.mark.parametrize("n_bar", [0.1, 0.5, 1.0])
def test_optimal_split_beats_classical_limit(n_bar):
    alpha_sq, qfi = optimize_split(n_bar, math.inf)
    assert 0 < alpha_sq < n_bar
    assert qfi >= n_bar
