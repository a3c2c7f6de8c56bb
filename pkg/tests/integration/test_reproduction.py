"""
End-to-end checks of the published numbers: per-N optima, the QFI sum rule,
CFI saturation, resolution thresholds and optimal splits.
"""

import math

import numpy as np
import pytest

from squeezed_fisher.fisher import (
    component_cfi,
    finite_resolution_qfi,
    ideal_qfi,
    optimize_split,
    retained_ratio_limit,
)
from squeezed_fisher.nphoton_analysis import (
    beam_splitter_distribution,
    component_qfi,
    scan_optimal_ratio,
)
from squeezed_fisher.states import InterferometerInput


@pytest.mark.parametrize(
    "n, x_opt, x_fi, fidelity, qfi_ratio",
    [
        (5, 2.016, 1.962, 0.941, 0.945),
        (6, 2.544, 2.488, 0.924, 0.933),
        (7, 2.961, 2.856, 0.924, 0.938),
        (8, 3.444, 3.323, 0.920, 0.939),
        (9, 3.908, 3.752, 0.920, 0.943),
        (10, 4.390, 4.213, 0.920, 0.946),
        (100, 49.405, 49.103, 0.941, 0.995),
    ],
)
def test_optimal_ratios(n, x_opt, x_fi, fidelity, qfi_ratio):
    result = scan_optimal_ratio(n)
    assert result.x_opt_fidelity == pytest.approx(x_opt, abs=1.5e-3)
    assert result.x_opt_fisher == pytest.approx(x_fi, abs=1.5e-3)
    assert result.fidelity_at_opt == pytest.approx(fidelity, abs=1e-3)
    assert result.qfi_at_opt / n**2 == pytest.approx(qfi_ratio, abs=1e-3)


@pytest.mark.parametrize("n", [6, 20, 50, 100])
def test_fidelity_plateau(n):
    result = scan_optimal_ratio(n)
    assert 0.92 <= result.fidelity_at_opt <= 0.95
    assert result.qfi_at_opt >= 0.93 * n**2


@pytest.mark.parametrize("n", range(1, 31))
def test_cfi_saturates_qfi(n):
    xs = [0.5, 1.0, 2.0]
    if n >= 2:
        xs.append(scan_optimal_ratio(n).x_opt_fisher)
    for x in xs:
        qfi = component_qfi(n, x, method="amplitudes")
        for phi in np.linspace(0.1, math.pi - 0.1, 9):
            assert component_cfi(n, x, phi) == pytest.approx(qfi, rel=1e-8)


@pytest.mark.parametrize("n_bar", range(1, 11))
def test_sum_rule(n_bar):
    inp = InterferometerInput.balanced(float(n_bar))
    report = finite_resolution_qfi(inp, math.inf, tail=1e-12)
    expected = inp.n_a * math.exp(2 * inp.xi_mag) + math.sinh(inp.xi_mag) ** 2
    assert report.total_qfi == pytest.approx(expected, rel=1e-6)
    assert report.ideal_qfi_closed_form == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n_bar", [2.0, 5.0, 10.0])
def test_weighted_qfi_peak(n_bar):
    report = finite_resolution_qfi(InterferometerInput.balanced(n_bar), math.inf)
    weighted = report.per_n[:, 3]
    peak = int(np.argmax(weighted))
    assert n_bar / 2 <= peak <= 2 * n_bar
    assert n_bar / 4 <= weighted[peak] <= n_bar


def test_distribution_properties():
    for n, x in [(12, 4.0), (40, 10.0), (41, 3.3)]:
        dist = beam_splitter_distribution(n, x)
        assert dist.probs.sum() == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(dist.probs, dist.probs[::-1], atol=1e-10)


def optimal_split_ratio(n_bar, n_res):
    alpha_sq, ideal = optimize_split(n_bar, math.inf)
    inp = InterferometerInput.from_split(n_bar, alpha_sq)
    return finite_resolution_qfi(inp, n_res).total_qfi / ideal


def test_resolution_threshold_large_n_bar():
    assert optimal_split_ratio(20.0, 100) >= 0.96


@pytest.mark.parametrize(
    "n_bar, expected", [(2.0, 0.908), (5.0, 0.948), (10.0, 0.960), (20.0, 0.966)]
)
def test_resolution_ratio_at_five_n_bar(n_bar, expected):
    ratio = optimal_split_ratio(n_bar, round(5 * n_bar))
    assert ratio == pytest.approx(expected, abs=5e-3)
    balanced = InterferometerInput.balanced(n_bar)
    balanced_ratio = (
        finite_resolution_qfi(balanced, round(5 * n_bar)).total_qfi / ideal_qfi(balanced)
    )
    assert 0.85 < balanced_ratio < ratio < 1


@pytest.mark.parametrize("x", [2.0, 3.0, 4.0, 5.0, 6.0, 8.0])
def test_asymptotic_ratio_agrees(x):
    n_bar = 20.0
    n_res = round(x * n_bar)
    numeric = optimal_split_ratio(n_bar, n_res)
    assert numeric == pytest.approx(retained_ratio_limit(n_res / n_bar), abs=0.025)


def test_optimal_split_ideal():
    alpha_sq, qfi = optimize_split(5.0, math.inf)
    assert 0.45 <= alpha_sq / 5.0 <= 0.60
    assert qfi == pytest.approx(5.0 * 6.5, rel=0.03)


@pytest.mark.slow
@pytest.mark.parametrize("multiple", [3, 5, 10])
def test_optimal_split_favours_coherent_light(multiple):
    alpha_sq, qfi = optimize_split(5.0, 5 * multiple)
    assert alpha_sq / 5.0 > 0.5
    assert qfi < optimize_split(5.0, math.inf)[1]
