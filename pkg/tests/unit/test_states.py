import math

import numpy as np
import pytest

from squeezed_fisher.errors import (
    ComputationError,
    InvalidParameterError,
    PhaseMatchingError,
    TruncationError,
)
from squeezed_fisher.states import (
    InterferometerInput,
    coherent_amplitudes,
    component_amplitudes,
    generation_probability,
    log_poly_R,
    n_photon_component,
    photon_cutoff,
    photon_number_distribution,
    poly_R,
    squeezed_amplitudes,
)


def test_from_split():
    inp = InterferometerInput.from_split(5.0, 2.0)
    assert inp.n_a == pytest.approx(2.0)
    assert inp.n_b == pytest.approx(3.0)
    assert inp.n_bar == pytest.approx(5.0)
    assert inp.x == pytest.approx(2.0 / math.tanh(inp.xi_mag))


def test_no_squeezing_has_infinite_ratio():
    assert math.isinf(InterferometerInput(alpha_mag=1.0, xi_mag=0.0).x)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"alpha_mag": -1.0, "xi_mag": 0.5},
        {"alpha_mag": 1.0, "xi_mag": math.nan},
        {"alpha_mag": 1.0, "xi_mag": 0.5, "theta_a": math.inf},
    ],
)
def test_invalid_input(kwargs):
    with pytest.raises(InvalidParameterError):
        InterferometerInput(**kwargs)


def test_invalid_split():
    with pytest.raises(InvalidParameterError):
        InterferometerInput.from_split(2.0, 3.0)


@pytest.mark.parametrize(
    "theta_a, theta_b, matched",
    [
        (0.0, 0.0, True),
        (0.4, 0.8, True),
        (0.4, 0.8 + 2 * math.pi, True),
        (0.0, math.pi, False),
        (0.0, 0.1, False),
    ],
)
def test_phase_matching(theta_a, theta_b, matched):
    inp = InterferometerInput(alpha_mag=1.0, xi_mag=0.5, theta_a=theta_a, theta_b=theta_b)
    assert inp.is_phase_matched is matched
    if not matched:
        with pytest.raises(PhaseMatchingError):
            n_photon_component(inp, 3)


def test_coherent_amplitudes():
    c = coherent_amplitudes(1.0, 40)
    assert c[0] == pytest.approx(math.exp(-0.5), rel=1e-12)
    assert c[0] == pytest.approx(0.606531, abs=1e-6)
    assert np.sum(c**2) == pytest.approx(1.0, abs=1e-14)


def test_coherent_truncation():
    with pytest.raises(TruncationError):
        coherent_amplitudes(3.0, 5, tail=1e-6)
    # without a tail the truncated vector is returned as-is
    assert len(coherent_amplitudes(3.0, 5)) == 6


def test_squeezed_amplitudes():
    s = squeezed_amplitudes(0.5, 200)
    assert s[2] == pytest.approx(-0.3077, abs=1e-4)
    assert np.all(s[1::2] == 0)
    assert np.sum(s**2) == pytest.approx(1.0, abs=1e-12)
    mean = np.sum(np.arange(201) * s**2)
    assert mean == pytest.approx(math.sinh(0.5) ** 2, rel=1e-10)


def test_squeezed_truncation():
    with pytest.raises(TruncationError):
        squeezed_amplitudes(1.5, 10, tail=1e-6)


@pytest.mark.parametrize(
    "n, expected",
    [
        (0, lambda x: 1.0),
        (1, lambda x: 2 * x),
        (2, lambda x: 2 * x**2 + 2),
        (3, lambda x: 4 * x**3 / 3 + 4 * x),
    ],
)
@pytest.mark.parametrize("x", [0.0, 0.5, 1.7])
def test_poly_R_low_orders(n, expected, x):
    assert poly_R(n, x) == pytest.approx(expected(x), rel=1e-13, abs=1e-300)


def test_poly_R_odd_at_zero():
    assert poly_R(5, 0.0) == 0.0
    assert log_poly_R(5, 0.0) == -math.inf


def test_poly_R_overflow():
    assert math.isfinite(log_poly_R(2000, 500.0))
    with pytest.raises(ComputationError):
        poly_R(2000, 500.0)


@pytest.mark.parametrize(
    "inp",
    [
        InterferometerInput.from_split(3.0, 1.5),
        InterferometerInput.from_split(6.0, 1.0),
        InterferometerInput(alpha_mag=0.0, xi_mag=0.8),
    ],
)
def test_generation_probability_matches_convolution(inp):
    n_max = 60
    direct = np.array([generation_probability(inp, n) for n in range(n_max + 1)])
    np.testing.assert_allclose(
        direct, photon_number_distribution(inp, n_max), rtol=1e-10, atol=1e-300
    )


def test_generation_probability_poisson_without_squeezing():
    inp = InterferometerInput(alpha_mag=2.0, xi_mag=0.0)
    for n in range(10):
        expected = math.exp(-4.0) * 4.0**n / math.factorial(n)
        assert generation_probability(inp, n) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n_bar", [0.5, 2.0, 10.0])
def test_photon_cutoff_tail(n_bar):
    inp = InterferometerInput.balanced(n_bar)
    n_max = photon_cutoff(inp, 1e-12)
    total = sum(generation_probability(inp, n) for n in range(n_max + 1))
    assert 1 - total < 1e-12
    # a looser tail never needs a larger cutoff
    assert photon_cutoff(inp, 1e-4) <= n_max


def test_photon_cutoff_bad_tail():
    with pytest.raises(InvalidParameterError):
        photon_cutoff(InterferometerInput.balanced(2.0), 0.0)


@pytest.mark.parametrize("n", [1, 4, 7, 20])
def test_component_amplitudes_match_post_selection(n):
    inp = InterferometerInput.from_split(4.0, 2.5)
    component = n_photon_component(inp, n)
    assert not component.negligible
    np.testing.assert_allclose(component.amplitudes, component_amplitudes(n, inp.x), atol=1e-12)
    assert np.sum(component.amplitudes**2) == pytest.approx(1.0, abs=1e-12)
    assert component.generation_probability == pytest.approx(generation_probability(inp, n))


def test_component_amplitudes_signs():
    a = component_amplitudes(6, 2.0)
    assert np.all(np.sign(a) == [1, -1, 1, -1])


def test_component_amplitudes_n2():
    np.testing.assert_allclose(component_amplitudes(2, 1.0), [1 / math.sqrt(2), -1 / math.sqrt(2)])


def test_component_amplitudes_without_squeezing():
    np.testing.assert_array_equal(component_amplitudes(5, math.inf), [1.0, 0.0, 0.0])


def test_component_amplitudes_odd_at_zero():
    with pytest.raises(InvalidParameterError):
        component_amplitudes(3, 0.0)
    np.testing.assert_allclose(component_amplitudes(4, 0.0), [0.0, 0.0, 1.0], atol=0)


def test_negligible_component():
    inp = InterferometerInput.balanced(1.0)
    component = n_photon_component(inp, 2000)
    assert component.negligible
    assert component.amplitudes is None


def test_odd_component_without_coherent_light():
    inp = InterferometerInput(alpha_mag=0.0, xi_mag=0.7)
    assert n_photon_component(inp, 3).negligible
    assert generation_probability(inp, 3) == 0.0
