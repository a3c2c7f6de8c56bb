"""
Classical and quantum Fisher information of photon counting at the output.

n_res bounds the total detected photon number N = N_1 + N_2, so each of the
two detectors resolves up to n_res / 2 photons. An infinite n_res is summed
up to the certified cutoff from `states.photon_cutoff`.
"""

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ComputationError, InvalidParameterError
from .nphoton_analysis import (
    CountDistribution,
    component_qfi,
    golden_maximize,
    state_vector,
)
from .special_fn import MAX_TWICE_J, apply_jy_generator, erf_pair, wigner_d
from .states import (
    TAIL_TOLERANCE,
    InterferometerInput,
    generation_probability,
    log_coherent_magnitudes,
    log_squeezed_magnitudes,
    photon_cutoff,
)

logger = logging.getLogger(__name__)

# Outcomes below this probability use the limit form of (dP)^2 / P
ZERO_PROBABILITY = 1e-14
UNITARITY_TOLERANCE = 1e-10
CROSS_CHECK_RTOL = 1e-9
CFI_RTOL = 1e-6
CFI_ATOL = 1e-9
SPLIT_SCAN_POINTS = 65
SPLIT_TOLERANCE = 1e-4


@dataclass(frozen=True, eq=False)
class FisherReport:
    """
    Finite-resolution QFI of one input, broken down by photon number.

    `per_n` rows are (N, G_N, F_{Q,N}, G_N F_{Q,N}).
    """

    n_res: float
    n_max: int
    per_n: np.ndarray
    total_qfi: float
    ideal_qfi_closed_form: float
    mean_photon_number: float
    lost_qfi_asymptotic: float | None = None
    resolution_convention: str = field(default="N1 + N2 <= n_res")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["per_n"] = self.per_n.tolist()
        out["n_res"] = "inf" if math.isinf(self.n_res) else int(self.n_res)
        return out


def _check_phi(phi: float):
    if not math.isfinite(phi):
        raise InvalidParameterError(f"phi must be finite, got {phi}")


def rotated_distribution(
    n: int, x: float, phi: float, eta: float, max_twice_j: int = MAX_TWICE_J
) -> CountDistribution:
    """
    Outcome distribution of exp(-i phi J_eta) |psi~_N> with
    J_eta = J_x cos(eta) + J_y sin(eta).

    The amplitude of mu is sum_k e^{-2ik eta} |a_k| d_{mu, J-2k}(phi).
    """
    _check_phi(phi)
    d = wigner_d(n / 2, phi, max_twice_j=max_twice_j)
    magnitudes = state_vector(n, x, signed=False)
    k = (n - np.arange(n + 1)) / 2
    amplitudes = d.entries @ (magnitudes * np.exp(-2j * k * eta))
    probs = np.abs(amplitudes) ** 2
    probs.setflags(write=False)
    return CountDistribution(twice_j=n, probs=probs, context="rotated", phi=phi)


def _rotated_amplitudes(n: int, x: float, phi: float, max_twice_j: int):
    d = wigner_d(n / 2, phi, max_twice_j=max_twice_j)
    amplitudes = d.entries @ state_vector(n, x)
    return amplitudes, apply_jy_generator(amplitudes)


def conditional_probabilities(
    n: int, x: float, phi: float, max_twice_j: int = MAX_TWICE_J
) -> CountDistribution:
    """
    P_N(mu|phi) = <J,mu| exp(-i phi J_y) |psi~_N>^2
    """
    _check_phi(phi)
    amplitudes, _ = _rotated_amplitudes(n, x, phi, max_twice_j)
    probs = amplitudes**2
    probs.setflags(write=False)
    return CountDistribution(twice_j=n, probs=probs, context="output", phi=phi)


def probability_derivative(
    n: int, x: float, phi: float, max_twice_j: int = MAX_TWICE_J
) -> tuple[np.ndarray, np.ndarray]:
    """
    (P_N(mu|phi), dP_N/dphi), the derivative taken analytically as
    2 amp (K amp) with K = -i J_y.
    """
    _check_phi(phi)
    amplitudes, derivative = _rotated_amplitudes(n, x, phi, max_twice_j)
    return amplitudes**2, 2 * amplitudes * derivative


def component_cfi(n: int, x: float, phi: float, max_twice_j: int = MAX_TWICE_J) -> float:
    """
    Classical Fisher information F_N(phi) of counting photons on N-photon input.

    Each outcome contributes (dP)^2 / P. Where P vanishes that ratio is 0/0
    and its limit 4 (K amp)^2 is used instead.

    The ratio form takes K (d psi) and the limit form d (K psi). The rotation
    commutes with its generator, so both forms must agree on every resolved
    outcome; a mismatch raises ComputationError.
    """
    _check_phi(phi)
    if n == 0:
        return 0.0
    d = wigner_d(n / 2, phi, max_twice_j=max_twice_j)
    state = state_vector(n, x)
    amplitudes = d.entries @ state
    probs = amplitudes**2
    if abs(probs.sum() - 1) > UNITARITY_TOLERANCE:
        raise ComputationError(
            f"P_N(mu|phi) for N={n}, x={x}, phi={phi} sums to {probs.sum()!r}"
        )
    d_probs = 2 * amplitudes * apply_jy_generator(amplitudes)
    limit = 4 * (d.entries @ apply_jy_generator(state)) ** 2
    resolved = probs >= ZERO_PROBABILITY
    ratio = d_probs**2 / np.where(resolved, probs, 1.0)
    mismatch = resolved & ~np.isclose(ratio, limit, rtol=CFI_RTOL, atol=CFI_ATOL * n**2)
    if mismatch.any():
        worst = int(np.argmax(np.where(mismatch, np.abs(ratio - limit), -1.0)))
        raise ComputationError(
            f"CFI terms disagree for N={n}, x={x}, phi={phi} at mu={worst - n / 2}: "
            f"ratio form {ratio[worst]!r}, limit form {limit[worst]!r}"
        )
    return float(np.where(resolved, ratio, limit).sum())


def _component_inputs(inp: InterferometerInput, n_res: float, tail: float):
    inp.require_phase_matching()
    if not (n_res >= 0):
        raise InvalidParameterError(f"n_res must be >= 0 or inf, got {n_res}")
    if math.isinf(n_res):
        return photon_cutoff(inp, tail)
    if n_res != int(n_res):
        raise InvalidParameterError(f"n_res must be an integer or inf, got {n_res}")
    return int(n_res)


def total_cfi(
    inp: InterferometerInput,
    phi: float,
    n_res: float,
    tail: float = TAIL_TOLERANCE,
    max_twice_j: int = MAX_TWICE_J,
) -> float:
    """
    F(phi) = sum_{N <= n_res} G_N F_N(phi)
    """
    n_max = _component_inputs(inp, n_res, tail)
    total = 0.0
    for n in range(1, n_max + 1):
        g = generation_probability(inp, n)
        if g > 0:
            total += g * component_cfi(n, inp.x, phi, max_twice_j)
    return total


def ideal_qfi(inp: InterferometerInput) -> float:
    """
    QFI of the full input with unlimited photon-number resolution, any phases.

    n_a [1 + 2 n_b + 2 sqrt(n_b (1 + n_b)) cos(theta_b - 2 theta_a)] + n_b
    """
    n_a, n_b = inp.n_a, inp.n_b
    phase = math.cos(inp.theta_b - 2 * inp.theta_a)
    return n_a * (1 + 2 * n_b + 2 * math.sqrt(n_b * (1 + n_b)) * phase) + n_b


def weighted_component_qfi(inp: InterferometerInput, n: int) -> float:
    """
    G_N F_{Q,N} from the explicit double sum
    sum_k [N + 4k(N-2k) + 4k x] (c_{N-2k} s_{2k})^2.
    """
    k = np.arange(n // 2 + 1)
    with np.errstate(divide="ignore"):
        log_weights = log_coherent_magnitudes(
            inp.alpha_mag, n - 2 * k
        ) + log_squeezed_magnitudes(inp.xi_mag, k)
    weights = np.exp(2 * log_weights)
    bracket = n + 4 * k * (n - 2 * k)
    if inp.xi_mag > 0:
        bracket = bracket + 4 * k * inp.x
    return float(np.sum(bracket * weights))


def finite_resolution_qfi(
    inp: InterferometerInput,
    n_res: float,
    tail: float = TAIL_TOLERANCE,
    cross_check: bool = True,
) -> FisherReport:
    """
    QFI available to detectors resolving at most n_res photons in total.

    Each G_N F_{Q,N} term comes from the explicit double sum and, with
    `cross_check`, is compared with G_N times the component QFI.
    """
    n_max = _component_inputs(inp, n_res, tail)
    rows = np.zeros((n_max + 1, 4))
    for n in range(n_max + 1):
        g = generation_probability(inp, n)
        weighted = weighted_component_qfi(inp, n)
        qfi_n = weighted / g if g > 0 else 0.0
        if cross_check and g > 0 and n > 0:
            other = g * component_qfi(n, inp.x, method="amplitudes")
            if not math.isclose(weighted, other, rel_tol=CROSS_CHECK_RTOL, abs_tol=1e-300):
                raise ComputationError(
                    f"G_N F_Q,N for N={n} disagrees between routes: {weighted!r} vs {other!r}"
                )
        rows[n] = (n, g, qfi_n, weighted)
    rows.setflags(write=False)

    lost = None
    if not math.isinf(n_res) and inp.n_b > 0 and n_res > inp.n_a:
        lost = lost_qfi_asymptotic(n_res, inp.n_bar, (inp.n_a, inp.n_b))

    return FisherReport(
        n_res=float(n_res),
        n_max=n_max,
        per_n=rows,
        total_qfi=float(rows[:, 3].sum()),
        ideal_qfi_closed_form=ideal_qfi(inp),
        mean_photon_number=inp.n_bar,
        lost_qfi_asymptotic=lost,
    )


def retained_ratio_limit(x: float) -> float:
    """
    Large-n_bar fraction of the ideal QFI kept at n_res = x n_bar for the
    balanced split, erf(sqrt(x - 1/2)) - 2 e^{-(x - 1/2)} sqrt(x - 1/2) / sqrt(pi).
    """
    if not x >= 0.5:
        raise InvalidParameterError(
            f"the asymptotic form needs n_res / n_bar >= 1/2, got {x}"
        )
    if math.isinf(x):
        return 1.0
    root = math.sqrt(x - 0.5)
    erf, _ = erf_pair(root)
    return erf - 2 * math.exp(-(x - 0.5)) * root / math.sqrt(math.pi)


def lost_qfi_asymptotic(n_res: float, n_bar: float, split="balanced") -> float:
    """
    Asymptotic information lost to finite resolution.

    With split="balanced" returns the retained fraction F_Q / F_Q^(id).
    With an explicit (n_a, n_b) returns the lost QFI itself,
    2 n_a n_b / B^{3/2} (1 + e^{-B/2n_b}) [erfc(sqrt z) + 2 e^{-z} sqrt(z / pi)]
    with B = n_b log((1 + n_b) / n_b) and z = (n_res - n_a) B / (2 n_b).
    """
    if not n_bar > 0:
        raise InvalidParameterError(f"n_bar must be > 0, got {n_bar}")
    if split == "balanced":
        return retained_ratio_limit(n_res / n_bar)

    n_a, n_b = split
    if not n_b > 0:
        raise InvalidParameterError("the asymptotic lost QFI needs squeezing, n_b > 0")
    if not n_res > n_a:
        raise InvalidParameterError(f"need n_res > n_a, got n_res={n_res}, n_a={n_a}")
    b = n_b * math.log((1 + n_b) / n_b)
    z = (n_res - n_a) * b / (2 * n_b)
    _, erfc = erf_pair(math.sqrt(z))
    return (
        2 * n_a * n_b / b**1.5
        * (1 + math.exp(-b / (2 * n_b)))
        * (erfc + 2 * math.exp(-z) * math.sqrt(z / math.pi))
    )


def lost_qfi_numeric(inp: InterferometerInput, n_res: float, tail: float = TAIL_TOLERANCE) -> float:
    return ideal_qfi(inp) - finite_resolution_qfi(inp, n_res, tail).total_qfi


def split_qfi(n_bar: float, alpha_sq: float, n_res: float, tail: float = TAIL_TOLERANCE) -> float:
    """
    Total QFI for |alpha|^2 = alpha_sq, sinh^2|xi| = n_bar - alpha_sq
    """
    inp = InterferometerInput.from_split(n_bar, alpha_sq)
    if math.isinf(n_res):
        return ideal_qfi(inp)
    return finite_resolution_qfi(inp, n_res, tail, cross_check=False).total_qfi


def optimize_split(
    n_bar: float, n_res: float, tail: float = TAIL_TOLERANCE
) -> tuple[float, float]:
    """
    Best share of coherent photons alpha^2 for a fixed mean photon number.

    Returns (alpha_sq_opt, qfi_opt).
    """
    if not n_bar > 0:
        raise InvalidParameterError(f"n_bar must be > 0, got {n_bar}")
    grid = np.linspace(0, n_bar, SPLIT_SCAN_POINTS)

    def objective(alpha_sq):
        return split_qfi(n_bar, min(max(alpha_sq, 0.0), n_bar), n_res, tail)

    alpha_sq = golden_maximize(
        objective, grid, SPLIT_TOLERANCE / n_bar, f"split n_bar={n_bar}, n_res={n_res}"
    )
    best = objective(alpha_sq)
    logger.debug(f"Optimal split n_bar={n_bar}, n_res={n_res}: alpha^2={alpha_sq:.5g}, F={best:.6g}")
    return alpha_sq, best
