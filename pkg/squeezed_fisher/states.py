"""
Fock-basis description of the interferometer input |alpha> (x) |xi>.

A coherent state enters port a and a squeezed vacuum enters port b. Everything
here is built from log-magnitudes so that photon numbers in the hundreds
neither overflow nor underflow.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import (
    ComputationError,
    InvalidParameterError,
    PhaseMatchingError,
    ResourceGuardError,
    TruncationError,
)
from .special_fn import log_factorial

logger = logging.getLogger(__name__)

PMC_TOLERANCE = 1e-9
TAIL_TOLERANCE = 1e-12
NEGLIGIBLE_FLOOR = 1e-300
MAX_PHOTON_CUTOFF = 100_000
_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class InterferometerInput:
    """
    Coherent amplitude alpha = alpha_mag e^{i theta_a} in port a and
    squeeze parameter xi = xi_mag e^{i theta_b} in port b.
    """

    alpha_mag: float
    xi_mag: float
    theta_a: float = 0.0
    theta_b: float = 0.0

    def __post_init__(self):
        for name in ("alpha_mag", "xi_mag", "theta_a", "theta_b"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value}")
        if self.alpha_mag < 0 or self.xi_mag < 0:
            raise InvalidParameterError(
                f"alpha_mag and xi_mag must be >= 0, got {self.alpha_mag}, {self.xi_mag}"
            )

    @classmethod
    def from_split(cls, n_bar: float, alpha_sq: float) -> "InterferometerInput":
        """
        Phase-matched input with |alpha|^2 = alpha_sq and sinh^2|xi| = n_bar - alpha_sq
        """
        if not (n_bar >= 0 and 0 <= alpha_sq <= n_bar):
            raise InvalidParameterError(
                f"need 0 <= alpha_sq <= n_bar, got alpha_sq={alpha_sq}, n_bar={n_bar}"
            )
        return cls(
            alpha_mag=math.sqrt(alpha_sq), xi_mag=math.asinh(math.sqrt(n_bar - alpha_sq))
        )

    @classmethod
    def balanced(cls, n_bar: float) -> "InterferometerInput":
        return cls.from_split(n_bar, n_bar / 2)

    @property
    def n_a(self) -> float:
        return self.alpha_mag**2

    @property
    def n_b(self) -> float:
        return math.sinh(self.xi_mag) ** 2

    @property
    def n_bar(self) -> float:
        return self.n_a + self.n_b

    @property
    def x(self) -> float:
        """
        |alpha|^2 / tanh|xi|, infinite without squeezing
        """
        if self.xi_mag == 0:
            return math.inf
        return self.n_a / math.tanh(self.xi_mag)

    @property
    def is_phase_matched(self) -> bool:
        return abs(math.cos(self.theta_b - 2 * self.theta_a) - 1) < PMC_TOLERANCE

    def require_phase_matching(self):
        if not self.is_phase_matched:
            raise PhaseMatchingError(
                f"cos(theta_b - 2 theta_a) must be +1, got theta_a={self.theta_a}, "
                f"theta_b={self.theta_b}"
            )


def log_coherent_magnitudes(alpha_mag: float, n: np.ndarray) -> np.ndarray:
    """log |c_n|"""
    with np.errstate(divide="ignore"):
        return -(alpha_mag**2) / 2 + special.xlogy(n, alpha_mag) - 0.5 * log_factorial(n)


def _log_cosh(xi_mag: float) -> float:
    return float(np.logaddexp(xi_mag, -xi_mag) - math.log(2))


def log_squeezed_magnitudes(xi_mag: float, k: np.ndarray) -> np.ndarray:
    """log |s_{2k}|"""
    with np.errstate(divide="ignore"):
        return (
            0.5 * log_factorial(2 * k)
            - log_factorial(k)
            - 0.5 * _log_cosh(xi_mag)
            + special.xlogy(k, math.tanh(xi_mag) / 2)
        )


def _check_tail(kind: str, amplitudes: np.ndarray, tail):
    if tail is None:
        return
    missing = 1.0 - float(np.sum(amplitudes**2))
    if missing >= tail:
        raise TruncationError(
            f"{kind} amplitudes truncated at n_max={len(amplitudes) - 1} "
            f"leave {missing:.3e} of probability behind (allowed {tail:.1e})"
        )


def coherent_amplitudes(alpha_mag: float, n_max: int, tail=None) -> np.ndarray:
    """
    c_n = e^{-|alpha|^2/2} |alpha|^n / sqrt(n!) for n = 0..n_max, theta_a = 0.

    If `tail` is given, raises TruncationError when the vector misses at least
    that much probability.
    """
    if n_max < 0 or alpha_mag < 0:
        raise InvalidParameterError("need n_max >= 0 and alpha_mag >= 0")
    amplitudes = np.exp(log_coherent_magnitudes(alpha_mag, np.arange(n_max + 1)))
    _check_tail("coherent", amplitudes, tail)
    return amplitudes


def squeezed_amplitudes(xi_mag: float, n_max: int, tail=None) -> np.ndarray:
    """
    Squeezed vacuum amplitudes s_0..s_{n_max} for theta_b = 0.

    s_{2k} = sqrt((2k)!) / (k! sqrt(cosh|xi|)) (-tanh|xi| / 2)^k, odd entries are
    exactly zero.
    """
    if n_max < 0 or xi_mag < 0:
        raise InvalidParameterError("need n_max >= 0 and xi_mag >= 0")
    amplitudes = np.zeros(n_max + 1)
    k = np.arange(n_max // 2 + 1)
    signs = np.where(k % 2, -1.0, 1.0)
    amplitudes[::2] = signs * np.exp(log_squeezed_magnitudes(xi_mag, k))
    _check_tail("squeezed", amplitudes, tail)
    return amplitudes


def _log_r_terms(n: int, x: float) -> np.ndarray:
    k = np.arange(n // 2 + 1)
    with np.errstate(divide="ignore"):
        return (
            log_factorial(2 * k)
            - log_factorial(n - 2 * k)
            - 2 * log_factorial(k)
            + special.xlogy(n - 2 * k, 2 * x)
        )


def log_poly_R(n: int, x: float) -> float:
    """
    log R_N(x), -inf where R_N(x) = 0 (odd N at x = 0)
    """
    if n < 0 or x < 0:
        raise InvalidParameterError(f"poly_R needs N >= 0 and x >= 0, got N={n}, x={x}")
    return float(special.logsumexp(_log_r_terms(n, x)))


def poly_R(n: int, x: float) -> float:
    """
    R_N(x) = sum_k (2k)! / [(N-2k)! (k!)^2] (2x)^(N-2k).

    For large N the value can overflow; use `log_poly_R` there.
    """
    log_value = log_poly_R(n, x)
    if log_value > _LOG_FLOAT_MAX:
        raise ComputationError(f"R_{n}({x}) overflows a float, use log_poly_R")
    return math.exp(log_value)


def log_generation_probability(inp: InterferometerInput, n: int) -> float:
    if n < 0:
        raise InvalidParameterError(f"photon number must be >= 0, got {n}")
    if inp.xi_mag == 0:
        # Poisson limit of the coherent beam alone
        with np.errstate(divide="ignore"):
            return float(
                -inp.n_a + special.xlogy(2 * n, inp.alpha_mag) - log_factorial(n)
            )
    with np.errstate(divide="ignore"):
        return (
            -inp.n_a
            - _log_cosh(inp.xi_mag)
            + float(special.xlogy(n, math.tanh(inp.xi_mag) / 2))
            + log_poly_R(n, inp.x)
        )


def generation_probability(inp: InterferometerInput, n: int) -> float:
    """
    G_N, the probability of detecting N photons in total.

    Depends only on the magnitudes |alpha| and |xi|.
    """
    return math.exp(log_generation_probability(inp, n))


def photon_number_distribution(inp: InterferometerInput, n_max: int) -> np.ndarray:
    """
    G_0..G_{n_max}, the convolution of the two input photon-number laws
    """
    coherent = coherent_amplitudes(inp.alpha_mag, n_max) ** 2
    squeezed = squeezed_amplitudes(inp.xi_mag, n_max) ** 2
    return np.convolve(coherent, squeezed)[: n_max + 1]


def _poisson_upper_tail_bound(mean: float, t: int) -> float:
    """Chernoff bound on P(X >= t) for X ~ Poisson(mean)"""
    if mean == 0:
        return 0.0
    if t <= mean:
        return 1.0
    return math.exp(-mean + t * (1 + math.log(mean / t)))


def _squeezed_upper_tail_bound(xi_mag: float, t: int) -> float:
    """Bound on P(N_b >= t), using C(2j, j) / 4^j <= 1"""
    k = (t + 1) // 2
    if k == 0:
        return 1.0
    if xi_mag == 0:
        return 0.0
    return math.exp(2 * k * math.log(math.tanh(xi_mag)) + _log_cosh(xi_mag))


def photon_cutoff(inp: InterferometerInput, tail: float = TAIL_TOLERANCE) -> int:
    """
    Smallest N_max with a certified P(N > N_max) < tail.

    N_a + N_b > N_max needs N_a > N_max/2 or N_b > N_max/2, so the union of the
    two single-mode bounds is used.
    """
    if not 0 < tail < 1:
        raise InvalidParameterError(f"tail must be in (0, 1), got {tail}")
    for n_max in range(MAX_PHOTON_CUTOFF + 1):
        first = n_max // 2 + 1
        bound = _poisson_upper_tail_bound(
            inp.n_a, first
        ) + _squeezed_upper_tail_bound(inp.xi_mag, first)
        if bound < tail:
            logger.debug(f"Photon cutoff {n_max} for n_bar={inp.n_bar:.4g}, tail {tail:.1e}")
            return n_max
    raise ResourceGuardError(
        f"No photon cutoff below {MAX_PHOTON_CUTOFF} reaches a tail of {tail:.1e}"
    )


@dataclass(frozen=True, eq=False)
class NPhotonComponent:
    """
    Normalized N-photon part |psi~_N> = sum_k amplitudes[k] |N-2k, 2k>.

    `amplitudes` is None when the component is too improbable to normalize.
    """

    n: int
    amplitudes: np.ndarray | None
    generation_probability: float
    x: float

    @property
    def negligible(self) -> bool:
        return self.amplitudes is None


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _normalized_from_logs(log_mag: np.ndarray, signs: np.ndarray) -> np.ndarray:
    norm = 0.5 * special.logsumexp(2 * log_mag)
    return signs * np.exp(log_mag - norm)


def component_amplitudes(n: int, x: float) -> np.ndarray:
    """
    Signed normalized amplitudes of |psi~_N> from the ratio x alone.

    a_k is proportional to (-1)^k sqrt((2k)!) / (k! sqrt((N-2k)!)) (2x)^(N/2-k).
    x = inf gives the coherent-only component |N, 0>.
    """
    if n < 0 or not x >= 0:
        raise InvalidParameterError(f"need N >= 0 and x >= 0, got N={n}, x={x}")
    k = np.arange(n // 2 + 1)
    signs = np.where(k % 2, -1.0, 1.0)
    if math.isinf(x):
        out = np.zeros(len(k))
        out[0] = 1.0
        return _freeze(out)
    if x == 0 and n % 2:
        raise InvalidParameterError(f"odd N={n} has no amplitude at x = 0")
    with np.errstate(divide="ignore"):
        log_mag = (
            0.5 * log_factorial(2 * k)
            - log_factorial(k)
            - 0.5 * log_factorial(n - 2 * k)
            + special.xlogy(n / 2 - k, 2 * x)
        )
    return _freeze(_normalized_from_logs(log_mag, signs))


def n_photon_component(
    inp: InterferometerInput, n: int, floor: float = NEGLIGIBLE_FLOOR
) -> NPhotonComponent:
    """
    Post-select the N-photon part of a phase-matched input.

    Amplitudes are c_{N-2k} s_{2k} / sqrt(G_N) with both phases set to zero.
    """
    inp.require_phase_matching()
    log_g = log_generation_probability(inp, n)
    g = math.exp(log_g)
    if g < floor:
        logger.debug(f"Component N={n} is negligible (G_N={g:.3e})")
        return NPhotonComponent(n=n, amplitudes=None, generation_probability=g, x=inp.x)

    k = np.arange(n // 2 + 1)
    signs = np.where(k % 2, -1.0, 1.0)
    with np.errstate(divide="ignore"):
        log_mag = log_coherent_magnitudes(inp.alpha_mag, n - 2 * k) + log_squeezed_magnitudes(
            inp.xi_mag, k
        )
    amplitudes = _normalized_from_logs(log_mag, signs)
    return NPhotonComponent(
        n=n, amplitudes=_freeze(amplitudes), generation_probability=g, x=inp.x
    )
