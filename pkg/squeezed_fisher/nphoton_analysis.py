"""
Observables of a single N-photon component after the first beam splitter.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import BracketError, InvalidParameterError
from .special_fn import MAX_TWICE_J, apply_jy_generator, twice_m_values, wigner_d
from .states import component_amplitudes

logger = logging.getLogger(__name__)

# Coarse bracket scan over (0, N], then golden-section refinement
SCAN_POINTS = 32
SCAN_FLOOR = 1e-2
X_TOLERANCE = 1e-4


@dataclass(frozen=True, eq=False)
class CountDistribution:
    """
    Probabilities of the outcomes mu = -J..J, indexed like a d-matrix axis.

    `context` is "beam-splitter" for p_mu, "output" for P_N(mu|phi), or
    "rotated" for a general rotation axis.
    """

    twice_j: int
    probs: np.ndarray
    context: str
    phi: float | None = None

    @property
    def n(self) -> int:
        return self.twice_j

    @property
    def mu(self) -> np.ndarray:
        return twice_m_values(self.twice_j) / 2

    def prob(self, mu: float) -> float:
        twice = round(2 * mu)
        if abs(twice) > self.twice_j or (twice - self.twice_j) % 2:
            raise InvalidParameterError(f"mu={mu} is not an outcome for N={self.n}")
        return float(self.probs[(twice + self.twice_j) // 2])


@dataclass(frozen=True)
class RatioScanResult:
    n: int
    x_opt_fidelity: float
    x_opt_fisher: float
    fidelity_at_opt: float
    qfi_at_opt: float


def _check_n(n: int, minimum: int = 0):
    if not isinstance(n, (int, np.integer)) or n < minimum:
        raise InvalidParameterError(f"N must be an integer >= {minimum}, got {n}")


def state_vector(n: int, x: float, signed: bool = True) -> np.ndarray:
    """
    |psi~_N> in the J_z basis m = -J..J (column N - 2k holds amplitude k)
    """
    amplitudes = component_amplitudes(n, x)
    if not signed:
        amplitudes = np.abs(amplitudes)
    psi = np.zeros(n + 1)
    psi[n - 2 * np.arange(len(amplitudes))] = amplitudes
    return psi


def beam_splitter_distribution(
    n: int, x: float, max_twice_j: int = MAX_TWICE_J
) -> CountDistribution:
    """
    p_mu, the photon-count difference distribution right after the first
    beam splitter.

    Amplitude of outcome mu is sum_k d_{mu, J-2k}(pi/2) |a_k|.
    """
    _check_n(n)
    d = wigner_d(n / 2, math.pi / 2, max_twice_j=max_twice_j)
    probs = (d.entries @ state_vector(n, x, signed=False)) ** 2
    probs.setflags(write=False)
    return CountDistribution(twice_j=n, probs=probs, context="beam-splitter")


def noon_fidelity(n: int, x: float, max_twice_j: int = MAX_TWICE_J) -> float:
    """
    Overlap of the beam-splitter state with the NOON state, 2 p_J
    """
    _check_n(n, 1)
    return 2 * float(beam_splitter_distribution(n, x, max_twice_j).probs[-1])


def component_qfi(
    n: int, x: float, method: str = "distribution", max_twice_j: int = MAX_TWICE_J
) -> float:
    """
    Quantum Fisher information F_{Q,N} of one normalized component.

    "distribution" evaluates 4 sum_mu mu^2 p_mu; "amplitudes" evaluates
    4 <J_y^2> straight from the amplitudes, which needs no d-matrix.
    """
    _check_n(n)
    if n == 0:
        return 0.0
    if method == "distribution":
        dist = beam_splitter_distribution(n, x, max_twice_j)
        return float(4 * np.sum(dist.mu**2 * dist.probs))
    if method == "amplitudes":
        return float(4 * np.sum(apply_jy_generator(state_vector(n, x)) ** 2))
    raise InvalidParameterError(f"Unknown component_qfi method {method!r}")


def qfi_partial_decomposition(
    n: int, x: float, max_twice_j: int = MAX_TWICE_J
) -> tuple[float, float, float]:
    """
    Split F_{Q,N} into the NOON term N^2 2p_J, the next term 2(N-2)^2 p_{J-1},
    and whatever the inner outcomes contribute.
    """
    _check_n(n, 2)
    dist = beam_splitter_distribution(n, x, max_twice_j)
    total = float(4 * np.sum(dist.mu**2 * dist.probs))
    noon_term = n**2 * 2 * float(dist.probs[-1])
    next_term = 2 * (n - 2) ** 2 * float(dist.probs[-2])
    return noon_term, next_term, total - noon_term - next_term


def golden_maximize(func, grid: np.ndarray, xtol: float, what: str) -> float:
    """
    Maximize func by scanning `grid` and refining the best interior point with
    golden-section search.
    """
    values = np.array([func(g) for g in grid])
    best = int(np.argmax(values))
    if best == 0 or best == len(grid) - 1:
        raise BracketError(
            f"{what}: maximum of the coarse scan sits on the edge of "
            f"[{grid[0]:.4g}, {grid[-1]:.4g}] at {grid[best]:.4g}"
        )
    bracket = (grid[best - 1], grid[best], grid[best + 1])
    result = optimize.minimize_scalar(
        lambda v: -func(v), bracket=bracket, method="golden", options={"xtol": xtol}
    )
    if not bracket[0] <= result.x <= bracket[2]:
        raise BracketError(f"{what}: golden-section search left its bracket {bracket}")
    return float(result.x)


def scan_optimal_ratio(n: int, max_twice_j: int = MAX_TWICE_J) -> RatioScanResult:
    """
    Find the ratios x that maximize the NOON fidelity and the component QFI
    for N photons.
    """
    _check_n(n, 2)
    grid = np.geomspace(SCAN_FLOOR, n, SCAN_POINTS)
    xtol = X_TOLERANCE / (10 * n)

    x_fid = golden_maximize(
        lambda x: noon_fidelity(n, x, max_twice_j), grid, xtol, f"NOON fidelity N={n}"
    )
    x_fi = golden_maximize(
        lambda x: component_qfi(n, x, method="amplitudes"), grid, xtol, f"QFI N={n}"
    )
    result = RatioScanResult(
        n=n,
        x_opt_fidelity=x_fid,
        x_opt_fisher=x_fi,
        fidelity_at_opt=noon_fidelity(n, x_fid, max_twice_j),
        qfi_at_opt=component_qfi(n, x_fi, method="amplitudes"),
    )
    logger.debug(f"Ratio scan {result}")
    return result


def fidelity_map(n: int, xs, max_twice_j: int = MAX_TWICE_J) -> np.ndarray:
    """
    Rows (x, mu, p_mu) for every x in xs, the data behind a p_mu heat map
    """
    rows = []
    for x in xs:
        dist = beam_splitter_distribution(n, float(x), max_twice_j)
        rows.append(np.column_stack([np.full(n + 1, x), dist.mu, dist.probs]))
    return np.vstack(rows)
