"""
Numerically stable special functions used by all Fock-space arithmetic.

Half-integer quantum numbers are carried as "twice" integers throughout
(`twice_j = 2J`, `twice_m = 2m`) so that odd photon numbers never need
float keys.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import InvalidParameterError, ResourceGuardError

# Largest 2J a d-matrix may be requested for. 2J = 256 covers N = 100 with
# room to spare.
MAX_TWICE_J = 256

_EXACT_LOG_FACTORIALS = np.array([math.log(math.factorial(n)) for n in range(21)])

# Mantissas of the d-matrix recurrence are kept inside this window, the
# exponent is carried separately in log space.
_RESCALE_HIGH = 1e100
_RESCALE_LOW = 1e-100


def log_factorial(n):
    """
    Natural log of n! for a non-negative integer or an array of them.

    Values up to 20! are logs of the exact integer factorial, larger ones come
    from the log-gamma function.
    """
    arr = np.asarray(n, dtype=np.int64)
    if np.any(arr < 0):
        raise InvalidParameterError(f"log_factorial needs n >= 0, got {n}")
    small = arr <= 20
    out = np.where(
        small,
        _EXACT_LOG_FACTORIALS[np.minimum(arr, 20)],
        special.gammaln(arr + 1.0),
    )
    if out.ndim == 0:
        return float(out)
    return out


def erf_pair(x):
    """
    Return (erf(x), erfc(x)) such that the two always add up to 1.

    Whichever of the two is small is taken from scipy directly, the other
    is its complement.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidParameterError(f"erf_pair needs a finite argument, got {x}")
    near_zero = np.abs(x) < 0.5
    erf = np.where(near_zero, special.erf(x), 1.0 - special.erfc(x))
    erfc = np.where(near_zero, 1.0 - special.erf(x), special.erfc(x))
    if erf.ndim == 0:
        return float(erf), float(erfc)
    return erf, erfc


def twice_m_values(twice_j: int) -> np.ndarray:
    """
    The grid 2m = -2J, -2J + 2, ..., 2J as integers
    """
    return np.arange(-twice_j, twice_j + 1, 2)


def ladder_coefficients(twice_j: int) -> np.ndarray:
    """
    sqrt((J - m)(J + m + 1)) for m = -J..J, the matrix elements of J_+.

    The entry for m = J is zero.
    """
    twice_m = twice_m_values(twice_j)
    return np.sqrt((twice_j - twice_m) * (twice_j + twice_m + 2) / 4.0)


def jy_generator(twice_j: int) -> np.ndarray:
    """
    Real antisymmetric matrix K = -i J_y in the J_z basis (rows/cols m = -J..J).

    exp(phi K) is the d-matrix d(phi), and K applied to a rotated amplitude
    vector gives its phase derivative.
    """
    up = ladder_coefficients(twice_j)[:-1] / 2.0
    return np.diag(up, k=1) - np.diag(up, k=-1)


def apply_jy_generator(states: np.ndarray) -> np.ndarray:
    """
    K @ states without forming K, for vectors stacked along axis 0
    """
    states = np.asarray(states, dtype=float)
    twice_j = states.shape[0] - 1
    up = ladder_coefficients(twice_j)[:-1] / 2.0
    if states.ndim > 1:
        up = up.reshape((-1,) + (1,) * (states.ndim - 1))
    out = np.zeros_like(states)
    out[:-1] += up * states[1:]
    out[1:] -= up * states[:-1]
    return out


@dataclass(frozen=True, eq=False)
class WignerDMatrix:
    """
    Real rotation matrix d^J_{mu,nu}(angle) = <J,mu| exp(-i angle J_y) |J,nu>.

    `entries[i, k]` holds mu = -J + i, nu = -J + k.
    """

    twice_j: int
    angle: float
    entries: np.ndarray

    @property
    def j(self) -> float:
        return self.twice_j / 2

    def index(self, m: float) -> int:
        """
        Position of the quantum number m along either axis
        """
        twice = round(2 * m)
        if abs(twice) > self.twice_j or (twice - self.twice_j) % 2:
            raise InvalidParameterError(f"m={m} is not on the grid of J={self.j}")
        return (twice + self.twice_j) // 2

    def entry(self, mu: float, nu: float) -> float:
        return float(self.entries[self.index(mu), self.index(nu)])


def _power_sign(base: float, exponents: np.ndarray) -> np.ndarray:
    """
    Sign of base ** exponents for integer exponents
    """
    if base >= 0:
        return np.ones(exponents.shape)
    return np.where(exponents % 2, -1.0, 1.0)


def _sweep(
    seed_log, seed_sign, start, step, twice_j, centre_term, sin_b, forward, backward
):
    """
    Run the three-term recurrence in nu across all rows at once.

    Starting from column `start` (nu = +J or -J), moves `step` columns at a time.
    Returns mantissas and log scales for every column visited.
    """
    n = twice_j + 1
    mantissa = np.zeros((n, n))
    log_scale = np.full((n, n), -np.inf)

    cur = seed_sign.astype(float)
    prev = np.zeros(n)
    scale = seed_log.copy()
    mantissa[:, start] = cur
    log_scale[:, start] = scale

    col = start
    for _ in range(n - 1):
        nxt = -(centre_term[:, col] / sin_b * cur + backward[col] * prev) / forward[col]
        prev, cur = cur, nxt
        biggest = np.maximum(np.abs(prev), np.abs(cur))
        rescale = (biggest > _RESCALE_HIGH) | (
            (biggest < _RESCALE_LOW) & (biggest > 0)
        )
        if rescale.any():
            factor = np.where(rescale, biggest, 1.0)
            prev = prev / factor
            cur = cur / factor
            scale = scale + np.log(factor)
        col += step
        mantissa[:, col] = cur
        log_scale[:, col] = scale
    return mantissa, log_scale


@lru_cache(maxsize=512)
def _d_entries(twice_j: int, angle: float) -> np.ndarray:
    n = twice_j + 1
    if twice_j == 0:
        return np.ones((1, 1))

    sin_b = math.sin(angle)
    if sin_b == 0.0:
        # only angle == 0 lands here
        return np.eye(n) * math.cos(angle / 2) ** twice_j

    cos_half = math.cos(angle / 2)
    sin_half = math.sin(angle / 2)
    twice_m = twice_m_values(twice_j)
    m = twice_m / 2.0
    j_plus_m = (twice_j + twice_m) // 2
    j_minus_m = (twice_j - twice_m) // 2

    # closed forms of the extremal columns nu = +J and nu = -J
    log_binom = 0.5 * (
        log_factorial(twice_j) - log_factorial(j_plus_m) - log_factorial(j_minus_m)
    )
    with np.errstate(divide="ignore"):
        log_top = (
            log_binom
            + special.xlogy(j_plus_m, abs(cos_half))
            + special.xlogy(j_minus_m, abs(sin_half))
        )
        log_bottom = (
            log_binom
            + special.xlogy(j_minus_m, abs(cos_half))
            + special.xlogy(j_plus_m, abs(sin_half))
        )
    sign_top = _power_sign(cos_half, j_plus_m) * _power_sign(sin_half, j_minus_m)
    sign_bottom = (
        np.where(j_plus_m % 2, -1.0, 1.0)
        * _power_sign(cos_half, j_minus_m)
        * _power_sign(sin_half, j_plus_m)
    )

    # 2 (mu - nu cos b), written to keep precision for small angles
    one_minus_cos = 2.0 * sin_half**2
    centre_term = 2.0 * ((m[:, None] - m[None, :]) + m[None, :] * one_minus_cos)

    c_plus = ladder_coefficients(twice_j)
    c_minus = np.concatenate(([0.0], c_plus[:-1]))

    top, top_log = _sweep(
        log_top, sign_top, n - 1, -1, twice_j, centre_term, sin_b, c_minus, c_plus
    )
    bottom, bottom_log = _sweep(
        log_bottom, sign_bottom, 0, +1, twice_j, centre_term, sin_b, c_plus, c_minus
    )

    # Each sweep is only trusted on its own side of nu = mu cos(angle), where
    # it runs with the growing solution.
    use_top = m[None, :] >= m[:, None] * math.cos(angle)
    with np.errstate(over="ignore", invalid="ignore"):
        entries = np.where(
            use_top, top * np.exp(top_log), bottom * np.exp(bottom_log)
        )
    return entries


def wigner_d(j: float, angle: float, max_twice_j: int = MAX_TWICE_J) -> WignerDMatrix:
    """
    Full (2J+1) x (2J+1) Wigner d-matrix for spin J at the given angle.

    The extremal columns nu = +J and nu = -J are seeded from their binomial
    closed forms in log space. The rest is filled by the three-term recurrence
    in nu, run inwards from both edges, with mantissa/exponent splitting so
    that J in the hundreds neither overflows nor underflows.
    """
    twice_j = round(2 * j)
    if twice_j < 0 or abs(2 * j - twice_j) > 1e-9:
        raise InvalidParameterError(f"J must be a non-negative half-integer, got {j}")
    if twice_j > max_twice_j:
        raise ResourceGuardError(
            f"Wigner d-matrix for 2J={twice_j} exceeds the limit 2J <= {max_twice_j}"
        )
    if not math.isfinite(angle):
        raise InvalidParameterError(f"angle must be finite, got {angle}")

    entries = _d_entries(twice_j, float(angle)).copy()
    entries.setflags(write=False)
    return WignerDMatrix(twice_j=twice_j, angle=float(angle), entries=entries)
