"""
Monte Carlo check of the Cramer-Rao bound.

Photon-counting outcomes (N, mu) are drawn from P(N, mu|phi) = G_N P_N(mu|phi),
the phase is recovered by maximum likelihood and the spread of the estimates
is compared with 1 / (shots F(phi)).

Every repeat draws from its own Philox stream, keyed by (seed, repeat), so
results are reproducible and independent of how repeats are scheduled.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import (
    ComputationError,
    FlatLikelihoodError,
    InvalidParameterError,
    NoInformationError,
)
from .fisher import conditional_probabilities, total_cfi
from .nphoton_analysis import state_vector
from .special_fn import MAX_TWICE_J, jy_generator, twice_m_values
from .states import (
    TAIL_TOLERANCE,
    InterferometerInput,
    generation_probability,
    photon_cutoff,
)

logger = logging.getLogger(__name__)

GRID_POINTS = 256
PHASE_TOLERANCE = 1e-6
FLAT_RANGE = 1e-12
SEARCH_MARGIN = 1e-3
DEFAULT_SEARCH = (SEARCH_MARGIN, math.pi - SEARCH_MARGIN)


def _resolve_n_res(inp: InterferometerInput, n_res: float) -> int:
    if not n_res >= 0:
        raise InvalidParameterError(f"n_res must be >= 0 or inf, got {n_res}")
    if math.isinf(n_res):
        return photon_cutoff(inp, TAIL_TOLERANCE)
    if n_res != int(n_res):
        raise InvalidParameterError(f"n_res must be an integer or inf, got {n_res}")
    return int(n_res)


def outcome_labels(n_res: int) -> np.ndarray:
    """
    (N, 2 mu) for every resolvable outcome, N = 0..n_res and mu = -N/2..N/2
    """
    return np.array(
        [(n, twice_mu) for n in range(n_res + 1) for twice_mu in twice_m_values(n)],
        dtype=np.int64,
    ).reshape(-1, 2)


@dataclass(frozen=True, eq=False)
class OutcomeSample:
    """
    Counts of each (N, mu) cell plus the saturated detections with N > n_res
    """

    n_res: int
    counts: np.ndarray
    overflow: int

    @property
    def labels(self) -> np.ndarray:
        return outcome_labels(self.n_res)

    @property
    def shots(self) -> int:
        return int(self.counts.sum()) + self.overflow

    def outcomes(self):
        """
        Yield ((N, mu), count) for every cell that was hit
        """
        for (n, twice_mu), count in zip(self.labels, self.counts):
            if count:
                yield (int(n), twice_mu / 2), int(count)

    def scaled(self, factor: int) -> "OutcomeSample":
        return OutcomeSample(self.n_res, self.counts * factor, self.overflow * factor)

    def __add__(self, other: "OutcomeSample") -> "OutcomeSample":
        if other.n_res != self.n_res:
            raise InvalidParameterError("cannot pool samples with different n_res")
        return OutcomeSample(self.n_res, self.counts + other.counts, self.overflow + other.overflow)


def joint_distribution(
    inp: InterferometerInput, phi: float, n_res: float, max_twice_j: int = MAX_TWICE_J
) -> tuple[np.ndarray, np.ndarray, float]:
    """
    Labels (N, 2 mu), their probabilities G_N P_N(mu|phi), and the probability
    of the overflow outcome N > n_res.
    """
    inp.require_phase_matching()
    n_res = _resolve_n_res(inp, n_res)
    probs = []
    for n in range(n_res + 1):
        g = generation_probability(inp, n)
        if g > 0:
            probs.append(g * conditional_probabilities(n, inp.x, phi, max_twice_j).probs)
        else:
            probs.append(np.zeros(n + 1))
    probs = np.concatenate(probs)
    overflow = max(0.0, 1.0 - float(probs.sum()))
    return outcome_labels(n_res), probs, overflow


def _generator(seed: int, repeat: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(repeat,)))
    )


def sample_outcomes(
    inp: InterferometerInput,
    phi: float,
    shots: int,
    n_res: float,
    seed: int,
    repeat: int = 0,
    max_twice_j: int = MAX_TWICE_J,
) -> OutcomeSample:
    """
    Draw `shots` detections from the joint (N, mu) law, lumping N > n_res into
    a single overflow outcome.
    """
    if shots < 1:
        raise InvalidParameterError(f"shots must be >= 1, got {shots}")
    labels, probs, overflow = joint_distribution(inp, phi, n_res, max_twice_j)
    pvals = np.append(probs, overflow)
    counts = _generator(seed, repeat).multinomial(shots, pvals / pvals.sum())
    return OutcomeSample(
        n_res=int(labels[-1, 0]), counts=counts[:-1], overflow=int(counts[-1])
    )


class PhaseLikelihood:
    """
    log P(N, mu|phi) for every outcome cell, cheap to evaluate at many phases.

    For each N the rotation exp(phi K) is diagonalized once, so a phase grid
    costs a few matrix products instead of one d-matrix per phase.
    """

    def __init__(self, inp: InterferometerInput, n_res: float):
        inp.require_phase_matching()
        self.n_res = _resolve_n_res(inp, n_res)
        self.labels = outcome_labels(self.n_res)
        self._log_g = []
        self._spectra = []
        for n in range(self.n_res + 1):
            g = generation_probability(inp, n)
            self._log_g.append(math.log(g) if g > 0 else -math.inf)
            if g > 0 and n > 0:
                # J_y = i K is Hermitian
                eigenvalues, vectors = np.linalg.eigh(1j * jy_generator(n))
                weights = vectors.conj().T @ state_vector(n, inp.x)
                self._spectra.append((eigenvalues, vectors, weights))
            else:
                self._spectra.append(None)
        resolved = float(np.exp(self._log_g).sum())
        self.log_overflow = math.log1p(-resolved) if resolved < 1.0 else -math.inf
        self._tables = {}

    def probabilities(self, phis) -> np.ndarray:
        """
        P(N, mu|phi) with cells along axis 0 and phases along axis 1
        """
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
        blocks = []
        for n, spectrum in enumerate(self._spectra):
            g = math.exp(self._log_g[n])
            if spectrum is None:
                blocks.append(np.full((n + 1, len(phis)), g))
                continue
            eigenvalues, vectors, weights = spectrum
            phases = np.exp(-1j * np.outer(eigenvalues, phis))
            amplitudes = (vectors @ (weights[:, None] * phases)).real
            blocks.append(g * amplitudes**2)
        return np.vstack(blocks)

    def log_probabilities(self, phis) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.probabilities(phis))

    def grid_table(self, grid: np.ndarray) -> np.ndarray:
        key = (grid[0], grid[-1], len(grid))
        if key not in self._tables:
            self._tables[key] = self.log_probabilities(grid)
        return self._tables[key]

    def log_likelihood(self, sample: OutcomeSample, phis, table=None) -> np.ndarray:
        if sample.n_res != self.n_res:
            raise InvalidParameterError(
                f"sample has n_res={sample.n_res}, likelihood has n_res={self.n_res}"
            )
        log_p = self.log_probabilities(phis) if table is None else table
        hit = sample.counts > 0
        values = sample.counts[hit] @ log_p[hit]
        if sample.overflow:
            values = values + sample.overflow * self.log_overflow
        return values


@dataclass(frozen=True)
class LikelihoodCurve:
    phis: np.ndarray
    values: np.ndarray


def mle_phase(
    sample: OutcomeSample,
    inp: InterferometerInput,
    n_res: float,
    search: tuple[float, float] = DEFAULT_SEARCH,
    likelihood: PhaseLikelihood | None = None,
) -> tuple[float, LikelihoodCurve]:
    """
    Maximum-likelihood phase in `search`, a sub-interval of (0, pi).

    A 256-point grid locates the maximum, golden-section search refines it to
    1e-6 rad.
    """
    low, high = search
    if not 0 < low < high < math.pi:
        raise InvalidParameterError(f"search interval must lie inside (0, pi), got {search}")
    if sample.shots == 0:
        raise InvalidParameterError("cannot estimate a phase from an empty sample")
    if likelihood is None:
        likelihood = PhaseLikelihood(inp, n_res)

    grid = np.linspace(low, high, GRID_POINTS)
    values = likelihood.log_likelihood(sample, grid, likelihood.grid_table(grid))
    finite = values[np.isfinite(values)]
    if len(finite) == 0 or np.ptp(values) < FLAT_RANGE:
        raise FlatLikelihoodError(
            f"log-likelihood varies by less than {FLAT_RANGE} over {search}"
        )
    curve = LikelihoodCurve(phis=grid, values=values)

    def negative(phi):
        return -float(likelihood.log_likelihood(sample, [phi])[0])

    best = int(np.argmax(values))
    if 0 < best < len(grid) - 1:
        result = optimize.minimize_scalar(
            negative,
            bracket=(grid[best - 1], grid[best], grid[best + 1]),
            method="golden",
            options={"xtol": PHASE_TOLERANCE / (2 * grid[best])},
        )
    else:
        neighbour = grid[1] if best == 0 else grid[-2]
        result = optimize.minimize_scalar(
            negative,
            bounds=tuple(sorted((grid[best], neighbour))),
            method="bounded",
            options={"xatol": PHASE_TOLERANCE},
        )
    estimate = float(result.x) if result.fun <= -values[best] else float(grid[best])
    return estimate, curve


@dataclass(frozen=True, eq=False)
class EstimationRun:
    """
    Summary of repeated phase estimations at one working point.

    `outcomes` pools the counts of all repeats.
    """

    seed: int
    true_phase: float
    shots: int
    n_res: int
    repeats: int
    excluded: int
    outcomes: OutcomeSample
    estimates: np.ndarray
    mle_estimate: float
    empirical_variance: float
    mean_squared_error: float
    fisher_information: float
    crb_prediction: float

    @property
    def variance_ratio(self) -> float:
        return self.empirical_variance / self.crb_prediction

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "true_phase": self.true_phase,
            "shots": self.shots,
            "n_res": self.n_res,
            "repeats": self.repeats,
            "excluded": self.excluded,
            "mle_estimate": self.mle_estimate,
            "empirical_variance": self.empirical_variance,
            "mean_squared_error": self.mean_squared_error,
            "fisher_information": self.fisher_information,
            "crb_prediction": self.crb_prediction,
            "variance_ratio": self.variance_ratio,
            "overflow_count": self.outcomes.overflow,
            "outcome_counts": [
                [n, mu, count] for (n, mu), count in self.outcomes.outcomes()
            ],
        }


def crb_experiment(
    inp: InterferometerInput,
    phi: float,
    shots: int,
    n_res: float,
    repeats: int,
    seed: int,
    search: tuple[float, float] = DEFAULT_SEARCH,
    workers: int | None = None,
    max_twice_j: int = MAX_TWICE_J,
) -> EstimationRun:
    """
    Repeat sampling and estimation `repeats` times and compare the variance of
    the estimates with the Cramer-Rao bound 1 / (shots F(phi)).

    Repeats whose likelihood is flat are left out and counted in `excluded`.
    """
    if repeats < 2:
        raise InvalidParameterError(f"repeats must be >= 2, got {repeats}")
    if repeats < 100:
        logger.warning(f"Only {repeats} repeats, the variance estimate will be noisy")
    n_res = _resolve_n_res(inp, n_res)
    fisher_information = total_cfi(inp, phi, n_res, max_twice_j=max_twice_j)
    if not fisher_information > 0:
        raise NoInformationError(
            f"F(phi) = 0 at n_res={n_res}, the Cramer-Rao bound is infinite"
        )
    likelihood = PhaseLikelihood(inp, n_res)

    def one_repeat(repeat):
        sample = sample_outcomes(inp, phi, shots, n_res, seed, repeat, max_twice_j)
        try:
            estimate, _ = mle_phase(sample, inp, n_res, search, likelihood)
        except FlatLikelihoodError as e:
            logger.debug(f"Repeat {repeat} excluded: {e}")
            estimate = math.nan
        return sample, estimate

    if workers is None or workers <= 1:
        results = [one_repeat(repeat) for repeat in range(repeats)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one_repeat, range(repeats)))

    estimates = np.array([estimate for _, estimate in results])
    pooled = results[0][0]
    for sample, _ in results[1:]:
        pooled = pooled + sample
    kept = estimates[np.isfinite(estimates)]
    if len(kept) < 2:
        raise ComputationError(
            f"only {len(kept)} of {repeats} repeats produced an estimate"
        )

    run = EstimationRun(
        seed=seed,
        true_phase=phi,
        shots=shots,
        n_res=n_res,
        repeats=repeats,
        excluded=int(repeats - len(kept)),
        outcomes=pooled,
        estimates=estimates,
        mle_estimate=float(kept.mean()),
        empirical_variance=float(kept.var(ddof=1)),
        mean_squared_error=float(np.mean((kept - phi) ** 2)),
        fisher_information=fisher_information,
        crb_prediction=1.0 / (shots * fisher_information),
    )
    logger.info(
        f"CRB run: variance {run.empirical_variance:.4e}, bound {run.crb_prediction:.4e}, "
        f"ratio {run.variance_ratio:.3f}, excluded {run.excluded}"
    )
    return run
