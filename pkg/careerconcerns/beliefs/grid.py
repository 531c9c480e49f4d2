from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np
import numpy.typing as npt
from scipy import stats

from careerconcerns.beliefs.beta import BetaParams, Outcome
from careerconcerns.errors import DomainError, DegenerateUpdateError

DEFAULT_GRID_SIZE = 2001
MASS_TOLERANCE = 1e-12
MIN_NORMALIZER = 1e-300

Likelihood = Union[npt.NDArray[np.float64], Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]]]


@dataclass(frozen=True, eq=False)
class BeliefVector:
    """A belief over talent supported on a finite θ-grid."""
    grid: npt.NDArray[np.float64]
    mass: npt.NDArray[np.float64]

    def __post_init__(self):
        if self.grid.ndim != 1 or self.grid.shape != self.mass.shape or len(self.grid) < 2:
            raise DomainError('Belief grid and masses must be matching one-dimensional arrays')
        if self.grid[0] < 0.0 or self.grid[-1] > 1.0 or np.any(np.diff(self.grid) <= 0):
            raise DomainError('Belief grid must be strictly increasing inside [0, 1]')
        if np.any(self.mass < 0.0) or abs(self.mass.sum() - 1.0) > MASS_TOLERANCE:
            raise DomainError(f'Belief masses must be non-negative and sum to 1, got {self.mass.sum()!r}')

    @cached_property
    def cumulative(self) -> npt.NDArray[np.float64]:
        return np.cumsum(self.mass)

    @cached_property
    def cumulative_moment(self) -> npt.NDArray[np.float64]:
        return np.cumsum(self.grid * self.mass)

    def __len__(self):
        return len(self.grid)


@dataclass(frozen=True)
class SignalSpec:
    """
    The public signal emitted while the worker is in firm employment: z = 1 with probability
    φθ + (1-φ)z̄. At φ = 0 the signal carries no information about θ.
    """
    phi: float
    zbar: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.phi < 1.0:
            raise DomainError(f'Signal informativeness must lie in [0, 1), got {self.phi}')
        if not 0.0 < self.zbar < 1.0:
            raise DomainError(f'Signal base rate must lie in (0, 1), got {self.zbar}')

    @property
    def informative(self) -> bool:
        return self.phi > 0.0

    def success_probability(self, theta: npt.ArrayLike) -> npt.NDArray[np.float64]:
        return self.phi * np.asarray(theta, dtype=float) + (1.0 - self.phi) * self.zbar


def _normalized(mass: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    return mass / mass.sum()


def discretize_beta(params: BetaParams, size: int = DEFAULT_GRID_SIZE) -> BeliefVector:
    """Puts the Beta(α, β) probability of each cell around a uniform grid node on that node."""
    if size < 2:
        raise DomainError('A belief grid needs at least two points')
    grid = np.linspace(0.0, 1.0, size)
    edges = np.concatenate([[0.0], 0.5 * (grid[1:] + grid[:-1]), [1.0]])
    mass = np.diff(stats.beta.cdf(edges, params.alpha, params.beta))
    return BeliefVector(grid, _normalized(np.clip(mass, 0.0, None)))


def bayes_update(b: BeliefVector, likelihood: Likelihood) -> BeliefVector:
    values = likelihood(b.grid) if callable(likelihood) else np.asarray(likelihood, dtype=float)
    if values.shape != b.grid.shape:
        raise DomainError('Likelihood must have one value per grid point')
    if np.any(values < 0.0) or np.any(values > 1.0):
        raise DomainError('Likelihood values must lie in [0, 1]')
    weighted = b.mass * values
    normalizer = weighted.sum()
    if normalizer <= MIN_NORMALIZER:
        raise DegenerateUpdateError(f'Posterior normalizer {normalizer!r} leaves no mass')
    return BeliefVector(b.grid, weighted / normalizer)


def outcome_update(b: BeliefVector, outcome: Outcome) -> BeliefVector:
    """Update on a publicly observed self-employment outcome."""
    return bayes_update(b, b.grid if outcome == Outcome.success else 1.0 - b.grid)


def firm_signal_update(b: BeliefVector, sig: SignalSpec, z: int) -> BeliefVector:
    if z not in (0, 1):
        raise DomainError(f'Firm signal must be 0 or 1, got {z}')
    if not sig.informative:
        return b
    success = sig.success_probability(b.grid)
    return bayes_update(b, success if z == 1 else 1.0 - success)


def mean(b: BeliefVector) -> float:
    return float(np.dot(b.grid, b.mass))


def cdf(b: BeliefVector, c: npt.ArrayLike) -> npt.ArrayLike:
    """Belief mass at or below c, linear in c between grid points."""
    result = np.interp(c, b.grid, b.cumulative, left=0.0, right=1.0)
    return float(result) if np.ndim(result) == 0 else result


def truncated_mean(b: BeliefVector, c: npt.ArrayLike) -> npt.ArrayLike:
    """E[θ | θ <= c] with both cumulative sums interpolated linearly in c."""
    pool = np.interp(c, b.grid, b.cumulative, left=0.0)
    if np.any(pool <= 0.0):
        raise DomainError('Truncation to a set without belief mass is undefined')
    result = np.interp(c, b.grid, b.cumulative_moment, left=0.0) / pool
    return float(result) if np.ndim(result) == 0 else result
