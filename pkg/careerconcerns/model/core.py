import abc
import logging
import math
from abc import ABC
from dataclasses import dataclass
from enum import Enum
from functools import singledispatch
from typing import Callable, Optional, Tuple, Union

import numpy as np
import numpy.typing as npt

from careerconcerns.beliefs import grid as belief_grid
from careerconcerns.beliefs.beta import BetaParams, posterior_mean
from careerconcerns.beliefs.grid import BeliefVector
from careerconcerns.beliefs.special import truncated_mean, beta_truncated_mean
from careerconcerns.errors import DomainError, SolverFailure
from careerconcerns.model.base import AbsorbingContinuation, ContinuationValues, Real

logger = logging.getLogger(__name__)

CUTOFF_TOLERANCE = 1e-10

Belief = Union[BetaParams, BeliefVector]


class PricingRegime(Enum):
    naive = 'naive'
    sophisticated = 'sophisticated'


class Preferences(ABC):
    """Bernoulli utility over certain consumption on [0, 1], normalized so that u(0) = 0 and u(1) = 1."""

    @abc.abstractmethod
    def __call__(self, x: Real) -> Real:
        ...


@dataclass(frozen=True)
class CRRA(Preferences):
    rho: float

    def __post_init__(self):
        if not 0 < self.rho <= 1:
            raise DomainError(f'CRRA exponent must lie in (0, 1], got {self.rho}')

    def __call__(self, x: Real) -> Real:
        return np.power(x, self.rho)


@dataclass(frozen=True)
class Tabulated(Preferences):
    """Piecewise-linear utility through the given (x, u) knots."""
    knots: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        xs, us = self.xs, self.us
        if len(xs) < 2 or xs[0] != 0.0 or xs[-1] != 1.0 or us[0] != 0.0 or us[-1] != 1.0:
            raise DomainError('Tabulated utility must run from (0, 0) to (1, 1)')
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(us) <= 0):
            raise DomainError('Tabulated utility knots must be strictly increasing')
        slopes = np.diff(us) / np.diff(xs)
        if np.any(np.diff(slopes) > 1e-12):
            raise DomainError('Tabulated utility must be concave (non-increasing chord slopes)')

    @property
    def xs(self) -> npt.NDArray[np.float64]:
        return np.array([x for x, _ in self.knots], dtype=float)

    @property
    def us(self) -> npt.NDArray[np.float64]:
        return np.array([u for _, u in self.knots], dtype=float)

    def __call__(self, x: Real) -> Real:
        return np.interp(x, self.xs, self.us)


@dataclass(frozen=True)
class CutoffWage:
    """The cutoff type at a public state (types at or below it take firm employment) and the wage
    firms post there."""
    cutoff: float
    wage: float


def utility(prefs: Preferences, x: Real) -> Real:
    values = np.asarray(x, dtype=float)
    if np.any(values < 0.0) or np.any(values > 1.0):
        raise DomainError('Consumption must lie in [0, 1]')
    result = prefs(values)
    return float(result) if np.ndim(result) == 0 else result


@singledispatch
def belief_mean(belief) -> float:
    raise TypeError(f'Unsupported belief {type(belief).__name__}')


@belief_mean.register
def _(belief: BetaParams) -> float:
    return posterior_mean(belief)


@belief_mean.register
def _(belief: BeliefVector) -> float:
    return belief_grid.mean(belief)


@singledispatch
def belief_truncated_mean(belief, c: float) -> float:
    """Mean talent of the applicant pool [0, c]."""
    raise TypeError(f'Unsupported belief {type(belief).__name__}')


@belief_truncated_mean.register
def _(belief: BetaParams, c: float) -> float:
    return float(truncated_mean(belief, c))


@belief_truncated_mean.register
def _(belief: BeliefVector, c: float) -> float:
    return float(belief_grid.truncated_mean(belief, c))


def indifference_gap(theta: Real, state: Belief, wage: float, continuation: ContinuationValues,
                     prefs: Preferences, delta: float) -> Real:
    """U_S - U_E at type theta. The public state only enters through the continuation view."""
    return _option_gap(theta, continuation, delta) - _annuity(continuation, delta) * utility(prefs, wage)


def _annuity(continuation: ContinuationValues, delta: float) -> float:
    return 1.0 / (1.0 - delta) if continuation.absorbing else 1.0


def _option_gap(theta: Real, continuation: ContinuationValues, delta: float) -> Real:
    # the part of U_S - U_E that does not depend on the wage
    return theta + delta * (
        theta * continuation.success(theta) + (1 - theta) * continuation.failure(theta) - continuation.stay(theta)
    )


def solve_cutoff(state: Belief, regime: PricingRegime, continuation: ContinuationValues,
                 prefs: Preferences, delta: float, tolerance: float = CUTOFF_TOLERANCE) -> CutoffWage:
    """
    Solves for the cutoff type and posted wage at a single public state by bisection.

    Under naive pricing the wage is the posterior mean and the cutoff is the zero of the
    indifference gap. Under sophisticated pricing the wage is the mean of the applicant pool
    [0, c] and the cutoff is the fixed point of c -> Ψ(c), the zero of the gap at wage m(c). Since
    Ψ is decreasing, Ψ(c) >= c exactly when the gap at (c, m(c)) is non-positive, so bisection runs
    on the sign of that gap without inverting Ψ.

    With an absorbing continuation the gap may cross zero more than once: under sophisticated
    pricing an empty pool always confirms itself, since nobody applies to a zero wage. The solver
    then takes the largest zero, found by scanning the continuation grid downwards from θ = 1. That
    is the cutoff backward induction from a long horizon settles on.
    """
    mean = belief_mean(state)
    annuity = _annuity(continuation, delta)

    if regime == PricingRegime.naive:
        def gap(c: float) -> float:
            return float(indifference_gap(c, state, mean, continuation, prefs, delta))

        low, empty_wage = 0.0, mean
    else:
        def gap(c: float) -> float:
            wage = belief_truncated_mean(state, c)
            return float(_option_gap(c, continuation, delta) - annuity * utility(prefs, wage))

        # the applicant pool [0, c] is only defined for c > 0
        low, empty_wage = tolerance, 0.0

    at_top, at_bottom = gap(1.0), gap(low)
    if not (math.isfinite(at_top) and math.isfinite(at_bottom)):
        raise SolverFailure('Indifference gap is not finite at the bracket ends', state)

    high = 1.0
    if at_top <= 0:
        return CutoffWage(cutoff=1.0, wage=mean)
    if isinstance(continuation, AbsorbingContinuation):
        bracket = _largest_zero_bracket(gap, np.asarray(continuation.grid, dtype=float), low)
        if bracket is None:
            return CutoffWage(cutoff=0.0, wage=empty_wage)
        low, high = bracket
    elif at_bottom >= 0:
        return CutoffWage(cutoff=0.0, wage=empty_wage)

    while high - low > tolerance:
        mid = 0.5 * (low + high)
        value = gap(mid)
        if not math.isfinite(value):
            raise SolverFailure(f'Indifference gap is not finite at theta={mid}', state)
        # ties resolve to employment
        if value <= 0:
            low = mid
        else:
            high = mid

    cutoff = 0.5 * (low + high)
    wage = mean if regime == PricingRegime.naive else belief_truncated_mean(state, cutoff)
    return CutoffWage(cutoff=cutoff, wage=wage)


def _largest_zero_bracket(gap: Callable[[float], float], grid: npt.NDArray[np.float64],
                          low: float) -> Optional[Tuple[float, float]]:
    """The topmost grid cell [a, b] with gap(a) <= 0 < gap(b), given gap(1) > 0."""
    points = np.maximum(grid, low)
    upper = 1.0
    for point in points[-2::-1]:
        value = gap(float(point))
        if not math.isfinite(value):
            raise SolverFailure(f'Indifference gap is not finite at theta={point}')
        if value <= 0:
            return float(point), upper
        upper = float(point)
    return None


def interpolate_rows(grid: npt.NDArray[np.float64], rows: npt.NDArray[np.float64],
                     x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Linearly interpolates row i of ``rows`` at x[i]."""
    index = np.clip(np.searchsorted(grid, x, side='right') - 1, 0, len(grid) - 2)
    weight = (x - grid[index]) / (grid[index + 1] - grid[index])
    picked = np.arange(rows.shape[0])
    return rows[picked, index] * (1 - weight) + rows[picked, index + 1] * weight


@dataclass(frozen=True)
class CutoffTable:
    cutoffs: npt.NDArray[np.float64]
    wages: npt.NDArray[np.float64]

    def __getitem__(self, i: int) -> CutoffWage:
        return CutoffWage(cutoff=float(self.cutoffs[i]), wage=float(self.wages[i]))

    def __len__(self):
        return len(self.cutoffs)


def batch_solve_cutoffs(
        grid: npt.NDArray[np.float64],
        alphas: npt.NDArray[np.float64],
        betas: npt.NDArray[np.float64],
        success: npt.NDArray[np.float64],
        failure: npt.NDArray[np.float64],
        stay: npt.NDArray[np.float64],
        regime: PricingRegime,
        prefs: Preferences,
        delta: float,
        tolerance: float = CUTOFF_TOLERANCE,
) -> CutoffTable:
    """
    :func:`solve_cutoff` for many states at once. Row i of ``success``, ``failure`` and ``stay``
    holds the continuation values of state (alphas[i], betas[i]) on ``grid``. Bisection runs on all
    states simultaneously with the same bracketing and clamping rules as the scalar solver.
    """
    means = alphas / (alphas + betas)
    sophisticated = regime == PricingRegime.sophisticated

    def gap(c: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        values = c + delta * (c * interpolate_rows(grid, success, c)
                              + (1 - c) * interpolate_rows(grid, failure, c)
                              - interpolate_rows(grid, stay, c))
        wages = beta_truncated_mean(c, alphas, betas) if sophisticated else means
        return values - prefs(wages)

    n = len(alphas)
    low = np.full(n, tolerance if sophisticated else 0.0)
    high = np.ones(n)

    at_top, at_bottom = gap(high), gap(low)
    if not (np.all(np.isfinite(at_top)) and np.all(np.isfinite(at_bottom))):
        bad = int(np.flatnonzero(~(np.isfinite(at_top) & np.isfinite(at_bottom)))[0])
        raise SolverFailure('Indifference gap is not finite at the bracket ends',
                            BetaParams(float(alphas[bad]), float(betas[bad])))

    employ_all = at_top <= 0
    employ_none = ~employ_all & (at_bottom >= 0)

    iterations = max(0, math.ceil(math.log2((1.0 - low.max()) / tolerance)))
    for _ in range(iterations):
        mid = 0.5 * (low + high)
        below = gap(mid) <= 0
        low = np.where(below, mid, low)
        high = np.where(below, high, mid)

    cutoffs = 0.5 * (low + high)
    cutoffs[employ_all] = 1.0
    cutoffs[employ_none] = 0.0

    if sophisticated:
        wages = np.asarray(beta_truncated_mean(np.maximum(cutoffs, tolerance), alphas, betas), dtype=float)
        wages[employ_none] = 0.0
    else:
        wages = means.copy()

    return CutoffTable(cutoffs=cutoffs, wages=wages)


def absorbing_wage_utilities(
        grid: npt.NDArray[np.float64],
        alphas: npt.NDArray[np.float64],
        betas: npt.NDArray[np.float64],
        regime: PricingRegime,
        prefs: Preferences,
        tolerance: float = CUTOFF_TOLERANCE,
) -> npt.NDArray[np.float64]:
    """u(wage) at each state (rows) if the cutoff were each grid point (columns). The table only
    depends on the beliefs, so it is built once and reused across sweeps."""
    if regime == PricingRegime.naive:
        return np.repeat(prefs(alphas / (alphas + betas))[:, None], len(grid), axis=1)
    points = np.maximum(grid, tolerance)
    return prefs(beta_truncated_mean(points[None, :], alphas[:, None], betas[:, None]))


def batch_solve_absorbing_cutoffs(
        grid: npt.NDArray[np.float64],
        alphas: npt.NDArray[np.float64],
        betas: npt.NDArray[np.float64],
        success: npt.NDArray[np.float64],
        failure: npt.NDArray[np.float64],
        wage_utilities: npt.NDArray[np.float64],
        regime: PricingRegime,
        prefs: Preferences,
        delta: float,
        tolerance: float = CUTOFF_TOLERANCE,
) -> CutoffTable:
    """
    :func:`solve_cutoff` with an :class:`AbsorbingContinuation` for many states at once. The gap is
    evaluated on the whole grid to find each state's topmost sign change, then bisection refines all
    brackets together. ``wage_utilities`` comes from :func:`absorbing_wage_utilities`.
    """
    means = alphas / (alphas + betas)
    sophisticated = regime == PricingRegime.sophisticated
    annuity = 1.0 / (1.0 - delta)

    on_grid = grid + delta * (grid * success + (1 - grid) * failure) - annuity * wage_utilities
    if not np.all(np.isfinite(on_grid)):
        bad = int(np.flatnonzero(~np.all(np.isfinite(on_grid), axis=1))[0])
        raise SolverFailure('Indifference gap is not finite on the θ-grid',
                            BetaParams(float(alphas[bad]), float(betas[bad])))

    employ_all = on_grid[:, -1] <= 0
    non_positive = on_grid[:, :-1] <= 0
    employ_none = ~employ_all & ~np.any(non_positive, axis=1)

    # topmost grid cell whose lower end is non-positive
    last = non_positive.shape[1] - 1 - np.argmax(non_positive[:, ::-1], axis=1)
    last = np.where(employ_all | employ_none, 0, last)
    low = grid[last].copy()
    if sophisticated:
        low = np.maximum(low, tolerance)
    high = grid[last + 1].copy()

    def gap(c: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        values = c + delta * (c * interpolate_rows(grid, success, c) + (1 - c) * interpolate_rows(grid, failure, c))
        wages = beta_truncated_mean(c, alphas, betas) if sophisticated else means
        return values - annuity * prefs(wages)

    width = float(np.max(high - low)) if len(low) else 0.0
    iterations = max(0, math.ceil(math.log2(width / tolerance))) if width > 0 else 0
    for _ in range(iterations):
        mid = 0.5 * (low + high)
        below = gap(mid) <= 0
        low = np.where(below, mid, low)
        high = np.where(below, high, mid)

    cutoffs = 0.5 * (low + high)
    cutoffs[employ_all] = 1.0
    cutoffs[employ_none] = 0.0

    if sophisticated:
        wages = np.asarray(beta_truncated_mean(np.maximum(cutoffs, tolerance), alphas, betas), dtype=float)
        wages[employ_none] = 0.0
    else:
        wages = means.copy()

    return CutoffTable(cutoffs=cutoffs, wages=wages)
