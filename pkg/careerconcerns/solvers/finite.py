import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Dict, Tuple

import numpy as np
import numpy.typing as npt

from careerconcerns.beliefs.beta import BetaParams, Outcome, update
from careerconcerns.beliefs.special import beta_cdf
from careerconcerns.errors import DomainError
from careerconcerns.model.core import PricingRegime, Preferences, CutoffTable, CutoffWage, batch_solve_cutoffs
from careerconcerns.solvers.lattice import StateLattice, LatticePolicy, states_up_to, bellman_update

logger = logging.getLogger(__name__)

DEFAULT_THETA_GRID_SIZE = 4097


@dataclass(frozen=True)
class FiniteHorizonSpec:
    periods: int
    prior: BetaParams
    delta: float
    prefs: Preferences
    regime: PricingRegime
    theta_grid_size: int = DEFAULT_THETA_GRID_SIZE
    store_values: bool = True

    def __post_init__(self):
        if self.periods < 1:
            raise DomainError(f'A finite horizon needs at least one period, got {self.periods}')
        if not 0 < self.delta < 1:
            raise DomainError(f'Discount factor must lie in (0, 1), got {self.delta}')
        if self.theta_grid_size < 2:
            raise DomainError('The θ-grid needs at least two points')


@dataclass(frozen=True)
class AcceptanceSet:
    """Types in [0, cutoff] take firm employment at ``state``; ``mass`` is their probability under
    the state's Beta belief."""
    state: BetaParams
    cutoff: float
    wage: float
    mass: float


class FinitePolicy(LatticePolicy):
    """
    Cutoffs and wages at every date and reachable public state of a finite-horizon problem. Value
    functions are kept on the θ-grid (one table per date) unless ``store_values`` is off.
    """

    def __init__(self, spec: FiniteHorizonSpec, grid: npt.NDArray[np.float64], tables: List[CutoffTable],
                 values: Optional[List[npt.NDArray[np.float64]]]):
        self.spec = spec
        self.grid = grid
        self.lattice = StateLattice(spec.prior, spec.periods)
        self.regime = spec.regime
        self.prefs = spec.prefs
        self._tables = tables
        self._values = values

    @property
    def horizon(self) -> Optional[int]:
        return self.spec.periods

    @property
    def converged(self) -> bool:
        return True

    def tables(self, date: int) -> CutoffTable:
        if not 0 <= date < self.spec.periods:
            raise DomainError(f'Date {date} is outside the horizon [0, {self.spec.periods})')
        return self._tables[date]

    def value_table(self, date: int) -> npt.NDArray[np.float64]:
        if self._values is None:
            raise DomainError('Value functions were not stored for this policy')
        if date == self.spec.periods:
            return np.zeros((states_up_to(date), len(self.grid)))
        if not 0 <= date < self.spec.periods:
            raise DomainError(f'Date {date} is outside the horizon [0, {self.spec.periods}]')
        return self._values[date]

    def entries(self, date: int) -> List[Tuple[BetaParams, CutoffWage]]:
        table = self.tables(date)
        return [(self.lattice.state(i), table[i]) for i in range(len(table))]


def solve_finite(spec: FiniteHorizonSpec) -> FinitePolicy:
    """Backward induction from the last date, where the continuation is zero."""
    grid = np.linspace(0.0, 1.0, spec.theta_grid_size)
    lattice = StateLattice(spec.prior, spec.periods)

    tables: List[CutoffTable] = [CutoffTable(np.empty(0), np.empty(0))] * spec.periods
    values: List[npt.NDArray[np.float64]] = [np.empty((0, 0))] * spec.periods
    upcoming = np.zeros((states_up_to(spec.periods), len(grid)))

    for date in reversed(range(spec.periods)):
        indices = np.arange(states_up_to(date))
        success = upcoming[lattice.success_index(indices)]
        failure = upcoming[lattice.failure_index(indices)]
        stay = upcoming[indices]

        table = batch_solve_cutoffs(
            grid, lattice.alphas[indices], lattice.betas[indices], success, failure, stay,
            spec.regime, spec.prefs, spec.delta,
        )
        tables[date] = table
        upcoming = bellman_update(grid, success, failure, stay, spec.prefs(table.wages), spec.delta)
        if spec.store_values:
            values[date] = upcoming

        logger.debug('Solved date %d (%d states), cutoff range [%.4f, %.4f]', date, len(indices),
                     table.cutoffs.min(), table.cutoffs.max())

    logger.info('Solved %d-period %s problem from prior %s', spec.periods, spec.regime.value, spec.prior)
    return FinitePolicy(spec, grid, tables, values if spec.store_values else None)


def branch_wages(policy: FinitePolicy, date: int, history: Sequence[Outcome]) -> CutoffWage:
    """The cutoff and wage posted at ``date`` after the worker published ``history`` through
    self-employment (periods of firm employment leave no trace in the public state)."""
    if len(history) > date:
        raise DomainError(f'A history of {len(history)} public outcomes cannot be reached by date {date}')
    state = policy.spec.prior
    for outcome in history:
        state = update(state, outcome)
    return policy.cutoff_wage(date, state)


def value_at(policy: FinitePolicy, date: int, theta: float, state: BetaParams) -> float:
    index = policy.lattice.index(state, max_depth=min(date, policy.spec.periods))
    return float(np.interp(theta, policy.grid, policy.value_table(date)[index]))


def branch_utilities(policy: FinitePolicy, date: int, theta: float, state: BetaParams) -> Tuple[float, float]:
    """(U_S, U_E) at ``date`` for type ``theta``, recomputed from the stored policy."""
    index = policy.lattice.index(state, max_depth=date)
    upcoming = policy.value_table(date + 1)
    lattice = policy.lattice
    success = np.interp(theta, policy.grid, upcoming[lattice.locate(lattice.depths[index] + 1,
                                                                    lattice.successes[index] + 1)])
    failure = np.interp(theta, policy.grid, upcoming[lattice.locate(lattice.depths[index] + 1,
                                                                    lattice.successes[index])])
    stay = np.interp(theta, policy.grid, upcoming[index])
    delta = policy.spec.delta
    wage = policy.tables(date)[index].wage
    return (float(theta + delta * (theta * success + (1 - theta) * failure)),
            float(policy.prefs(wage) + delta * stay))


def acceptance_sets(policy: FinitePolicy, date: int) -> Dict[BetaParams, AcceptanceSet]:
    return {
        state: AcceptanceSet(state=state, cutoff=entry.cutoff, wage=entry.wage,
                             mass=float(beta_cdf(entry.cutoff, state.alpha, state.beta)))
        for state, entry in policy.entries(date)
    }


def middle_period_quadratic_cutoff(rho: float, delta: float) -> float:
    """
    Closed-form naive cutoff at (1,1) with two periods left and a uniform prior, valid while the
    cutoff lies between the last-period cutoffs after a failure and at the prior. There the
    continuation after a success and after staying are flat, and after a failure it is θ itself.
    """
    after_success, at_prior = (2 / 3) ** rho, (1 / 2) ** rho
    linear = 1 + delta * (after_success + 1)
    return (linear - math.sqrt(linear ** 2 - 4 * delta * at_prior * (1 + delta))) / (2 * delta)


__all__ = [
    'FiniteHorizonSpec', 'FinitePolicy', 'AcceptanceSet', 'solve_finite', 'branch_wages', 'value_at',
    'branch_utilities', 'acceptance_sets', 'middle_period_quadratic_cutoff',
]
