import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import numpy.typing as npt

from careerconcerns.beliefs.beta import BetaParams
from careerconcerns.beliefs.special import beta_cdf
from careerconcerns.errors import DomainError, UnconvergedPolicyError
from careerconcerns.model.core import PricingRegime, Preferences, CutoffTable, CutoffWage, batch_solve_cutoffs, \
    absorbing_wage_utilities, batch_solve_absorbing_cutoffs, CUTOFF_TOLERANCE
from careerconcerns.solvers.lattice import StateLattice, LatticePolicy, states_up_to, bellman_update

logger = logging.getLogger(__name__)

DEFAULT_THETA_GRID_SIZE = 1025
MIN_THETA_GRID_SIZE = 257
DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_SWEEPS = 10_000

# at the depth cap the state is treated as frozen, so only the endpoints of the θ-grid matter
_STATIC_GRID = np.array([0.0, 1.0])


@dataclass(frozen=True)
class LatticeSpec:
    prior: BetaParams
    max_depth: int
    delta: float
    prefs: Preferences
    regime: PricingRegime
    theta_grid_size: int = DEFAULT_THETA_GRID_SIZE
    tolerance: float = DEFAULT_TOLERANCE
    max_sweeps: int = DEFAULT_MAX_SWEEPS

    def __post_init__(self):
        if self.max_depth < 1:
            raise DomainError(f'Lattice depth must be positive, got {self.max_depth}')
        if not 0 < self.delta < 1:
            raise DomainError(f'Discount factor must lie in (0, 1), got {self.delta}')
        if self.theta_grid_size < MIN_THETA_GRID_SIZE:
            raise DomainError(f'The θ-grid needs at least {MIN_THETA_GRID_SIZE} points, got {self.theta_grid_size}')
        if not self.tolerance > 0:
            raise DomainError(f'Tolerance must be positive, got {self.tolerance}')
        if self.max_sweeps < 1:
            raise DomainError(f'Need at least one sweep, got {self.max_sweeps}')


def quasi_static_cutoffs(alphas: npt.NDArray[np.float64], betas: npt.NDArray[np.float64],
                         regime: PricingRegime, prefs: Preferences) -> CutoffTable:
    """Cutoffs at states whose public belief no longer moves: the worker compares θ with u(w) alone."""
    zeros = np.zeros((len(alphas), len(_STATIC_GRID)))
    return batch_solve_cutoffs(_STATIC_GRID, alphas, betas, zeros, zeros, zeros, regime, prefs, 0.0)


class StationarySolution(LatticePolicy):
    """
    A stationary cutoff policy on the lattice of states with at most ``max_depth`` public outcomes.
    States below the cap carry value-iterated cutoffs; the cap and anything beyond it use the
    quasi-static closure.
    """

    def __init__(self, spec: LatticeSpec, grid: npt.NDArray[np.float64], table: CutoffTable,
                 values: npt.NDArray[np.float64], converged: bool, residuals: List[float]):
        self.spec = spec
        self.grid = grid
        self.lattice = StateLattice(spec.prior, spec.max_depth)
        self.regime = spec.regime
        self.prefs = spec.prefs
        self.table = table
        self.values = values
        self.residuals = residuals
        self._converged = converged
        self._extension = table

    @property
    def horizon(self) -> Optional[int]:
        return None

    @property
    def converged(self) -> bool:
        return self._converged

    @property
    def sweeps_used(self) -> int:
        return len(self.residuals)

    @property
    def sup_norm_residual(self) -> float:
        return self.residuals[-1] if self.residuals else float('inf')

    def tables(self, date: int) -> CutoffTable:
        """The cutoff table covering every state with at most ``date`` public outcomes (and at least
        the whole lattice); states past the cap are filled in with quasi-static cutoffs on demand."""
        if date <= self.spec.max_depth:
            return self.table
        if date > self._depth_of(self._extension):
            self._extend(max(date, 2 * self._depth_of(self._extension)))
        return self._extension

    def cutoff_wage(self, date: int, state: BetaParams) -> CutoffWage:
        index = StateLattice(self.spec.prior, max(date, self.spec.max_depth)).index(state, max_depth=date)
        return self.tables(date)[index]

    def cutoff_map(self) -> Dict[BetaParams, CutoffWage]:
        return {self.lattice.state(i): self.table[i] for i in range(self.lattice.size)}

    @staticmethod
    def _depth_of(table: CutoffTable) -> int:
        depth = 0
        while states_up_to(depth) < len(table):
            depth += 1
        return depth

    def _extend(self, depth: int):
        wider = StateLattice(self.spec.prior, depth)
        fresh = np.arange(len(self._extension), wider.size)
        extra = quasi_static_cutoffs(wider.alphas[fresh], wider.betas[fresh], self.regime, self.prefs)
        logger.debug('Extended stationary policy to depth %d with %d quasi-static states', depth, len(fresh))
        self._extension = CutoffTable(
            cutoffs=np.concatenate([self._extension.cutoffs, extra.cutoffs]),
            wages=np.concatenate([self._extension.wages, extra.wages]),
        )


def value_iterate(spec: LatticeSpec) -> StationarySolution:
    """
    Joint value iteration: every sweep resolves the cutoffs and wages of the interior states against
    the current value table, then applies the Bellman operator with those wages. States at the depth
    cap keep the quasi-static value max{θ, u(w)}/(1-δ) throughout.

    A worker who takes the job at a state faces the same state and wage next period, so cutoffs are
    resolved with employment valued as an annuity on the wage. Under sophisticated pricing that
    problem has a spurious zero at c = 0 (an empty pool earns a zero wage, which nobody takes);
    the largest zero is selected, which is the one a long finite horizon converges to.
    """
    grid = np.linspace(0.0, 1.0, spec.theta_grid_size)
    lattice = StateLattice(spec.prior, spec.max_depth)
    interior = np.arange(states_up_to(spec.max_depth - 1))
    success_rows, failure_rows = lattice.success_index(interior), lattice.failure_index(interior)
    tolerance = min(CUTOFF_TOLERANCE, spec.tolerance) * 1e-2

    static = quasi_static_cutoffs(lattice.alphas, lattice.betas, spec.regime, spec.prefs)
    values = np.maximum(grid, spec.prefs(static.wages)[:, None]) / (1 - spec.delta)
    wage_utilities = absorbing_wage_utilities(grid, lattice.alphas[interior], lattice.betas[interior],
                                              spec.regime, spec.prefs, tolerance)

    def resolve(current: npt.NDArray[np.float64]) -> CutoffTable:
        return batch_solve_absorbing_cutoffs(
            grid, lattice.alphas[interior], lattice.betas[interior],
            current[success_rows], current[failure_rows], wage_utilities,
            spec.regime, spec.prefs, spec.delta, tolerance,
        )

    residuals: List[float] = []
    converged = False
    for sweep in range(spec.max_sweeps):
        table = resolve(values)
        updated = bellman_update(grid, values[success_rows], values[failure_rows], values[interior],
                                 spec.prefs(table.wages), spec.delta)
        residual = float(np.max(np.abs(updated - values[interior])))
        values[interior] = updated
        residuals.append(residual)
        logger.debug('Sweep %d: residual %.3e', sweep + 1, residual)
        if residual <= spec.tolerance:
            converged = True
            break

    table = resolve(values)
    full = CutoffTable(
        cutoffs=np.concatenate([table.cutoffs, static.cutoffs[len(interior):]]),
        wages=np.concatenate([table.wages, static.wages[len(interior):]]),
    )

    if converged:
        logger.info('Value iteration converged after %d sweeps (residual %.3e)', len(residuals), residuals[-1])
    else:
        logger.warning('Value iteration did not converge within %d sweeps (residual %.3e)',
                       spec.max_sweeps, residuals[-1])

    return StationarySolution(spec, grid, full, values, converged, residuals)


@dataclass(frozen=True)
class RegionEntry:
    cutoff: float
    mass: float


@dataclass(frozen=True)
class AbsorbingRegion:
    """{(α, β, θ): θ <= cutoff(α, β)}, with the probability each state's belief puts on it."""
    entries: Dict[BetaParams, RegionEntry] = field(default_factory=dict)

    def contains(self, state: BetaParams, theta: float) -> bool:
        return theta <= self.entries[state].cutoff

    def __getitem__(self, state: BetaParams) -> RegionEntry:
        return self.entries[state]

    def __len__(self):
        return len(self.entries)


def absorbing_region(sol: StationarySolution) -> AbsorbingRegion:
    if not sol.converged:
        raise UnconvergedPolicyError(
            f'Refusing to read an absorbing region off an unconverged solution (residual {sol.sup_norm_residual:.3e})'
        )
    lattice = sol.lattice
    masses = np.asarray(beta_cdf(sol.table.cutoffs, lattice.alphas, lattice.betas), dtype=float)
    return AbsorbingRegion({
        lattice.state(i): RegionEntry(cutoff=float(sol.table.cutoffs[i]), mass=float(masses[i]))
        for i in range(lattice.size)
    })
