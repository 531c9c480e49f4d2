import abc
from abc import ABC
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional

import numpy as np
import numpy.typing as npt

from careerconcerns.beliefs.beta import BetaParams
from careerconcerns.errors import UnreachableStateError
from careerconcerns.model.core import PricingRegime, Preferences, CutoffTable, CutoffWage


def states_up_to(depth: int) -> int:
    """Number of lattice states with at most ``depth`` public outcomes."""
    return (depth + 1) * (depth + 2) // 2


@dataclass(frozen=True)
class StateLattice:
    """
    The public states reachable from a prior, up to ``max_depth`` public outcomes. States are stored
    depth-major: the state with ``depth`` outcomes, ``k`` of them successes, sits at
    ``depth * (depth + 1) / 2 + k``, so the states with at most d outcomes are always a prefix.
    """
    prior: BetaParams
    max_depth: int

    @property
    def size(self) -> int:
        return states_up_to(self.max_depth)

    @cached_property
    def depths(self) -> npt.NDArray[np.int64]:
        return np.concatenate([np.full(d + 1, d) for d in range(self.max_depth + 1)])

    @cached_property
    def successes(self) -> npt.NDArray[np.int64]:
        return np.concatenate([np.arange(d + 1) for d in range(self.max_depth + 1)])

    @cached_property
    def alphas(self) -> npt.NDArray[np.float64]:
        return self.prior.alpha + self.successes

    @cached_property
    def betas(self) -> npt.NDArray[np.float64]:
        return self.prior.beta + self.depths - self.successes

    def success_index(self, indices: npt.NDArray[np.int64]) -> npt.NDArray[np.int64]:
        return self.locate(self.depths[indices] + 1, self.successes[indices] + 1)

    def failure_index(self, indices: npt.NDArray[np.int64]) -> npt.NDArray[np.int64]:
        return self.locate(self.depths[indices] + 1, self.successes[indices])

    @staticmethod
    def locate(depth, successes):
        return depth * (depth + 1) // 2 + successes

    def index(self, state: BetaParams, max_depth: Optional[int] = None) -> int:
        """Lattice position of ``state``; raises :class:`UnreachableStateError` for states that no
        public history of at most ``max_depth`` outcomes leads to."""
        limit = self.max_depth if max_depth is None else max_depth
        successes = state.alpha - self.prior.alpha
        failures = state.beta - self.prior.beta
        k, f = round(successes), round(failures)
        if abs(successes - k) > 1e-9 or abs(failures - f) > 1e-9 or k < 0 or f < 0 or k + f > limit:
            raise UnreachableStateError(limit, state)
        return self.locate(k + f, k)

    def state(self, index: int) -> BetaParams:
        return BetaParams(float(self.alphas[index]), float(self.betas[index]))

    def states(self, max_depth: Optional[int] = None) -> Iterator[BetaParams]:
        for i in range(states_up_to(self.max_depth if max_depth is None else max_depth)):
            yield self.state(i)


def bellman_update(
        grid: npt.NDArray[np.float64],
        success: npt.NDArray[np.float64],
        failure: npt.NDArray[np.float64],
        stay: npt.NDArray[np.float64],
        wage_utility: npt.NDArray[np.float64],
        delta: float,
) -> npt.NDArray[np.float64]:
    """V(θ; s) = max{U_S, U_E} on the θ-grid, one row per state."""
    self_employed = grid + delta * (grid * success + (1 - grid) * failure)
    employed = wage_utility[:, None] + delta * stay
    return np.maximum(self_employed, employed)


class LatticePolicy(ABC):
    """A solved cutoff policy over a :class:`StateLattice`, as consumed by the simulator."""
    lattice: StateLattice
    regime: PricingRegime
    prefs: Preferences

    @property
    @abc.abstractmethod
    def horizon(self) -> Optional[int]:
        """Number of periods the policy covers, or None if it is stationary."""
        ...

    @property
    @abc.abstractmethod
    def converged(self) -> bool:
        ...

    @abc.abstractmethod
    def tables(self, date: int) -> CutoffTable:
        """Cutoffs and wages at ``date`` for every state with at most ``date`` public outcomes,
        indexed by lattice position."""
        ...

    def cutoff_wage(self, date: int, state: BetaParams) -> CutoffWage:
        table = self.tables(date)
        return table[self.lattice.index(state, max_depth=date)]
