import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
import numpy.typing as npt
from scipy import stats

from careerconcerns.beliefs.beta import BetaParams, Outcome
from careerconcerns.errors import DomainError, UnconvergedPolicyError
from careerconcerns.simulation.rng import PathStreams
from careerconcerns.solvers.lattice import LatticePolicy, StateLattice

logger = logging.getLogger(__name__)

NO_OUTCOME = -1


class Action(Enum):
    self_employment = 'S'
    employment = 'E'


@dataclass(frozen=True)
class DrawFromPrior:
    def thetas(self, uniforms: npt.NDArray[np.float64], prior: BetaParams) -> npt.NDArray[np.float64]:
        return stats.beta.ppf(uniforms, prior.alpha, prior.beta)


@dataclass(frozen=True)
class FixedTheta:
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise DomainError(f'Talent must lie in [0, 1], got {self.theta}')

    def thetas(self, uniforms: npt.NDArray[np.float64], prior: BetaParams) -> npt.NDArray[np.float64]:
        return np.full(len(uniforms), self.theta)


ThetaSource = Union[DrawFromPrior, FixedTheta]


@dataclass(frozen=True)
class SimSpec:
    policy: LatticePolicy
    n_paths: int
    horizon: int
    seed: int
    theta_source: ThetaSource = DrawFromPrior()

    def __post_init__(self):
        if self.n_paths < 1:
            raise DomainError(f'Need at least one path, got {self.n_paths}')
        if self.horizon < 1:
            raise DomainError(f'Need at least one period, got {self.horizon}')
        if self.policy.horizon is not None and self.horizon > self.policy.horizon:
            raise DomainError(f'Cannot simulate {self.horizon} periods under a {self.policy.horizon}-period policy')


@dataclass(frozen=True)
class PeriodRecord:
    date: int
    state: BetaParams
    action: Action
    outcome: Optional[Outcome]
    wage: Optional[float]
    utility: float
    posted_wage: float


@dataclass(frozen=True)
class Trajectory:
    path: int
    theta: float
    records: List[PeriodRecord]

    @property
    def absorption_time(self) -> Optional[int]:
        """First date of firm employment, or None if the worker never took it."""
        return next((r.date for r in self.records if r.action == Action.employment), None)


@dataclass(frozen=True, eq=False)
class TrajectorySet:
    """Simulated paths stored column-wise; row i is path ``paths[i]``, column t is date t."""
    prior: BetaParams
    regime: str
    paths: npt.NDArray[np.int64]
    thetas: npt.NDArray[np.float64]
    successes: npt.NDArray[np.int64]
    failures: npt.NDArray[np.int64]
    self_employed: npt.NDArray[np.bool_]
    outcomes: npt.NDArray[np.int8]
    posted_wages: npt.NDArray[np.float64]
    utilities: npt.NDArray[np.float64]

    @property
    def horizon(self) -> int:
        return self.self_employed.shape[1]

    def __len__(self):
        return len(self.paths)

    def __getitem__(self, i: int) -> Trajectory:
        records = []
        for t in range(self.horizon):
            employed = not self.self_employed[i, t]
            outcome = self.outcomes[i, t]
            records.append(PeriodRecord(
                date=t,
                state=BetaParams(self.prior.alpha + int(self.successes[i, t]), self.prior.beta + int(self.failures[i, t])),
                action=Action.employment if employed else Action.self_employment,
                outcome=None if outcome == NO_OUTCOME else Outcome(int(outcome)),
                wage=float(self.posted_wages[i, t]) if employed else None,
                utility=float(self.utilities[i, t]),
                posted_wage=float(self.posted_wages[i, t]),
            ))
        return Trajectory(path=int(self.paths[i]), theta=float(self.thetas[i]), records=records)

    def __iter__(self) -> Iterator[Trajectory]:
        return (self[i] for i in range(len(self)))


def simulate(spec: SimSpec, paths: Optional[range] = None) -> TrajectorySet:
    """
    Runs every path through the policy, all paths at once. ``paths`` selects which path indices to
    run (all of them by default), so a large run can be split up and the parts aggregated and merged.
    """
    policy = spec.policy
    if not policy.converged:
        raise UnconvergedPolicyError('Refusing to simulate an unconverged policy')

    paths = range(spec.n_paths) if paths is None else paths
    draws = PathStreams(spec.seed).uniforms(paths, spec.horizon + 1)
    prior = policy.lattice.prior
    thetas = spec.theta_source.thetas(draws[:, 0], prior)

    n, horizon = len(paths), spec.horizon
    successes = np.zeros((n, horizon), dtype=np.int64)
    failures = np.zeros((n, horizon), dtype=np.int64)
    self_employed = np.zeros((n, horizon), dtype=bool)
    outcomes = np.full((n, horizon), NO_OUTCOME, dtype=np.int8)
    posted_wages = np.zeros((n, horizon))
    utilities = np.zeros((n, horizon))

    k, f = np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.int64)
    for t in range(horizon):
        table = policy.tables(t)
        index = StateLattice.locate(k + f, k)
        cutoffs, wages = table.cutoffs[index], table.wages[index]

        # ties resolve to employment
        working = thetas > cutoffs
        success = working & (draws[:, t + 1] < thetas)

        successes[:, t], failures[:, t] = k, f
        self_employed[:, t] = working
        outcomes[working, t] = success[working]
        posted_wages[:, t] = wages
        utilities[:, t] = np.where(working, success.astype(float), policy.prefs(wages))

        k = k + success
        f = f + (working & ~success)

    logger.info('Simulated %d paths over %d periods (seed %d)', n, horizon, spec.seed)
    return TrajectorySet(
        prior=prior, regime=policy.regime.value, paths=np.asarray(paths, dtype=np.int64), thetas=thetas,
        successes=successes, failures=failures, self_employed=self_employed, outcomes=outcomes,
        posted_wages=posted_wages, utilities=utilities,
    )


@dataclass
class TrajectorySummary:
    """
    Counts behind the summary statistics of a set of trajectories. Summaries of disjoint path sets
    merge by adding counts, in any order.
    """
    regime: str
    paths: int = 0
    self_employed_by_date: Counter = field(default_factory=Counter)
    paths_by_date: Counter = field(default_factory=Counter)
    absorption_times: Counter = field(default_factory=Counter)
    never_absorbed: int = 0
    entries_by_run: Counter = field(default_factory=Counter)
    at_risk_by_run: Counter = field(default_factory=Counter)
    wage_sums: Counter = field(default_factory=Counter)
    wage_counts: Counter = field(default_factory=Counter)
    branch_wage_sums: Counter = field(default_factory=Counter)
    branch_counts: Counter = field(default_factory=Counter)

    def merge(self, other: 'TrajectorySummary') -> 'TrajectorySummary':
        if other.regime != self.regime:
            raise DomainError(f'Cannot merge {self.regime} and {other.regime} summaries')
        merged = TrajectorySummary(regime=self.regime, paths=self.paths + other.paths,
                                   never_absorbed=self.never_absorbed + other.never_absorbed)
        for name in ('self_employed_by_date', 'paths_by_date', 'absorption_times', 'entries_by_run',
                     'at_risk_by_run', 'wage_sums', 'wage_counts', 'branch_wage_sums', 'branch_counts'):
            setattr(merged, name, getattr(self, name) + getattr(other, name))
        return merged

    @property
    def self_employment_share(self) -> List[float]:
        return [self.self_employed_by_date[t] / self.paths_by_date[t] for t in sorted(self.paths_by_date)]

    @property
    def employment_share(self) -> List[float]:
        return [1.0 - share for share in self.self_employment_share]

    @property
    def hazard_by_run(self) -> Dict[int, Tuple[float, int]]:
        """Share of self-employed workers who move into firm employment the next period, by the number
        of consecutive public failures they have just had, with the number of workers at risk."""
        return {run: (self.entries_by_run[run] / self.at_risk_by_run[run], self.at_risk_by_run[run])
                for run in sorted(self.at_risk_by_run)}

    @property
    def mean_wage_by_state(self) -> Dict[Tuple[float, float], float]:
        return {state: self.wage_sums[state] / self.wage_counts[state] for state in sorted(self.wage_counts)}

    @property
    def wage_gap(self) -> Optional[float]:
        """Mean date-1 posted wage after a date-0 public success minus that after a failure."""
        if not (self.branch_counts[Outcome.success.value] and self.branch_counts[Outcome.failure.value]):
            return None
        return (self.branch_wage_sums[Outcome.success.value] / self.branch_counts[Outcome.success.value]
                - self.branch_wage_sums[Outcome.failure.value] / self.branch_counts[Outcome.failure.value])


def _trailing_failure_runs(outcomes: npt.NDArray[np.int8]) -> npt.NDArray[np.int64]:
    """runs[:, t] = consecutive public failures ending at date t (zero unless date t was a failure)."""
    runs = np.zeros(outcomes.shape, dtype=np.int64)
    for t in range(outcomes.shape[1]):
        previous = runs[:, t - 1] if t > 0 else 0
        failed = outcomes[:, t] == Outcome.failure.value
        # a period of firm employment leaves the run where it was
        runs[:, t] = np.where(failed, previous + 1, np.where(outcomes[:, t] == NO_OUTCOME, previous, 0))
    return runs


def aggregate(trajs: TrajectorySet) -> TrajectorySummary:
    if len(trajs) == 0:
        raise DomainError('Cannot aggregate an empty trajectory set')
    summary = TrajectorySummary(regime=trajs.regime, paths=len(trajs))
    horizon = trajs.horizon

    for t in range(horizon):
        summary.self_employed_by_date[t] = int(trajs.self_employed[:, t].sum())
        summary.paths_by_date[t] = len(trajs)

    employed = ~trajs.self_employed
    ever = employed.any(axis=1)
    summary.absorption_times = Counter(np.argmax(employed[ever], axis=1).tolist())
    summary.never_absorbed = int((~ever).sum())

    runs = _trailing_failure_runs(trajs.outcomes)
    for t in range(1, horizon):
        at_risk = trajs.self_employed[:, t - 1]
        entered = at_risk & employed[:, t]
        summary.at_risk_by_run.update(Counter(runs[at_risk, t - 1].tolist()))
        summary.entries_by_run.update(Counter(runs[entered, t - 1].tolist()))

    states = np.stack([(trajs.prior.alpha + trajs.successes).ravel(), (trajs.prior.beta + trajs.failures).ravel()],
                      axis=1)
    visited, inverse = np.unique(states, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    sums = np.bincount(inverse, weights=trajs.posted_wages.ravel())
    counts = np.bincount(inverse)
    for (alpha, beta), total, count in zip(visited.tolist(), sums.tolist(), counts.tolist()):
        summary.wage_sums[(alpha, beta)] = total
        summary.wage_counts[(alpha, beta)] = count

    if horizon > 1:
        for outcome in Outcome:
            branch = trajs.outcomes[:, 0] == outcome.value
            summary.branch_wage_sums[outcome.value] = float(trajs.posted_wages[branch, 1].sum())
            summary.branch_counts[outcome.value] = int(branch.sum())

    return summary


def hazard_non_decreasing(summary: TrajectorySummary, z: float = 1.645, min_at_risk: int = 100) -> bool:
    """
    One-sided check that the entry hazard does not fall as the failure run grows: no adjacent pair
    of run lengths (each with at least ``min_at_risk`` workers) shows a drop significant at ``z``.
    """
    hazards = [(rate, n) for rate, n in summary.hazard_by_run.values() if n >= min_at_risk]
    for (low_rate, low_n), (high_rate, high_n) in zip(hazards, hazards[1:]):
        pooled = (low_rate * low_n + high_rate * high_n) / (low_n + high_n)
        spread = np.sqrt(pooled * (1 - pooled) * (1 / low_n + 1 / high_n))
        if spread > 0 and (low_rate - high_rate) / spread > z:
            return False
    return True
