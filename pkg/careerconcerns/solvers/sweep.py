import dataclasses
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, List, Optional, Union

import numpy as np
import numpy.typing as npt

from careerconcerns.beliefs.beta import BetaParams
from careerconcerns.errors import DomainError, SolverFailure
from careerconcerns.model.core import CRRA
from careerconcerns.solvers.lattice import states_up_to
from careerconcerns.solvers.stationary import LatticeSpec, value_iterate

logger = logging.getLogger(__name__)

VERDICT_TOLERANCE = 1e-9


class SweepParameter(Enum):
    delta = 'delta'
    rho = 'rho'
    depth = 'depth'


class Verdict(Enum):
    constant = 'constant'
    non_decreasing = 'non-decreasing'
    non_increasing = 'non-increasing'
    mixed = 'mixed'
    undetermined = 'undetermined'


@dataclass(frozen=True)
class SweepPoint:
    """Summary of one stationary solve in a sweep. Failed points keep the error and no cutoffs."""
    value: float
    states: List[BetaParams]
    cutoffs: npt.NDArray[np.float64]
    wages: npt.NDArray[np.float64]
    converged: bool
    sweeps_used: int
    residual: float
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.converged


@dataclass(frozen=True)
class SweepTable:
    parameter: SweepParameter
    points: List[SweepPoint]

    @property
    def failures(self) -> List[SweepPoint]:
        return [point for point in self.points if not point.ok]


def _respec(spec: LatticeSpec, parameter: SweepParameter, value: float) -> LatticeSpec:
    if parameter == SweepParameter.delta:
        return dataclasses.replace(spec, delta=float(value))
    if parameter == SweepParameter.rho:
        return dataclasses.replace(spec, prefs=CRRA(float(value)))
    if float(value) != int(value):
        raise DomainError(f'Lattice depth must be an integer, got {value}')
    return dataclasses.replace(spec, max_depth=int(value))


def sweep(spec: LatticeSpec, parameter: Union[SweepParameter, str], values: Sequence[float]) -> SweepTable:
    """Solves ``spec`` once per value of ``parameter``. A point that fails is recorded and the sweep
    moves on."""
    parameter = SweepParameter(parameter)
    points = []
    for value in values:
        try:
            solution = value_iterate(_respec(spec, parameter, value))
        except (DomainError, SolverFailure) as ex:
            logger.error('Sweep point %s=%s failed: %s', parameter.value, value, ex)
            points.append(SweepPoint(value=float(value), states=[], cutoffs=np.empty(0), wages=np.empty(0),
                                     converged=False, sweeps_used=0, residual=float('nan'), error=str(ex)))
            continue

        points.append(SweepPoint(
            value=float(value),
            states=list(solution.lattice.states()),
            cutoffs=solution.table.cutoffs,
            wages=solution.table.wages,
            converged=solution.converged,
            sweeps_used=solution.sweeps_used,
            residual=solution.sup_norm_residual,
        ))
        logger.info('Sweep point %s=%s done (%d sweeps)', parameter.value, value, solution.sweeps_used)

    return SweepTable(parameter=parameter, points=points)


def comparative_verdict(table: SweepTable, tolerance: float = VERDICT_TOLERANCE,
                        max_depth: Optional[int] = None) -> Verdict:
    """
    Pointwise direction of the cutoff maps along the sweep, compared over the states every point
    has in common (optionally only those with at most ``max_depth`` outcomes). Points are taken in
    increasing order of the swept value; failed points are skipped.
    """
    points = sorted((point for point in table.points if point.ok), key=lambda point: point.value)
    if len(points) < 2:
        return Verdict.undetermined

    common = min(len(point.cutoffs) for point in points)
    if max_depth is not None:
        common = min(common, states_up_to(max_depth))
    return direction(np.stack([point.cutoffs[:common] for point in points]), tolerance)


def direction(series: npt.ArrayLike, tolerance: float = VERDICT_TOLERANCE) -> Verdict:
    """Which way ``series`` moves along its first axis, ignoring steps within ``tolerance``."""
    series = np.asarray(series, dtype=float)
    if len(series) < 2:
        return Verdict.undetermined
    steps = np.diff(series, axis=0)
    rising, falling = np.any(steps > tolerance), np.any(steps < -tolerance)
    if rising and falling:
        return Verdict.mixed
    if rising:
        return Verdict.non_decreasing
    if falling:
        return Verdict.non_increasing
    return Verdict.constant
