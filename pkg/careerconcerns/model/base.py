import abc
from abc import ABC
from typing import Union

import numpy as np
import numpy.typing as npt

Real = Union[float, npt.NDArray[np.float64]]


class ContinuationValues(ABC):
    """
    A :class:`ContinuationValues` is a read-only view onto next period's value function around a
    single public state: the value after a public success, after a public failure, and after a period
    of opaque employment. Implementations must not change while a cutoff is being solved.

    An ``absorbing`` view describes a state where employment keeps the worker employed for good, so
    the employment branch is worth the wage as an annuity and ``stay`` plays no part.
    """
    absorbing: bool = False

    @abc.abstractmethod
    def success(self, theta: Real) -> Real:
        ...

    @abc.abstractmethod
    def failure(self, theta: Real) -> Real:
        ...

    @abc.abstractmethod
    def stay(self, theta: Real) -> Real:
        ...


class TerminalContinuation(ContinuationValues):
    def success(self, theta: Real) -> Real:
        return np.zeros_like(theta, dtype=float) if np.ndim(theta) else 0.0

    def failure(self, theta: Real) -> Real:
        return self.success(theta)

    def stay(self, theta: Real) -> Real:
        return self.success(theta)


class GridContinuation(ContinuationValues):
    """Continuation values tabulated on a θ-grid, linearly interpolated in between."""

    def __init__(self, grid: npt.NDArray[np.float64], success: npt.NDArray[np.float64],
                 failure: npt.NDArray[np.float64], stay: npt.NDArray[np.float64]):
        self.grid = grid
        self._success = success
        self._failure = failure
        self._stay = stay

    def success(self, theta: Real) -> Real:
        return np.interp(theta, self.grid, self._success)

    def failure(self, theta: Real) -> Real:
        return np.interp(theta, self.grid, self._failure)

    def stay(self, theta: Real) -> Real:
        return np.interp(theta, self.grid, self._stay)


class AbsorbingContinuation(ContinuationValues):
    """Success and failure values tabulated on a θ-grid at a state where employment is absorbing."""
    absorbing = True

    def __init__(self, grid: npt.NDArray[np.float64], success: npt.NDArray[np.float64],
                 failure: npt.NDArray[np.float64]):
        self.grid = grid
        self._success = success
        self._failure = failure

    def success(self, theta: Real) -> Real:
        return np.interp(theta, self.grid, self._success)

    def failure(self, theta: Real) -> Real:
        return np.interp(theta, self.grid, self._failure)

    def stay(self, theta: Real) -> Real:
        return np.zeros_like(theta, dtype=float) if np.ndim(theta) else 0.0
