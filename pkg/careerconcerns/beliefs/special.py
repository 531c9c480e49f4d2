"""Incomplete beta integrals and truncated Beta means.

The lower incomplete beta is evaluated through the continued fraction for the regularized
function (modified Lentz), switching to the upper tail past the mean, and kept in log space so
that truncated means stay accurate where both integrals underflow. Kernels are compiled numba
ufuncs, so every public function accepts scalars or broadcastable numpy arrays.
"""
import math
from typing import Union

import numba as nb
import numpy as np
import numpy.typing as npt
from scipy.special import betaln

from careerconcerns.beliefs.beta import BetaParams
from careerconcerns.errors import DomainError

ArrayLike = Union[float, npt.NDArray[np.float64]]

MAX_ITERATIONS = 10_000
EPS = 1e-15
FPMIN = 1e-300


@nb.njit(cache=True)
def _betacf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if math.fabs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAX_ITERATIONS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if math.fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if math.fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if math.fabs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if math.fabs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        step = d * c
        h *= step
        if math.fabs(step - 1.0) < EPS:
            return h
    return math.nan


@nb.njit(cache=True)
def _log_complete_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


@nb.vectorize(['f8(f8,f8,f8)'], cache=True)
def _log_lower_beta(x, a, b):
    if x <= 0.0:
        return -math.inf
    complete = _log_complete_beta(a, b)
    if x >= 1.0:
        return complete
    front = a * math.log(x) + b * math.log1p(-x)
    if x < (a + 1.0) / (a + b + 2.0):
        return front + math.log(_betacf(a, b, x)) - math.log(a)
    upper = math.exp(front - complete) * _betacf(b, a, 1.0 - x) / b
    return complete + math.log1p(-upper)


def _out(value: npt.NDArray[np.float64]) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def _check_unit_interval(c: ArrayLike, what: str):
    c = np.asarray(c, dtype=float)
    if np.any(~np.isfinite(c)) or np.any(c < 0.0) or np.any(c > 1.0):
        raise DomainError(f'{what} must lie in [0, 1]')


def _check_shapes(a: ArrayLike, b: ArrayLike):
    if np.any(np.asarray(a) <= 0) or np.any(np.asarray(b) <= 0):
        raise DomainError('Beta shape parameters must be positive')


def _converged(values: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    if np.any(np.isnan(values)):
        raise DomainError('Incomplete beta continued fraction failed to converge')
    return values


def log_incomplete_beta(c: ArrayLike, a: ArrayLike, b: ArrayLike) -> ArrayLike:
    _check_unit_interval(c, 'Upper integration limit')
    _check_shapes(a, b)
    return _out(_converged(_log_lower_beta(np.asarray(c, dtype=float), a, b)))


def incomplete_beta(c: ArrayLike, a: ArrayLike, b: ArrayLike) -> ArrayLike:
    """Unregularized lower incomplete beta B(c; a, b), the integral of t^(a-1) (1-t)^(b-1) over [0, c]."""
    return _out(np.exp(log_incomplete_beta(c, a, b)))


def beta_cdf(c: ArrayLike, a: ArrayLike, b: ArrayLike) -> ArrayLike:
    _check_unit_interval(c, 'Quantile')
    _check_shapes(a, b)
    complete = betaln(a, b)
    return _out(np.exp(_converged(_log_lower_beta(np.asarray(c, dtype=float), a, b)) - complete))


def beta_truncated_mean(c: ArrayLike, a: ArrayLike, b: ArrayLike) -> ArrayLike:
    """E[θ | θ ≤ c] under Beta(a, b), broadcasting over all three arguments."""
    c = np.asarray(c, dtype=float)
    if np.any(c <= 0.0):
        raise DomainError('Truncation to an empty set is undefined (c must be positive)')
    _check_unit_interval(c, 'Truncation point')
    _check_shapes(a, b)
    a = np.asarray(a, dtype=float)
    ratio = _log_lower_beta(c, a + 1.0, b) - _log_lower_beta(c, a, b)
    return _out(np.exp(_converged(ratio)))


def truncated_mean(p: BetaParams, c: ArrayLike) -> ArrayLike:
    return beta_truncated_mean(c, p.alpha, p.beta)


def truncated_mean_derivative(p: BetaParams, c: ArrayLike) -> ArrayLike:
    """d/dc E[θ | θ ≤ c] = f(c)/F(c) (c - m(c)), with F the (unregularized) integral of f up to c."""
    c = np.asarray(c, dtype=float)
    if np.any(c <= 0.0) or np.any(c >= 1.0):
        raise DomainError('Truncated mean derivative is only defined on the open interval (0, 1)')
    m = np.asarray(truncated_mean(p, c))
    log_hazard = (p.alpha - 1.0) * np.log(c) + (p.beta - 1.0) * np.log1p(-c) \
        - np.asarray(log_incomplete_beta(c, p.alpha, p.beta))
    return _out(np.exp(log_hazard) * (c - m))
