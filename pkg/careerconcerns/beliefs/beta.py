from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from careerconcerns.errors import DomainError


class Outcome(Enum):
    success = 1
    failure = 0


@dataclass(frozen=True, order=True)
class BetaParams:
    """
    A :class:`BetaParams` is the public state: the parameters of the market's Beta posterior over
    the worker's talent. It is a sufficient statistic for the public history of self-employment
    outcomes.
    """
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError(f'Beta parameters must be positive, got ({self.alpha}, {self.beta})')

    @property
    def weight(self) -> float:
        return self.alpha + self.beta

    def __str__(self):
        return f'({self.alpha:g},{self.beta:g})'


def posterior_mean(p: BetaParams) -> float:
    return p.alpha / (p.alpha + p.beta)


def update(p: BetaParams, outcome: Outcome) -> BetaParams:
    if outcome == Outcome.success:
        return BetaParams(p.alpha + 1, p.beta)
    return BetaParams(p.alpha, p.beta + 1)


def one_step_drift(p: BetaParams) -> Tuple[float, float]:
    """How far one public success (up) or failure (down) moves the posterior mean."""
    scale = p.weight * (p.weight + 1)
    return p.beta / scale, p.alpha / scale
