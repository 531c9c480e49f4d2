from typing import Any, Optional


class DomainError(ValueError):
    """Raised when an argument falls outside the domain of an operation."""


class DegenerateUpdateError(DomainError):
    """Raised when a Bayes update would leave (numerically) no posterior mass."""


class UnreachableStateError(KeyError):
    def __init__(self, date: int, state: Any):
        super().__init__(f'State {state} is not reachable at date {date}')
        self.date = date
        self.state = state


class SolverFailure(RuntimeError):
    """The cutoff problem at a state has no sign-change bracket and neither clamp applies. This
    only happens when the continuation values handed to the solver are broken."""

    def __init__(self, message: str, state: Optional[Any] = None):
        super().__init__(message if state is None else f'{message} (state={state})')
        self.state = state


class TreeSizeExceeded(RuntimeError):
    pass


class UnconvergedPolicyError(RuntimeError):
    pass
