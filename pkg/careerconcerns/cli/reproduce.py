"""Re-derives the three-period illustration (ρ = 0.5, δ = 0.95, uniform prior) and checks every
published cutoff and wage against its tolerance."""
import math
from dataclasses import dataclass
from typing import Dict, List

from colored import Fore, Style
from rich.table import Table

from careerconcerns.beliefs.beta import BetaParams, Outcome
from careerconcerns.model.core import CRRA, PricingRegime
from careerconcerns.solvers.finite import FiniteHorizonSpec, FinitePolicy, solve_finite, branch_wages, \
    middle_period_quadratic_cutoff

RHO = 0.5
DELTA = 0.95
PERIODS = 3
PRIOR = BetaParams(1, 1)

REPRODUCE_FIELDS = ['quantity', 'computed', 'published', 'reference', 'abs_error', 'tolerance', 'verdict']


@dataclass(frozen=True)
class Check:
    quantity: str
    computed: float
    published: float
    reference: float
    tolerance: float

    @property
    def abs_error(self) -> float:
        return abs(self.computed - self.reference)

    @property
    def passed(self) -> bool:
        return self.abs_error <= self.tolerance

    @property
    def verdict(self) -> str:
        return 'PASS' if self.passed else 'FAIL'


def illustration_policies() -> Dict[PricingRegime, FinitePolicy]:
    return {
        regime: solve_finite(FiniteHorizonSpec(periods=PERIODS, prior=PRIOR, delta=DELTA, prefs=CRRA(RHO),
                                               regime=regime))
        for regime in PricingRegime
    }


def run_checks() -> List[Check]:
    policies = illustration_policies()
    naive, sophisticated = policies[PricingRegime.naive], policies[PricingRegime.sophisticated]
    last = PERIODS - 1

    def cutoff(policy: FinitePolicy, date: int, alpha: float, beta: float) -> float:
        return policy.cutoff_wage(date, BetaParams(alpha, beta)).cutoff

    def wage(policy: FinitePolicy, outcome: Outcome) -> float:
        return branch_wages(policy, 1, [outcome]).wage

    # closed forms where they exist, published values otherwise
    return [
        Check('θ̂^N_2(1,1)', cutoff(naive, last, 1, 1), 0.707, math.sqrt(1 / 2), 1e-9),
        Check('θ̂^N_2(2,1)', cutoff(naive, last, 2, 1), 0.817, math.sqrt(2 / 3), 1e-9),
        Check('θ̂^N_2(1,2)', cutoff(naive, last, 1, 2), 0.577, math.sqrt(1 / 3), 1e-9),
        Check('θ̂^S_2(1,1)', cutoff(sophisticated, last, 1, 1), 0.5, 2 ** (-RHO / (1 - RHO)), 1e-9),
        Check('θ̂^S_2(2,1)', cutoff(sophisticated, last, 2, 1), 0.667, (2 / 3) ** (RHO / (1 - RHO)), 1e-9),
        Check('θ̂^S_2(1,2)', cutoff(sophisticated, last, 1, 2), 0.451, 0.451, 2e-3),
        Check('θ̂^N_1(1,1)', cutoff(naive, 1, 1, 1), 0.656, 0.656, 3e-3),
        Check('θ̂^N_1(1,1) quadratic', cutoff(naive, 1, 1, 1), 0.656, middle_period_quadratic_cutoff(RHO, DELTA), 1e-8),
        Check('θ̂^S_1(1,1)', cutoff(sophisticated, 1, 1, 1), 0.42, 0.42, 1e-2),
        Check('w^S_1 after success', wage(sophisticated, Outcome.success), 0.407, 0.407, 5e-3),
        Check('w^S_1 after failure', wage(sophisticated, Outcome.failure), 0.177, 0.177, 5e-3),
        Check('w^N_1 after success', wage(naive, Outcome.success), 2 / 3, 2 / 3, 0.0),
        Check('w^N_1 after failure', wage(naive, Outcome.failure), 1 / 3, 1 / 3, 0.0),
    ]


def format_checks(checks: List[Check]) -> Table:
    tbl = Table(title=f'Three-period illustration (ρ={RHO}, δ={DELTA}, prior {PRIOR})')
    for column in ('quantity', 'computed', 'published', 'abs. error', 'tolerance', 'verdict'):
        tbl.add_column(column, justify='left' if column == 'quantity' else 'right')
    for check in checks:
        tbl.add_row(check.quantity, f'{check.computed:.5f}', f'{check.published:g}', f'{check.abs_error:.2e}',
                    f'{check.tolerance:.0e}', f'[green]{check.verdict}' if check.passed else f'[red]{check.verdict}')
    return tbl


def verdict_line(checks: List[Check]) -> str:
    passed = sum(check.passed for check in checks)
    color = Fore.green if passed == len(checks) else Fore.red
    return f'{color}{passed}/{len(checks)} checks passed{Style.reset}'


def check_rows(checks: List[Check]):
    for check in checks:
        yield {field: getattr(check, field) for field in REPRODUCE_FIELDS}
