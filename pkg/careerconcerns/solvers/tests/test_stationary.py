import math

import numpy as np
import pytest

from careerconcerns.beliefs.beta import BetaParams, posterior_mean
from careerconcerns.errors import DomainError, UnconvergedPolicyError
from careerconcerns.model.base import TerminalContinuation
from careerconcerns.model.core import CRRA, PricingRegime, solve_cutoff
from careerconcerns.solvers.finite import FiniteHorizonSpec, solve_finite
from careerconcerns.solvers.lattice import states_up_to
from careerconcerns.solvers.stationary import LatticeSpec, value_iterate, absorbing_region

UNIFORM = BetaParams(1, 1)


def lattice_spec(regime: PricingRegime, **kwargs) -> LatticeSpec:
    params = dict(prior=UNIFORM, max_depth=12, delta=0.95, prefs=CRRA(0.5), regime=regime, tolerance=1e-9)
    params.update(kwargs)
    return LatticeSpec(**params)


@pytest.fixture(scope='module')
def solutions():
    return {regime: value_iterate(lattice_spec(regime)) for regime in PricingRegime}


def test_should_converge(solutions):
    for solution in solutions.values():
        assert solution.converged
        assert solution.sup_norm_residual <= 1e-9
        assert solution.horizon is None


@pytest.mark.parametrize('regime', list(PricingRegime))
def test_should_reduce_to_terminal_cutoffs_without_patience(regime):
    solution = value_iterate(lattice_spec(regime, delta=1e-9, max_depth=6))
    for state, entry in solution.cutoff_map().items():
        terminal = solve_cutoff(state, regime, TerminalContinuation(), CRRA(0.5), 0.5)
        assert entry.cutoff == pytest.approx(terminal.cutoff, abs=1e-6)
        if regime == PricingRegime.naive:
            assert entry.cutoff == pytest.approx(math.sqrt(posterior_mean(state)), abs=1e-6)


def test_should_put_half_the_uniform_prior_in_the_terminal_sophisticated_region():
    region = absorbing_region(value_iterate(lattice_spec(PricingRegime.sophisticated, delta=1e-9, max_depth=4)))
    assert region[UNIFORM].cutoff == pytest.approx(0.5, abs=1e-6)
    assert region[UNIFORM].mass == pytest.approx(0.5, abs=1e-6)


def test_should_raise_cutoffs_along_longer_track_records(solutions):
    naive = solutions[PricingRegime.naive]
    for ray in ([BetaParams(k, k) for k in range(1, 8)], [BetaParams(2 * k, k) for k in range(1, 5)]):
        cutoffs = [naive.cutoff_wage(12, state).cutoff for state in ray]
        assert np.all(np.diff(cutoffs) >= -1e-9)


def test_should_order_sophisticated_below_naive(solutions):
    naive = solutions[PricingRegime.naive].table.cutoffs
    sophisticated = solutions[PricingRegime.sophisticated].table.cutoffs
    assert np.all(sophisticated <= naive + 1e-9)
    assert np.all(sophisticated[naive < 1] < naive[naive < 1])


def test_should_post_sophisticated_wages_below_the_mean(solutions):
    solution = solutions[PricingRegime.sophisticated]
    means = solution.lattice.alphas / (solution.lattice.alphas + solution.lattice.betas)
    below_top = solution.table.cutoffs < 1
    assert np.all(solution.table.wages[below_top] < means[below_top])


def test_should_contract_by_the_discount_factor(solutions):
    residuals = np.array(solutions[PricingRegime.naive].residuals)
    assert np.all(residuals[1:] <= 0.95 * residuals[:-1] + 1e-12)

    # wages move with the cutoffs, so only the tail is geometric
    residuals = np.array(solutions[PricingRegime.sophisticated].residuals)
    assert residuals[-1] < residuals[0]
    assert residuals[-1] < residuals[-20]


def test_should_report_unconverged_solutions():
    solution = value_iterate(lattice_spec(PricingRegime.naive, max_sweeps=3))
    assert not solution.converged
    assert solution.sweeps_used == 3
    assert solution.sup_norm_residual > 1e-9

    with pytest.raises(UnconvergedPolicyError):
        absorbing_region(solution)


def test_should_describe_absorbing_region(solutions):
    region = absorbing_region(solutions[PricingRegime.sophisticated])
    assert len(region) == states_up_to(12)
    for state in region.entries:
        entry = region[state]
        assert 0 <= entry.mass <= 1
        if entry.cutoff == 0:
            assert entry.mass == 0
        assert region.contains(state, entry.cutoff)
        assert not region.contains(state, min(1.0, entry.cutoff + 1e-6)) or entry.cutoff == 1.0

    naive = absorbing_region(solutions[PricingRegime.naive])
    masses = [naive[BetaParams(k, k)].mass for k in range(1, 8)]
    assert np.all(np.diff(masses) >= -1e-9)


def test_should_extend_beyond_the_cap(solutions):
    naive = solutions[PricingRegime.naive]
    assert len(naive.tables(5)) == states_up_to(12)
    assert len(naive.tables(20)) >= states_up_to(20)

    deep = BetaParams(13, 9)
    assert naive.cutoff_wage(20, deep).cutoff == pytest.approx(math.sqrt(13 / 22), abs=1e-9)
    assert naive.cutoff_wage(20, deep).wage == pytest.approx(13 / 22)


def test_should_match_long_finite_horizon():
    stationary = value_iterate(LatticeSpec(prior=UNIFORM, max_depth=60, delta=0.9, prefs=CRRA(0.5),
                                           regime=PricingRegime.naive, tolerance=1e-9))
    finite = solve_finite(FiniteHorizonSpec(periods=60, prior=UNIFORM, delta=0.9, prefs=CRRA(0.5),
                                            regime=PricingRegime.naive, theta_grid_size=4097, store_values=False))
    assert finite.cutoff_wage(0, UNIFORM).cutoff == pytest.approx(stationary.cutoff_wage(0, UNIFORM).cutoff, abs=1e-4)


def test_should_match_long_finite_horizon_under_sophisticated_pricing():
    stationary = value_iterate(LatticeSpec(prior=UNIFORM, max_depth=30, delta=0.5, prefs=CRRA(0.5),
                                           regime=PricingRegime.sophisticated, tolerance=1e-9))
    finite = solve_finite(FiniteHorizonSpec(periods=60, prior=UNIFORM, delta=0.5, prefs=CRRA(0.5),
                                            regime=PricingRegime.sophisticated, theta_grid_size=4097,
                                            store_values=False))
    root = stationary.cutoff_wage(0, UNIFORM).cutoff
    assert 0 < root < 0.5
    assert finite.cutoff_wage(0, UNIFORM).cutoff == pytest.approx(root, abs=2e-4)


def test_should_validate_lattice_spec():
    with pytest.raises(DomainError):
        lattice_spec(PricingRegime.naive, theta_grid_size=256)

    with pytest.raises(DomainError):
        lattice_spec(PricingRegime.naive, tolerance=0.0)

    with pytest.raises(DomainError):
        lattice_spec(PricingRegime.naive, delta=1.0)
