import numpy as np
import pytest

from careerconcerns.beliefs.beta import BetaParams, Outcome, update, posterior_mean
from careerconcerns.beliefs.grid import BeliefVector, SignalSpec, bayes_update, outcome_update, firm_signal_update, \
    discretize_beta, mean, cdf, truncated_mean
from careerconcerns.beliefs.special import beta_cdf, beta_truncated_mean
from careerconcerns.errors import DomainError, DegenerateUpdateError

UNIFORM = discretize_beta(BetaParams(1, 1))


def test_should_apply_bayes_rule_by_hand():
    b = BeliefVector(np.array([0.0, 0.5, 1.0]), np.full(3, 1 / 3))
    posterior = bayes_update(b, lambda theta: theta)
    assert posterior.mass == pytest.approx([0.0, 1 / 3, 2 / 3], abs=1e-15)


def test_should_ignore_uninformative_likelihood():
    b = discretize_beta(BetaParams(2, 5), 101)
    posterior = bayes_update(b, np.full(101, 0.3))
    assert posterior.mass == pytest.approx(b.mass, abs=1e-15)


def test_should_track_conjugate_update():
    assert mean(UNIFORM) == pytest.approx(0.5, abs=1e-12)
    assert mean(outcome_update(UNIFORM, Outcome.success)) == pytest.approx(2 / 3, abs=1e-4)


def test_should_track_beta_engine_over_many_updates():
    rng = np.random.default_rng(7)
    for _ in range(5):
        params = BetaParams(*rng.uniform(1.0, 4.0, size=2))
        belief = discretize_beta(params)
        for outcome in rng.choice([Outcome.success, Outcome.failure], size=10):
            params, belief = update(params, outcome), outcome_update(belief, outcome)
            assert mean(belief) == pytest.approx(posterior_mean(params), abs=1e-4)
            assert belief.mass.sum() == pytest.approx(1.0, abs=1e-12)


def test_should_move_mean_with_outcomes():
    b = discretize_beta(BetaParams(2, 3), 501)
    assert mean(outcome_update(b, Outcome.success)) > mean(b)
    assert mean(outcome_update(b, Outcome.failure)) < mean(b)


def test_should_leave_belief_alone_under_opaque_signal():
    sig = SignalSpec(phi=0.0)
    assert firm_signal_update(UNIFORM, sig, 1) is UNIFORM
    assert firm_signal_update(UNIFORM, sig, 0) is UNIFORM


def test_should_learn_from_informative_signal():
    sig = SignalSpec(phi=0.5, zbar=0.5)
    assert mean(firm_signal_update(UNIFORM, sig, 1)) > mean(UNIFORM)
    assert mean(firm_signal_update(UNIFORM, sig, 0)) < mean(UNIFORM)


def test_should_approach_outcome_update_as_signal_sharpens():
    sig = SignalSpec(phi=0.999)
    for z, outcome in ((1, Outcome.success), (0, Outcome.failure)):
        assert mean(firm_signal_update(UNIFORM, sig, z)) == pytest.approx(mean(outcome_update(UNIFORM, outcome)),
                                                                          abs=1e-2)


def test_should_match_beta_engine_truncation():
    params = BetaParams(2, 3)
    b = discretize_beta(params)
    for c in (0.1, 0.4, 0.77):
        assert cdf(b, c) == pytest.approx(beta_cdf(c, 2, 3), abs=1e-3)
        assert truncated_mean(b, c) == pytest.approx(beta_truncated_mean(c, 2, 3), abs=1e-3)
    assert cdf(b, 1.0) == pytest.approx(1.0)
    assert truncated_mean(b, 1.0) == pytest.approx(mean(b))


def test_should_reject_degenerate_update():
    point_mass = BeliefVector(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
    with pytest.raises(DegenerateUpdateError):
        outcome_update(point_mass, Outcome.success)

    with pytest.raises(DomainError):
        truncated_mean(BeliefVector(np.array([0.0, 1.0]), np.array([0.0, 1.0])), 0.0)


def test_should_validate_beliefs_and_signals():
    with pytest.raises(DomainError):
        BeliefVector(np.array([0.0, 0.5, 1.0]), np.array([0.5, 0.4, 0.2]))

    with pytest.raises(DomainError):
        BeliefVector(np.array([0.0, 0.7, 0.5]), np.full(3, 1 / 3))

    with pytest.raises(DomainError):
        bayes_update(UNIFORM, np.full(len(UNIFORM), 1.5))

    with pytest.raises(DomainError):
        SignalSpec(phi=1.0)

    with pytest.raises(DomainError):
        SignalSpec(phi=0.3, zbar=0.0)

    with pytest.raises(DomainError):
        firm_signal_update(UNIFORM, SignalSpec(phi=0.3), 2)
