import pytest

from careerconcerns.beliefs.beta import BetaParams, Outcome, posterior_mean, update, one_step_drift
from careerconcerns.errors import DomainError


@pytest.mark.parametrize('alpha,beta,expected', [
    (1, 1, 0.5),
    (2, 1, 2 / 3),
    (1, 2, 1 / 3),
])
def test_should_compute_posterior_mean(alpha, beta, expected):
    assert posterior_mean(BetaParams(alpha, beta)) == pytest.approx(expected, abs=1e-15)


def test_should_update_state_on_public_outcomes():
    assert update(BetaParams(1, 1), Outcome.success) == BetaParams(2, 1)
    assert update(BetaParams(1, 1), Outcome.failure) == BetaParams(1, 2)
    assert update(BetaParams(3, 5), Outcome.success) == BetaParams(4, 5)


def test_should_reject_non_positive_parameters():
    with pytest.raises(DomainError):
        BetaParams(0, 1)

    with pytest.raises(DomainError):
        BetaParams(1, -2)


def test_should_compute_one_step_drift():
    assert one_step_drift(BetaParams(1, 1)) == pytest.approx((1 / 6, 1 / 6), abs=1e-15)
    assert one_step_drift(BetaParams(2, 1)) == pytest.approx((1 / 12, 2 / 12), abs=1e-15)

    up, down = one_step_drift(BetaParams(1000, 1000))
    assert up == down
    assert up < 1e-3


def test_should_shrink_drift_along_rays_of_constant_mean():
    drifts = [one_step_drift(BetaParams(k, 2 * k)) for k in range(1, 20)]
    assert all(later[0] < earlier[0] and later[1] < earlier[1] for earlier, later in zip(drifts, drifts[1:]))


def test_should_agree_with_drift_after_update():
    for state in [BetaParams(1, 1), BetaParams(2.5, 7), BetaParams(13, 4)]:
        up, down = one_step_drift(state)
        assert posterior_mean(update(state, Outcome.success)) == pytest.approx(posterior_mean(state) + up,
                                                                              rel=1e-14)
        assert posterior_mean(update(state, Outcome.failure)) == pytest.approx(posterior_mean(state) - down,
                                                                              rel=1e-14)
