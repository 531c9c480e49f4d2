import numpy as np
import pytest

from careerconcerns.beliefs.beta import BetaParams
from careerconcerns.errors import UnreachableStateError
from careerconcerns.solvers.lattice import StateLattice, states_up_to, bellman_update


def test_should_count_states():
    assert [states_up_to(d) for d in range(4)] == [1, 3, 6, 10]
    assert StateLattice(BetaParams(1, 1), 3).size == 10


def test_should_lay_out_states_depth_major():
    lattice = StateLattice(BetaParams(1, 2), 2)
    assert [str(s) for s in lattice.states()] == ['(1,2)', '(1,3)', '(2,2)', '(1,4)', '(2,3)', '(3,2)']
    assert list(lattice.states(max_depth=1)) == [BetaParams(1, 2), BetaParams(1, 3), BetaParams(2, 2)]


def test_should_locate_successors():
    lattice = StateLattice(BetaParams(1, 1), 3)
    indices = np.arange(states_up_to(2))
    for i, s, f in zip(indices, lattice.success_index(indices), lattice.failure_index(indices)):
        state = lattice.state(i)
        assert lattice.state(s) == BetaParams(state.alpha + 1, state.beta)
        assert lattice.state(f) == BetaParams(state.alpha, state.beta + 1)


def test_should_index_states():
    lattice = StateLattice(BetaParams(0.5, 0.5), 4)
    for i, state in enumerate(lattice.states()):
        assert lattice.index(state) == i


def test_should_reject_unreachable_states():
    lattice = StateLattice(BetaParams(1, 1), 4)

    with pytest.raises(UnreachableStateError):
        lattice.index(BetaParams(0.5, 1))

    with pytest.raises(UnreachableStateError):
        lattice.index(BetaParams(1.5, 1))

    with pytest.raises(UnreachableStateError):
        lattice.index(BetaParams(3, 2), max_depth=2)

    with pytest.raises(UnreachableStateError):
        lattice.index(BetaParams(6, 1))


def test_should_take_the_better_branch():
    grid = np.linspace(0, 1, 5)
    zeros = np.zeros((1, 5))
    values = bellman_update(grid, zeros, zeros, zeros, np.array([0.5]), 0.9)
    assert values[0].tolist() == [0.5, 0.5, 0.5, 0.75, 1.0]
