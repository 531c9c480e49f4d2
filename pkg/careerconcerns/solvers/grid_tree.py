import logging
from dataclasses import dataclass
from math import comb
from typing import Dict, List, NamedTuple, Sequence

import numpy as np
import numpy.typing as npt

from careerconcerns.beliefs import grid as belief_grid
from careerconcerns.beliefs.beta import Outcome
from careerconcerns.beliefs.grid import BeliefVector, SignalSpec, outcome_update, firm_signal_update
from careerconcerns.errors import DomainError, TreeSizeExceeded
from careerconcerns.model.base import GridContinuation
from careerconcerns.model.core import PricingRegime, Preferences, CutoffWage, solve_cutoff
from careerconcerns.solvers.sweep import Verdict, direction

logger = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 1_000_000


class NodeKey(NamedTuple):
    """Counts of public observations behind a belief node. Nodes with equal counts share a belief,
    whatever the order the observations arrived in."""
    successes: int = 0
    failures: int = 0
    signal_highs: int = 0
    signal_lows: int = 0

    def after(self, successes=0, failures=0, signal_highs=0, signal_lows=0) -> 'NodeKey':
        return NodeKey(self.successes + successes, self.failures + failures,
                       self.signal_highs + signal_highs, self.signal_lows + signal_lows)


ROOT = NodeKey()


@dataclass(frozen=True)
class GridNode:
    key: NodeKey
    belief: BeliefVector
    cutoff: float
    wage: float

    @property
    def employment_mass(self) -> float:
        """Belief mass of the types that take firm employment at this node."""
        return float(belief_grid.cdf(self.belief, self.cutoff))


def node_keys(date: int, sig: SignalSpec) -> List[NodeKey]:
    """Belief nodes reachable at ``date``. Without an informative firm signal, employment leaves the
    node unchanged, so nodes of every depth up to ``date`` are reachable; otherwise every period adds
    exactly one observation."""
    if not sig.informative:
        return [NodeKey(k, depth - k) for depth in range(date + 1) for k in range(depth + 1)]
    return [NodeKey(s, f, h, date - s - f - h)
            for s in range(date + 1) for f in range(date + 1 - s) for h in range(date + 1 - s - f)]


def count_nodes(horizon: int, sig: SignalSpec) -> int:
    if not sig.informative:
        return sum(comb(date + 2, 2) for date in range(horizon))
    return sum(comb(date + 3, 3) for date in range(horizon))


class GridPolicy:
    """Cutoffs, wages and values for every belief node of a finite-horizon problem on a θ-grid."""

    def __init__(self, prior: BeliefVector, sig: SignalSpec, regime: PricingRegime, horizon: int,
                 nodes: List[Dict[NodeKey, GridNode]], values: List[Dict[NodeKey, npt.NDArray[np.float64]]]):
        self.prior = prior
        self.sig = sig
        self.regime = regime
        self.horizon = horizon
        self._nodes = nodes
        self._values = values

    def nodes(self, date: int) -> Dict[NodeKey, GridNode]:
        if not 0 <= date < self.horizon:
            raise DomainError(f'Date {date} is outside the horizon [0, {self.horizon})')
        return self._nodes[date]

    def node(self, date: int, key: NodeKey = ROOT) -> GridNode:
        try:
            return self.nodes(date)[key]
        except KeyError:
            raise DomainError(f'No belief node {tuple(key)} at date {date}') from None

    def cutoff_wage(self, date: int, key: NodeKey = ROOT) -> CutoffWage:
        node = self.node(date, key)
        return CutoffWage(cutoff=node.cutoff, wage=node.wage)

    def value(self, date: int, theta: float, key: NodeKey = ROOT) -> float:
        self.node(date, key)
        return float(np.interp(theta, self.prior.grid, self._values[date][key]))

    @property
    def size(self) -> int:
        return sum(len(nodes) for nodes in self._nodes)

    def absorbing_cutoff(self) -> float:
        """Highest type that takes firm employment at the root and keeps it whatever the firm signals
        say: the lowest cutoff over the nodes reached by employment alone."""
        return min(node.cutoff for nodes in self._nodes for key, node in nodes.items()
                   if key.successes == 0 and key.failures == 0)

    def absorbing_mass(self) -> float:
        return float(belief_grid.cdf(self.prior, self.absorbing_cutoff()))


def _beliefs(prior: BeliefVector, sig: SignalSpec, horizon: int) -> Dict[NodeKey, BeliefVector]:
    beliefs = {ROOT: prior}
    frontier = [ROOT]
    for _ in range(horizon - 1):
        reached = []
        for key in frontier:
            belief = beliefs[key]
            children = [(key.after(successes=1), lambda: outcome_update(belief, Outcome.success)),
                        (key.after(failures=1), lambda: outcome_update(belief, Outcome.failure))]
            if sig.informative:
                children += [(key.after(signal_highs=1), lambda: firm_signal_update(belief, sig, 1)),
                             (key.after(signal_lows=1), lambda: firm_signal_update(belief, sig, 0))]
            for child, posterior in children:
                if child not in beliefs:
                    beliefs[child] = posterior()
                    reached.append(child)
        frontier = reached
    return beliefs


def solve_grid(prior: BeliefVector, sig: SignalSpec, delta: float, prefs: Preferences, regime: PricingRegime,
               horizon: int, node_budget: int = DEFAULT_NODE_BUDGET) -> GridPolicy:
    """
    Backward induction over the belief tree. Self-employment branches on the public outcome, and
    firm employment branches on the firm signal when it is informative. Wages are priced off the
    full public belief at the node.
    """
    if horizon < 1:
        raise DomainError(f'A finite horizon needs at least one period, got {horizon}')
    if not 0 < delta < 1:
        raise DomainError(f'Discount factor must lie in (0, 1), got {delta}')
    size = count_nodes(horizon, sig)
    if size > node_budget:
        raise TreeSizeExceeded(f'Belief tree has {size} nodes over {horizon} periods, budget is {node_budget}')

    grid = prior.grid
    high_signal = sig.success_probability(grid)
    beliefs = _beliefs(prior, sig, horizon)
    nodes: List[Dict[NodeKey, GridNode]] = [{} for _ in range(horizon)]
    values: List[Dict[NodeKey, npt.NDArray[np.float64]]] = [{} for _ in range(horizon)]
    terminal = np.zeros_like(grid)

    for date in reversed(range(horizon)):
        upcoming = values[date + 1] if date + 1 < horizon else None

        def row(key: NodeKey) -> npt.NDArray[np.float64]:
            return terminal if upcoming is None else upcoming[key]

        for key in node_keys(date, sig):
            success, failure = row(key.after(successes=1)), row(key.after(failures=1))
            if sig.informative:
                stay = high_signal * row(key.after(signal_highs=1)) + (1 - high_signal) * row(key.after(signal_lows=1))
            else:
                stay = row(key)

            entry = solve_cutoff(beliefs[key], regime, GridContinuation(grid, success, failure, stay), prefs, delta)
            nodes[date][key] = GridNode(key=key, belief=beliefs[key], cutoff=entry.cutoff, wage=entry.wage)
            values[date][key] = np.maximum(grid + delta * (grid * success + (1 - grid) * failure),
                                           prefs(entry.wage) + delta * stay)

        logger.debug('Solved %d belief nodes at date %d', len(nodes[date]), date)

    logger.info('Solved %d-period belief tree (%d nodes, phi=%g)', horizon, size, sig.phi)
    return GridPolicy(prior, sig, regime, horizon, nodes, values)


@dataclass(frozen=True)
class PhiPoint:
    phi: float
    root_cutoff: float
    root_mass: float
    absorbing_mass: float


@dataclass(frozen=True)
class PhiSweep:
    points: List[PhiPoint]
    cutoff_verdict: Verdict
    mass_verdict: Verdict
    absorbing_verdict: Verdict


def phi_sweep(prior: BeliefVector, phis: Sequence[float], delta: float, prefs: Preferences, regime: PricingRegime,
              horizon: int, zbar: float = 0.5, tolerance: float = 1e-9) -> PhiSweep:
    """
    Root cutoff, root employment mass and absorbing mass for each signal informativeness, with the
    direction each moves in as φ grows. The absorbing mass counts the types that stay employed on
    every firm-signal path; it is at most the root mass.
    """
    points = []
    for phi in sorted(phis):
        policy = solve_grid(prior, SignalSpec(phi=phi, zbar=zbar), delta, prefs, regime, horizon)
        root = policy.node(0)
        points.append(PhiPoint(phi=phi, root_cutoff=root.cutoff, root_mass=root.employment_mass,
                               absorbing_mass=policy.absorbing_mass()))
    return PhiSweep(
        points=points,
        cutoff_verdict=direction([p.root_cutoff for p in points], tolerance),
        mass_verdict=direction([p.root_mass for p in points], tolerance),
        absorbing_verdict=direction([p.absorbing_mass for p in points], tolerance),
    )
