"""CSV and JSON writers for solver and simulation results. CSV numbers carry 17 significant digits;
every file records the config hash and, for simulations, the seed."""
import csv
import dataclasses
import json
from enum import Enum
from json import JSONEncoder
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from careerconcerns.simulation.montecarlo import TrajectorySet, TrajectorySummary
from careerconcerns.solvers.finite import FinitePolicy
from careerconcerns.solvers.grid_tree import GridPolicy, PhiSweep
from careerconcerns.solvers.stationary import StationarySolution, AbsorbingRegion
from careerconcerns.solvers.sweep import SweepTable, Verdict
from careerconcerns.utils import tree, to_plain

FINITE_POLICY_FIELDS = ['date', 'alpha', 'beta', 'regime', 'cutoff', 'wage']
STATIONARY_POLICY_FIELDS = ['alpha', 'beta', 'regime', 'cutoff', 'wage', 'employment_mass']
GRID_POLICY_FIELDS = ['date', 'successes', 'failures', 'signal_highs', 'signal_lows', 'regime', 'cutoff', 'wage',
                      'employment_mass']
TRAJECTORY_FIELDS = ['path', 'date', 'alpha', 'beta', 'action', 'outcome', 'wage', 'utility']
HAZARD_FIELDS = ['failure_run', 'hazard', 'at_risk']


def format_number(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, (float, np.floating)):
        return f'{float(value):.17g}'
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


class ResultEncoder(JSONEncoder):
    def default(self, o):
        if dataclasses.is_dataclass(o):
            return dataclasses.asdict(o)
        elif isinstance(o, Enum):
            return o.value
        elif isinstance(o, np.ndarray):
            return o.tolist()
        elif isinstance(o, np.generic):
            return o.item()
        elif isinstance(o, Path):
            return str(o)
        return super().default(o)


def _header(config_hash: str, seed: Optional[int]) -> List[str]:
    lines = [f'# config_hash={config_hash}']
    if seed is not None:
        lines.append(f'# seed={seed}')
    return lines


def write_csv(path: Path, fieldnames: Sequence[str], rows: Iterable[Dict[str, Any]], config_hash: str,
              seed: Optional[int] = None) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='') as outfile:
        for line in _header(config_hash, seed):
            outfile.write(line + '\n')
        writer = csv.DictWriter(outfile, fieldnames=list(fieldnames), lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({key: format_number(value) for key, value in row.items()})
    return path


def write_json(path: Path, document: Dict[str, Any], config_hash: str, seed: Optional[int] = None) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {'config_hash': config_hash, **({'seed': seed} if seed is not None else {}), **document}
    path.write_text(json.dumps(payload, cls=ResultEncoder, indent=2, sort_keys=True) + '\n')
    return path


def read_csv(path: Path) -> List[Dict[str, str]]:
    """Reads a CSV written by :func:`write_csv`, skipping the comment header."""
    with path.open() as infile:
        return list(csv.DictReader(line for line in infile if not line.startswith('#')))


def finite_policy_rows(policy: FinitePolicy) -> Iterable[Dict[str, Any]]:
    for date in range(policy.spec.periods):
        for state, entry in policy.entries(date):
            yield {'date': date, 'alpha': float(state.alpha), 'beta': float(state.beta),
                   'regime': policy.regime, 'cutoff': entry.cutoff, 'wage': entry.wage}


def stationary_policy_rows(solution: StationarySolution,
                           region: Optional[AbsorbingRegion]) -> Iterable[Dict[str, Any]]:
    for state, entry in solution.cutoff_map().items():
        yield {'alpha': float(state.alpha), 'beta': float(state.beta), 'regime': solution.regime,
               'cutoff': entry.cutoff, 'wage': entry.wage,
               'employment_mass': region[state].mass if region is not None else None}


def stationary_report(solution: StationarySolution) -> Dict[str, Any]:
    return {'converged': solution.converged, 'sweeps_used': solution.sweeps_used,
            'sup_norm_residual': solution.sup_norm_residual, 'residuals': solution.residuals}


def grid_policy_rows(policy: GridPolicy) -> Iterable[Dict[str, Any]]:
    for date in range(policy.horizon):
        for key, node in policy.nodes(date).items():
            yield {'date': date, **key._asdict(), 'regime': policy.regime, 'cutoff': node.cutoff,
                   'wage': node.wage, 'employment_mass': node.employment_mass}


def phi_sweep_document(report: PhiSweep) -> Dict[str, Any]:
    return {'points': report.points, 'cutoff_verdict': report.cutoff_verdict,
            'mass_verdict': report.mass_verdict, 'absorbing_verdict': report.absorbing_verdict}


def sweep_rows(table: SweepTable) -> Iterable[Dict[str, Any]]:
    for point in table.points:
        for state, cutoff, wage in zip(point.states, point.cutoffs, point.wages):
            yield {table.parameter.value: point.value, 'alpha': float(state.alpha), 'beta': float(state.beta),
                   'cutoff': cutoff, 'wage': wage}


def sweep_fields(table: SweepTable) -> List[str]:
    return [table.parameter.value, 'alpha', 'beta', 'cutoff', 'wage']


def sweep_document(table: SweepTable, verdict: Verdict) -> Dict[str, Any]:
    return {
        'parameter': table.parameter,
        'verdict': verdict,
        'points': [
            {'value': point.value, 'converged': point.converged, 'sweeps_used': point.sweeps_used,
             'residual': point.residual, 'error': point.error,
             'cutoffs': [{'alpha': s.alpha, 'beta': s.beta, 'cutoff': c, 'wage': w}
                         for s, c, w in zip(point.states, point.cutoffs, point.wages)]}
            for point in table.points
        ],
    }


def trajectory_rows(trajs: TrajectorySet) -> Iterable[Dict[str, Any]]:
    for trajectory in trajs:
        for record in trajectory.records:
            yield {'path': trajectory.path, 'date': record.date, 'alpha': float(record.state.alpha),
                   'beta': float(record.state.beta), 'action': record.action,
                   'outcome': record.outcome.name if record.outcome is not None else None,
                   'wage': record.wage, 'utility': record.utility}


def hazard_rows(summary: TrajectorySummary) -> Iterable[Dict[str, Any]]:
    for run, (rate, at_risk) in summary.hazard_by_run.items():
        yield {'failure_run': run, 'hazard': rate, 'at_risk': at_risk}


def summary_document(summary: TrajectorySummary) -> Dict[str, Any]:
    document = tree()
    document['regime'] = summary.regime
    document['paths'] = summary.paths
    document['self_employment_share'] = summary.self_employment_share
    document['absorption']['times'] = {str(t): n for t, n in sorted(summary.absorption_times.items())}
    document['absorption']['never'] = summary.never_absorbed
    document['hazard_by_failure_run'] = [
        {'failure_run': run, 'hazard': rate, 'at_risk': at_risk}
        for run, (rate, at_risk) in summary.hazard_by_run.items()
    ]
    for (alpha, beta), wage in summary.mean_wage_by_state.items():
        document['mean_wage_by_state'][f'({alpha:g},{beta:g})'] = wage
    document['wage_gap'] = summary.wage_gap
    return to_plain(document)
