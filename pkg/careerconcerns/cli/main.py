import json
import logging
import sys
from argparse import ArgumentParser, Namespace
from pathlib import Path
from typing import List, Optional

from colored import Fore, Style
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler

from careerconcerns import version_string
from careerconcerns.beliefs.grid import discretize_beta
from careerconcerns.cli import serialization as out
from careerconcerns.cli.config import RunConfig, load_config, config_hash
from careerconcerns.cli.reproduce import run_checks, format_checks, verdict_line, check_rows, REPRODUCE_FIELDS
from careerconcerns.cli.utils import kv_pair
from careerconcerns.errors import DomainError, SolverFailure, TreeSizeExceeded, UnconvergedPolicyError
from careerconcerns.simulation.montecarlo import SimSpec, FixedTheta, DrawFromPrior, simulate, aggregate
from careerconcerns.solvers.finite import solve_finite
from careerconcerns.solvers.grid_tree import solve_grid, phi_sweep
from careerconcerns.solvers.lattice import LatticePolicy
from careerconcerns.solvers.stationary import value_iterate, absorbing_region
from careerconcerns.solvers.sweep import sweep, comparative_verdict

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SOLVER = 2
EXIT_FAILED_CHECKS = 3


def reproduce(args: Namespace, config: RunConfig) -> int:
    checks = run_checks()
    Console().print(format_checks(checks))
    print(verdict_line(checks))
    if args.out is not None:
        out.write_csv(args.out / 'reproduce.csv', REPRODUCE_FIELDS,
                      check_rows(checks), config_hash(config))
    return EXIT_OK if all(check.passed for check in checks) else EXIT_FAILED_CHECKS


def solve(args: Namespace, config: RunConfig) -> int:
    digest, directory, fmt = config_hash(config), config.output.directory, config.output.format

    if config.solver == 'finite':
        policy = solve_finite(config.finite.build())
        if fmt == 'csv':
            out.write_csv(directory / 'policy.csv', out.FINITE_POLICY_FIELDS, out.finite_policy_rows(policy), digest)
        else:
            out.write_json(directory / 'policy.json', {'policy': list(out.finite_policy_rows(policy))}, digest)
        return EXIT_OK

    if config.solver == 'stationary':
        solution = value_iterate(config.stationary.build())
        region = absorbing_region(solution) if solution.converged else None
        rows = out.stationary_policy_rows(solution, region)
        if fmt == 'csv':
            out.write_csv(directory / 'policy.csv', out.STATIONARY_POLICY_FIELDS, rows, digest)
            out.write_json(directory / 'report.json', out.stationary_report(solution), digest)
        else:
            out.write_json(directory / 'policy.json',
                           {'report': out.stationary_report(solution), 'policy': list(rows)}, digest)
        if not solution.converged:
            print(f'{Fore.red}Value iteration did not converge: residual '
                  f'{solution.sup_norm_residual:.3e} after {solution.sweeps_used} sweeps{Style.reset}')
            return EXIT_SOLVER
        return EXIT_OK

    signal = config.signal
    prior = discretize_beta(signal.prior.build(), signal.grid_size)
    prefs = signal.prefs.build()
    policy = solve_grid(prior, signal.build(), signal.delta, prefs, signal.regime, signal.horizon,
                        signal.node_budget)
    if fmt == 'csv':
        out.write_csv(directory / 'policy.csv', out.GRID_POLICY_FIELDS, out.grid_policy_rows(policy), digest)
    else:
        out.write_json(directory / 'policy.json', {'policy': list(out.grid_policy_rows(policy))}, digest)
    if signal.phis:
        report = phi_sweep(prior, signal.phis, signal.delta, prefs, signal.regime, signal.horizon, signal.zbar)
        out.write_json(directory / 'phi_sweep.json', out.phi_sweep_document(report), digest)
        print(f'Root cutoff across φ: {report.cutoff_verdict.value}; '
              f'root employment mass across φ: {report.mass_verdict.value}; '
              f'absorbing mass across φ: {report.absorbing_verdict.value}')
    return EXIT_OK


def _simulation_policy(config: RunConfig) -> LatticePolicy:
    if config.solver == 'finite':
        return solve_finite(config.finite.build())
    if config.solver == 'stationary':
        return value_iterate(config.stationary.build())
    raise DomainError('Simulation needs a finite or stationary solve, not the belief-tree solver')


def run_simulation(args: Namespace, config: RunConfig) -> int:
    digest, directory, fmt = config_hash(config), config.output.directory, config.output.format
    settings = config.simulate
    theta_source = FixedTheta(settings.theta) if settings.theta is not None else DrawFromPrior()

    trajs = simulate(SimSpec(_simulation_policy(config), n_paths=settings.n_paths, horizon=settings.horizon,
                             seed=settings.seed, theta_source=theta_source))
    summary = aggregate(trajs)

    if fmt == 'csv':
        out.write_csv(directory / 'trajectories.csv', out.TRAJECTORY_FIELDS, out.trajectory_rows(trajs), digest,
                      settings.seed)
        out.write_csv(directory / 'hazard.csv', out.HAZARD_FIELDS, out.hazard_rows(summary), digest, settings.seed)
    else:
        out.write_json(directory / 'trajectories.json', {'trajectories': list(out.trajectory_rows(trajs))},
                       digest, settings.seed)
    out.write_json(directory / 'summary.json', out.summary_document(summary), digest, settings.seed)
    return EXIT_OK


def run_sweep(args: Namespace, config: RunConfig) -> int:
    if config.sweep is None:
        raise DomainError('The sweep command needs a "sweep" section in the config')
    digest, directory, fmt = config_hash(config), config.output.directory, config.output.format

    table = sweep(config.stationary.build(), config.sweep.parameter, config.sweep.values)
    verdict = comparative_verdict(table)
    if fmt == 'csv':
        out.write_csv(directory / 'sweep.csv', out.sweep_fields(table), out.sweep_rows(table), digest)
    else:
        out.write_json(directory / 'sweep.json', out.sweep_document(table, verdict), digest)

    for point in table.points:
        status = 'ok' if point.ok else (point.error or f'not converged (residual {point.residual:.3e})')
        print(f'{table.parameter.value}={point.value:g}: {status}')
    print(f'Cutoffs across {table.parameter.value}: {verdict.value}')

    return EXIT_SOLVER if table.failures else EXIT_OK


def _common_arguments() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='JSON run configuration (defaults are used if omitted)')
    common.add_argument('--out', type=Path, help='output directory (overrides output.directory)')
    common.add_argument('--format', choices=['csv', 'json'], help='output format (overrides output.format)')
    common.add_argument('--set', dest='overrides', metavar='KEY=VALUE', nargs='+', type=kv_pair, default=[],
                        help='override config entries, e.g. --set finite.periods=5 finite.regime=sophisticated')
    common.add_argument('--quiet', action='store_true', help='only log warnings and errors')
    return common


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog='career-model')
    parser.add_argument('--version', action='version', version=version_string)
    common = _common_arguments()

    subparsers = parser.add_subparsers(title='Command', required=True)

    reproduce_cli = subparsers.add_parser('reproduce', parents=[common],
                                          help='check the three-period illustration against published values')
    reproduce_cli.set_defaults(main=reproduce)

    solve_cli = subparsers.add_parser('solve', parents=[common], help='solve the configured model')
    solve_cli.set_defaults(main=solve)

    simulate_cli = subparsers.add_parser('simulate', parents=[common], help='simulate careers under a solved policy')
    simulate_cli.add_argument('--seed', type=int, help='random seed (overrides simulate.seed)')
    simulate_cli.set_defaults(main=run_simulation)

    sweep_cli = subparsers.add_parser('sweep', parents=[common], help='comparative statics of stationary cutoffs')
    sweep_cli.set_defaults(main=run_sweep)

    return parser


def _configure(args: Namespace) -> RunConfig:
    overrides = list(args.overrides)
    if args.out is not None:
        overrides.append(('output.directory', json.dumps(str(args.out))))
    if args.format is not None:
        overrides.append(('output.format', json.dumps(args.format)))
    if getattr(args, 'seed', None) is not None:
        overrides.append(('simulate.seed', str(args.seed)))
    return load_config(args.config, overrides)


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format='%(message)s',
        handlers=[RichHandler(show_path=False)],
        force=True,
    )

    try:
        config = _configure(args)
        return args.main(args, config)
    except ValidationError as ex:
        logger.error('Invalid configuration:\n%s', ex)
        return EXIT_INVALID
    except (DomainError, OSError, json.JSONDecodeError) as ex:
        logger.error('%s', ex)
        return EXIT_INVALID
    except (SolverFailure, TreeSizeExceeded, UnconvergedPolicyError) as ex:
        logger.error('Solver failed: %s', ex)
        return EXIT_SOLVER


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
