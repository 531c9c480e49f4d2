import json

from careerconcerns.cli.main import run, EXIT_OK, EXIT_INVALID, EXIT_SOLVER
from careerconcerns.cli.serialization import read_csv


def lines(path):
    return path.read_text().splitlines()


def test_should_write_finite_policy(tmp_path):
    assert run(['solve', '--out', str(tmp_path), '--quiet']) == EXIT_OK

    content = lines(tmp_path / 'policy.csv')
    assert content[0].startswith('# config_hash=')
    assert content[1] == 'date,alpha,beta,regime,cutoff,wage'

    rows = read_csv(tmp_path / 'policy.csv')
    assert len(rows) == 1 + 3 + 6
    last = [row for row in rows if row['date'] == '2' and row['alpha'] == '1' and row['beta'] == '1']
    assert abs(float(last[0]['cutoff']) - 0.5 ** 0.5) < 1e-9
    assert last[0]['regime'] == 'naive'
    assert last[0]['wage'] == '0.5'


def test_should_write_json_policy(tmp_path):
    assert run(['solve', '--out', str(tmp_path), '--format', 'json', '--quiet',
                '--set', 'finite.regime=sophisticated']) == EXIT_OK
    document = json.loads((tmp_path / 'policy.json').read_text())
    assert len(document['config_hash']) == 64
    assert {row['regime'] for row in document['policy']} == {'sophisticated'}


def test_should_simulate_deterministically(tmp_path):
    args = ['simulate', '--seed', '42', '--quiet', '--set', 'simulate.n_paths=200', 'simulate.horizon=3']
    assert run(args + ['--out', str(tmp_path / 'first')]) == EXIT_OK
    assert run(args + ['--out', str(tmp_path / 'second')]) == EXIT_OK

    for name in ('trajectories.csv', 'hazard.csv', 'summary.json'):
        assert (tmp_path / 'first' / name).read_bytes() == (tmp_path / 'second' / name).read_bytes()

    content = lines(tmp_path / 'first' / 'trajectories.csv')
    assert content[1] == '# seed=42'
    assert content[2] == 'path,date,alpha,beta,action,outcome,wage,utility'
    assert len(read_csv(tmp_path / 'first' / 'trajectories.csv')) == 200 * 3
    assert read_csv(tmp_path / 'first' / 'hazard.csv')[0].keys() == {'failure_run', 'hazard', 'at_risk'}


def test_should_absorb_low_types_immediately(tmp_path):
    assert run(['simulate', '--out', str(tmp_path), '--quiet', '--set', 'finite.regime=sophisticated',
                'simulate.n_paths=50', 'simulate.theta=0.05']) == EXIT_OK
    summary = json.loads((tmp_path / 'summary.json').read_text())
    assert summary['absorption']['times'] == {'0': 50}
    assert summary['absorption']['never'] == 0


def test_should_report_unconverged_stationary_solve(tmp_path):
    assert run(['solve', '--out', str(tmp_path), '--quiet', '--set', 'solver=stationary',
                'stationary.max_depth=6', 'stationary.max_sweeps=2']) == EXIT_SOLVER
    report = json.loads((tmp_path / 'report.json').read_text())
    assert report['converged'] is False
    assert report['sup_norm_residual'] > 0


def test_should_sweep_discount_factor(tmp_path, capsys):
    assert run(['sweep', '--out', str(tmp_path), '--quiet', '--set', 'sweep.parameter=delta',
                'sweep.values=[0.5, 0.9]', 'stationary.max_depth=6', 'stationary.tolerance=1e-8']) == EXIT_OK
    assert lines(tmp_path / 'sweep.csv')[1] == 'delta,alpha,beta,cutoff,wage'
    assert 'Cutoffs across delta: non-increasing' in capsys.readouterr().out


def test_should_solve_belief_tree(tmp_path):
    assert run(['solve', '--out', str(tmp_path), '--quiet', '--set', 'solver=grid', 'signal.horizon=2',
                'signal.grid_size=201']) == EXIT_OK
    assert len(read_csv(tmp_path / 'policy.csv')) == 1 + 3


def test_should_reject_bad_input(tmp_path):
    assert run(['solve', '--out', str(tmp_path), '--quiet', '--set', 'finite.delta=1.5']) == EXIT_INVALID
    assert run(['solve', '--out', str(tmp_path), '--quiet', '--set', 'finite.bogus=1']) == EXIT_INVALID
    assert run(['solve', '--quiet', '--config', str(tmp_path / 'missing.json')]) == EXIT_INVALID
    assert run(['sweep', '--out', str(tmp_path), '--quiet']) == EXIT_INVALID
    assert run(['simulate', '--out', str(tmp_path), '--quiet', '--set', 'solver=grid']) == EXIT_INVALID


def test_should_reproduce_illustration(tmp_path, capsys):
    assert run(['reproduce', '--out', str(tmp_path), '--quiet']) == 0
    assert '13/13 checks passed' in capsys.readouterr().out
    rows = read_csv(tmp_path / 'reproduce.csv')
    assert len(rows) == 13
    assert {row['verdict'] for row in rows} == {'PASS'}
    quadratic = next(row for row in rows if row['quantity'] == 'θ̂^N_1(1,1) quadratic')
    assert float(quadratic['abs_error']) <= 1e-8
