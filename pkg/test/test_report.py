import os
import json
import pytest
import jsonschema
from NonlocalParabolic import load_problem, dump_problem
from NonlocalParabolic.cli import main, run, constants_for, build_parser, apply_overrides
from NonlocalParabolic.problem import ConfigurationError
from NonlocalParabolic.operators import MultipointCondition
from NonlocalParabolic.report import (
    load_problem_text, split_top_level, bundled_problem, PROBLEMS_DIR, RunReport, validate_report, render_summary,
    write_report, ReportStore, constants_key,
)
from NonlocalParabolic.utils import set_logging_level
set_logging_level()

MINIMAL = """
[domain]
length = pi

[nonlinearity]
f = 0
g = 0
"""


def test_bundled_problems_load():
    names = sorted(name[:-4] for name in os.listdir(PROBLEMS_DIR) if name.endswith('.cfg'))
    assert names == ['example_0pi', 'existence', 'multipoint', 'nonexistence', 'three_solutions']
    for name in names:
        spec = load_problem(bundled_problem(name))
        assert spec.name == name
    spec = load_problem(bundled_problem('multipoint'))
    assert isinstance(spec.alpha, MultipointCondition)
    assert spec.beta.weights == (0.5, 0.5)
    spec = load_problem(bundled_problem('three_solutions'))
    assert spec.radii.rho == (0.05, 0.05)


def test_minimal_problem_defaults():
    spec = load_problem_text(MINIMAL, name='minimal')
    assert spec.name == 'minimal'
    assert spec.discretization.nx == 128 and spec.discretization.nt == 200
    assert spec.radii is None
    assert spec.solver.residual_tol == 1e-10


def test_configuration_errors():
    with pytest.raises(ConfigurationError) as info:
        load_problem_text('[nonlinearity]\nf = 0\ng = 0\n')
    assert 'missing section [domain]' in info.value.errors
    with pytest.raises(ConfigurationError) as info:
        load_problem_text(MINIMAL + 'h = 1\n')
    assert '[nonlinearity] unknown key "h"' in info.value.errors
    with pytest.raises(ConfigurationError) as info:
        load_problem_text(MINIMAL.replace('g = 0', 'g = u - 1'))
    message = str(info.value)
    assert 'negative' in message and 'u=0' in message
    with pytest.raises(ConfigurationError) as info:
        load_problem_text(MINIMAL + '\n[radii]\nr = 1\n')
    assert '[radii] needs both r and R' in info.value.errors
    with pytest.raises(ConfigurationError) as info:
        load_problem_text(MINIMAL + '\n[radii]\nr = 2\nR = 1\n')
    assert any('0 < r < R' in e for e in info.value.errors)
    with pytest.raises(ConfigurationError):
        load_problem_text(MINIMAL.replace('f = 0', 'f = 2 +* u'))
    with pytest.raises(ConfigurationError):
        load_problem(bundled_problem('no_such_problem'))
    # every failure is collected
    with pytest.raises(ConfigurationError) as info:
        load_problem_text(MINIMAL + '\n[discretization]\nnx = 2\nnt = 0\n')
    assert len(info.value.errors) == 2


def test_split_top_level():
    assert split_top_level('1, min(2, 3), 4') == ['1', 'min(2, 3)', '4']
    assert split_top_level('1, 2; 3, 4', ';') == ['1, 2', '3, 4']


def test_dump_and_load():
    for name in ('existence', 'three_solutions', 'multipoint'):
        spec = load_problem(bundled_problem(name))
        assert load_problem_text(dump_problem(spec)) == spec
    text = MINIMAL + '\n[radii]\nr = 1, 2\nR = 20, 30\nnested = 1, 20; 100, 2000\n'
    spec = load_problem_text(text)
    assert spec.radii.r == (1.0, 2.0)
    assert spec.radii.nested[1] == ((100.0, 100.0), (2000.0, 2000.0))
    assert load_problem_text(dump_problem(spec)) == spec


def test_report_schema_and_summary(tmp_path):
    spec = load_problem(bundled_problem('example_0pi'))
    report = run('certify', spec)
    data = report.to_dict()
    validate_report(data)
    assert data['constants']['m']['display'] == '0.23'
    assert data['constants']['convention'] == 'published'
    assert [c['theorem'] for c in data['certificates']] == ['existence', 'non-existence']
    assert [c.theorem for c in report.failed_certificates] == ['existence']
    summary = render_summary(data)
    assert summary.startswith('example_0pi (certify')
    assert 'C1 = 0.77' in summary
    assert 'existence: fails' in summary
    assert 'non-existence: HOLDS' in summary
    path = str(tmp_path / 'out' / 'report.json')
    write_report(data, path)
    with open(path) as f:
        assert json.load(f)['spec']['hash'] == data['spec']['hash']
    data['command'] = 'plot'
    with pytest.raises(jsonschema.ValidationError):
        validate_report(data)


def test_report_store(tmp_path):
    spec = load_problem(bundled_problem('example_0pi'))
    store = ReportStore()
    consts = constants_for(spec, store)
    d = spec.discretization
    key = constants_key(spec.geometry, d.nx, d.constant_modes, d.double_integral, d.t_gibbs,
                        (spec.alpha.bounds, spec.beta.bounds))
    cached = store.get_constants(key)
    assert cached is not None and cached.m == consts.m
    assert constants_for(spec, store).C2 == consts.C2
    data = RunReport('constants', spec, constants=consts).to_dict()
    store.add_run(data, 'constants', data['spec']['hash'])
    assert len(store.get_runs(data['spec']['hash'])) == 1
    assert store.get_runs('0' * 16) == []
    store.close()

    path = str(tmp_path / 'runs.json')
    store = ReportStore(path)
    store.add_run(data, 'constants', data['spec']['hash'])
    store.close()
    store = ReportStore(path)
    assert len(store.get_runs()) == 1
    store.close()


def test_cli(tmp_path):
    out = str(tmp_path / 'constants.json')
    assert main(['constants', bundled_problem('example_0pi'), '--out', out]) == 0
    with open(out) as f:
        data = json.load(f)
    assert data['command'] == 'constants'
    assert data['certificates'] == []
    # bundled problems are found by name
    workspace = str(tmp_path / 'workspace')
    assert main(['certify', 'example_0pi', '--out', out, '--workspace', workspace]) == 0
    assert os.path.exists(os.path.join(workspace, 'runs.json'))
    assert main(['certify', 'example_0pi', '--out', out, '--strict']) == 2
    assert main(['constants', str(tmp_path / 'missing.cfg')]) == 1
    assert main(['constants', 'example_0pi', '--nx', '2']) == 1


def test_cli_scan(tmp_path):
    out = str(tmp_path / 'scan.json')
    csv_dir = str(tmp_path / 'csv')
    assert main(['scan', 'example_0pi', '--b-steps', '3', '--out', out, '--csv', csv_dir]) == 0
    with open(out) as f:
        data = json.load(f)
    assert len(data['scan']['rows']) == 3
    assert data['scan']['best'] == 1
    assert os.path.exists(os.path.join(csv_dir, 'example_0pi_scan_b.csv'))
    args = build_parser().parse_args(['solve', 'existence', '--threads', '4'])
    assert args.command == 'solve' and args.threads == 4


def test_non_finite_integers_are_rejected(tmp_path):
    text = MINIMAL + '\n[discretization]\nnx = 10^400\n'
    with pytest.raises(ConfigurationError) as info:
        load_problem_text(text)
    assert '[discretization] nx: expected a finite integer, got inf' in info.value.errors
    path = tmp_path / 'huge.cfg'
    path.write_text(text)
    assert main(['constants', str(path)]) == 1


def test_overrides_are_validated():
    spec = load_problem_text(MINIMAL.replace('length = pi', 'length = pi\nd_lo = 1.0\nd_hi = 1.1'))
    assert spec.grid.d_indices == (41, 45)
    args = build_parser().parse_args(['constants', 'narrow', '--nx', '4'])
    with pytest.raises(ConfigurationError) as info:
        apply_overrides(spec, args)
    assert any('collapses' in e for e in info.value.errors)
    args = build_parser().parse_args(['constants', 'narrow', '--nx', '64'])
    assert apply_overrides(spec, args).discretization.nx == 64


if __name__ == '__main__':
    test_dump_and_load()
