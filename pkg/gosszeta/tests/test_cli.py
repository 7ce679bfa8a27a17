import json
import os

from click.testing import CliRunner

from gosszeta.config import Config
from gosszeta.scripts.gosszeta import MINPERM_HEADER, cli


def build_test_run(*args):
    return CliRunner().invoke(cli, list(args), obj={})


def test_predict_json():
    result = build_test_run('predict', '--p', '3', '--y=-1', '--nmax', '2')
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload['nu'] == [2, 8]
    assert payload['alpha'] == [1, 4]
    assert payload['real_parts'] == [2, 8]
    assert payload['complete'] and payload['q_full']


def test_predict_with_genus():
    result = build_test_run('predict', '--q', '5', '--y=-1', '--nmax', '2',
                            '--g', '1', '--format', 'table')
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    assert lines[0].split() == ['i', 'nu', 'alpha']
    assert lines[2].split() == ['1', '4', '1']
    assert lines[3].split() == ['2', '24', '6']


def test_invalid_input_exit_code():
    assert build_test_run('predict', '--q', '6').exit_code == 2
    assert build_test_run('predict', '--y=-1').exit_code == 2
    assert build_test_run('predict', '--p', '3', '--q', '4').exit_code == 2
    assert build_test_run('predict', '--p', '3', '--y',
                          'ratio:1/3').exit_code == 2


def test_budget_exit_code():
    result = build_test_run('zeta-affine', '--q', '9', '--y=-1', '--xdeg',
                            '6', '--precision', '4')
    assert result.exit_code == 3


def test_config_replay(tmp_path):
    path = os.path.join(tmp_path, 'run.json')
    first = build_test_run('predict', '--p', '2', '--y', 'ratio:-1/3',
                           '--nmax', '2', '--save-config', path)
    assert first.exit_code == 0, first.output
    assert os.path.isfile(path)
    again = build_test_run('predict', '--config', path)
    assert again.exit_code == 0
    assert again.output == first.output
    assert json.loads(again.output)['nu'] == [1, 5]
    assert build_test_run('zeta-affine', '--config', path).exit_code == 2


def test_zeta_affine_csv():
    result = build_test_run('zeta-affine', '--q', '3', '--y=-1', '--xdeg',
                            '3', '--precision', '32', '--format', 'csv')
    assert result.exit_code == 0, result.output
    assert result.output.splitlines() == ['d,valuation', '0,0', '1,2',
                                          '2,10', '3,>=32']


def test_special_value():
    result = build_test_run('special-value', '--q', '3', '--j=-2')
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload['degree'] == 1
    assert payload['parity'] == 'even'
    assert payload['zero_order'] == 1
    assert build_test_run('special-value', '--q', '3',
                          '--j', '2').exit_code == 2


def test_compare_routes():
    result = build_test_run('compare', '--q', '3', '--y=-1', '--xdeg', '2',
                            '--precision', '14', '--nmax', '2')
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload['failures'] == []
    assert all(c['result'] == 'agree' for c in payload['comparisons'])


def test_vadic_comparison():
    result = build_test_run('vadic', '--q', '3', '--c', '0', '--y=-1',
                            '--xdeg', '3', '--precision', '16', '--nmax', '2')
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload['comparison']['verdict']
    assert payload['dv'] == 1
    assert payload['predicted']['slopes'] == [[0, 1, 1], [1, 1, 1],
                                              [4, 1, 1]]
    assert payload['predicted_valuations']['slopes'] == [[0, 1, 1],
                                                         [2, 1, 1],
                                                         [8, 1, 1]]
    assert payload['real_parts']['slopes'] == payload['predicted']['slopes']
    assert build_test_run('vadic', '--q', '3', '--f', 'theta^2+1', '--c',
                          '1').exit_code == 2
    assert build_test_run('vadic', '--q', '3', '--f',
                          'theta^2+2').exit_code == 2


def test_curve_host():
    result = build_test_run('curve', '--p', '5', '--a4', '1', '--a6', '1',
                            '--y=-1', '--xdeg', '2', '--precision', '16',
                            '--nmax', '2')
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload['host']['h'] == 9
    assert payload['reduction'] == payload['weil_mod_p'] == [1, 3, 0]
    assert payload['predicted'] == [0, 4, 24]
    assert build_test_run('curve', '--p', '5', '--a4', '3',
                          '--a6', '2').exit_code == 2


def test_verify_minperm(tmp_path, monkeypatch):
    monkeypatch.setattr(Config, 'BASE_EXPORT_PATH', str(tmp_path))
    result = build_test_run('verify-minperm', '--p', '2', '--nmax', '2',
                            '--samples', '1', '--format', 'csv',
                            '--out', 'rows.csv')
    assert result.exit_code == 0, result.output
    with open(os.path.join(tmp_path, 'rows.csv')) as f:
        lines = f.read().splitlines()
    assert lines[0] == ','.join(MINPERM_HEADER)
    assert len(lines) == 3
    assert all(line.startswith('2,1,') for line in lines[1:])


def test_zeta_fredholm():
    result = build_test_run('zeta-fredholm', '--q', '3', '--y=-1',
                            '--precision', '24', '--nmax', '2')
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload['valuations'][:3] == [0, 2, 10]
    assert payload['polygon']['slopes'] == [[2, 1, 1], [8, 1, 1]]


def test_verify_minperm_rows():
    result = build_test_run('verify-minperm', '--p', '3', '--nmax', '2',
                            '--samples', '2')
    assert result.exit_code == 0, result.output
    rows = json.loads(result.output)['rows']
    assert len(rows) == 4
    for row in rows:
        assert row['minimizers'] == 1
        assert row['matches_recurrence'] and row['unique_minimizer']
        assert row['strict_increase'] and row['divisible']


def test_verify_minperm_skipped_rows_keep_slopes():
    result = build_test_run('verify-minperm', '--p', '3', '--nmax', '3',
                            '--samples', '1', '--budget', '1')
    assert result.exit_code == 0, result.output
    rows = json.loads(result.output)['rows']
    assert [row['n'] for row in rows] == [1, 2, 3]
    for row in rows:
        assert row['minimizers'] == row['unique_minimizer'] == 'skipped'
        assert row['strict_increase'] is True
        assert row['divisible'] is True
