import json
import os

import pytest

from gosszeta.config import RunConfig
from gosszeta.ff import Poly, field_from_order
from gosszeta.util import dump_json, format_csv, format_table, parse_poly, \
    read_config_file, save_config_file, split_prime_power


def test_split_prime_power():
    assert split_prime_power(2) == (2, 1)
    assert split_prime_power(9) == (3, 2)
    assert split_prime_power(32) == (2, 5)
    for q in (0, 1, 6, 12):
        with pytest.raises(ValueError):
            split_prime_power(q)


def test_parse_poly():
    f3 = field_from_order(3)
    assert parse_poly('theta^2+1', f3) == Poly(f3, [1, 0, 1])
    assert parse_poly('t^2 + 2t + 2', f3) == Poly(f3, [2, 2, 1])
    assert parse_poly('x - 1', f3) == Poly(f3, [2, 1])
    assert parse_poly('-theta', f3) == Poly(f3, [0, 2])
    f9 = field_from_order(9)
    assert parse_poly('x^3 - x + e5', f9) == \
        Poly(f9, [f9.element(5), f9(-1), 0, 1])
    for bad in ('', 'theta^', 'y^2', '1++theta'):
        with pytest.raises(ValueError):
            parse_poly(bad, f3)


def test_format_table():
    text = format_table(('n', 'slope'), [(1, 2), (2, 8)])
    lines = text.splitlines()
    assert lines[0].split() == ['n', 'slope']
    assert set(lines[1].replace(' ', '')) == {'-'}
    assert lines[3].split() == ['2', '8']


def test_format_csv():
    assert format_csv(('n', 'v'), [(0, 0), (1, '>=8')]) == \
        'n,v\n0,0\n1,>=8\n'
    assert json.loads(dump_json({'b': 1, 'a': (1, 2)})) == \
        {'a': [1, 2], 'b': 1}


def test_config_round_trip(tmp_path):
    cfg = RunConfig('predict', p=3, q=3, y='ratio:-1/2', nmax=4,
                    extra={'g': 1})
    path = os.path.join(tmp_path, 'run.json')
    save_config_file(path, cfg)
    assert read_config_file(path) == cfg
    with open(path, 'w') as f:
        f.write(json.dumps({'command': 'predict', 'colour': 'red'}))
    with pytest.raises(ValueError):
        read_config_file(path)


def test_config_validate():
    RunConfig('predict', p=2, b=2, q=4).validate()
    for bad in (dict(p=2, b=2, q=8), dict(p=2, b=0),
                dict(p=3, precision=0), dict(p=3, format='xml')):
        with pytest.raises(ValueError):
            RunConfig('predict', **bad).validate()
