import json
from enum import Enum

import numpy as np

from careerconcerns.cli.serialization import format_number, write_csv, read_csv, write_json


class Color(Enum):
    red = 'red'


def test_should_format_numbers_losslessly():
    assert format_number(0.1) == '0.10000000000000001'
    assert float(format_number(2 / 3)) == 2 / 3
    assert format_number(np.float64(0.5)) == '0.5'
    assert format_number(3) == '3'
    assert format_number(None) == ''
    assert format_number(Color.red) == 'red'


def test_should_write_csv_with_provenance_header(tmp_path):
    path = write_csv(tmp_path / 'nested' / 'out.csv', ['a', 'b'], [{'a': 1, 'b': 1 / 3}], 'abc', seed=7)
    assert path.read_text().splitlines() == ['# config_hash=abc', '# seed=7', 'a,b', '1,0.33333333333333331']
    assert read_csv(path) == [{'a': '1', 'b': '0.33333333333333331'}]


def test_should_write_json_with_provenance(tmp_path):
    path = write_json(tmp_path / 'out.json', {'values': np.array([0.25, 0.5]), 'color': Color.red}, 'abc')
    assert json.loads(path.read_text()) == {'config_hash': 'abc', 'values': [0.25, 0.5], 'color': 'red'}
