import io
import re
from fractions import Fraction
from pathlib import Path

import pytest

from tld_lite.commands import (EXIT_ERROR, EXIT_SAT, EXIT_UNSAT, ResultRecord, cmd_check, cmd_matrix, cmd_oracle,
                               cmd_translate, format_grid)
from tld_lite.errors import DiamondCountError, UnsatisfiableError
from tld_lite.matrix import PartialMatrix

ROOT = Path(__file__).resolve().parents[1]


def test_check_satisfiable(kb_dir):
    out = io.StringIO()
    code, record = cmd_check(kb_dir / 'staggered_coin.kb', out=out)
    assert code == EXIT_SAT
    assert record.result == 'SAT'
    assert record.diamonds == 2 and record.p == '1/2'
    assert record.bound == record.s + record.q
    assert 'result: SAT' in out.getvalue()


def test_check_unsatisfiable(kb_dir):
    code, record = cmd_check(kb_dir / 'delayed_trigger.kb', out=io.StringIO())
    assert code == EXIT_UNSAT
    assert 'entry 1 is unsatisfiable' in record.certificate


def test_check_reports_parameter_errors(kb_dir, capsys):
    code, record = cmd_check(kb_dir / 'staggered_coin_onefifth.kb', out=io.StringIO())
    assert code == EXIT_ERROR
    assert record.result == 'ERROR'
    assert 'parameter outside [1/2,1)' in record.certificate
    assert 'ParameterDomainError' in capsys.readouterr().err


def test_check_missing_file(tmp_path):
    code, record = cmd_check(tmp_path / 'missing.kb', out=io.StringIO())
    assert code == EXIT_ERROR
    assert record.certificate.startswith('FileNotFoundError')


def test_json_record(kb_dir):
    out = io.StringIO()
    _, record = cmd_check(kb_dir / 'coin_threequarters.kb', as_json=True, out=out)
    assert ResultRecord.from_json(out.getvalue()) == record
    assert record.exit_code == EXIT_UNSAT


def test_translate_entry(kb_dir):
    text = cmd_translate(kb_dir / 'staggered_coin.kb', entry='0 0', out=io.StringIO())
    assert '"H@a"' in text and '"T@a"' in text


def test_translate_down(kb_dir):
    assert '"T_1@a"' in cmd_translate(kb_dir / 'staggered_coin.kb', down=True, out=io.StringIO())


def test_translate_plain_kb(write_kb):
    path = write_kb('tbox:\n  A [= X B\nabox:\n  A(a)\n')
    assert cmd_translate(path, out=io.StringIO()) == 'G (!"A@a" | X "B@a") & "A@a"'


def test_translate_entry_count(kb_dir):
    with pytest.raises(DiamondCountError):
        cmd_translate(kb_dir / 'staggered_coin.kb', entry='0', out=io.StringIO())


def test_matrix_grid(kb_dir):
    assert cmd_matrix(kb_dir / 'staggered_coin.kb', 0, out=io.StringIO()) == '1/2'
    out = io.StringIO()
    grid = cmd_matrix(kb_dir / 'staggered_coin.kb', 3, out=out)
    assert grid == '5/16 0 1/8 1/16\nx 1/4 0 0\n1/8 x x x\n1/16 x x x'
    assert 'tails' not in out.getvalue()


def test_matrix_prints_tails(kb_dir):
    out = io.StringIO()
    cmd_matrix(kb_dir / 'coin_half.kb', 2, out=out)
    assert 'row tails: 1/8 0 0' in out.getvalue()


def test_matrix_of_unsatisfiable_kb(kb_dir):
    with pytest.raises(UnsatisfiableError):
        cmd_matrix(kb_dir / 'delayed_trigger.kb', 2, out=io.StringIO())


def test_oracle_agrees(kb_dir):
    out = io.StringIO()
    code, table = cmd_oracle(kb_dir / 'coin_half.kb', truncation=3, out=out)
    assert code == EXIT_SAT
    assert list(table['validator']) == ['enumeration', 'feasibility']
    assert table['consistent'].all()
    assert out.getvalue().rstrip().endswith('agreement')


def test_format_grid():
    m = PartialMatrix(((Fraction(1, 2), Fraction(0)), (Fraction(0), Fraction(1, 4))))
    assert format_grid(m, lambda r, c: r == c) == '1/2 x\nx 1/4'


def test_readme_states_the_supported_python():
    required = re.search(r"python_requires='>=(\d+\.\d+)'", (ROOT / 'setup.py').read_text()).group(1)
    assert f'Python {required}+' in (ROOT / 'README.md').read_text()
