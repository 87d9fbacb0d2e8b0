from pathlib import Path

import pytest

from tld_lite.parser import parse_kb, parse_kb_file

KB_DIR = Path(__file__).parent / 'kbs'

# no TBox: every matrix entry is satisfiable
FREE_COIN = '''
tbox:
abox:
  geom(3/4) H(a)
  geom(3/4) T(a)
'''


@pytest.fixture(scope='session')
def kb_dir():
    return KB_DIR


@pytest.fixture(scope='session')
def delayed_trigger():
    return parse_kb_file(KB_DIR / 'delayed_trigger.kb')


@pytest.fixture(scope='session')
def coin_half():
    return parse_kb_file(KB_DIR / 'coin_half.kb')


@pytest.fixture(scope='session')
def coin_threequarters():
    return parse_kb_file(KB_DIR / 'coin_threequarters.kb')


@pytest.fixture(scope='session')
def staggered_coin():
    return parse_kb_file(KB_DIR / 'staggered_coin.kb')


@pytest.fixture(scope='session')
def free_coin():
    return parse_kb(FREE_COIN)


@pytest.fixture
def write_kb(tmp_path):
    """Writes KB text to a file and returns its path."""
    def write(text, name='kb.kb'):
        path = tmp_path / name
        path.write_text(text)
        return path
    return write
