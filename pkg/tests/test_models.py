import pytest

from oracle.models import ANONYMOUS, search_kb_model
from tld_lite.errors import DiamondCountError
from tld_lite.parser import parse_kb

LAPSING = 'exists P1 [= X not exists P1'


def test_flexible_successor_may_lapse():
    kb = parse_kb(f'flexible role P1\ntbox:\n  {LAPSING}\nabox:\n  P1(a,b)\n')
    model = search_kb_model(kb)
    assert model is not None
    assert model.satisfies(kb)
    assert ('P1', 'a', 'b') in model.roles[0]
    assert not any(('P1', 'a', f) in model.roles[model.succ(0)] for f in model.domain)


def test_rigid_successor_cannot_lapse():
    kb = parse_kb(f'rigid role P1\ntbox:\n  {LAPSING}\nabox:\n  P1(a,b)\n')
    assert search_kb_model(kb) is None


def test_negative_role_clash():
    assert search_kb_model(parse_kb('flexible role R\nabox:\n  R(a,b)\n  not R(a,b)\n')) is None


def test_inverse_atom_is_the_mirrored_pair():
    kb = parse_kb('flexible role R\ntbox:\n  exists inv(R) [= B\nabox:\n  R(a,b)\n  not B(b)\n')
    assert search_kb_model(kb) is None


def test_role_inclusion_propagates():
    kb = parse_kb('flexible role P\nflexible role Q\ntbox:\n  P [= Q\n  exists Q [= bot\nabox:\n  P(a,b)\n')
    assert search_kb_model(kb) is None


def test_until_without_its_right_side():
    kb = parse_kb('tbox:\n  A [= B U C\n  C [= bot\nabox:\n  A(a)\n')
    assert search_kb_model(kb) is None


def test_until_needs_enough_moments():
    kb = parse_kb('tbox:\n  A [= B U C\nabox:\n  A(a)\n  not C(a)\n  X^1 not C(a)\n')
    assert search_kb_model(kb, max_length=2) is None
    model = search_kb_model(kb)
    assert model.length == 3
    assert model.satisfies(kb)
    assert ('C', 'a') in model.concepts[2]
    assert ('B', 'a') in model.concepts[0] and ('B', 'a') in model.concepts[1]


def test_offsets_fold_onto_the_loop():
    kb = parse_kb('tbox:\n  A [= X not A\n  not A [= X A\nabox:\n  A(a)\n  X^5 not A(a)\n')
    model = search_kb_model(kb)
    assert model.satisfies(kb)
    assert model.position(5) in (1, 3)
    assert search_kb_model(parse_kb('tbox:\n  A [= X not A\n  not A [= X A\nabox:\n  A(a)\n  X^4 not A(a)\n'),
                           max_length=4) is None


def test_anonymous_element_without_individuals():
    model = search_kb_model(parse_kb('tbox:\n  A [= B\n'))
    assert model.domain == (ANONYMOUS,)


def test_extra_elements_serve_as_successors():
    kb = parse_kb('flexible role R\ntbox:\n  A [= exists R\n  exists inv(R) [= not A\nabox:\n  A(a)\n')
    assert search_kb_model(kb) is None
    model = search_kb_model(kb, extra_elements=1)
    assert model.satisfies(kb)
    assert model.domain == ('a', 'anon0')


def test_search_rejects_diamonds(staggered_coin):
    with pytest.raises(DiamondCountError):
        search_kb_model(staggered_coin)
