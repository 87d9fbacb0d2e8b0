import os
import random
import subprocess
import sys
from pathlib import Path

import pytest

from oracle.oracle import enumerate_ltl_sat, enumeration_size
from tld_lite.buchi import build_buchi, covers, ltl_sat, shortest_cycle, strongly_connected_components
from tld_lite.errors import ResourceLimitExceeded
from tld_lite.ltl import (Always, And, Eventually, FalseBool, Next, Not, Or, Prop, TrueBool, Until, lasso_check,
                          subformula_closure)
from tld_lite.reduction import instantiate_abox, translate

a, b, c = Prop('a'), Prop('b'), Prop('c')

ROOT = Path(__file__).resolve().parents[1]

PERIOD_SCRIPT = '''
import sys
from tld_lite.matrix import period_bounds
from tld_lite.parser import parse_kb_file
for path in sys.argv[1:]:
    bounds = period_bounds(parse_kb_file(path))
    print(path, bounds.s, bounds.q)
'''


def test_false_has_empty_automaton():
    aut = build_buchi(FalseBool())
    assert len(aut) == 0
    assert not ltl_sat(FalseBool()).satisfiable


def test_always_single_accepting_cycle():
    aut = build_buchi(Always(a))
    assert len(aut) == 1
    assert aut.successors == [(0,)]
    verdict = ltl_sat(Always(a))
    assert verdict.satisfiable
    assert verdict.lasso.loop == (frozenset({'a'}),)


def test_contradicting_eventuality():
    assert not ltl_sat(And(Eventually(a), Always(Not(a)))).satisfiable


def test_until_is_satisfiable_now():
    verdict = ltl_sat(Until(a, b))
    assert verdict.satisfiable
    assert lasso_check(verdict.lasso, Until(a, b))


def test_unfulfilled_until_is_rejected():
    assert not ltl_sat(And(Until(a, b), Always(Not(b)))).satisfiable
    assert ltl_sat(And(Until(a, b), Next(Always(Not(b))))).satisfiable


def test_state_count_respects_closure_bound():
    f = And(Always(Eventually(a)), Until(b, Next(a)))
    assert len(build_buchi(f)) <= 2 ** len(subformula_closure(f))


def test_expansion_law_for_until():
    f = Until(a, b)
    for state in covers([f]):
        assert 'b' in state.positive or ('a' in state.positive and f in state.obligations)


def test_state_limit():
    f = And(*[Eventually(Prop(f'x{i}')) for i in range(2)])
    with pytest.raises(ResourceLimitExceeded):
        build_buchi(Always(f), state_limit=1)


def test_strongly_connected_components():
    successors = [(1,), (0, 2), (2,), ()]
    components = strongly_connected_components(successors)
    assert sorted(map(tuple, components)) == [(0, 1), (2,), (3,)]


def test_shortest_cycle_respects_allowed_states():
    aut = build_buchi(Always(Eventually(a)))
    assert shortest_cycle(aut, lambda s: True) == 1
    assert shortest_cycle(aut, lambda s: False) is None


def test_delayed_trigger_entry_one_is_unsatisfiable(delayed_trigger):
    assert not ltl_sat(translate(instantiate_abox(delayed_trigger, 1))).satisfiable
    assert ltl_sat(translate(instantiate_abox(delayed_trigger, 0))).satisfiable


def test_staggered_coin_first_entry_is_satisfiable(staggered_coin):
    f = translate(instantiate_abox(staggered_coin, 0, 0))
    verdict = ltl_sat(f)
    assert verdict.satisfiable
    assert lasso_check(verdict.lasso, f)


def test_contradiction_with_negation():
    f = Until(a, Next(b))
    assert ltl_sat(f).satisfiable and ltl_sat(Not(f)).satisfiable
    assert not ltl_sat(And(f, Not(f))).satisfiable


def random_formula(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice([a, b, a, b, TrueBool()])
    kind = rng.choice(['not', 'and', 'or', 'next', 'f', 'g', 'u'])
    if kind in ('and', 'or', 'u'):
        left, right = random_formula(rng, depth - 1), random_formula(rng, depth - 1)
        return {'and': And, 'or': Or, 'u': Until}[kind](left, right)
    operand = random_formula(rng, depth - 1)
    return {'not': Not, 'next': Next, 'f': Eventually, 'g': Always}[kind](operand)


@pytest.mark.parametrize('seed', range(60))
def test_agrees_with_enumeration(seed):
    rng = random.Random(seed)
    f = random_formula(rng, 3)
    verdict = ltl_sat(f)
    if verdict.satisfiable:
        assert lasso_check(verdict.lasso, f)
        prefix, loop = len(verdict.lasso.prefix), len(verdict.lasso.loop)
        if enumeration_size(2, prefix, loop) <= 2 ** 12:
            assert enumerate_ltl_sat(f, prefix, loop).satisfiable
    else:
        assert not enumerate_ltl_sat(f, 2, 2).satisfiable


def test_covers_ignore_input_order():
    first, second = Or(a, b), Or(b, c)
    assert covers([first, second]) == covers([second, first])
    assert covers(frozenset([first, second])) == covers([first, second])


def test_period_bounds_ignore_hash_seed(kb_dir):
    paths = [str(kb_dir / name) for name in ('delayed_trigger.kb', 'coin_half.kb', 'staggered_coin.kb')]
    outputs = set()
    for seed in ('0', '1', '2', '3'):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        done = subprocess.run([sys.executable, '-c', PERIOD_SCRIPT, *paths], cwd=ROOT, env=env,
                              capture_output=True, text=True, check=True)
        outputs.add(done.stdout)
    assert len(outputs) == 1


def test_acceptance_marks_fulfilled_states():
    aut = build_buchi(Until(a, b))
    (accepting,) = aut.acceptance
    assert accepting == {i for i, s in enumerate(aut.states) if not s.pending}
    assert any('b' in aut.states[i].positive for i in accepting)
    assert not all(i in accepting for i in range(len(aut)))
