from fractions import Fraction

import pytest

from oracle.oracle import NO_WITNESS, enumerate_ltl_sat, enumeration_size, truncated_feasibility
from oracle.simplex import PhaseOneTableau
from tld_lite.errors import DiamondCountError, ResourceLimitExceeded
from tld_lite.geometric import geom_pmf
from tld_lite.ltl import Always, And, Not, Prop, conjoin, lasso_check
from tld_lite.matrix import chained_pairs, decide, engine_for, entry_formula
from tld_lite.parser import parse_kb

F = Fraction
a = Prop('a')

# H can never hold, so no matrix entry is satisfiable
NEVER_HEADS = '''
tbox:
  H [= bot
abox:
  geom(1/2) H(a)
  geom(1/2) T(a)
'''


def test_enumeration_finds_constant_loop():
    found = enumerate_ltl_sat(Always(a), 0, 1)
    assert found.satisfiable
    assert found.lasso.prefix == ()
    assert found.lasso.loop == (frozenset({'a'}),)
    assert found.candidates == 2


def test_enumeration_of_contradiction():
    found = enumerate_ltl_sat(And(a, Not(a)), 2, 2)
    assert found.outcome == NO_WITNESS
    assert found.lasso is None
    assert found.candidates == enumeration_size(1, 2, 2)


def test_enumeration_of_first_entry(staggered_coin):
    f = entry_formula(engine_for(staggered_coin).kb, (0, 0))
    assert enumeration_size(2, 4, 2) == 6820
    found = enumerate_ltl_sat(f, 4, 2)
    assert found.satisfiable
    assert lasso_check(found.lasso, f)


def test_enumeration_guard():
    f = conjoin([Prop(f'x{i}') for i in range(10)])
    with pytest.raises(ResourceLimitExceeded):
        enumerate_ltl_sat(f, 4, 2)


def test_feasibility_refutes_above_half(coin_threequarters):
    assert not truncated_feasibility(coin_threequarters, 2).feasible


@pytest.mark.parametrize('name', ['staggered_coin', 'coin_half', 'coin_threequarters', 'free_coin', 'never_heads'])
def test_feasibility_agrees_with_decide(request, name):
    kb = parse_kb(NEVER_HEADS) if name == 'never_heads' else request.getfixturevalue(name)
    verdict = decide(kb)
    report = truncated_feasibility(kb, min(verdict.bound, 8))
    if verdict.satisfiable:
        assert report.feasible
    else:
        assert not report.feasible or not chained_pairs(kb, verdict.failing_level)


def test_feasibility_of_degenerate_kb(coin_half):
    report = truncated_feasibility(coin_half, 3)
    assert report.verdict == 'feasible'
    assert report.assignment == {
        (0, 1): F(1, 4), (0, 2): F(1, 8), (0, 3): F(1, 16),
        (1, 0): F(1, 4), (2, 0): F(1, 8), (3, 0): F(1, 16),
    }
    assert report.row_slack == report.col_slack == (F(1, 16), 0, 0, 0)


def test_feasibility_sums(free_coin):
    report = truncated_feasibility(free_coin, 3)
    assert report.feasible
    p = F(3, 4)
    for k in range(4):
        row = sum(v for (r, _), v in report.assignment.items() if r == k) + report.row_slack[k]
        col = sum(v for (_, c), v in report.assignment.items() if c == k) + report.col_slack[k]
        assert row == col == geom_pmf(p, k)


@pytest.mark.parametrize('truncation', range(5))
def test_feasibility_agrees_with_witness(staggered_coin, truncation):
    assert truncated_feasibility(staggered_coin, truncation).feasible


def test_feasibility_needs_two_diamonds(delayed_trigger):
    with pytest.raises(DiamondCountError):
        truncated_feasibility(delayed_trigger, 2)


def test_tableau_feasible_point():
    assert PhaseOneTableau([[1, 1], [1, -1]], [1, 0]).solve() == [F(1, 2), F(1, 2)]


def test_tableau_negative_right_hand_side():
    assert PhaseOneTableau([[-1]], [-1]).solve() == [F(1)]


def test_tableau_infeasible():
    tableau = PhaseOneTableau([[1, 1], [1, 1]], [1, 2])
    assert tableau.solve() is None
    assert tableau.infeasibility > 0
