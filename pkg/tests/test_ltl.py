import pytest

from tld_lite.errors import UnknownAtomError
from tld_lite.ltl import (Always, And, Eventually, FalseBool, LassoWord, Next, Not, Or, Prop, TrueBool, Until,
                          atoms, conjoin, conjuncts, length, lasso_check, neg, subformula_closure, substitute,
                          to_text)

a, b = Prop('a'), Prop('b')


def word(prefix, loop):
    return LassoWord(tuple(frozenset(v) for v in prefix), tuple(frozenset(v) for v in loop), frozenset('ab'))


def test_closure_of_atom():
    assert subformula_closure(a) == {a}


def test_closure_of_always():
    assert subformula_closure(Always(a)) == {Always(a), a}


def test_closure_of_until():
    f = Until(a, Next(b))
    assert subformula_closure(f) == {f, a, Next(b), b}


def test_closure_folds_negation():
    assert subformula_closure(And(Not(a), Eventually(Not(b)))) == {And(Not(a), Eventually(Not(b))), a,
                                                                   Eventually(Not(b)), b}
    assert len(subformula_closure(Until(a, Or(a, b)))) <= length(Until(a, Or(a, b)))


def test_structural_equality_and_hash():
    assert Until(Prop('a'), Next(Prop('b'))) == Until(a, Next(b))
    assert len({Until(a, b), Until(Prop('a'), Prop('b'))}) == 1
    assert Until(a, b) != Until(b, a)


def test_neg_folds_constants_and_double_negation():
    assert neg(Not(a)) == a
    assert neg(TrueBool()) == FalseBool()
    assert neg(a) == Not(a)


def test_conjoin_dedupes():
    f = conjoin([a, b, a])
    assert conjuncts(f) == [a, b]
    assert conjoin([]) == TrueBool()


def test_substitute():
    f = Always(Or(Prop('t'), a))
    assert substitute(f, {'t': TrueBool()}) == Always(Or(TrueBool(), a))
    assert atoms(substitute(f, {'t': b})) == {'a', 'b'}


def test_always_on_constant_loop():
    assert lasso_check(word([], [{'a'}]), Always(a))


def test_atom_reads_first_letter():
    assert not lasso_check(word([set()], [{'a'}]), a)


def test_until_semantics():
    assert lasso_check(word([{'a'}, {'a'}], [{'b'}]), Until(a, b))
    assert not lasso_check(word([], [{'a'}]), Until(a, b))
    # non-strict: b now satisfies it
    assert lasso_check(word([], [{'b'}]), Until(a, b))


def test_recurrence_and_persistence():
    w = word([set()], [set(), {'a'}])
    assert lasso_check(w, Eventually(a))
    assert lasso_check(w, Always(Eventually(a)))
    assert not lasso_check(w, Eventually(Always(a)))
    assert lasso_check(w, Next(Next(a)))
    assert lasso_check(w, Next(Next(Next(Next(a)))))


def test_unknown_atom():
    with pytest.raises(UnknownAtomError, match='c'):
        lasso_check(word([], [{'a'}]), Prop('c'))
    with pytest.raises(KeyError):
        lasso_check(word([], [{'a'}]), Prop('c'))


def test_loop_must_be_nonempty():
    with pytest.raises(ValueError):
        LassoWord((frozenset(),), ())


def test_lasso_positions_wrap_into_loop():
    w = word([{'a'}], [{'b'}, set()])
    assert len(w) == 3
    assert w[3] == frozenset({'b'})
    assert w[4] == frozenset()


def test_to_text_quotes_grounded_atoms():
    f = Until(Prop('H@a'), Next(Not(Prop('p_R'))))
    assert to_text(f) == '"H@a" U X !p_R'
    assert to_text(Always(And(a, Or(b, FalseBool())))) == 'G (a & (b | false))'
