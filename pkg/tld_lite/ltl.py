import re
from dataclasses import dataclass, fields
from functools import cached_property
from typing import FrozenSet, Tuple

from .errors import UnknownAtomError


class Ltl:
    """Base of propositional LTL formulas.

    Nodes compare structurally; hashes are cached per node so that deep
    formulas stay cheap to put in sets.
    """

    @cached_property
    def _key(self):
        return (type(self).__name__,) + tuple(getattr(self, f.name) for f in fields(self))

    @cached_property
    def _hash(self):
        return hash(self._key)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Ltl) or hash(self) != hash(other):
            return False
        return self._key == other._key

    def __getstate__(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def __setstate__(self, state):
        self.__dict__.update(state)


@dataclass(frozen=True, eq=False)
class TrueBool(Ltl):
    pass


@dataclass(frozen=True, eq=False)
class FalseBool(Ltl):
    pass


@dataclass(frozen=True, eq=False)
class Prop(Ltl):
    name: str


@dataclass(frozen=True, eq=False)
class Not(Ltl):
    operand: Ltl


@dataclass(frozen=True, eq=False)
class And(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True, eq=False)
class Or(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True, eq=False)
class Next(Ltl):
    operand: Ltl


@dataclass(frozen=True, eq=False)
class Eventually(Ltl):
    operand: Ltl


@dataclass(frozen=True, eq=False)
class Always(Ltl):
    operand: Ltl


@dataclass(frozen=True, eq=False)
class Until(Ltl):
    left: Ltl
    right: Ltl


UNARY = (Not, Next, Eventually, Always)
BINARY = (And, Or, Until)


def children(f):
    if isinstance(f, UNARY):
        return (f.operand,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    return ()


def neg(f):
    """Negation with double negations and constants folded away."""
    if isinstance(f, Not):
        return f.operand
    if isinstance(f, TrueBool):
        return FalseBool()
    if isinstance(f, FalseBool):
        return TrueBool()
    return Not(f)


def conjoin(formulas):
    """Left-nested conjunction with duplicates dropped; the empty conjunction is true."""
    unique = list(dict.fromkeys(formulas))
    if not unique:
        return TrueBool()
    result = unique[0]
    for f in unique[1:]:
        result = And(result, f)
    return result


def implies(a, b):
    return Or(neg(a), b)


def next_n(f, n):
    for _ in range(n):
        f = Next(f)
    return f


def conjuncts(f):
    """Top-level conjuncts of a left- or right-nested conjunction."""
    out, stack = [], [f]
    while stack:
        g = stack.pop()
        if isinstance(g, And):
            stack.extend((g.right, g.left))
        else:
            out.append(g)
    return out


def subformulas(f):
    seen, stack = {}, [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen[g] = None
        stack.extend(children(g))
    return seen.keys()


def subformula_closure(f):
    """All subformulas of f with negation nodes folded into their operands."""
    return frozenset(g for g in subformulas(f) if not isinstance(g, Not))


def atoms(f):
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Prop))


def length(f):
    """Number of nodes of the formula tree, shared subtrees counted each time."""
    total, stack = 0, [f]
    while stack:
        g = stack.pop()
        total += 1
        stack.extend(children(g))
    return total


def substitute(f, mapping):
    """Replaces atoms by formulas, mapping atom names to replacements."""
    memo = {}

    def go(g):
        if g in memo:
            return memo[g]
        if isinstance(g, Prop):
            out = mapping.get(g.name, g)
        elif isinstance(g, UNARY):
            out = type(g)(go(g.operand))
        elif isinstance(g, BINARY):
            out = type(g)(go(g.left), go(g.right))
        else:
            out = g
        memo[g] = out
        return out

    return go(f)


@dataclass(frozen=True)
class LassoWord:
    """The ultimately periodic word prefix . loop^omega over the atoms in `atoms`."""
    prefix: Tuple[FrozenSet[str], ...]
    loop: Tuple[FrozenSet[str], ...]
    atoms: FrozenSet[str] = frozenset()

    def __post_init__(self):
        if not self.loop:
            raise ValueError('the loop of a lasso word must be nonempty')
        object.__setattr__(self, 'prefix', tuple(frozenset(v) for v in self.prefix))
        object.__setattr__(self, 'loop', tuple(frozenset(v) for v in self.loop))
        domain = frozenset(self.atoms).union(*self.prefix, *self.loop)
        object.__setattr__(self, 'atoms', domain)

    def __len__(self):
        return len(self.prefix) + len(self.loop)

    def __getitem__(self, i):
        if i < len(self.prefix):
            return self.prefix[i]
        return self.loop[(i - len(self.prefix)) % len(self.loop)]


def lasso_check(w, f):
    """Evaluates f at position 0 of the word w with non-strict F, G and U."""
    unknown = atoms(f) - w.atoms
    if unknown:
        raise UnknownAtomError(f'atoms outside the word domain: {", ".join(sorted(unknown))}')
    n = len(w)
    succ = [i + 1 for i in range(n - 1)] + [len(w.prefix)]
    order = range(n - 1, -1, -1)
    memo = {}

    def fixpoint(step, start):
        values = [start] * n
        # a fixpoint over the lasso is reached after at most n rounds
        for _ in range(n + 1):
            changed = False
            for i in order:
                v = step(i, values)
                if v != values[i]:
                    values[i], changed = v, True
            if not changed:
                break
        return values

    def ev(g):
        if g in memo:
            return memo[g]
        if isinstance(g, TrueBool):
            out = [True] * n
        elif isinstance(g, FalseBool):
            out = [False] * n
        elif isinstance(g, Prop):
            out = [g.name in w[i] for i in range(n)]
        elif isinstance(g, Not):
            out = [not v for v in ev(g.operand)]
        elif isinstance(g, And):
            out = [a and b for a, b in zip(ev(g.left), ev(g.right))]
        elif isinstance(g, Or):
            out = [a or b for a, b in zip(ev(g.left), ev(g.right))]
        elif isinstance(g, Next):
            a = ev(g.operand)
            out = [a[succ[i]] for i in range(n)]
        elif isinstance(g, Until):
            a, b = ev(g.left), ev(g.right)
            out = fixpoint(lambda i, v: b[i] or (a[i] and v[succ[i]]), False)
        elif isinstance(g, Eventually):
            b = ev(g.operand)
            out = fixpoint(lambda i, v: b[i] or v[succ[i]], False)
        elif isinstance(g, Always):
            a = ev(g.operand)
            out = fixpoint(lambda i, v: a[i] and v[succ[i]], True)
        else:
            raise ValueError(f'unknown formula {g!r}')
        memo[g] = out
        return out

    return ev(f)[0]


_PLAIN_ATOM = re.compile(r'[a-z_][A-Za-z0-9_]*$')
_KEYWORDS = {'true', 'false'}


def _atom_text(name):
    if _PLAIN_ATOM.match(name) and name not in _KEYWORDS:
        return name
    return '"' + name.replace('"', '\\"') + '"'


def to_text(f):
    """Infix export with G, F, X, U, &, | and !; atoms that are not plain identifiers are quoted."""
    if isinstance(f, TrueBool):
        return 'true'
    if isinstance(f, FalseBool):
        return 'false'
    if isinstance(f, Prop):
        return _atom_text(f.name)
    if isinstance(f, UNARY):
        op = {Not: '!', Next: 'X', Eventually: 'F', Always: 'G'}[type(f)]
        inner = to_text(f.operand)
        if isinstance(f.operand, BINARY):
            inner = f'({inner})'
        return f'{op}{inner}' if op == '!' else f'{op} {inner}'
    if isinstance(f, BINARY):
        op = {And: '&', Or: '|', Until: 'U'}[type(f)]
        parts = []
        for side in (f.left, f.right):
            text = to_text(side)
            parts.append(f'({text})' if isinstance(side, BINARY) else text)
        return f' {op} '.join(parts)
    raise ValueError(f'{f!r} has no textual form')
