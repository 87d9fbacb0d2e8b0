"""Bounded search for lasso-shaped models of diamond-free KBs.

Interpretations range over a fixed finite domain (the named individuals
plus optional anonymous elements) and over lasso time lines of at most
`max_length` distinct moments. The KB semantics is unrolled directly into
z3: concept names and role pairs become Boolean variables per moment, so
the search shares nothing with the one-variable translation. A model found
here proves the KB satisfiable; finding none proves nothing.
"""
from dataclasses import dataclass
from typing import FrozenSet, Tuple

import z3

from tld_lite import kb as k
from tld_lite.errors import DiamondCountError
from tld_lite.kb import Polarity

ANONYMOUS = 'anon'


class _Lasso:
    """Time points 0 .. length - 1, with length - 1 followed by loop."""

    def position(self, n):
        """The moment of the lasso that time point n falls on."""
        if n < self.length:
            return n
        return self.loop + (n - self.loop) % (self.length - self.loop)

    def succ(self, t):
        return t + 1 if t + 1 < self.length else self.loop

    def visits(self, t):
        """Moments met from t on, in the order they are first reached."""
        return list(range(t, self.length)) + list(range(self.loop, t))


@dataclass(frozen=True)
class BoundedModel(_Lasso):
    length: int
    loop: int
    domain: Tuple[str, ...]
    concepts: Tuple[FrozenSet[Tuple[str, str]], ...]
    roles: Tuple[FrozenSet[Tuple[str, str, str]], ...]

    def related(self, role, e, f, t):
        if role.inverted:
            e, f = f, e
        return (role.name, e, f) in self.roles[t]

    def holds(self, c, e, t):
        if isinstance(c, k.Bottom):
            return False
        if isinstance(c, k.Atomic):
            return (c.name, e) in self.concepts[t]
        if isinstance(c, k.Exists):
            return any(self.related(c.role, e, f, t) for f in self.domain)
        if isinstance(c, k.Not):
            return not self.holds(c.operand, e, t)
        if isinstance(c, k.And):
            return self.holds(c.left, e, t) and self.holds(c.right, e, t)
        if isinstance(c, k.Next):
            return self.holds(c.operand, e, self.succ(t))
        if isinstance(c, k.Eventually):
            return any(self.holds(c.operand, e, j) for j in self.visits(t))
        if isinstance(c, k.Always):
            return all(self.holds(c.operand, e, j) for j in self.visits(t))
        if isinstance(c, k.Until):
            for j in self.visits(t):
                if self.holds(c.right, e, j):
                    return True
                if not self.holds(c.left, e, j):
                    return False
            return False
        raise TypeError(f'unknown concept {c!r}')

    def satisfies(self, kb):
        """Evaluates every axiom and assertion of `kb` on this interpretation."""
        moments = range(self.length)
        for ci in kb.ontology.concept_inclusions:
            if any(self.holds(ci.sub, e, t) and not self.holds(ci.sup, e, t) for e in self.domain for t in moments):
                return False
        for ri in kb.ontology.role_inclusions:
            if any(self.related(ri.sub, e, f, t) and not self.related(ri.sup, e, f, t)
                   for e in self.domain for f in self.domain for t in moments):
                return False
        for atom in kb.abox:
            t = self.position(atom.offset)
            if atom.is_role:
                holds = self.related(atom.predicate, *atom.individuals, t)
            else:
                holds = (atom.predicate, atom.individuals[0]) in self.concepts[t]
            if holds == (atom.polarity is Polarity.NEGATIVE):
                return False
        return True


def _any(xs):
    xs = list(xs)
    return z3.Or(xs) if xs else z3.BoolVal(False)


def _all(xs):
    xs = list(xs)
    return z3.And(xs) if xs else z3.BoolVal(True)


class _Unrolling(_Lasso):
    def __init__(self, kb, domain, length, loop):
        self.kb = kb
        self.domain = domain
        self.length = length
        self.loop = loop
        self.memo = {}

    def concept_var(self, name, e, t):
        return z3.Bool(f'{name}@{e}@{t}')

    def role_var(self, role, e, f, t):
        if role.inverted:
            e, f = f, e
        if role.rigid:
            return z3.Bool(f'{role.name}({e},{f})')
        return z3.Bool(f'{role.name}({e},{f})@{t}')

    def concept(self, c, e, t):
        key = c, e, t
        if key in self.memo:
            return self.memo[key]
        if isinstance(c, k.Bottom):
            out = z3.BoolVal(False)
        elif isinstance(c, k.Atomic):
            out = self.concept_var(c.name, e, t)
        elif isinstance(c, k.Exists):
            out = _any(self.role_var(c.role, e, f, t) for f in self.domain)
        elif isinstance(c, k.Not):
            out = z3.Not(self.concept(c.operand, e, t))
        elif isinstance(c, k.And):
            out = z3.And(self.concept(c.left, e, t), self.concept(c.right, e, t))
        elif isinstance(c, k.Next):
            out = self.concept(c.operand, e, self.succ(t))
        elif isinstance(c, k.Eventually):
            out = _any(self.concept(c.operand, e, j) for j in self.visits(t))
        elif isinstance(c, k.Always):
            out = _all(self.concept(c.operand, e, j) for j in self.visits(t))
        elif isinstance(c, k.Until):
            seen = self.visits(t)
            out = _any(_all([self.concept(c.right, e, j)] + [self.concept(c.left, e, i) for i in seen[:n]])
                       for n, j in enumerate(seen))
        else:
            raise TypeError(f'unknown concept {c!r}')
        self.memo[key] = out
        return out

    def constraints(self):
        moments = range(self.length)
        out = []
        for ci in self.kb.ontology.concept_inclusions:
            for e in self.domain:
                for t in moments:
                    out.append(z3.Implies(self.concept(ci.sub, e, t), self.concept(ci.sup, e, t)))
        for ri in self.kb.ontology.role_inclusions:
            for e in self.domain:
                for f in self.domain:
                    for t in moments:
                        out.append(z3.Implies(self.role_var(ri.sub, e, f, t), self.role_var(ri.sup, e, f, t)))
        for atom in self.kb.abox:
            t = self.position(atom.offset)
            if atom.is_role:
                holds = self.role_var(atom.predicate, *atom.individuals, t)
            else:
                holds = self.concept_var(atom.predicate, atom.individuals[0], t)
            out.append(z3.Not(holds) if atom.polarity is Polarity.NEGATIVE else holds)
        return out

    def extract(self, model):
        def true(var):
            return z3.is_true(model.eval(var, model_completion=True))

        names = sorted(self.kb.concept_names)
        bases = sorted({r.base for r in self.kb.role_set}, key=lambda b: b.name)
        concepts, roles = [], []
        for t in range(self.length):
            concepts.append(frozenset((n, e) for n in names for e in self.domain
                                      if true(self.concept_var(n, e, t))))
            roles.append(frozenset((b.name, e, f) for b in bases for e in self.domain for f in self.domain
                                   if true(self.role_var(k.Role(b), e, f, t))))
        return BoundedModel(self.length, self.loop, self.domain, tuple(concepts), tuple(roles))


def search_kb_model(kb, max_length=3, extra_elements=0):
    """Returns the first model with the fewest moments, or None within the bounds."""
    if kb.d:
        raise DiamondCountError('bounded model search needs a diamond-free KB')
    domain = tuple(kb.individuals) + tuple(f'{ANONYMOUS}{i}' for i in range(extra_elements))
    domain = domain or (ANONYMOUS,)
    for length in range(1, max_length + 1):
        for loop in range(length):
            unrolling = _Unrolling(kb, domain, length, loop)
            solver = z3.Solver()
            solver.add(*unrolling.constraints())
            if solver.check() == z3.sat:
                return unrolling.extract(solver.model())
    return None
