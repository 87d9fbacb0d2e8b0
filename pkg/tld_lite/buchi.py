from collections import deque
from dataclasses import dataclass, field
from typing import FrozenSet, Optional, Tuple

from .errors import ResourceLimitExceeded
from .ltl import (Always, And, Eventually, FalseBool, LassoWord, Ltl, Next, Not, Or, Prop, TrueBool, Until,
                  atoms, neg, to_text)

DEFAULT_STATE_LIMIT = 2 ** 20


@dataclass(frozen=True)
class BuchiState:
    """A fully expanded tableau node.

    `positive` and `negative` are the literals the current letter must
    satisfy, `obligations` the formulas every successor must satisfy and
    `pending` the eventualities promised here but not fulfilled yet.
    """
    positive: FrozenSet[str]
    negative: FrozenSet[str]
    obligations: FrozenSet[Ltl]
    pending: FrozenSet[Ltl]

    def admits(self, valuation):
        return self.positive <= valuation and not (self.negative & valuation)


@dataclass
class BuchiAutomaton:
    formula: Ltl
    states: list = field(default_factory=list)
    initial: Tuple[int, ...] = ()
    successors: list = field(default_factory=list)
    eventualities: Tuple[Ltl, ...] = ()

    def __len__(self):
        return len(self.states)

    @property
    def acceptance(self):
        """One accepting set per eventuality: the states where it is not pending."""
        return tuple(frozenset(i for i, s in enumerate(self.states) if e not in s.pending)
                     for e in self.eventualities)


@dataclass(frozen=True)
class LtlVerdict:
    satisfiable: bool
    lasso: Optional[LassoWord] = None
    states: int = 0


def _goal(eventuality):
    return eventuality.right if isinstance(eventuality, Until) else eventuality.operand


def _saturate(todo, done, deferred):
    """Applies the non-branching expansion rules; False on a local contradiction."""
    while todo:
        f = todo.pop()
        if f in done:
            continue
        if isinstance(f, TrueBool):
            done.add(f)
        elif isinstance(f, FalseBool):
            return False
        elif isinstance(f, Prop):
            if Not(f) in done:
                return False
            done.add(f)
        elif isinstance(f, Not):
            g = f.operand
            if isinstance(g, Prop):
                if g in done:
                    return False
                done.add(f)
            elif isinstance(g, TrueBool):
                return False
            elif isinstance(g, FalseBool):
                done.add(f)
            elif isinstance(g, Not):
                done.add(f)
                todo.append(g.operand)
            elif isinstance(g, Or):
                done.add(f)
                todo += [neg(g.left), neg(g.right)]
            elif isinstance(g, Next):
                done.add(f)
                todo.append(Next(neg(g.operand)))
            elif isinstance(g, Eventually):
                done.add(f)
                todo.append(Always(neg(g.operand)))
            elif isinstance(g, Always):
                done.add(f)
                todo.append(Eventually(neg(g.operand)))
            else:
                deferred.append(f)
        elif isinstance(f, And):
            done.add(f)
            todo += [f.left, f.right]
        elif isinstance(f, Always):
            done.add(f)
            todo += [f.operand, Next(f)]
        elif isinstance(f, Next):
            done.add(f)
        else:
            deferred.append(f)
    return True


def _alternatives(f, done):
    """Returns (already satisfied, alternatives) for a branching formula."""
    if isinstance(f, Or):
        return f.left in done or f.right in done, [[f.left], [f.right]]
    if isinstance(f, Until):
        return f.right in done, [[f.right], [f.left, Next(f)]]
    if isinstance(f, Eventually):
        return f.operand in done, [[f.operand], [Next(f)]]
    g = f.operand
    left, right = neg(g.left), neg(g.right)
    if isinstance(g, And):
        return left in done or right in done, [[left], [right]]
    # not (l U r): r fails now, and l fails now or the negation carries over
    return left in done and right in done, [[right, left], [right, Next(f)]]


def _state_of(done):
    positive = frozenset(f.name for f in done if isinstance(f, Prop))
    negative = frozenset(f.operand.name for f in done if isinstance(f, Not) and isinstance(f.operand, Prop))
    obligations = frozenset(f.operand for f in done if isinstance(f, Next))
    pending = frozenset(f for f in done if isinstance(f, (Until, Eventually)) and _goal(f) not in done)
    return BuchiState(positive, negative, obligations, pending)


class _StateOrder:
    """Deterministic ordering of states, independent of hash seeds."""

    def __init__(self):
        self.texts = {}

    def text(self, f):
        if f not in self.texts:
            self.texts[f] = to_text(f)
        return self.texts[f]

    def key(self, s):
        return (sorted(s.positive), sorted(s.negative),
                sorted(self.text(f) for f in s.obligations), sorted(self.text(f) for f in s.pending))


def covers(formulas, order=None):
    """All fully expanded, locally consistent states that make every formula hold now.

    Formulas are expanded in the canonical order of their text, so the
    states produced do not depend on set iteration order.
    """
    order = order or _StateOrder()
    result = set()
    stack = [(sorted(formulas, key=order.text), frozenset(), ())]
    while stack:
        todo, done, deferred = stack.pop()
        done, deferred = set(done), list(deferred)
        if not _saturate(todo, done, deferred):
            continue
        branch = None
        while deferred:
            f = deferred.pop()
            if f in done:
                continue
            satisfied, alternatives = _alternatives(f, done)
            if satisfied:
                done.add(f)
                continue
            branch = f, alternatives
            break
        if branch is None:
            result.add(_state_of(done))
            continue
        f, alternatives = branch
        done.add(f)
        done = frozenset(done)
        for alternative in reversed(alternatives):
            stack.append((list(alternative), done, tuple(deferred)))
    return result


def build_buchi(f, state_limit=DEFAULT_STATE_LIMIT):
    """Builds the reachable part of the generalized Buchi automaton of f."""
    aut = BuchiAutomaton(f)
    index = {}
    order = _StateOrder()
    memo = {}

    def intern(state):
        if state not in index:
            if len(aut.states) >= state_limit:
                raise ResourceLimitExceeded(f'automaton exceeds the state limit of {state_limit}')
            index[state] = len(aut.states)
            aut.states.append(state)
            queue.append(index[state])
        return index[state]

    def expand(obligations):
        if obligations not in memo:
            memo[obligations] = sorted(covers(obligations, order), key=order.key)
        return memo[obligations]

    queue = deque()
    aut.initial = tuple(intern(s) for s in sorted(covers([f], order), key=order.key))
    while queue:
        i = queue.popleft()
        targets = tuple(intern(s) for s in expand(aut.states[i].obligations))
        aut.successors.append(targets)
    pending = set().union(*(s.pending for s in aut.states))
    aut.eventualities = tuple(sorted(pending, key=order.text))
    return aut


def strongly_connected_components(successors):
    """Iterative Tarjan; components come out in reverse topological order."""
    index, low = {}, {}
    stack, on_stack, components = [], set(), []
    counter = 0
    for root in range(len(successors)):
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, 0)]
        while work:
            v, i = work[-1]
            if i < len(successors[v]):
                work[-1] = (v, i + 1)
                w = successors[v][i]
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, 0))
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == v:
                        break
                components.append(sorted(component))
    return components


def _is_cyclic(aut, component):
    return len(component) > 1 or component[0] in aut.successors[component[0]]


def _path(aut, sources, targets, within=None, min_steps=0):
    """Shortest path of states from one of `sources` to one of `targets`.

    With min_steps=0 the path starts with its source; with min_steps=1 the
    source is left out and at least one transition is taken.
    """
    sources = list(sources)
    if min_steps == 0:
        for s in sources:
            if s in targets:
                return [s]
    nodes = [(s, -1) for s in sources]
    seen = set(sources) if min_steps == 0 else set()
    head = 0
    while head < len(nodes):
        v = nodes[head][0]
        for w in aut.successors[v]:
            if within is not None and w not in within:
                continue
            if w in targets:
                path, j = [w], head
                while j != -1:
                    path.append(nodes[j][0])
                    j = nodes[j][1]
                path.reverse()
                return path[1:] if min_steps else path
            if w not in seen:
                seen.add(w)
                nodes.append((w, head))
        head += 1
    return None


def find_accepting_lasso(aut):
    """Returns (prefix states, cycle states) of an accepting run, or None."""
    acceptance = aut.acceptance
    for component in sorted(strongly_connected_components(aut.successors), key=min):
        if not _is_cyclic(aut, component):
            continue
        members = set(component)
        satisfying = [accepting & members for accepting in acceptance]
        if not all(satisfying):
            continue
        prefix = _path(aut, aut.initial, members)
        if prefix is None:
            continue
        entry = prefix.pop()
        cycle = [entry]
        for targets in satisfying:
            if targets.isdisjoint(cycle):
                cycle += _path(aut, [cycle[-1]], targets, members, min_steps=1)
        cycle += _path(aut, [cycle[-1]], {entry}, members, min_steps=1)[:-1]
        return prefix, cycle
    return None


def ltl_sat(f, state_limit=DEFAULT_STATE_LIMIT):
    """Decides satisfiability of f; a satisfiable verdict carries a lasso witness."""
    aut = build_buchi(f, state_limit)
    found = find_accepting_lasso(aut)
    if found is None:
        return LtlVerdict(False, None, len(aut))
    prefix, cycle = found
    lasso = LassoWord(tuple(aut.states[i].positive for i in prefix),
                      tuple(aut.states[i].positive for i in cycle), atoms(f))
    return LtlVerdict(True, lasso, len(aut))


def shortest_cycle(aut, allowed):
    """Length of a shortest cycle through states satisfying `allowed`, or None."""
    members = {i for i, s in enumerate(aut.states) if allowed(s)}
    best = None
    for start in sorted(members):
        path = _path(aut, [start], {start}, members, min_steps=1)
        if path is not None and (best is None or len(path) < best):
            best = len(path)
            if best == 1:
                break
    return best
