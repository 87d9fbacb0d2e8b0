"""The probabilistic decision procedure.

Entry (k1, k2) of the matrix stands for the worlds in which the first
diamond fact is first observed after k1 steps and the second after k2;
it may carry mass only when the instantiated diamond-free KB is
satisfiable. Levels are the hook-shaped sets of entries with maximum
coordinate k, and a KB is satisfiable iff the geometric mass of every
level can be placed, which is decided level by level through chained
pairs and certified by an exact-rational partial matrix.
"""
import json
import threading
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, partial
from multiprocessing import Pool
from pathlib import Path
from typing import Dict, Optional, Tuple

from tqdm import tqdm

from .buchi import DEFAULT_STATE_LIMIT, build_buchi, ltl_sat, shortest_cycle
from .config import SolverConfig
from .errors import DiamondCountError, UnsatisfiableError, WitnessError
from .geometric import GeomDistribution
from .kb import HALF, normalize_kb
from .ltl import LassoWord
from .reduction import diamond_atom_names, instantiate_abox, kb_down, single_diamond_abox, translate
from .utils import fraction_text, kb_digest, progress, trace


def entry_formula(kb, key):
    """The grounded LTL formula of one matrix entry."""
    return translate(instantiate_abox(kb, *key))


def _entry_worker(kb, state_limit, key):
    return key, ltl_sat(entry_formula(kb, key), state_limit).satisfiable


class EntrySatCache:
    """Memo from matrix coordinates to satisfiability of the instantiated KB.

    Each key is computed once; with `cache_dir` the memo is persisted as
    one JSON file per KB digest, written after each prefetch and each
    decision rather than per entry.
    """

    def __init__(self, kb, state_limit=DEFAULT_STATE_LIMIT, cache_dir=None, jobs=1, show_progress=False):
        self.kb = kb
        self.state_limit = state_limit
        self.jobs = jobs
        self.show_progress = show_progress
        self._values = {}
        self._dirty = False
        self._lock = threading.Lock()
        self.path = Path(cache_dir) / f'{kb_digest(kb)}.json' if cache_dir else None
        if self.path is not None and self.path.exists():
            stored = json.loads(self.path.read_text())
            for key, value in stored.items():
                self._values[tuple(int(x) for x in key.split(','))] = bool(value)

    def __contains__(self, key):
        return tuple(key) in self._values

    def __len__(self):
        return len(self._values)

    def __getitem__(self, key):
        key = tuple(key)
        with self._lock:
            if key not in self._values:
                _, self._values[key] = _entry_worker(self.kb, self.state_limit, key)
                self._dirty = True
            return self._values[key]

    def prefetch(self, keys):
        """Computes every missing key, in parallel when more than one job is allowed, then saves."""
        missing = list(dict.fromkeys(tuple(k) for k in keys if tuple(k) not in self._values))
        if not missing:
            return
        worker = partial(_entry_worker, self.kb, self.state_limit)
        if self.jobs > 1 and len(missing) > 1:
            with Pool(processes=min(self.jobs, len(missing))) as p:
                results = list(tqdm(p.imap(worker, missing), total=len(missing),
                                    disable=not self.show_progress, leave=False, desc='entries'))
        else:
            results = [worker(key) for key in progress(missing, self.show_progress, desc='entries')]
        with self._lock:
            for key, value in results:
                self._values.setdefault(key, value)
            self._dirty = True
        self.save()

    def save(self):
        """Writes the memo once per batch of new entries."""
        if self.path is None:
            return
        with self._lock:
            if not self._dirty:
                return
            data = {','.join(str(x) for x in key): value for key, value in sorted(self._values.items())}
            self._dirty = False
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(json.dumps(data, indent=1))


@dataclass(frozen=True)
class Level:
    index: int

    @property
    def entries(self):
        k = self.index
        return tuple([(i, k) for i in range(k + 1)] + [(k, j) for j in range(k - 1, -1, -1)])


@dataclass(frozen=True)
class Chain:
    """An odd chain from (i, l) to (l, j); elements at odd indices lose mass when it is shifted."""
    elements: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if len(self.elements) % 2 == 0:
            raise ValueError(f'chains have odd length, got {len(self.elements)}')

    @property
    def pair(self):
        return self.elements[0], self.elements[-1]

    @property
    def is_diagonal(self):
        return len(self.elements) == 1

    @property
    def added(self):
        return self.elements[0::2]

    @property
    def subtracted(self):
        return self.elements[1::2]

    @property
    def corners(self):
        return self.elements[1:-1]

    def sort_key(self):
        (i, _), (_, j) = self.pair
        return not self.is_diagonal, len(self.elements), i, j, self.corners

    def __str__(self):
        return ' '.join(f'({r},{c})' for r, c in self.elements)


@dataclass(frozen=True)
class PartialMatrix:
    """A square of exact rationals plus the mass each row and column commits beyond it."""
    entries: Tuple[Tuple[Fraction, ...], ...]
    row_tail: Tuple[Fraction, ...] = ()
    col_tail: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        entries = tuple(tuple(Fraction(v) for v in row) for row in self.entries)
        n = len(entries)
        if any(len(row) != n for row in entries):
            raise ValueError('partial matrices are square')
        zeros = (Fraction(0),) * n
        row_tail = tuple(Fraction(v) for v in self.row_tail) or zeros
        col_tail = tuple(Fraction(v) for v in self.col_tail) or zeros
        if len(row_tail) != n or len(col_tail) != n:
            raise ValueError('one tail value per row and per column')
        object.__setattr__(self, 'entries', entries)
        object.__setattr__(self, 'row_tail', row_tail)
        object.__setattr__(self, 'col_tail', col_tail)

    @property
    def size(self):
        return len(self.entries)

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r][c]

    def row_sum(self, k):
        return sum(self.entries[k], Fraction(0))

    def col_sum(self, k):
        return sum((row[k] for row in self.entries), Fraction(0))

    def perturbed(self, r, c, delta):
        rows = [list(row) for row in self.entries]
        rows[r][c] += delta
        return PartialMatrix(tuple(map(tuple, rows)), self.row_tail, self.col_tail)


@dataclass(frozen=True)
class PeriodBounds:
    s: int
    q: int

    def __post_init__(self):
        if self.s < 1 or self.q < 1:
            raise ValueError(f'period bounds must be positive, got s={self.s}, q={self.q}')

    @property
    def bound(self):
        return self.s + self.q


@dataclass
class Verdict:
    satisfiable: bool
    diamonds: int
    param: Optional[Fraction] = None
    bound: Optional[int] = None
    period: Optional[PeriodBounds] = None
    failing_level: Optional[int] = None
    degenerate_level: Optional[int] = None
    evidence: Tuple = ()
    selections: Dict[int, Chain] = field(default_factory=dict)
    witness: Optional[PartialMatrix] = None
    lasso: Optional[LassoWord] = None
    reason: str = ''

    @property
    def result(self):
        return 'SAT' if self.satisfiable else 'UNSAT'


class MatrixEngine:
    def __init__(self, kb, config=None):
        self.kb = normalize_kb(kb)
        self.config = config or SolverConfig()
        self.d = self.kb.d
        self.dist = GeomDistribution(self.kb.param) if self.d else None
        self.cache = EntrySatCache(self.kb, self.config.state_limit, self.config.cache_dir,
                                   self.config.jobs, self.config.progress)
        if self.cache.path is not None:
            trace(self.config.trace, f'entry cache {self.cache.path}: {len(self.cache)} stored entries')
        self._chained = {}
        self._pairs = {}
        self._period = None
        self._verdict = None

    def _require(self, d, what):
        if self.d != d:
            raise DiamondCountError(f'{what} needs {d} diamond atom(s), the KB has {self.d}')

    def entry_sat(self, *key):
        if len(key) != self.d:
            raise DiamondCountError(f'{self.d} diamond atom(s) but {len(key)} indices')
        return self.cache[key]

    def chained_pairs(self, level):
        """Chained pairs of a level as {((i, l), (l, j)): chain}, best selection first."""
        self._require(2, 'chained pairs')
        while len(self._pairs) <= level:
            self._compute_level(len(self._pairs))
        return self._pairs[level]

    def select(self, level):
        pairs = self.chained_pairs(level)
        return next(iter(pairs.values()), None)

    def _compute_level(self, level):
        self.cache.prefetch(Level(level).entries)
        sat = self.entry_sat
        pairs = {}
        if sat(level, level):
            pairs[(level, level), (level, level)] = Chain(((level, level),))
        rows = [i for i in range(level) if sat(i, level)]
        cols = {j for j in range(level) if sat(level, j)}
        if cols:
            for i in rows:
                for j, inner in self._inner_paths(i, level, cols).items():
                    pairs[(i, level), (level, j)] = Chain(((i, level),) + inner + ((level, j),))
        self._pairs[level] = dict(sorted(pairs.items(), key=lambda kv: kv[1].sort_key()))
        for a, b in pairs:
            self._chained[a] = self._chained[b] = True

    def _inner_paths(self, i, level, cols):
        """Shortest alternating paths inside the lower square from row i to each reachable column."""
        parent = {('r', i): None}
        queue = deque([('r', i)])
        while queue:
            node = queue.popleft()
            kind, x = node
            if kind == 'r':
                nxt = [(('c', c), (x, c)) for c in range(level) if self._chained.get((x, c))]
            else:
                nxt = [(('r', m), (m, x)) for m in range(level) if self.entry_sat(m, x)]
            for child, entry in nxt:
                if child not in parent:
                    parent[child] = (node, entry)
                    queue.append(child)
        paths = {}
        for j in sorted(cols):
            if ('c', j) in parent:
                paths[j] = _walk_back(parent, ('c', j))
        return paths

    def period_bounds(self):
        if not self.d:
            raise DiamondCountError('period bounds are undefined without diamond atoms')
        if self._period is None:
            aut = build_buchi(translate(kb_down(self.kb)), self.config.state_limit)
            names = [n for n in diamond_atom_names(self.kb) if n is not None]
            q = shortest_cycle(aut, lambda s: not any(n in s.positive for n in names))
            s = len(aut) + 1
            self._period = PeriodBounds(s, q if q is not None else s)
        return self._period

    def decide(self):
        if self._verdict is None:
            if self.d == 0:
                v = ltl_sat(translate(self.kb), self.config.state_limit)
                self._verdict = Verdict(v.satisfiable, 0, lasso=v.lasso,
                                        reason=f'translation {"has a lasso model" if v.satisfiable else "is unsatisfiable"}'
                                               f' ({v.states} automaton states)')
            elif self.d == 1:
                self._verdict = self._decide_single()
            else:
                self._verdict = self._decide_pair()
            self.cache.save()
        return self._verdict

    def _bound(self):
        if self.config.bound:
            return self.config.bound, None
        period = self.period_bounds()
        return period.bound, period

    def _decide_single(self):
        bound, period = self._bound()
        p = self.dist.p
        if self.config.jobs > 1:
            self.cache.prefetch((k,) for k in range(bound + 1))
        for k in progress(range(bound + 1), self.config.progress, desc='entries'):
            if not self.entry_sat(k):
                return Verdict(False, 1, p, bound, period, failing_level=k, evidence=(((k,), False),),
                               reason=f'entry {k} is unsatisfiable')
        return Verdict(True, 1, p, bound, period, reason=f'entries 0..{bound} are satisfiable')

    def _decide_pair(self):
        bound, period = self._bound()
        p = self.dist.p
        selections = {}
        for level in progress(range(bound + 1), self.config.progress, desc='levels'):
            chain = self.select(level)
            if chain is not None:
                selections[level] = chain
                trace(self.config.trace, f'level {level}: {chain}')
                continue
            evidence = tuple((e, self.entry_sat(*e)) for e in Level(level).entries)
            trace(self.config.trace, f'level {level}: no chained pair')
            if p > HALF:
                return Verdict(False, 2, p, bound, period, failing_level=level, evidence=evidence,
                               selections=selections, reason=f'level {level} has no chained pair')
            failed = [axis for axis in (1, 2)
                      if not decide(single_diamond_abox(self.kb, axis, level), self.config).satisfiable]
            if failed:
                axes = ' and '.join(str(a) for a in failed)
                return Verdict(False, 2, p, bound, period, failing_level=level, evidence=evidence,
                               selections=selections,
                               reason=f'level {level} has no chained pair and the single-diamond check on axis {axes} fails')
            verdict = Verdict(True, 2, p, bound, period, degenerate_level=level, selections=selections,
                              reason=f'level {level} has no chained pair; both single-diamond checks hold')
            verdict.witness = self._witness(bound, level)
            return verdict
        verdict = Verdict(True, 2, p, bound, period, selections=selections,
                          reason=f'levels 0..{bound} have chained pairs')
        verdict.witness = self._witness(bound, None)
        return verdict

    def build_witness(self, size):
        """The partial matrix of side size + 1 built level by level."""
        verdict = self.decide()
        if not verdict.satisfiable:
            raise UnsatisfiableError('KB unsatisfiable')
        self._require(2, 'witness matrices')
        return self._witness(size, verdict.degenerate_level)

    def _witness(self, size, degenerate):
        n = size + 1
        m = [[Fraction(0)] * n for _ in range(n)]
        last = size if degenerate is None else min(size, degenerate - 1)
        for level in range(last + 1):
            self._place_level(m, level)
        row_tail = [Fraction(0)] * n
        col_tail = [Fraction(0)] * n
        if degenerate is not None and degenerate <= size:
            k = degenerate
            for level in range(k + 1, n):
                m[k][level] = m[level][k] = self.dist.pmf(level)
            row_tail[k] = col_tail[k] = self.dist.tail(size)
        return PartialMatrix(tuple(map(tuple, m)), tuple(row_tail), tuple(col_tail))

    def _place_level(self, m, level):
        mass = self.dist.pmf(level)
        if self.entry_sat(level, level):
            m[level][level] = mass
            return
        chain = self.select(level)
        if chain is None:
            raise WitnessError(f'level {level} has no chained pair')
        remaining = mass
        amount = min(remaining, min(m[r][c] for r, c in chain.subtracted))
        while True:
            if amount > 0:
                _shift(m, chain, amount)
                remaining -= amount
            if remaining == 0:
                return
            # split: route the rest along chains through entries that still hold mass
            chain = self._augmenting_chain(m, level)
            if chain is None:
                raise WitnessError(f'mass {fraction_text(remaining)} of level {level} cannot be placed')
            amount = min(remaining, min(m[r][c] for r, c in chain.subtracted))

    def _augmenting_chain(self, m, level):
        targets = {j for j in range(level) if self.entry_sat(level, j)}
        parent = {}
        queue = deque()
        for i in range(level):
            if self.entry_sat(i, level):
                parent[('r', i)] = None
                queue.append(('r', i))
        while queue:
            node = queue.popleft()
            kind, x = node
            if kind == 'r':
                nxt = [(('c', c), (x, c)) for c in range(level) if m[x][c] > 0]
            else:
                nxt = [(('r', r), (r, x)) for r in range(level) if self.entry_sat(r, x)]
            for child, entry in nxt:
                if child in parent:
                    continue
                parent[child] = (node, entry)
                if child[0] == 'c' and child[1] in targets:
                    inner = _walk_back(parent, child)
                    start = _root(parent, child)[1]
                    return Chain(((start, level),) + inner + ((level, child[1]),))
                queue.append(child)
        return None

    def verify_partial(self, matrix):
        """Support on satisfiable entries and exact row and column sums, tails included."""
        self._require(2, 'partial matrices')
        n = matrix.size
        for r in range(n):
            for c in range(n):
                v = matrix[r, c]
                if v < 0 or v > 1:
                    return False
                if v > 0 and not self.entry_sat(r, c):
                    return False
        if any(t < 0 for t in matrix.row_tail + matrix.col_tail):
            return False
        for k in range(n):
            pmf = self.dist.pmf(k)
            if matrix.row_sum(k) + matrix.row_tail[k] != pmf or matrix.col_sum(k) + matrix.col_tail[k] != pmf:
                return False
        return True


def _walk_back(parent, node):
    entries = []
    while parent[node] is not None:
        node, entry = parent[node]
        entries.append(entry)
    return tuple(reversed(entries))


def _root(parent, node):
    while parent[node] is not None:
        node = parent[node][0]
    return node


def _shift(m, chain, amount):
    for index, (r, c) in enumerate(chain.elements):
        m[r][c] += amount if index % 2 == 0 else -amount


@lru_cache(maxsize=64)
def engine_for(kb, config=None):
    return MatrixEngine(kb, config)


def entry_sat(kb, k1, k2=None, config=None):
    key = (k1,) if k2 is None else (k1, k2)
    return engine_for(kb, config).entry_sat(*key)


def chained_pairs(kb, level, config=None):
    return engine_for(kb, config).chained_pairs(level)


def period_bounds(kb, config=None):
    return engine_for(kb, config).period_bounds()


def decide(kb, config=None):
    return engine_for(kb, config).decide()


def build_witness(kb, size, config=None):
    return engine_for(kb, config).build_witness(size)


def verify_partial(kb, matrix, config=None):
    return engine_for(kb, config).verify_partial(matrix)
