import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from tld_lite.errors import DiamondCountError, ResourceLimitExceeded
from tld_lite.ltl import LassoWord, atoms, lasso_check
from tld_lite.matrix import engine_for

from .simplex import PhaseOneTableau

ENUMERATION_GUARD = 2 ** 22
SAT = 'SAT'
NO_WITNESS = 'NO-WITNESS-FOUND'


@dataclass(frozen=True)
class EnumerationResult:
    outcome: str
    lasso: Optional[LassoWord] = None
    candidates: int = 0

    @property
    def satisfiable(self):
        return self.outcome == SAT


def enumeration_size(atom_count, prefix_bound, loop_bound):
    return sum(2 ** (atom_count * (p + l)) for p in range(prefix_bound + 1) for l in range(1, loop_bound + 1))


def enumerate_ltl_sat(f, prefix_bound, loop_bound, guard=ENUMERATION_GUARD):
    """Searches lassos with prefix length <= prefix_bound and loop length <= loop_bound.

    Only a SAT outcome is conclusive; lassos are tried by increasing prefix,
    then loop length, then valuations in lexicographic order.
    """
    names = sorted(atoms(f))
    total = enumeration_size(len(names), prefix_bound, loop_bound)
    if total > guard:
        raise ResourceLimitExceeded(f'{total} candidate lassos exceed the enumeration guard of {guard}')
    domain = frozenset(names)
    valuations = [frozenset(n for n, bit in zip(names, bits) if bit)
                  for bits in itertools.product((False, True), repeat=len(names))]
    tried = 0
    for p in range(prefix_bound + 1):
        for l in range(1, loop_bound + 1):
            for word in itertools.product(valuations, repeat=p + l):
                tried += 1
                w = LassoWord(word[:p], word[p:], domain)
                if lasso_check(w, f):
                    return EnumerationResult(SAT, w, tried)
    return EnumerationResult(NO_WITNESS, None, tried)


@dataclass(frozen=True)
class FeasibilityReport:
    truncation: int
    feasible: bool
    assignment: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)
    row_slack: Tuple[Fraction, ...] = ()
    col_slack: Tuple[Fraction, ...] = ()

    @property
    def verdict(self):
        return 'feasible' if self.feasible else 'infeasible'


def truncated_feasibility(kb, truncation, config=None):
    """Exact feasibility of the matrix conditions restricted to the truncation square.

    Mass a row or column sends beyond the square is a slack bounded by the
    geometric tail; infeasibility therefore refutes the KB, feasibility
    proves nothing.
    """
    engine = engine_for(kb, config)
    if engine.d != 2:
        raise DiamondCountError(f'truncated feasibility needs 2 diamond atoms, the KB has {engine.d}')
    side = range(truncation + 1)
    square = [(r, c) for r in side for c in side]
    engine.cache.prefetch(square)
    cells = [rc for rc in square if engine.entry_sat(*rc)]
    n_cells, n = len(cells), truncation + 1
    # columns: cells, row slacks, column slacks, room left under each slack bound
    width = n_cells + 4 * n
    tail = engine.dist.tail(truncation)
    A, b = [], []

    def constraint(coefs, rhs):
        row = [Fraction(0)] * width
        for j in coefs:
            row[j] = Fraction(1)
        A.append(row)
        b.append(rhs)

    for k in side:
        constraint([i for i, (r, _) in enumerate(cells) if r == k] + [n_cells + k], engine.dist.pmf(k))
        constraint([i for i, (_, c) in enumerate(cells) if c == k] + [n_cells + n + k], engine.dist.pmf(k))
    for k in side:
        constraint([n_cells + k, n_cells + 2 * n + k], tail)
        constraint([n_cells + n + k, n_cells + 3 * n + k], tail)

    x = PhaseOneTableau(A, b).solve()
    if x is None:
        return FeasibilityReport(truncation, False)
    return FeasibilityReport(truncation, True, dict(zip(cells, x[:n_cells])),
                             tuple(x[n_cells:n_cells + n]), tuple(x[n_cells + n:n_cells + 2 * n]))
