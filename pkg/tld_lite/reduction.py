"""Translation of diamond-free temporal KBs into propositional LTL.

A KB becomes a one-variable temporal sentence over unary predicates
(`A(x)`, `ER(x)`), propositional flags `p_R` and the constants of the KB
plus one range witness `d_R` per role; grounding replicates every
universally quantified conjunct over those constants. The ABox surgeries
used by the matrix engine (diamond instantiation, single-diamond
sub-KBs and the diamond-erased KB) live here as well.
"""
from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, Tuple

from . import kb as k
from . import ltl
from .errors import DiamondCountError, ParameterDomainError, TranslationError
from .kb import HALF, AboxAtom, ConceptInclusion, KnowledgeBase, Ontology, Polarity, Rigidity, RoleName, normalize_kb
from .ltl import Ltl

VARIABLE = 'x'
ANONYMOUS = 'anon'


@dataclass(frozen=True, eq=False)
class Pred(Ltl):
    """A unary predicate applied to the variable or to a constant."""
    name: str
    term: str = VARIABLE


@dataclass(frozen=True)
class Fo1Conjunct:
    formula: Ltl
    quantified: bool = True
    source: str = ''


@dataclass(frozen=True)
class Fo1Sentence:
    conjuncts: Tuple[Fo1Conjunct, ...]
    constants: Tuple[str, ...]


def exists_name(role):
    return f'E{role}'


def witness_name(role):
    return f'd_{role}'


def flag_name(role):
    return f'p_{role}'


def atom_name(predicate, constant):
    return f'{predicate}@{constant}'


def concept_star(c, term=VARIABLE):
    """The one-variable image of a concept."""
    if isinstance(c, k.Bottom):
        return ltl.FalseBool()
    if isinstance(c, k.Atomic):
        return Pred(c.name, term)
    if isinstance(c, k.Exists):
        return Pred(exists_name(c.role), term)
    if isinstance(c, k.Not):
        return ltl.Not(concept_star(c.operand, term))
    if isinstance(c, k.Next):
        return ltl.Next(concept_star(c.operand, term))
    if isinstance(c, k.Eventually):
        return ltl.Eventually(concept_star(c.operand, term))
    if isinstance(c, k.Always):
        return ltl.Always(concept_star(c.operand, term))
    if isinstance(c, k.Until):
        return ltl.Until(concept_star(c.left, term), concept_star(c.right, term))
    if isinstance(c, k.And):
        return ltl.And(concept_star(c.left, term), concept_star(c.right, term))
    raise TranslationError(f'unknown concept {c!r}')


@dataclass(frozen=True)
class RoleClosure:
    """The reflexive-transitive closure of role inclusion, closed under inversion."""
    relation: FrozenSet[Tuple[k.Role, k.Role]]

    def __contains__(self, pair):
        return pair in self.relation

    def below(self, role):
        """All R' with R' included in `role`."""
        return {sub for sub, sup in self.relation if sup == role}


def role_closure(role_inclusions, roles=()):
    edges = {r: {r} for r in roles}
    for ri in role_inclusions:
        for sub, sup in ((ri.sub, ri.sup), (ri.sub.inverse(), ri.sup.inverse())):
            for r in (sub, sup):
                edges.setdefault(r, {r})
            edges[sub].add(sup)
    # Warshall over the finite role set
    for mid in list(edges):
        for src in edges:
            if mid in edges[src]:
                edges[src] |= edges[mid]
    return RoleClosure(frozenset((a, b) for a, targets in edges.items() for b in targets))


@dataclass(frozen=True)
class AboxSlices:
    boxed: Dict[k.Role, FrozenSet[Tuple[str, str]]]
    timed: Dict[Tuple[k.Role, int], FrozenSet[Tuple[str, str]]]
    offsets: Tuple[int, ...] = ()

    def box(self, role):
        return self.boxed.get(role, frozenset())

    def at(self, role, n):
        return self.timed.get((role, n), frozenset())

    @property
    def all_boxed(self):
        return frozenset((r, pair) for r, pairs in self.boxed.items() for pair in pairs)

    def all_at(self, n):
        return frozenset((r, pair) for (r, m), pairs in self.timed.items() if m == n for pair in pairs)


def abox_slices(abox, closure, roles):
    """The temporal slices A^R_n and A^R_box of a normalized ABox."""
    positive = [a for a in abox if a.is_role and a.polarity is Polarity.POSITIVE]
    offsets = tuple(sorted({a.offset for a in abox}))
    boxed = {}
    for role in roles:
        if role.rigid:
            boxed[role] = frozenset(a.individuals for a in positive if (a.predicate, role) in closure)
    for role in roles:
        if not role.rigid:
            boxed[role] = frozenset().union(*(boxed[r] for r in closure.below(role) if r.rigid and r in boxed))
    timed = {}
    for role in roles:
        for n in offsets:
            if role.rigid:
                timed[role, n] = boxed[role]
            else:
                at_n = {a.individuals for a in positive if a.offset == n and (a.predicate, role) in closure}
                timed[role, n] = frozenset(at_n) | boxed[role]
    return AboxSlices(boxed, timed, offsets)


def _diamond_free(kb):
    if kb.d:
        raise TranslationError('diamond atoms must be instantiated before translation')


def kb_dagger(kb):
    """The one-variable sentence of a diamond-free KB."""
    _diamond_free(kb)
    kb = normalize_kb(kb)
    roles = kb.role_set
    closure = role_closure(kb.ontology.role_inclusions, roles)
    slices = abox_slices(kb.abox, closure, roles)
    out = []

    for ci in kb.ontology.concept_inclusions:
        out.append(Fo1Conjunct(ltl.Always(ltl.implies(concept_star(ci.sub), concept_star(ci.sup))), True, 'tbox'))
    for ri in kb.ontology.role_inclusions:
        for sub, sup in ((ri.sub, ri.sup), (ri.sub.inverse(), ri.sup.inverse())):
            body = ltl.implies(Pred(exists_name(sub)), Pred(exists_name(sup)))
            out.append(Fo1Conjunct(ltl.Always(body), True, 'rbox'))

    for atom in kb.abox:
        if atom.is_role:
            continue
        body = Pred(atom.predicate, atom.individuals[0])
        if atom.polarity is Polarity.NEGATIVE:
            body = ltl.Not(body)
        out.append(Fo1Conjunct(ltl.next_n(body, atom.offset), False, 'abox'))
    for n in slices.offsets:
        for role, (a, _) in sorted(slices.all_at(n), key=_slice_key):
            out.append(Fo1Conjunct(ltl.next_n(Pred(exists_name(role), a), n), False, 'abox'))
    for role, (a, _) in sorted(slices.all_boxed, key=_slice_key):
        out.append(Fo1Conjunct(ltl.Always(Pred(exists_name(role), a)), False, 'abox'))
    for atom in kb.abox:
        if atom.is_role and atom.polarity is Polarity.NEGATIVE:
            if atom.individuals in slices.at(atom.predicate, atom.offset):
                out.append(Fo1Conjunct(ltl.FalseBool(), False, 'clash'))

    for role in roles:
        e = Pred(exists_name(role))
        if role.rigid:
            out.append(Fo1Conjunct(ltl.Always(ltl.implies(ltl.Eventually(e), ltl.Always(e))), True, 'rigid'))
        flag = ltl.Prop(flag_name(role))
        out.append(Fo1Conjunct(ltl.Always(ltl.implies(ltl.Eventually(e), ltl.Always(flag))), True, 'witness'))
        # d_R only has to be in ER- at 0: a suffix of any R-successor serves
        witness = Pred(exists_name(role.inverse()), witness_name(role))
        out.append(Fo1Conjunct(ltl.implies(flag, witness), False, 'witness'))

    constants = list(kb.individuals) + [witness_name(r) for r in roles]
    if not constants:
        constants = [ANONYMOUS]
    return Fo1Sentence(tuple(out), tuple(constants))


def _slice_key(item):
    role, pair = item
    return role.name, role.inverted, pair


def _instantiate(f, constant):
    memo = {}

    def go(g):
        if g in memo:
            return memo[g]
        if isinstance(g, Pred):
            term = g.term
            if term == VARIABLE:
                if constant is None:
                    raise TranslationError(f'free variable in unquantified conjunct at {g.name}')
                term = constant
            out = ltl.Prop(atom_name(g.name, term))
        elif isinstance(g, ltl.UNARY):
            out = type(g)(go(g.operand))
        elif isinstance(g, ltl.BINARY):
            out = type(g)(go(g.left), go(g.right))
        else:
            out = g
        memo[g] = out
        return out

    return go(f)


def ground(sentence, constants=None):
    """Propositional LTL: quantified conjuncts replicated per constant, duplicates dropped."""
    constants = sentence.constants if constants is None else tuple(constants)
    parts = []
    for conjunct in sentence.conjuncts:
        if conjunct.quantified:
            parts.extend(_instantiate(conjunct.formula, c) for c in constants)
        else:
            parts.append(_instantiate(conjunct.formula, None))
    return ltl.conjoin(parts)


def translate(kb):
    return ground(kb_dagger(kb))


def _literal(atom, offset, polarity):
    return replace(atom, offset=offset, polarity=polarity, param=None)


def _unfold(atom, first, count):
    """not theta at `first` .. `first + count - 1`, then theta at `first + count`."""
    atoms = [_literal(atom, first + j, Polarity.NEGATIVE) for j in range(count)]
    atoms.append(_literal(atom, first + count, Polarity.POSITIVE))
    return atoms


def instantiate_abox(kb, k1, k2=None):
    """The diamond-free KB of one matrix entry: diamond i becomes a first occurrence after k_i steps."""
    diamonds = kb.diamonds
    ks = (k1,) if k2 is None else (k1, k2)
    if not diamonds:
        raise DiamondCountError('instantiation needs at least one diamond atom')
    if len(ks) != len(diamonds):
        raise DiamondCountError(f'{len(diamonds)} diamond atoms but {len(ks)} indices')
    if any(x < 0 for x in ks):
        raise ValueError(f'negative entry index {ks}')
    steps = iter(ks)
    abox = []
    for atom in kb.abox:
        if atom.is_diamond:
            abox.extend(_unfold(atom, atom.offset, next(steps)))
        else:
            abox.append(atom)
    return normalize_kb(kb.with_abox(abox))


def single_diamond_abox(kb, fixed_axis, k):
    """The one-diamond KB used when a level of a p = 1/2 matrix carries no chained pair.

    The fixed axis first occurs after k steps; the other axis is absent
    through step k and keeps a fresh diamond right after it.
    """
    diamonds = kb.diamonds
    if len(diamonds) != 2:
        raise DiamondCountError(f'single-diamond sub-KBs need two diamond atoms, got {len(diamonds)}')
    if kb.param.p != HALF:
        raise ParameterDomainError(f'single-diamond sub-KBs need p = 1/2, got {kb.param.p}')
    if fixed_axis not in (1, 2):
        raise ValueError(f'axis must be 1 or 2, got {fixed_axis}')
    fixed, other = diamonds[fixed_axis - 1], diamonds[2 - fixed_axis]
    abox = []
    for atom in kb.abox:
        if atom is fixed:
            abox.extend(_unfold(atom, atom.offset, k))
        elif atom is other:
            abox.extend(_literal(atom, atom.offset + j, Polarity.NEGATIVE) for j in range(k + 1))
            abox.append(replace(atom, offset=atom.offset + k + 1))
        else:
            abox.append(atom)
    return normalize_kb(kb.with_abox(abox))


def _fresh(base, taken):
    name, n = base, 1
    while name in taken:
        name, n = f'{base}_{n}', n + 1
    taken.add(name)
    return name


def kb_down(kb):
    """Replaces each diamond atom by a fresh predicate that holds everywhere."""
    if not kb.d:
        return kb
    taken = set(kb.concept_names) | {r.name for r in kb.roles} | {r.name for r in kb.role_set}
    cis = list(kb.ontology.concept_inclusions)
    roles = list(kb.roles)
    abox = []
    index = 0
    for atom in kb.abox:
        if not atom.is_diamond:
            abox.append(atom)
            continue
        index += 1
        name = _fresh(f'T_{index}', taken)
        if atom.is_role:
            fresh = RoleName(name, Rigidity.FLEXIBLE)
            roles.append(fresh)
            predicate = k.Role(fresh, atom.predicate.inverted)
        else:
            cis.append(ConceptInclusion(k.Not(k.Atomic(name)), k.Bottom()))
            predicate = name
        abox.append(AboxAtom(atom.offset, Polarity.POSITIVE, predicate, atom.individuals, None, atom.position))
    ontology = Ontology(tuple(cis), kb.ontology.role_inclusions)
    return normalize_kb(KnowledgeBase(ontology, tuple(abox), tuple(roles)))


def fresh_atoms(kb):
    """Grounded names of the always-true predicates introduced by kb_down."""
    down = kb_down(kb)
    names = set(down.concept_names) - set(kb.concept_names)
    return {atom_name(n, c) for n in names for c in kb_dagger(down).constants}


def diamond_atom_names(kb):
    """Grounded propositional names of the concept diamonds, in axis order; None for role diamonds."""
    return tuple(None if a.is_role else atom_name(a.predicate, a.individuals[0]) for a in kb.diamonds)
