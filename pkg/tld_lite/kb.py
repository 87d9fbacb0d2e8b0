from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple, Union

from .errors import DiamondCountError, KbSyntaxError, ParameterDomainError

HALF = Fraction(1, 2)
MAX_DIAMONDS = 2


class Rigidity(Enum):
    RIGID = 'rigid'
    FLEXIBLE = 'flexible'


@dataclass(frozen=True)
class RoleName:
    name: str
    rigidity: Rigidity = Rigidity.FLEXIBLE

    def __post_init__(self):
        if not self.name:
            raise ValueError('role name must be nonempty')

    @property
    def rigid(self):
        return self.rigidity is Rigidity.RIGID


@dataclass(frozen=True)
class Role:
    base: RoleName
    inverted: bool = False

    @property
    def name(self):
        return self.base.name

    @property
    def rigid(self):
        return self.base.rigid

    def inverse(self):
        return Role(self.base, not self.inverted)

    def __str__(self):
        return f'{self.base.name}-' if self.inverted else self.base.name


class Concept:
    """Base of the concept grammar: basic concepts, booleans and temporal operators."""


class BasicConcept(Concept):
    pass


@dataclass(frozen=True)
class Bottom(BasicConcept):
    pass


@dataclass(frozen=True)
class Atomic(BasicConcept):
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError('concept name must be nonempty')


@dataclass(frozen=True)
class Exists(BasicConcept):
    role: Role


@dataclass(frozen=True)
class Not(Concept):
    operand: Concept


@dataclass(frozen=True)
class Next(Concept):
    operand: Concept


@dataclass(frozen=True)
class Eventually(Concept):
    operand: Concept


@dataclass(frozen=True)
class Always(Concept):
    operand: Concept


@dataclass(frozen=True)
class Until(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept


UNARY_CONCEPTS = (Not, Next, Eventually, Always)
BINARY_CONCEPTS = (Until, And)


def next_n(concept, n):
    for _ in range(n):
        concept = Next(concept)
    return concept


def always_n(concept, n):
    for _ in range(n):
        concept = Always(concept)
    return concept


def walk(concept):
    """Yields the concept and all of its subconcepts, parents first."""
    stack = [concept]
    while stack:
        c = stack.pop()
        yield c
        if isinstance(c, UNARY_CONCEPTS):
            stack.append(c.operand)
        elif isinstance(c, BINARY_CONCEPTS):
            stack.extend((c.right, c.left))


@dataclass(frozen=True)
class ConceptInclusion:
    sub: Concept
    sup: Concept
    position: Optional[Tuple[int, int]] = field(default=None, compare=False)


@dataclass(frozen=True)
class RoleInclusion:
    sub: Role
    sup: Role
    position: Optional[Tuple[int, int]] = field(default=None, compare=False)


@dataclass(frozen=True)
class Ontology:
    concept_inclusions: Tuple[ConceptInclusion, ...] = ()
    role_inclusions: Tuple[RoleInclusion, ...] = ()


class Polarity(Enum):
    POSITIVE = 'positive'
    NEGATIVE = 'negative'
    DIAMOND = 'diamond'


@dataclass(frozen=True)
class GeomParam:
    p: Fraction

    def __post_init__(self):
        p = Fraction(self.p)
        if not HALF <= p < 1:
            raise ParameterDomainError(f'parameter outside [1/2,1): {p}')
        object.__setattr__(self, 'p', p)


@dataclass(frozen=True)
class AboxAtom:
    offset: int
    polarity: Polarity
    predicate: Union[str, Role]
    individuals: Tuple[str, ...]
    param: Optional[GeomParam] = None
    position: Optional[Tuple[int, int]] = field(default=None, compare=False)

    def __post_init__(self):
        where = self.position or (None, None)
        if self.offset < 0:
            raise KbSyntaxError(f'negative offset {self.offset}', *where)
        arity = 2 if isinstance(self.predicate, Role) else 1
        if len(self.individuals) != arity:
            raise KbSyntaxError(f'{self.predicate} takes {arity} individual(s), got {len(self.individuals)}', *where)
        if (self.param is not None) != (self.polarity is Polarity.DIAMOND):
            raise KbSyntaxError('a geometric parameter belongs to diamond atoms only', *where)

    @property
    def is_role(self):
        return isinstance(self.predicate, Role)

    @property
    def is_diamond(self):
        return self.polarity is Polarity.DIAMOND

    def mirror(self):
        """The same role atom stated on the inverse role."""
        return replace(self, predicate=self.predicate.inverse(), individuals=self.individuals[::-1])


@dataclass(frozen=True)
class KnowledgeBase:
    ontology: Ontology = Ontology()
    abox: Tuple[AboxAtom, ...] = ()
    roles: Tuple[RoleName, ...] = ()

    def __post_init__(self):
        diamonds = self.diamonds
        if len(diamonds) > MAX_DIAMONDS:
            where = diamonds[MAX_DIAMONDS].position or (None, None)
            raise DiamondCountError(f'{len(diamonds)} diamond atoms; at most {MAX_DIAMONDS} are supported'
                                    + (f' (line {where[0]}, column {where[1]})' if where[0] else ''))
        params = {a.param.p for a in diamonds}
        if len(params) > 1:
            where = diamonds[-1].position or (None, None)
            raise ParameterDomainError('diamond atoms must share one parameter, got '
                                       + ', '.join(str(p) for p in sorted(params)), *where)

    @property
    def diamonds(self):
        return tuple(a for a in self.abox if a.is_diamond)

    @property
    def d(self):
        return len(self.diamonds)

    @property
    def param(self):
        diamonds = self.diamonds
        return diamonds[0].param if diamonds else None

    @property
    def individuals(self):
        seen = {}
        for atom in self.abox:
            for name in atom.individuals:
                seen.setdefault(name, None)
        return tuple(seen)

    @property
    def role_set(self):
        """role(K): roles used by the ontology or the ABox, closed under inverses."""
        bases = set()
        for ci in self.ontology.concept_inclusions:
            for side in (ci.sub, ci.sup):
                bases.update(c.role.base for c in walk(side) if isinstance(c, Exists))
        for ri in self.ontology.role_inclusions:
            bases.update((ri.sub.base, ri.sup.base))
        bases.update(a.predicate.base for a in self.abox if a.is_role)
        roles = [Role(b, inv) for b in bases for inv in (False, True)]
        return tuple(sorted(roles, key=lambda r: (r.name, r.inverted)))

    @property
    def concept_names(self):
        names = set()
        for ci in self.ontology.concept_inclusions:
            for side in (ci.sub, ci.sup):
                names.update(c.name for c in walk(side) if isinstance(c, Atomic))
        names.update(a.predicate for a in self.abox if not a.is_role)
        return frozenset(names)

    @property
    def size(self):
        n = sum(sum(1 for _ in walk(ci.sub)) + sum(1 for _ in walk(ci.sup))
                for ci in self.ontology.concept_inclusions)
        n += 2 * len(self.ontology.role_inclusions)
        return n + sum(1 + a.offset for a in self.abox)

    def with_abox(self, abox):
        return replace(self, abox=tuple(abox))


def normalize_kb(kb):
    """Adds the inverse mirror of every positive and negative role atom."""
    atoms = {}
    for atom in kb.abox:
        atoms.setdefault(atom, None)
        if atom.is_role and not atom.is_diamond:
            atoms.setdefault(atom.mirror(), None)
    return kb.with_abox(atoms)
