from fractions import Fraction
from pathlib import Path

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from .errors import KbSyntaxError, ParameterDomainError
from .kb import (AboxAtom, Always, And, Atomic, Bottom, ConceptInclusion, Eventually, Exists, GeomParam,
                 KnowledgeBase, Next, Not, Ontology, Polarity, Rigidity, Role, RoleInclusion, RoleName,
                 Until, always_n, next_n)

KB_GRAMMAR = r"""
    start: decl* tbox? abox?

    decl: "rigid" "role" NAME       -> rigid_decl
        | "flexible" "role" NAME    -> flexible_decl

    tbox: "tbox" ":" axiom*
    axiom: concept "[=" concept    -> inclusion
          | concept "==" concept    -> equivalence

    ?concept: conj
    ?conj: until
         | conj "&" until           -> and_
    ?until: unary
          | unary "U" until         -> until
    ?unary: "not" unary             -> not_
          | "X" unary               -> next
          | "X" "^" INT unary       -> next_pow
          | "F" unary               -> eventually
          | "G" unary               -> always
          | "G" "^" INT unary       -> always_pow
          | primary
    ?primary: "bot"                 -> bottom
            | NAME                  -> name
            | "exists" role         -> exists
            | "inv" "(" NAME ")"    -> inverse_ref
            | "(" concept ")"

    role: NAME                      -> role_name
        | "inv" "(" NAME ")"        -> role_inverse

    abox: "abox" ":" assertion*
    assertion: [offset] [polarity] atom_body
    offset: "X"                     -> offset_one
          | "X" "^" INT             -> offset_pow
    polarity: "not"                 -> negative
            | "geom" "(" INT "/" INT ")" -> diamond
    atom_body: pred "(" NAME ("," NAME)? ")"
    pred: NAME                      -> pred_name
        | "inv" "(" NAME ")"        -> pred_inverse

    COMMENT: /#[^\n]*/

    %import common.CNAME -> NAME
    %import common.INT
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_PARSER = Lark(KB_GRAMMAR, parser='lalr', propagate_positions=True, maybe_placeholders=True)


class RoleRef:
    """A role mention whose rigidity is resolved once all declarations are known."""

    def __init__(self, token, inverted=False):
        self.token = token
        self.inverted = inverted

    @property
    def name(self):
        return str(self.token)

    @property
    def where(self):
        return self.token.line, self.token.column


class NameRef(RoleRef):
    """A bare identifier in a concept position: a concept name, or a role in a role inclusion."""


class ConceptBuilder(Transformer):
    """Turns a concept subtree into concept nodes with unresolved role mentions."""

    def bottom(self, children):
        return Bottom()

    def name(self, children):
        return NameRef(children[0])

    def inverse_ref(self, children):
        return RoleRef(children[0], inverted=True)

    def exists(self, children):
        return Exists(children[0])

    def role_name(self, children):
        return RoleRef(children[0])

    def role_inverse(self, children):
        return RoleRef(children[0], inverted=True)

    def not_(self, children):
        return Not(children[0])

    def next(self, children):
        return Next(children[0])

    def next_pow(self, children):
        return next_n(children[1], int(children[0]))

    def eventually(self, children):
        return Eventually(children[0])

    def always(self, children):
        return Always(children[0])

    def always_pow(self, children):
        return always_n(children[1], int(children[0]))

    def until(self, children):
        return Until(children[0], children[1])

    def and_(self, children):
        return And(children[0], children[1])


class KbResolver:
    """Resolves names against the role declarations and builds the KB."""

    def __init__(self, declarations):
        self.roles = {}
        for tree in declarations:
            token = tree.children[0]
            rigidity = Rigidity.RIGID if tree.data == 'rigid_decl' else Rigidity.FLEXIBLE
            if str(token) in self.roles:
                raise KbSyntaxError(f'rigidity of role {token} declared twice', token.line, token.column)
            self.roles[str(token)] = RoleName(str(token), rigidity)

    def role(self, ref):
        if ref.name not in self.roles:
            raise KbSyntaxError(f'undeclared role {ref.name}', *ref.where)
        return Role(self.roles[ref.name], ref.inverted)

    def concept(self, node):
        if isinstance(node, NameRef):
            if node.name in self.roles:
                raise KbSyntaxError(f'role {node.name} used as a concept', *node.where)
            return Atomic(node.name)
        if isinstance(node, RoleRef):
            raise KbSyntaxError(f'inverse role inv({node.name}) used as a concept', *node.where)
        if isinstance(node, Exists):
            return Exists(self.role(node.role))
        if isinstance(node, (Not, Next, Eventually, Always)):
            return type(node)(self.concept(node.operand))
        if isinstance(node, (Until, And)):
            return type(node)(self.concept(node.left), self.concept(node.right))
        return node

    def is_role_side(self, node):
        return isinstance(node, RoleRef) and (not isinstance(node, NameRef) or node.name in self.roles)

    def axioms(self, tree):
        where = (tree.meta.line, tree.meta.column)
        lhs, rhs = (ConceptBuilder().transform(child) for child in tree.children)
        pairs = [(lhs, rhs)] if tree.data == 'inclusion' else [(lhs, rhs), (rhs, lhs)]
        if self.is_role_side(lhs) and self.is_role_side(rhs):
            return [], [RoleInclusion(self.role(a), self.role(b), where) for a, b in pairs]
        return [ConceptInclusion(self.concept(a), self.concept(b), where) for a, b in pairs], []

    def assertion(self, tree):
        offset_tree, polarity_tree, body = tree.children
        offset = 0
        if offset_tree is not None:
            offset = 1 if offset_tree.data == 'offset_one' else int(offset_tree.children[0])
        polarity, param = Polarity.POSITIVE, None
        if polarity_tree is not None and polarity_tree.data == 'negative':
            polarity = Polarity.NEGATIVE
        elif polarity_tree is not None:
            num, den = (int(t) for t in polarity_tree.children)
            if den == 0:
                raise KbSyntaxError('zero denominator in geometric parameter', tree.meta.line, tree.meta.column)
            try:
                param = GeomParam(Fraction(num, den))
            except ParameterDomainError as err:
                raise ParameterDomainError(str(err), tree.meta.line, tree.meta.column) from None
            polarity = Polarity.DIAMOND
        pred_tree, *names = body.children
        names = tuple(str(n) for n in names if n is not None)
        pred_token = pred_tree.children[0]
        if pred_tree.data == 'pred_inverse' or len(names) == 2:
            predicate = self.role(RoleRef(pred_token, pred_tree.data == 'pred_inverse'))
        elif str(pred_token) in self.roles:
            raise KbSyntaxError(f'role {pred_token} needs two individuals', pred_token.line, pred_token.column)
        else:
            predicate = str(pred_token)
        return AboxAtom(offset, polarity, predicate, names, param, (pred_token.line, pred_token.column))


def _sections(tree):
    decls, tbox, abox = [], None, None
    for child in tree.children:
        if child.data in ('rigid_decl', 'flexible_decl'):
            decls.append(child)
        elif child.data == 'tbox':
            tbox = child
        elif child.data == 'abox':
            abox = child
    return decls, tbox, abox


def parse_kb(text):
    """Parses KB text into a KnowledgeBase; errors carry the source line and column."""
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as err:
        raise KbSyntaxError(f'unexpected input {_describe(err)}', err.line, err.column) from None
    decls, tbox, abox = _sections(tree)
    resolver = KbResolver(decls)
    cis, ris, atoms = [], [], []
    try:
        for axiom in (tbox.children if tbox is not None else []):
            c, r = resolver.axioms(axiom)
            cis.extend(c)
            ris.extend(r)
        for assertion in (abox.children if abox is not None else []):
            atoms.append(resolver.assertion(assertion))
    except VisitError as err:
        raise err.orig_exc from None
    return KnowledgeBase(Ontology(tuple(cis), tuple(ris)), tuple(atoms), tuple(resolver.roles.values()))


def parse_kb_file(path):
    return parse_kb(Path(path).read_text(encoding='utf-8'))


def _describe(err):
    token = getattr(err, 'token', None)
    if isinstance(token, Token):
        return f'{str(token)!r}' if token.type != '$END' else 'end of input'
    char = getattr(err, 'char', None)
    return repr(char) if char is not None else ''


def _role_text(role):
    return f'inv({role.name})' if role.inverted else role.name


def concept_text(c):
    if isinstance(c, Bottom):
        return 'bot'
    if isinstance(c, Atomic):
        return c.name
    if isinstance(c, Exists):
        return f'exists {_role_text(c.role)}'
    if isinstance(c, Next):
        n = 0
        while isinstance(c, Next):
            c, n = c.operand, n + 1
        return ('X ' if n == 1 else f'X^{n} ') + _operand_text(c)
    if isinstance(c, Not):
        return 'not ' + _operand_text(c.operand)
    if isinstance(c, Eventually):
        return 'F ' + _operand_text(c.operand)
    if isinstance(c, Always):
        return 'G ' + _operand_text(c.operand)
    if isinstance(c, Until):
        return f'{_operand_text(c.left)} U {_operand_text(c.right)}'
    if isinstance(c, And):
        return f'{_operand_text(c.left)} & {_operand_text(c.right)}'
    raise ValueError(f'unknown concept {c!r}')


def _operand_text(c):
    text = concept_text(c)
    return f'({text})' if isinstance(c, (Until, And)) else text


def _atom_text(atom):
    offset = '' if atom.offset == 0 else f'X^{atom.offset} '
    if atom.polarity is Polarity.NEGATIVE:
        offset += 'not '
    elif atom.polarity is Polarity.DIAMOND:
        p = atom.param.p
        offset += f'geom({p.numerator}/{p.denominator}) '
    pred = _role_text(atom.predicate) if atom.is_role else atom.predicate
    return f'{offset}{pred}({",".join(atom.individuals)})'


def serialize_kb(kb):
    lines = [f'{r.rigidity.value} role {r.name}' for r in kb.roles]
    lines.append('tbox:')
    for ci in kb.ontology.concept_inclusions:
        lines.append(f'  {_operand_text(ci.sub)} [= {_operand_text(ci.sup)}')
    for ri in kb.ontology.role_inclusions:
        lines.append(f'  {_role_text(ri.sub)} [= {_role_text(ri.sup)}')
    lines.append('abox:')
    lines.extend(f'  {_atom_text(a)}' for a in kb.abox)
    return '\n'.join(lines) + '\n'
