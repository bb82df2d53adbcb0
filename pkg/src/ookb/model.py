"""Core vocabulary: terms, atoms, rule templates, and the domain container.

Everything here is immutable after construction and safe to share across
threads.  Terms are interned so that structurally equal terms are the same
object; interning is invisible in the semantics (equality stays structural).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

__all__ = [
    "SkolemId",
    "Term",
    "individual",
    "apply_skolem",
    "term_depth",
    "Atom",
    "atom",
    "Var",
    "PApply",
    "AtomPattern",
    "DescriptiveRule",
    "SufficientCondition",
    "OOKBDomain",
    "PREDICATES",
    "CONSTRAINT_KINDS",
    "MAX_CONSTRAINT_BOUND",
]

# Surface predicates and their argument kinds.  Kinds are used by the parser
# for arity/shape checking and by the renderer: 'ident' is a bare identifier
# (class/relation name), 'term' a ground term, 'ckind' one of the constraint
# kinds, 'int' a non-negative integer bound.
PREDICATES: Dict[str, Tuple[str, ...]] = {
    "class": ("ident",),
    "individual": ("term",),
    "relation": ("ident",),
    "subclass_of": ("ident", "ident"),
    "disjoint": ("ident", "ident"),
    "instance_of": ("term", "ident"),
    "range": ("ident", "ident"),
    "domain": ("ident", "ident"),
    "subrelation_of": ("ident", "ident"),
    "compose": ("ident", "ident", "ident"),
    "inverse": ("ident", "ident"),
    "value": ("ident", "term", "term"),
    "eq": ("term", "term"),
    "neq": ("term", "term"),
    "term": ("term",),
    "substitute": ("term", "term"),
    "is_substituted": ("term",),
    "value_e": ("ident", "term", "term"),
    "constraint": ("ckind", "term", "ident", "ident", "int"),
}

CONSTRAINT_KINDS = ("min", "max", "exact")

# Constraint bounds are plain machine integers; the model does not support
# arbitrary precision bounds.
MAX_CONSTRAINT_BOUND = 2**31 - 1


@dataclass(frozen=True)
class SkolemId:
    """A unary Skolem function.

    ``name`` is the canonical, KB-global name; distinct names denote distinct
    functions.  ``source`` and ``owner`` remember how the function was written
    in the input (a per-class index such as ``f1`` under its owner class) and
    are ignored for identity.
    """

    name: str
    source: str = field(default="", compare=False)
    owner: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.source:
            object.__setattr__(self, "source", self.name)

    def __repr__(self):
        return f"SkolemId({self.name!r})"


class Term:
    """A ground term: an individual constant or a Skolem application chain.

    Use :func:`individual` and :func:`apply_skolem` to construct terms; direct
    construction bypasses interning.
    """

    __slots__ = ("fn", "arg", "name", "depth", "text", "_hash")

    def __init__(self, fn: Optional[SkolemId], arg: Optional["Term"], name: Optional[str]):
        self.fn = fn
        self.arg = arg
        self.name = name
        if fn is None:
            self.depth = 0
            self.text = name
        else:
            self.depth = arg.depth + 1
            self.text = f"{fn.name}({arg.text})"
        self._hash = hash(self.text)

    @property
    def is_individual(self) -> bool:
        return self.fn is None

    def root(self) -> "Term":
        """The individual constant at the bottom of the application chain."""
        t = self
        while t.fn is not None:
            t = t.arg
        return t

    def subterms(self) -> Iterable["Term"]:
        t = self
        while t is not None:
            yield t
            t = t.arg

    def sort_key(self) -> Tuple[int, str]:
        return (self.depth, self.text)

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Term) and self.text == other.text

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Term({self.text})"


_TERM_INTERN: Dict[str, Term] = {}


def individual(name: str) -> Term:
    """Intern the individual constant ``name``."""
    t = _TERM_INTERN.get(name)
    if t is None or t.fn is not None:
        t = Term(None, None, name)
        _TERM_INTERN[name] = t
    return t


def apply_skolem(fn: SkolemId, arg: Term) -> Term:
    """Apply Skolem function ``fn`` to ``arg``; depth grows by one."""
    key = f"{fn.name}({arg.text})"
    t = _TERM_INTERN.get(key)
    if t is None:
        t = Term(fn, arg, None)
        _TERM_INTERN[key] = t
    return t


def term_depth(t: Term) -> int:
    """Skolem-nesting depth: 0 for individuals, 1 + depth of the argument."""
    return t.depth


def _render_arg(a) -> str:
    if isinstance(a, Term):
        return a.text
    return str(a)


@dataclass(frozen=True)
class Atom:
    """A ground atom. ``neg`` marks classical negation (only on instance_of)."""

    predicate: str
    args: Tuple[object, ...]
    neg: bool = False

    @property
    def text(self) -> str:
        inner = ", ".join(_render_arg(a) for a in self.args)
        sign = "-" if self.neg else ""
        return f"{sign}{self.predicate}({inner})"

    def sort_key(self) -> Tuple[str, str]:
        return (self.predicate, self.text)

    def __repr__(self):
        return f"Atom({self.text})"


def atom(predicate: str, *args, neg: bool = False) -> Atom:
    """Convenience constructor that tuples up the arguments."""
    return Atom(predicate, tuple(args), neg)


# ---------------------------------------------------------------------------
# Rule templates
# ---------------------------------------------------------------------------
#
# Rules in the input are templates over a single guard variable (descriptive,
# equality and constraint rules) or over several variables (sufficient
# conditions).  Patterns mirror Term but allow variables at the leaves.


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return f"Var({self.name})"


@dataclass(frozen=True)
class PApply:
    """A Skolem application pattern, e.g. ``f1(X)`` or ``f3(f1(X))``."""

    fn: SkolemId
    arg: Union["PApply", Var]

    @property
    def depth(self) -> int:
        d, a = 1, self.arg
        while isinstance(a, PApply):
            d += 1
            a = a.arg
        return d

    @property
    def base_var(self) -> Var:
        a = self.arg
        while isinstance(a, PApply):
            a = a.arg
        return a


PatternTerm = Union[Var, PApply]


@dataclass(frozen=True)
class AtomPattern:
    """An atom whose term positions may hold variables or Skolem patterns."""

    predicate: str
    args: Tuple[object, ...]  # PatternTerm | str | int per PREDICATES

    def variables(self) -> List[Var]:
        out: List[Var] = []
        for a in self.args:
            if isinstance(a, Var) and a not in out:
                out.append(a)
            elif isinstance(a, PApply):
                v = a.base_var
                if v not in out:
                    out.append(v)
        return out

    def skolems(self) -> List[SkolemId]:
        out: List[SkolemId] = []
        for a in self.args:
            while isinstance(a, PApply):
                out.append(a.fn)
                a = a.arg
        return out

    @property
    def text(self) -> str:
        def rend(a):
            if isinstance(a, Var):
                return a.name
            if isinstance(a, PApply):
                return f"{a.fn.name}({rend(a.arg)})"
            return str(a)

        return f"{self.predicate}({', '.join(rend(a) for a in self.args)})"


@dataclass(frozen=True)
class DescriptiveRule:
    """A template rule guarded by ``instance_of(X, owner)``.

    ``kind`` is one of ``value`` (relation value heads), ``member``
    (instance_of companions typing a Skolem term), ``eq``/``neq`` (equality
    statements) or ``constraint`` (qualified number restrictions).
    """

    owner: str
    kind: str
    head: AtomPattern

    def sort_key(self):
        return (self.owner, self.kind, self.head.text)


@dataclass(frozen=True)
class SufficientCondition:
    """Class membership derived from a conjunction of body literals."""

    target: str
    head_var: Var
    body: Tuple[AtomPattern, ...]

    def sort_key(self):
        return (self.target, self.head_var.name, tuple(p.text for p in self.body))


def _sorted_tuple(items, key=None):
    return tuple(sorted(items, key=key))


@dataclass(frozen=True)
class OOKBDomain:
    """A parsed knowledge base: declarations, facts, and rule templates.

    All collections are stored sorted, so two domains with the same content
    compare equal regardless of statement order in the source files.
    ``disjoint_facts`` is kept as written; the engine symmetrises it.
    """

    classes: Tuple[str, ...] = ()
    individuals: Tuple[str, ...] = ()
    relations: Tuple[str, ...] = ()
    subclass_facts: Tuple[Tuple[str, str], ...] = ()
    disjoint_facts: Tuple[Tuple[str, str], ...] = ()
    instance_facts: Tuple[Tuple[Term, str], ...] = ()
    domain_facts: Tuple[Tuple[str, str], ...] = ()
    range_facts: Tuple[Tuple[str, str], ...] = ()
    subrelation_facts: Tuple[Tuple[str, str], ...] = ()
    compose_facts: Tuple[Tuple[str, str, str], ...] = ()
    inverse_facts: Tuple[Tuple[str, str], ...] = ()
    value_facts: Tuple[Tuple[str, Term, Term], ...] = ()
    eq_facts: Tuple[Tuple[Term, Term], ...] = ()
    neq_facts: Tuple[Tuple[Term, Term], ...] = ()
    constraint_facts: Tuple[Tuple[str, Term, str, str, int], ...] = ()
    descriptive_rules: Tuple[DescriptiveRule, ...] = ()
    equality_rules: Tuple[DescriptiveRule, ...] = ()
    constraint_rules: Tuple[DescriptiveRule, ...] = ()
    sufficient_conditions: Tuple[SufficientCondition, ...] = ()

    @staticmethod
    def build(
        classes: Iterable[str] = (),
        individuals: Iterable[str] = (),
        relations: Iterable[str] = (),
        subclass_facts: Iterable[Tuple[str, str]] = (),
        disjoint_facts: Iterable[Tuple[str, str]] = (),
        instance_facts: Iterable[Tuple[Term, str]] = (),
        domain_facts: Iterable[Tuple[str, str]] = (),
        range_facts: Iterable[Tuple[str, str]] = (),
        subrelation_facts: Iterable[Tuple[str, str]] = (),
        compose_facts: Iterable[Tuple[str, str, str]] = (),
        inverse_facts: Iterable[Tuple[str, str]] = (),
        value_facts: Iterable[Tuple[str, Term, Term]] = (),
        eq_facts: Iterable[Tuple[Term, Term]] = (),
        neq_facts: Iterable[Tuple[Term, Term]] = (),
        constraint_facts: Iterable[Tuple[str, Term, str, str, int]] = (),
        descriptive_rules: Iterable[DescriptiveRule] = (),
        equality_rules: Iterable[DescriptiveRule] = (),
        constraint_rules: Iterable[DescriptiveRule] = (),
        sufficient_conditions: Iterable[SufficientCondition] = (),
    ) -> "OOKBDomain":
        """Normalise (dedupe and sort) all collections and freeze the domain."""

        def tsort(pairs):
            return _sorted_tuple(set(pairs), key=lambda xs: tuple(
                x.text if isinstance(x, Term) else str(x) for x in xs
            ))

        return OOKBDomain(
            classes=_sorted_tuple(set(classes)),
            individuals=_sorted_tuple(set(individuals)),
            relations=_sorted_tuple(set(relations)),
            subclass_facts=tsort(subclass_facts),
            disjoint_facts=tsort(disjoint_facts),
            instance_facts=tsort(instance_facts),
            domain_facts=tsort(domain_facts),
            range_facts=tsort(range_facts),
            subrelation_facts=tsort(subrelation_facts),
            compose_facts=tsort(compose_facts),
            inverse_facts=tsort(inverse_facts),
            value_facts=tsort(value_facts),
            eq_facts=tsort(eq_facts),
            neq_facts=tsort(neq_facts),
            constraint_facts=tsort(constraint_facts),
            descriptive_rules=_sorted_tuple(set(descriptive_rules), key=DescriptiveRule.sort_key),
            equality_rules=_sorted_tuple(set(equality_rules), key=DescriptiveRule.sort_key),
            constraint_rules=_sorted_tuple(set(constraint_rules), key=DescriptiveRule.sort_key),
            sufficient_conditions=_sorted_tuple(
                set(sufficient_conditions), key=SufficientCondition.sort_key
            ),
        )

    @cached_property
    def class_set(self) -> FrozenSet[str]:
        return frozenset(self.classes)

    @cached_property
    def relation_set(self) -> FrozenSet[str]:
        return frozenset(self.relations)

    @cached_property
    def individual_set(self) -> FrozenSet[str]:
        return frozenset(self.individuals)

    @cached_property
    def templates_by_owner(self) -> Dict[str, Tuple[DescriptiveRule, ...]]:
        """All guarded templates (descriptive, equality, constraint) per class."""
        grouped: Dict[str, List[DescriptiveRule]] = {}
        for r in self.descriptive_rules + self.equality_rules + self.constraint_rules:
            grouped.setdefault(r.owner, []).append(r)
        return {c: tuple(rs) for c, rs in grouped.items()}

    @cached_property
    def superclasses(self) -> Dict[str, FrozenSet[str]]:
        """Transitive closure of subclass_of, keyed by subclass."""
        up: Dict[str, set] = {c: set() for c in self.classes}
        for sub, sup in self.subclass_facts:
            up.setdefault(sub, set()).add(sup)
        changed = True
        while changed:
            changed = False
            for c, sups in up.items():
                extra = set()
                for s in sups:
                    extra |= up.get(s, set())
                if not extra <= sups:
                    sups |= extra
                    changed = True
        return {c: frozenset(s) for c, s in up.items()}

    def fact_atoms(self) -> List[Atom]:
        """All declarations and ground facts as atoms, in canonical order."""
        out: List[Atom] = []
        out += [atom("class", c) for c in self.classes]
        out += [atom("individual", individual(i)) for i in self.individuals]
        out += [atom("relation", r) for r in self.relations]
        out += [atom("subclass_of", a, b) for a, b in self.subclass_facts]
        out += [atom("disjoint", a, b) for a, b in self.disjoint_facts]
        out += [atom("instance_of", t, c) for t, c in self.instance_facts]
        out += [atom("domain", r, c) for r, c in self.domain_facts]
        out += [atom("range", r, c) for r, c in self.range_facts]
        out += [atom("subrelation_of", a, b) for a, b in self.subrelation_facts]
        out += [atom("compose", a, b, c) for a, b, c in self.compose_facts]
        out += [atom("inverse", a, b) for a, b in self.inverse_facts]
        out += [atom("value", r, x, y) for r, x, y in self.value_facts]
        out += [atom("eq", x, y) for x, y in self.eq_facts]
        out += [atom("neq", x, y) for x, y in self.neq_facts]
        out += [atom("constraint", k, t, r, d, n) for k, t, r, d, n in self.constraint_facts]
        return out
