"""Depth-bounded grounding, interleaved with derivation.

Templates are instantiated semi-naively: a rule guarded by
``instance_of(X, c)`` is grounded at a term ``t`` only once membership of
``t`` in ``c`` has actually been derived, and only when every term in the
resulting rule instance stays within the nesting bound.  The same pass runs
the domain-independent axioms (taxonomy closure, disjointness, relation
algebra) and sufficient conditions, because memberships they derive can
unlock further template instantiations and deeper terms.

Terms mentioned by ground facts or seed atoms are always admitted to the
universe; the nesting bound constrains expansion by Skolem application.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .errors import UniverseCapError
from .model import (
    Atom,
    AtomPattern,
    DescriptiveRule,
    OOKBDomain,
    PApply,
    SufficientCondition,
    Term,
    Var,
    apply_skolem,
    atom,
    individual,
)

__all__ = [
    "DEFAULT_UNIVERSE_CAP",
    "TermUniverse",
    "GroundRule",
    "GroundProgram",
    "build_universe",
    "ground_program",
    "saturate",
    "Saturation",
]

DEFAULT_UNIVERSE_CAP = 1_000_000


@dataclass(frozen=True)
class TermUniverse:
    """The reachable ground terms at a given nesting bound.

    Closed downward: every subterm of a member is a member.  Derived terms
    never exceed ``max_depth``; terms written literally in facts or seeds are
    admitted regardless of their depth.
    """

    max_depth: int
    terms: FrozenSet[Term]
    seed_atoms: Tuple[Atom, ...] = ()
    seed_terms: Tuple[Term, ...] = ()

    def __contains__(self, t: Term) -> bool:
        return t in self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> List[Term]:
        return sorted(self.terms, key=Term.sort_key)


@dataclass(frozen=True)
class GroundRule:
    """A ground rule instance; facts are rules with an empty body."""

    head: Atom
    pos: Tuple[Atom, ...] = ()
    naf: Tuple[Atom, ...] = ()
    origin: str = ""

    @property
    def is_fact(self) -> bool:
        return not self.pos and not self.naf

    @property
    def text(self) -> str:
        if self.is_fact:
            return f"{self.head.text}."
        body = ", ".join(a.text for a in self.pos)
        if self.naf:
            body += ", " + ", ".join(f"not {a.text}" for a in self.naf)
        return f"{self.head.text} :- {body}."

    def sort_key(self):
        return (self.head.sort_key(), tuple(a.sort_key() for a in self.pos))


@dataclass(frozen=True)
class GroundProgram:
    """The instantiated program: facts plus depth-bounded rule instances.

    The domain-independent axioms are evaluated natively by the engine and by
    the enumeration oracle; they are not expanded into ground rules here.
    """

    rules: Tuple[GroundRule, ...]
    max_depth: int = 0

    @property
    def facts(self) -> List[Atom]:
        return [r.head for r in self.rules if r.is_fact]

    @property
    def proper_rules(self) -> List[GroundRule]:
        return [r for r in self.rules if not r.is_fact]

    def atom_count(self) -> int:
        atoms = {r.head for r in self.rules}
        for r in self.rules:
            atoms.update(r.pos)
        return len(atoms)

    def render_text(self) -> str:
        return "".join(r.text + "\n" for r in self.rules)


# ---------------------------------------------------------------------------
# Saturation
# ---------------------------------------------------------------------------


class _Store:
    """Working derivation state with the handful of indexes the axioms need."""

    def __init__(self):
        self.preds: Dict[str, Set[tuple]] = {}
        self.neg_instance: Set[tuple] = set()
        self.instance_by_term: Dict[Term, Set[str]] = {}
        self.instance_by_class: Dict[str, Set[Term]] = {}
        self.subclass_by_sub: Dict[str, Set[str]] = {}
        self.subclass_by_sup: Dict[str, Set[str]] = {}
        self.value_by_rel: Dict[str, Set[Tuple[Term, Term]]] = {}
        self.value_by_src: Dict[Term, Set[Tuple[str, Term]]] = {}
        self.value_by_tgt: Dict[Term, Set[Tuple[str, Term]]] = {}
        self.direct_values: Set[tuple] = set()

    def get(self, pred: str) -> Set[tuple]:
        return self.preds.setdefault(pred, set())

    def has(self, pred: str, args: tuple) -> bool:
        return args in self.preds.get(pred, ())


@dataclass
class Saturation:
    """Everything the interleaved grounding pass produced."""

    domain: OOKBDomain
    max_depth: int
    universe: TermUniverse
    store: _Store
    rules: List[GroundRule]
    fact_atoms: List[Atom]

    def ground_program(self) -> GroundProgram:
        all_rules = [GroundRule(a, origin="fact") for a in self.fact_atoms]
        all_rules.extend(self.rules)
        return GroundProgram(tuple(sorted(set(all_rules), key=GroundRule.sort_key)), self.max_depth)


def _instantiate(pattern, binding: Dict[Var, Term]) -> Union[Term, str, int]:
    if isinstance(pattern, Var):
        return binding[pattern]
    if isinstance(pattern, PApply):
        return apply_skolem(pattern.fn, _instantiate(pattern.arg, binding))
    return pattern


def _match(pattern, value, binding: Dict[Var, Term]) -> Optional[Dict[Var, Term]]:
    """Structurally unify one pattern argument against a ground argument."""
    if isinstance(pattern, Var):
        bound = binding.get(pattern)
        if bound is None:
            out = dict(binding)
            out[pattern] = value
            return out
        return binding if bound == value else None
    if isinstance(pattern, PApply):
        if not isinstance(value, Term) or value.fn != pattern.fn:
            return None
        return _match(pattern.arg, value.arg, binding)
    return binding if pattern == value else None


def _match_atom(pat: AtomPattern, args: tuple, binding: Dict[Var, Term]) -> Optional[Dict[Var, Term]]:
    b = binding
    for p, v in zip(pat.args, args):
        b = _match(p, v, b)
        if b is None:
            return None
    return b


class _Saturator:
    def __init__(
        self,
        domain: OOKBDomain,
        seed_atoms: Sequence[Atom],
        seed_terms: Sequence[Term],
        max_depth: int,
        universe_cap: int,
    ):
        self.domain = domain
        self.max_depth = max_depth
        self.cap = universe_cap
        self.store = _Store()
        self.universe: Set[Term] = set()
        self.pending: deque = deque()
        self.rules: List[GroundRule] = []
        self.rule_seen: Set[tuple] = set()
        self.fact_atoms: List[Atom] = []
        self.seed_atoms = tuple(seed_atoms)
        self.seed_terms = tuple(seed_terms)

    # -- term universe -------------------------------------------------------

    def admit_term(self, t: Term):
        while t is not None and t not in self.universe:
            self.universe.add(t)
            if len(self.universe) > self.cap:
                raise UniverseCapError(len(self.universe), self.cap)
            t = t.arg

    # -- atom insertion --------------------------------------------------------

    def add(self, a: Atom) -> bool:
        if a.neg:
            if a.args in self.store.neg_instance:
                return False
            self.store.neg_instance.add(a.args)
            return True
        bucket = self.store.get(a.predicate)
        if a.args in bucket:
            return False
        bucket.add(a.args)
        for x in a.args:
            if isinstance(x, Term):
                self.admit_term(x)
        p, args = a.predicate, a.args
        if p == "instance_of":
            t, c = args
            self.store.instance_by_term.setdefault(t, set()).add(c)
            self.store.instance_by_class.setdefault(c, set()).add(t)
        elif p == "subclass_of":
            sub, sup = args
            self.store.subclass_by_sub.setdefault(sub, set()).add(sup)
            self.store.subclass_by_sup.setdefault(sup, set()).add(sub)
        elif p == "value":
            r, x, y = args
            self.store.value_by_rel.setdefault(r, set()).add((x, y))
            self.store.value_by_src.setdefault(x, set()).add((r, y))
            self.store.value_by_tgt.setdefault(y, set()).add((r, x))
        self.pending.append(a)
        return True

    def add_rule(self, head: Atom, pos: Tuple[Atom, ...], origin: str):
        key = (head, pos)
        if key in self.rule_seen:
            return
        self.rule_seen.add(key)
        self.rules.append(GroundRule(head, pos, (), origin))
        self.add(head)

    # -- template instantiation -------------------------------------------------

    def fire_templates(self, t: Term, c: str):
        guard = atom("instance_of", t, c)
        for rule in self.domain.templates_by_owner.get(c, ()):
            binding = {Var("X"): t}
            args = tuple(_instantiate(p, binding) for p in rule.head.args)
            if any(isinstance(x, Term) and x.depth > self.max_depth for x in args):
                continue
            head = Atom(rule.head.predicate, args)
            self.add_rule(head, (guard,), origin=f"template:{c}:{rule.head.text}")

    # -- sufficient conditions ---------------------------------------------------

    def candidates(self, pred: str):
        return self.store.preds.get(pred, ())

    def extend_match(self, sc: SufficientCondition, remaining, binding, ground_body):
        if not remaining:
            head_term = binding.get(sc.head_var)
            if not isinstance(head_term, Term):
                return
            head = atom("instance_of", head_term, sc.target)
            self.add_rule(head, tuple(ground_body), origin=f"sufficient:{sc.target}")
            return
        pat = remaining[0]
        for args in sorted(self.candidates(pat.predicate), key=lambda xs: tuple(
            x.text if isinstance(x, Term) else str(x) for x in xs
        )):
            b = _match_atom(pat, args, binding)
            if b is not None:
                self.extend_match(
                    sc, remaining[1:], b, ground_body + [Atom(pat.predicate, args)]
                )

    def fire_sufficient(self, a: Atom):
        for sc in self.domain.sufficient_conditions:
            for i, pat in enumerate(sc.body):
                if pat.predicate != a.predicate:
                    continue
                b = _match_atom(pat, a.args, {})
                if b is None:
                    continue
                rest = sc.body[:i] + sc.body[i + 1 :]
                self.extend_match(sc, rest, b, [a])

    # -- native axioms ------------------------------------------------------------

    def process(self, a: Atom):
        p, args = a.predicate, a.args
        if p == "subclass_of":
            sub, sup = args
            for g in set(self.store.subclass_by_sub.get(sup, ())):
                self.add(atom("subclass_of", sub, g))
            for z in set(self.store.subclass_by_sup.get(sub, ())):
                self.add(atom("subclass_of", z, sup))
            for t in sorted(self.store.instance_by_class.get(sub, ()), key=Term.sort_key):
                self.add(atom("instance_of", t, sup))
        elif p == "instance_of":
            t, c = args
            for sup in self.store.subclass_by_sub.get(c, ()):
                self.add(atom("instance_of", t, sup))
            for c1, c2 in self.store.preds.get("disjoint", ()):
                if c1 == c:
                    self.add(atom("instance_of", t, c2, neg=True))
            self.fire_templates(t, c)
            self.fire_sufficient(a)
        elif p == "disjoint":
            c, d = args
            self.add(atom("disjoint", d, c))
            for t in sorted(self.store.instance_by_class.get(c, ()), key=Term.sort_key):
                self.add(atom("instance_of", t, d, neg=True))
        elif p == "value":
            r, x, y = args
            self.add(atom("term", x))
            self.add(atom("term", y))
            for s, tR in self.store.preds.get("subrelation_of", ()):
                if s == r:
                    self.add(atom("value", tR, x, y))
            for s, tR in self.store.preds.get("inverse", ()):
                if s == r:
                    self.add(atom("value", tR, y, x))
            for s, tR, u in self.store.preds.get("compose", ()):
                if s == r:
                    for r2, z in self.store.value_by_src.get(y, set()).copy():
                        if r2 == tR:
                            self.add(atom("value", u, x, z))
                if tR == r:
                    for r2, w in self.store.value_by_tgt.get(x, set()).copy():
                        if r2 == s:
                            self.add(atom("value", u, w, y))
            self.fire_sufficient(a)
        elif p == "subrelation_of":
            s, tR = args
            for x, y in self.store.value_by_rel.get(s, set()).copy():
                self.add(atom("value", tR, x, y))
        elif p == "inverse":
            s, tR = args
            for x, y in self.store.value_by_rel.get(s, set()).copy():
                self.add(atom("value", tR, y, x))
        elif p == "compose":
            s, tR, u = args
            for x, y in self.store.value_by_rel.get(s, set()).copy():
                for r2, z in self.store.value_by_src.get(y, set()).copy():
                    if r2 == tR:
                        self.add(atom("value", u, x, z))
        elif p == "constraint":
            self.fire_sufficient(a)

    def run(self) -> Saturation:
        for name in self.domain.individuals:
            self.admit_term(individual(name))
        for t in self.seed_terms:
            self.admit_term(t)
        facts = self.domain.fact_atoms() + [a for a in self.seed_atoms]
        for f in facts:
            self.fact_atoms.append(f)
            self.add(f)
        for r, x, y in self.domain.value_facts:
            self.store.direct_values.add((r, x, y))
        while self.pending:
            a = self.pending.popleft()
            if not a.neg:
                self.process(a)
        # values introduced by templates (not by relation algebra) keep a
        # provenance mark used by the most-specific description filter
        for rule in self.rules:
            if rule.head.predicate == "value" and rule.origin.startswith("template:"):
                self.store.direct_values.add(rule.head.args)
        universe = TermUniverse(
            self.max_depth,
            frozenset(self.universe),
            self.seed_atoms,
            self.seed_terms,
        )
        return Saturation(self.domain, self.max_depth, universe, self.store, self.rules, self.fact_atoms)


def _split_seeds(seeds: Iterable[Union[Atom, Term]]):
    seed_atoms: List[Atom] = []
    seed_terms: List[Term] = []
    for s in seeds or ():
        if isinstance(s, Atom):
            seed_atoms.append(s)
        elif isinstance(s, Term):
            seed_terms.append(s)
        else:
            raise TypeError(f"seeds hold atoms or terms, not {type(s).__name__}")
    return seed_atoms, seed_terms


def saturate(
    domain: OOKBDomain,
    seeds: Iterable[Union[Atom, Term]] = (),
    max_depth: int = 1,
    universe_cap: int = DEFAULT_UNIVERSE_CAP,
) -> Saturation:
    """Run the interleaved grounding/derivation pass to its fixpoint."""
    if max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    seed_atoms, seed_terms = _split_seeds(seeds)
    return _Saturator(domain, seed_atoms, seed_terms, max_depth, universe_cap).run()


def build_universe(
    domain: OOKBDomain,
    seeds: Iterable[Union[Atom, Term]] = (),
    max_depth: int = 1,
    universe_cap: int = DEFAULT_UNIVERSE_CAP,
) -> TermUniverse:
    """All terms reachable from the seeds along the membership chain.

    Monotone in ``max_depth``.  Raises :class:`UniverseCapError` when the
    universe outgrows ``universe_cap`` (the usual sign of a cyclic KB).
    """
    return saturate(domain, seeds, max_depth, universe_cap).universe


def ground_program(domain: OOKBDomain, universe: TermUniverse) -> GroundProgram:
    """Instantiate every template whose guard is derivable within ``universe``.

    The universe must have been built from the same domain; its recorded
    seeds and depth drive the instantiation.
    """
    sat = saturate(
        domain,
        list(universe.seed_atoms) + list(universe.seed_terms),
        universe.max_depth,
    )
    return sat.ground_program()
