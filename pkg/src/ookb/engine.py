"""Answer-set computation for the depth-bounded ground program.

The positive fragment (taxonomy closure, relation algebra, template firing,
sufficient conditions) has a unique least fixpoint, so it is evaluated
monotonically.  Equality atoms then induce a partition of terms; an answer
set picks exactly one representative per equivalence class, rewrites every
relation value onto representatives (``value_e``), and must satisfy the
domain/range and qualified-number constraints.  Which constraint verdicts
hold can depend on the chosen representatives, so when the deterministic
policy choice violates a cardinality bound the engine searches the (small)
space of alternative representative assignments before declaring the
program inconsistent.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import (
    BudgetExceededError,
    InconsistentKBError,
    InvariantFamilyError,
)
from .grounder import (
    DEFAULT_UNIVERSE_CAP,
    GroundProgram,
    Saturation,
    saturate,
)
from .model import Atom, OOKBDomain, Term, atom

__all__ = [
    "LEX_MIN_DEPTH",
    "RANDOM_POLICY",
    "DEFAULT_SEARCH_CAP",
    "AtomSet",
    "EqClasses",
    "Substitution",
    "ConstraintViolation",
    "AnswerSet",
    "base_fixpoint",
    "fire_sufficient_conditions",
    "congruence_closure",
    "select_representatives",
    "project_value_e",
    "check_constraints",
    "answer_set",
    "entails",
]

LEX_MIN_DEPTH = "lex-min-depth"
RANDOM_POLICY = "random"

DEFAULT_SEARCH_CAP = 4096

# Predicates whose extension may differ between answer sets of the same
# program; everything else is invariant.
CHOICE_PREDICATES = frozenset({"substitute", "is_substituted", "value_e"})


class AtomSet:
    """An indexed store of ground atoms (positive and classically negated)."""

    def __init__(self, atoms: Iterable[Atom] = ()):
        self._pos: Dict[str, Set[tuple]] = {}
        self._neg: Dict[str, Set[tuple]] = {}
        for a in atoms:
            self.add(a)

    def add(self, a: Atom) -> bool:
        table = self._neg if a.neg else self._pos
        bucket = table.setdefault(a.predicate, set())
        if a.args in bucket:
            return False
        bucket.add(a.args)
        return True

    def get(self, predicate: str) -> Set[tuple]:
        """Positive argument tuples for ``predicate`` (treat as read-only)."""
        return self._pos.get(predicate, set())

    def get_neg(self, predicate: str) -> Set[tuple]:
        return self._neg.get(predicate, set())

    def has(self, predicate: str, *args, neg: bool = False) -> bool:
        table = self._neg if neg else self._pos
        return tuple(args) in table.get(predicate, ())

    def __contains__(self, a: Atom) -> bool:
        table = self._neg if a.neg else self._pos
        return a.args in table.get(a.predicate, ())

    def atoms(self) -> List[Atom]:
        out = [Atom(p, args) for p, rows in self._pos.items() for args in rows]
        out += [Atom(p, args, neg=True) for p, rows in self._neg.items() for args in rows]
        out.sort(key=Atom.sort_key)
        return out

    def terms(self) -> Set[Term]:
        seen: Set[Term] = set()
        for rows in self._pos.values():
            for args in rows:
                for x in args:
                    if isinstance(x, Term):
                        seen.add(x)
        return seen

    def copy(self) -> "AtomSet":
        out = AtomSet()
        out._pos = {p: set(rows) for p, rows in self._pos.items() if rows}
        out._neg = {p: set(rows) for p, rows in self._neg.items() if rows}
        return out

    def canonical_key(self) -> Tuple[str, ...]:
        return tuple(a.text for a in self.atoms())

    def __len__(self) -> int:
        return sum(len(r) for r in self._pos.values()) + sum(len(r) for r in self._neg.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, AtomSet):
            return NotImplemented
        mine = {p: r for p, r in self._pos.items() if r}
        theirs = {p: r for p, r in other._pos.items() if r}
        if mine != theirs:
            return False
        return {p: r for p, r in self._neg.items() if r} == {
            p: r for p, r in other._neg.items() if r
        }

    def __repr__(self):
        return f"AtomSet({len(self)} atoms)"


class EqClasses:
    """The partition of terms induced by derived equality atoms."""

    def __init__(
        self,
        eq_pairs: Iterable[Tuple[Term, Term]],
        neq_pairs: Iterable[Tuple[Term, Term]],
        term_atoms: Iterable[Term],
    ):
        self._parent: Dict[Term, Term] = {}
        self.self_loops: Set[Term] = set()
        self.term_atoms: Set[Term] = set(term_atoms)
        for x, y in eq_pairs:
            if x == y:
                self.self_loops.add(x)
            else:
                self._union(x, y)
        self._members: Dict[Term, List[Term]] = {}
        for t in self._parent:
            self._members.setdefault(self.find(t), []).append(t)
        for members in self._members.values():
            members.sort(key=Term.sort_key)
        self.neq_pairs = sorted(set(neq_pairs), key=lambda p: (p[0].sort_key(), p[1].sort_key()))
        for x, y in self.neq_pairs:
            if x == y:
                if x in self.self_loops:
                    raise InconsistentKBError(
                        "eq-neq", f"eq and neq both hold for {x.text}"
                    )
            elif x in self._parent and y in self._parent and self.find(x) == self.find(y):
                raise InconsistentKBError(
                    "eq-neq",
                    f"{x.text} and {y.text} are equated but asserted unequal",
                )

    def _find_root(self, t: Term) -> Term:
        path = []
        while self._parent.get(t, t) != t:
            path.append(t)
            t = self._parent[t]
        for p in path:
            self._parent[p] = t
        return t

    def find(self, t: Term) -> Term:
        if t not in self._parent:
            return t
        return self._find_root(t)

    def _union(self, a: Term, b: Term):
        self._parent.setdefault(a, a)
        self._parent.setdefault(b, b)
        ra, rb = self._find_root(a), self._find_root(b)
        if ra != rb:
            # deterministic representative-free union: smaller sort key wins
            if rb.sort_key() < ra.sort_key():
                ra, rb = rb, ra
            self._parent[rb] = ra

    def classes(self) -> List[List[Term]]:
        """Equivalence classes with at least two members, sorted."""
        out = [m for m in self._members.values() if len(m) >= 2]
        out.sort(key=lambda m: m[0].sort_key())
        return out

    def class_of(self, t: Term) -> List[Term]:
        return self._members.get(self.find(t), [t])

    def derived_eq_pairs(self) -> List[Tuple[Term, Term]]:
        """Every eq atom present in an answer set (symmetric-transitive closure)."""
        out: List[Tuple[Term, Term]] = [(t, t) for t in sorted(self.self_loops, key=Term.sort_key)]
        for members in self.classes():
            for x in members:
                for y in members:
                    if x != y:
                        out.append((x, y))
        return out


class Substitution:
    """The representative map: total on counted terms, idempotent."""

    def __init__(self, mapping: Dict[Term, Term]):
        self.mapping = dict(mapping)

    def apply(self, t: Term) -> Term:
        return self.mapping.get(t, t)

    __call__ = apply

    def items(self) -> List[Tuple[Term, Term]]:
        return sorted(self.mapping.items(), key=lambda kv: kv[0].sort_key())

    def substitute_atoms(self) -> List[Atom]:
        return [atom("substitute", x, y) for x, y in self.items()]

    def is_substituted_atoms(self) -> List[Atom]:
        return [atom("is_substituted", x) for x, y in self.items() if x != y]

    def __eq__(self, other):
        return isinstance(other, Substitution) and self.mapping == other.mapping

    def __repr__(self):
        return f"Substitution({len(self.mapping)} terms)"


@dataclass(frozen=True)
class ConstraintViolation:
    """One failed constraint check; violations are data, not exceptions.

    ``depth_sensitive`` marks verdicts that a deeper grounding could still
    repair (missing values may simply live below the nesting bound).
    """

    constraint: Atom
    kind: str  # min | max | exact-low | exact-high | domain | range
    count: int
    witnesses: Tuple[Atom, ...]
    depth_sensitive: bool

    def to_json(self) -> dict:
        return {
            "constraint": self.constraint.text,
            "kind": self.kind,
            "count": self.count,
            "depth_sensitive": self.depth_sensitive,
            "witnesses": [w.text for w in self.witnesses],
        }


@dataclass
class AnswerSet:
    """One answer set of the depth-bounded program plus its constraint report."""

    atoms: AtomSet
    substitution: Substitution
    violations: Tuple[ConstraintViolation, ...]
    depth: int
    # value triples stated by descriptive rules or facts, as opposed to those
    # obtained through inverse/composition/sub-relation reasoning
    direct_values: frozenset = frozenset()

    @property
    def consistent(self) -> bool:
        return not self.violations

    def value_triples(self, root: Optional[Term] = None) -> List[Tuple[str, Term, Term]]:
        """Relation values, optionally restricted to terms built over ``root``."""
        out = []
        for r, x, y in self.atoms.get("value"):
            if root is None or (x.root() == root and y.root() == root):
                out.append((r, x, y))
        out.sort(key=lambda t: (t[0], t[1].sort_key(), t[2].sort_key()))
        return out


# ---------------------------------------------------------------------------
# Stage operations
# ---------------------------------------------------------------------------


def _atomset_from_store(store) -> AtomSet:
    out = AtomSet()
    out._pos = {p: set(rows) for p, rows in store.preds.items() if rows}
    if store.neg_instance:
        out._neg = {"instance_of": set(store.neg_instance)}
    return out


def _check_classical_consistency(atoms: AtomSet):
    pos = atoms.get("instance_of")
    for t, c in sorted(atoms.get_neg("instance_of"), key=lambda a: (a[0].sort_key(), a[1])):
        if (t, c) in pos:
            raise InconsistentKBError(
                "disjoint", f"{t.text} belongs to {c} and to a class disjoint from it"
            )


def _native_round(store: AtomSet) -> bool:
    """One batch application of the domain-independent positive axioms."""
    changed = False

    def add(a: Atom):
        nonlocal changed
        if store.add(a):
            changed = True

    subclass = list(store.get("subclass_of"))
    for a, b in subclass:
        for b2, c in subclass:
            if b2 == b:
                add(atom("subclass_of", a, c))
    for t, c in list(store.get("instance_of")):
        for c2, d in store.get("subclass_of"):
            if c2 == c:
                add(atom("instance_of", t, d))
        for c2, d in store.get("disjoint"):
            if c2 == c:
                add(atom("instance_of", t, d, neg=True))
    for c, d in list(store.get("disjoint")):
        add(atom("disjoint", d, c))
    values = list(store.get("value"))
    for r, x, y in values:
        add(atom("term", x))
        add(atom("term", y))
        for s, t in store.get("subrelation_of"):
            if s == r:
                add(atom("value", t, x, y))
        for s, t in store.get("inverse"):
            if s == r:
                add(atom("value", t, y, x))
    for s, t, u in store.get("compose"):
        for r1, x, y in values:
            if r1 != s:
                continue
            for r2, y2, z in values:
                if r2 == t and y2 == y:
                    add(atom("value", u, x, z))
    return changed


def base_fixpoint(domain: OOKBDomain, ground: GroundProgram) -> AtomSet:
    """Least fixpoint of the ground rules plus the native positive axioms.

    Raises :class:`InconsistentKBError` when disjointness is violated.  The
    result is independent of rule application order (the fragment is
    positive, hence confluent).
    """
    store = AtomSet()
    for f in ground.facts:
        store.add(f)
    rules = ground.proper_rules
    changed = True
    while changed:
        changed = _native_round(store)
        for r in rules:
            if all(b in store for b in r.pos) and store.add(r.head):
                changed = True
    _check_classical_consistency(store)
    return store


def fire_sufficient_conditions(domain: OOKBDomain, atoms: AtomSet) -> AtomSet:
    """Joint fixpoint of sufficient conditions with the base rules.

    New memberships may unlock further descriptive templates; expansion stays
    within the nesting depth already present in ``atoms``.
    """
    depth = max((t.depth for t in atoms.terms()), default=0)
    sat = saturate(domain, atoms.atoms(), depth)
    out = _atomset_from_store(sat.store)
    return out


def congruence_closure(atoms: AtomSet) -> EqClasses:
    """Partition terms by derived equality; raises on an eq/neq conflict."""
    term_atoms = [args[0] for args in atoms.get("term")]
    return EqClasses(atoms.get("eq"), atoms.get("neq"), term_atoms)


def _pick_representative(members: List[Term], policy: str, rng: Optional[random.Random]) -> Term:
    if policy == LEX_MIN_DEPTH:
        return members[0]  # members are sorted by (depth, text)
    if policy == RANDOM_POLICY:
        return rng.choice(members)
    raise ValueError(f"unknown representative policy {policy!r}")


def select_representatives(
    classes: EqClasses, policy: str = LEX_MIN_DEPTH, seed: Optional[int] = None
) -> Substitution:
    """Pick one representative per class and build the substitute map.

    The deterministic policy takes the minimum (depth, name) member; the
    random policy samples uniformly and requires a seed so runs stay
    reproducible.
    """
    rng = None
    if policy == RANDOM_POLICY:
        if seed is None:
            raise ValueError("the random representative policy requires a seed")
        rng = random.Random(seed)
    mapping: Dict[Term, Term] = {}
    for members in classes.classes():
        rep = _pick_representative(members, policy, rng)
        for m in members:
            mapping[m] = rep
    for t in sorted(classes.self_loops, key=Term.sort_key):
        mapping.setdefault(t, t)
    for t in sorted(classes.term_atoms, key=Term.sort_key):
        mapping.setdefault(t, t)
    return Substitution(mapping)


def project_value_e(atoms: AtomSet, subst: Substitution) -> AtomSet:
    """Rewrite every relation value onto representatives."""
    out = AtomSet()
    for r, x, y in atoms.get("value"):
        out.add(atom("value_e", r, subst(x), subst(y)))
    return out


def _domain_range_violations(atoms: AtomSet) -> List[ConstraintViolation]:
    out: List[ConstraintViolation] = []
    values = sorted(
        atoms.get("value"), key=lambda v: (v[0], v[1].sort_key(), v[2].sort_key())
    )
    for r, c in sorted(atoms.get("domain")):
        bad = tuple(
            Atom("value", (r1, x, y))
            for r1, x, y in values
            if r1 == r and not atoms.has("instance_of", x, c)
        )
        if bad:
            out.append(ConstraintViolation(atom("domain", r, c), "domain", len(bad), bad, False))
    for r, c in sorted(atoms.get("range")):
        bad = tuple(
            Atom("value", (r1, x, y))
            for r1, x, y in values
            if r1 == r and not atoms.has("instance_of", y, c)
        )
        if bad:
            out.append(ConstraintViolation(atom("range", r, c), "range", len(bad), bad, False))
    return out


def _cardinality_violations(
    constraint_rows: Iterable[tuple],
    value_e_rows: Set[tuple],
    atoms: AtomSet,
) -> List[ConstraintViolation]:
    out: List[ConstraintViolation] = []
    for k, y, s, d, n in sorted(
        constraint_rows, key=lambda c: (c[0], c[1].sort_key(), c[2], c[3], c[4])
    ):
        fillers = sorted(
            {z for s1, y1, z in value_e_rows if s1 == s and y1 == y and atoms.has("instance_of", z, d)},
            key=Term.sort_key,
        )
        count = len(fillers)
        witnesses = tuple(Atom("value_e", (s, y, z)) for z in fillers)
        ct = Atom("constraint", (k, y, s, d, n))
        if k == "min" and count < n:
            out.append(ConstraintViolation(ct, "min", count, witnesses, True))
        elif k == "max" and count > n:
            out.append(ConstraintViolation(ct, "max", count, witnesses, False))
        elif k == "exact" and count < n:
            out.append(ConstraintViolation(ct, "exact-low", count, witnesses, True))
        elif k == "exact" and count > n:
            out.append(ConstraintViolation(ct, "exact-high", count, witnesses, False))
    return out


def check_constraints(domain: OOKBDomain, atoms: AtomSet) -> List[ConstraintViolation]:
    """Evaluate the domain/range and qualified-number checks.

    ``atoms`` must be a completed answer-set atom store including ``value_e``
    and membership atoms; negation-as-failure reads off the finished
    fixpoint.  An empty list means every constraint is satisfied.
    """
    out = _domain_range_violations(atoms)
    out += _cardinality_violations(atoms.get("constraint"), atoms.get("value_e"), atoms)
    return out


# ---------------------------------------------------------------------------
# Answer-set pipeline
# ---------------------------------------------------------------------------


def _value_e_rows(atoms: AtomSet, subst: Substitution) -> Set[tuple]:
    return {(r, subst(x), subst(y)) for r, x, y in atoms.get("value")}


def _repair_representatives(
    atoms: AtomSet,
    eqc: EqClasses,
    base: Substitution,
    search_cap: int,
) -> Optional[Substitution]:
    """Search representative assignments that satisfy all cardinality bounds.

    Only classes whose members can influence a count are enumerated; the
    remaining classes keep the policy choice.  Returns the first satisfying
    assignment in deterministic order, or None when none exists.
    """
    constraint_rows = atoms.get("constraint")
    if not constraint_rows:
        return None
    relevant: Set[Term] = {row[1] for row in constraint_rows}
    card_rels = {row[2] for row in constraint_rows}
    for r, x, y in atoms.get("value"):
        if r in card_rels:
            relevant.add(x)
            relevant.add(y)
    classes = [m for m in eqc.classes() if any(t in relevant for t in m)]
    if not classes:
        return None
    total = 1
    for m in classes:
        total *= len(m)
        if total > search_cap:
            raise BudgetExceededError(
                f"representative search space exceeds cap ({search_cap})"
            )
    for combo in itertools.product(*classes):
        mapping = dict(base.mapping)
        for members, rep in zip(classes, combo):
            for t in members:
                mapping[t] = rep
        cand = Substitution(mapping)
        if not _cardinality_violations(constraint_rows, _value_e_rows(atoms, cand), atoms):
            return cand
    return None


def answer_set(
    domain: OOKBDomain,
    seeds: Iterable = (),
    max_depth: int = 1,
    policy: str = LEX_MIN_DEPTH,
    seed: Optional[int] = None,
    universe_cap: int = DEFAULT_UNIVERSE_CAP,
    search_cap: int = DEFAULT_SEARCH_CAP,
) -> AnswerSet:
    """Compute one answer set of the program at the given nesting depth.

    ``seeds`` are extra input facts (typically ``instance_of`` atoms for
    fresh query individuals).  Hard logical inconsistency (disjointness or an
    eq/neq clash) raises; constraint violations are returned on the result,
    which is then marked inconsistent -- under the depth bound no answer set
    exists, though ``depth_sensitive`` violations may vanish at higher depth.
    """
    sat = saturate(domain, seeds, max_depth, universe_cap)
    atoms = _atomset_from_store(sat.store)
    _check_classical_consistency(atoms)
    eqc = congruence_closure(atoms)
    for x, y in eqc.derived_eq_pairs():
        atoms.add(atom("eq", x, y))
    subst = select_representatives(eqc, policy, seed)
    violations = _domain_range_violations(atoms)
    card = _cardinality_violations(atoms.get("constraint"), _value_e_rows(atoms, subst), atoms)
    if card and not violations:
        repaired = _repair_representatives(atoms, eqc, subst, search_cap)
        if repaired is not None:
            subst = repaired
            card = []
    violations += card
    for a in subst.substitute_atoms():
        atoms.add(a)
    for a in subst.is_substituted_atoms():
        atoms.add(a)
    for r, x, y in sorted(
        _value_e_rows(atoms, subst), key=lambda v: (v[0], v[1].sort_key(), v[2].sort_key())
    ):
        atoms.add(atom("value_e", r, x, y))
    return AnswerSet(
        atoms, subst, tuple(violations), max_depth, frozenset(sat.store.direct_values)
    )


def entails(
    domain: OOKBDomain,
    seeds: Iterable,
    query: Atom,
    max_depth: int = 1,
    credulous: bool = False,
) -> bool:
    """Cautious entailment of ``query`` via a single answer set.

    Cautious mode rejects predicates whose extension varies across answer
    sets; pass ``credulous=True`` to ask whether the computed answer set
    contains such an atom.
    """
    if not credulous and query.predicate in CHOICE_PREDICATES:
        raise InvariantFamilyError(
            f"{query.predicate} varies between answer sets; use credulous mode"
        )
    ans = answer_set(domain, seeds, max_depth)
    if not ans.consistent:
        raise InconsistentKBError(
            "constraint", "the program has no answer set at this depth"
        )
    return query in ans.atoms
