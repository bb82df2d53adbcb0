"""Brute-force answer-set enumeration for small ground programs.

This is the test oracle: it implements the stable-model definitions as
literally as practical and stays independent of the engine's indexed
fixpoint.  Derivation is recomputed with naive full passes; candidate models
are built per representative choice, verified by recomputing the least model
of the reduct (choice atoms contribute only when the candidate contains
them, negation-as-failure is evaluated against the fixed candidate), and
finally filtered through every constraint written out by the
domain-independent axioms.

Intended for programs of at most a few thousand ground atoms.
"""

from __future__ import annotations

import itertools
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .errors import BudgetExceededError
from .grounder import GroundProgram
from .model import Atom, Term

__all__ = ["enumerate_answer_sets_oracle", "DEFAULT_ATOM_BUDGET", "DEFAULT_COMBO_LIMIT"]

DEFAULT_ATOM_BUDGET = 5000
DEFAULT_COMBO_LIMIT = 4096


def _rows(atoms: Set[Atom], pred: str) -> List[tuple]:
    return [a.args for a in atoms if a.predicate == pred and not a.neg]


def _has(atoms: Set[Atom], pred: str, *args, neg: bool = False) -> bool:
    return Atom(pred, tuple(args), neg) in atoms


def _lfp(
    program: GroundProgram,
    sub_gate: Callable[[Term, Term], bool],
    eq6_gate: Callable[[Term], bool],
) -> Set[Atom]:
    """Least model of the positive rules under the given choice/naf gates."""
    atoms: Set[Atom] = set(program.facts)
    rules = program.proper_rules
    changed = True
    while changed:
        changed = False

        def add(a: Atom):
            nonlocal changed
            if a not in atoms:
                atoms.add(a)
                changed = True

        for r in rules:
            if all(b in atoms for b in r.pos):
                add(r.head)
        for c, a in _rows(atoms, "subclass_of"):
            for a2, b in _rows(atoms, "subclass_of"):
                if a2 == a:
                    add(Atom("subclass_of", (c, b)))
        for x, d in _rows(atoms, "instance_of"):
            for d2, c in _rows(atoms, "subclass_of"):
                if d2 == d:
                    add(Atom("instance_of", (x, c)))
            for d2, c in _rows(atoms, "disjoint"):
                if d2 == d:
                    add(Atom("instance_of", (x, c), neg=True))
        for d, c in _rows(atoms, "disjoint"):
            add(Atom("disjoint", (c, d)))
        values = _rows(atoms, "value")
        for s, x, y in values:
            add(Atom("term", (x,)))
            add(Atom("term", (y,)))
            for s2, t in _rows(atoms, "subrelation_of"):
                if s2 == s:
                    add(Atom("value", (t, x, y)))
            for s2, t in _rows(atoms, "inverse"):
                if s2 == s:
                    add(Atom("value", (t, y, x)))
        for s, t, u in _rows(atoms, "compose"):
            for s2, x, y in values:
                if s2 != s:
                    continue
                for t2, y2, z in values:
                    if t2 == t and y2 == y:
                        add(Atom("value", (u, x, z)))
        for x, y in _rows(atoms, "eq"):
            add(Atom("eq", (y, x)))
            for y2, z in _rows(atoms, "eq"):
                if y2 == y and x != z:
                    add(Atom("eq", (x, z)))
            if sub_gate(x, y):
                add(Atom("substitute", (x, y)))
        for x, z in _rows(atoms, "substitute"):
            if x != z:
                add(Atom("is_substituted", (x,)))
                for x2, y in _rows(atoms, "eq"):
                    if x2 == x:
                        add(Atom("substitute", (y, z)))
        for (t,) in _rows(atoms, "term"):
            if eq6_gate(t):
                add(Atom("substitute", (t, t)))
        subs = _rows(atoms, "substitute")
        for s, x, y in values:
            for x2, p in subs:
                if x2 != x:
                    continue
                for y2, q in subs:
                    if y2 == y:
                        add(Atom("value_e", (s, p, q)))
    return atoms


def _consistent(atoms: Set[Atom]) -> bool:
    for a in atoms:
        if a.neg and Atom(a.predicate, a.args) in atoms:
            return False
    return True


def _constraints_hold(atoms: Set[Atom]) -> bool:
    """Every constraint of the program is satisfied by ``atoms``."""
    eq = set(_rows(atoms, "eq"))
    neq = set(_rows(atoms, "neq"))
    if eq & neq:
        return False
    subs = _rows(atoms, "substitute")
    sub_by_src: Dict[Term, Set[Term]] = {}
    for x, y in subs:
        sub_by_src.setdefault(x, set()).add(y)
    # at least one endpoint of every eq edge maps into its eq-neighbourhood
    for x, y in eq:
        x_ok = any((x, z) in eq for z in sub_by_src.get(x, ()))
        y_ok = any((y, z) in eq for z in sub_by_src.get(y, ()))
        if not x_ok and not y_ok:
            return False
    # no term carries two distinct proper substitutes
    for x, images in sub_by_src.items():
        proper = [y for y in images if y != x]
        if len(proper) > 1:
            return False
    for x, y in subs:
        if x != y and (x, y) in neq:
            return False
    for s, x, y in _rows(atoms, "value"):
        for s2, c in _rows(atoms, "domain"):
            if s2 == s and not _has(atoms, "instance_of", x, c):
                return False
        for s2, c in _rows(atoms, "range"):
            if s2 == s and not _has(atoms, "instance_of", y, c):
                return False
    value_e = _rows(atoms, "value_e")
    for k, y, s, d, n in _rows(atoms, "constraint"):
        fillers = {
            z for s2, y2, z in value_e if s2 == s and y2 == y and _has(atoms, "instance_of", z, d)
        }
        count = len(fillers)
        if k == "min" and count <= n - 1:
            return False
        if k == "max" and count >= n + 1:
            return False
        if k == "exact" and (count <= n - 1 or count >= n + 1):
            return False
    return True


def _eq_components(eq_rows: Iterable[tuple]) -> Tuple[List[List[Term]], List[Term]]:
    """Connected components of the eq graph; self-loop-only terms separately."""
    adj: Dict[Term, Set[Term]] = {}
    loops: Set[Term] = set()
    for x, y in eq_rows:
        if x == y:
            loops.add(x)
            continue
        adj.setdefault(x, set()).add(y)
        adj.setdefault(y, set()).add(x)
    seen: Set[Term] = set()
    components: List[List[Term]] = []
    for start in sorted(adj, key=Term.sort_key):
        if start in seen:
            continue
        comp, stack = [], [start]
        while stack:
            t = stack.pop()
            if t in seen:
                continue
            seen.add(t)
            comp.append(t)
            stack.extend(adj[t])
        components.append(sorted(comp, key=Term.sort_key))
    components.sort(key=lambda c: c[0].sort_key())
    pure_loops = sorted((t for t in loops if t not in seen), key=Term.sort_key)
    return components, pure_loops


def _candidate(
    program: GroundProgram, chosen: FrozenSet[Tuple[Term, Term]]
) -> Set[Atom]:
    """Build the candidate model for a fixed set of chosen substitute atoms.

    The unsubstituted-term default is stratified below the choice layer: it
    is read off the closure of everything else, then folded back in.
    """
    s0 = _lfp(program, lambda x, y: (x, y) in chosen, lambda t: False)
    defaults = {t for (t,) in _rows(s0, "term") if not _has(s0, "is_substituted", t)}
    return _lfp(program, lambda x, y: (x, y) in chosen, lambda t: t in defaults)


def _stable(program: GroundProgram, s: Set[Atom]) -> bool:
    """Literal stability check: s equals the least model of its own reduct."""
    reduct_lfp = _lfp(
        program,
        lambda x, y: Atom("substitute", (x, y)) in s,
        lambda t: not _has(s, "is_substituted", t),
    )
    return reduct_lfp == s


def enumerate_answer_sets_oracle(
    ground: GroundProgram,
    limit: int = DEFAULT_COMBO_LIMIT,
    atom_budget: int = DEFAULT_ATOM_BUDGET,
) -> List[Set[Atom]]:
    """All answer sets of the ground program, by exhaustive choice enumeration.

    Enumerates one representative per equality class (plus the degenerate
    self-equality choices), builds each candidate bottom-up, verifies
    stability through the reduct, and keeps candidates that are consistent
    and satisfy every constraint.  Raises :class:`BudgetExceededError` when
    the envelope outgrows ``atom_budget`` ground atoms or the choice space
    outgrows ``limit`` combinations.
    """
    envelope = _lfp(ground, lambda x, y: True, lambda t: True)
    if len(envelope) > atom_budget:
        raise BudgetExceededError(
            f"ground program envelope has {len(envelope)} atoms (budget {atom_budget})"
        )
    components, pure_loops = _eq_components(_rows(envelope, "eq"))
    total = 1
    for comp in components:
        total *= len(comp)
    total *= 2 ** len(pure_loops)
    if total > limit:
        raise BudgetExceededError(f"{total} representative combinations (limit {limit})")

    answer_sets: List[Set[Atom]] = []
    seen: Set[FrozenSet[Atom]] = set()
    loop_options = list(itertools.product((False, True), repeat=len(pure_loops)))
    for reps in itertools.product(*components) if components else [()]:
        base_choice: Set[Tuple[Term, Term]] = set()
        for comp, rep in zip(components, reps):
            for t in comp:
                if t != rep:
                    base_choice.add((t, rep))
        for flags in loop_options:
            chosen = set(base_choice)
            for t, flag in zip(pure_loops, flags):
                if flag:
                    chosen.add((t, t))
            s = _candidate(ground, frozenset(chosen))
            if not _consistent(s):
                continue
            if not _constraints_hold(s):
                continue
            if not _stable(ground, s):
                continue
            key = frozenset(s)
            if key not in seen:
                seen.add(key)
                answer_sets.append(s)
    answer_sets.sort(key=lambda s: tuple(sorted(a.text for a in s)))
    return answer_sets
