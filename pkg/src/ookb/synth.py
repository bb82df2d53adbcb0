"""Deterministic synthetic knowledge bases for testing.

A profile fixes the shape knobs; the same profile always yields the same
domain (and therefore a byte-identical rendering).  Generated KBs always
pass the load-time invariants: every Skolem used in a value head gets a
typing companion, and neq statements are only emitted between Skolem terms
the class does not also equate.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Tuple

from .errors import InfeasibleProfileError
from .model import (
    AtomPattern,
    DescriptiveRule,
    OOKBDomain,
    PApply,
    SkolemId,
    SufficientCondition,
    Var,
)

__all__ = ["GenProfile", "generate_synthetic"]

X = Var("X")
Y = Var("Y")


@dataclass(frozen=True)
class GenProfile:
    n_classes: int = 6
    n_relations: int = 2
    skolems_per_rule: int = 2
    eq_density: float = 0.0
    cycle_prob: float = 0.0
    seed: int = 0
    # secondary knobs, all off by default
    neq_prob: float = 0.0
    constraint_prob: float = 0.0
    unsat_constraint_prob: float = 0.0
    sufficient_prob: float = 0.0
    disjoint_prob: float = 0.0
    meta_prob: float = 0.0
    value_prob: float = 0.8
    rule_prob: float = 0.85


def _validate(p: GenProfile):
    if p.n_classes < 1:
        raise InfeasibleProfileError("need at least one class")
    if p.n_relations < 0 or p.skolems_per_rule < 0:
        raise InfeasibleProfileError("sizes must be non-negative")
    for name in ("eq_density", "cycle_prob", "neq_prob", "constraint_prob",
                 "unsat_constraint_prob", "sufficient_prob", "disjoint_prob",
                 "meta_prob", "value_prob", "rule_prob"):
        v = getattr(p, name)
        if not 0.0 <= v <= 1.0:
            raise InfeasibleProfileError(f"{name} must lie in [0, 1]")
    if p.eq_density > 0 and p.skolems_per_rule < 2:
        raise InfeasibleProfileError(
            "eq_density needs at least two Skolem terms per rule to equate"
        )
    if (p.value_prob > 0 or p.constraint_prob > 0) and p.n_relations < 1:
        if p.skolems_per_rule > 0 and p.rule_prob > 0:
            raise InfeasibleProfileError("value templates need at least one relation")


def generate_synthetic(profile: GenProfile) -> OOKBDomain:
    """Generate a loadable domain, deterministically in the profile seed."""
    _validate(profile)
    rng = random.Random(profile.seed)
    classes = [f"c{k}" for k in range(1, profile.n_classes + 1)]
    relations = [f"r{k}" for k in range(1, profile.n_relations + 1)]

    subclass: List[Tuple[str, str]] = []
    for k in range(1, len(classes)):
        if rng.random() < 0.7:
            subclass.append((classes[k], classes[rng.randrange(k)]))

    # descendant sets (including self) on the taxonomy built so far, used to
    # keep generated disjointness satisfiable
    down: Dict[str, set] = {c: {c} for c in classes}
    changed = True
    while changed:
        changed = False
        for sub, sup in subclass:
            if not down[sub] <= down[sup]:
                down[sup] |= down[sub]
                changed = True

    disjoint: List[Tuple[str, str]] = []
    for i, a in enumerate(classes):
        for b in classes[i + 1 :]:
            if rng.random() < profile.disjoint_prob and not (down[a] & down[b]):
                disjoint.append((a, b))

    subrelation: List[Tuple[str, str]] = []
    inverse: List[Tuple[str, str]] = []
    compose: List[Tuple[str, str, str]] = []
    if len(relations) >= 2:
        for r in relations:
            if rng.random() < profile.meta_prob:
                other = rng.choice([s for s in relations if s != r])
                kind = rng.randrange(3)
                if kind == 0:
                    subrelation.append((r, other))
                elif kind == 1:
                    inverse.append((r, other))
                else:
                    compose.append((r, r, other))

    descriptive: List[DescriptiveRule] = []
    equality: List[DescriptiveRule] = []
    constraints: List[DescriptiveRule] = []
    sufficient: List[SufficientCondition] = []

    for k, cls in enumerate(classes):
        if rng.random() >= profile.rule_prob:
            continue
        n_sk = 1 + rng.randrange(profile.skolems_per_rule) if profile.skolems_per_rule else 0
        skolems: List[Tuple[SkolemId, str]] = []
        for j in range(1, n_sk + 1):
            if rng.random() < profile.cycle_prob:
                target = cls  # guaranteed membership cycle
            elif k + 1 < len(classes):
                target = classes[k + 1 + rng.randrange(len(classes) - k - 1)]
            else:
                continue
            sk = SkolemId(f"f{j}_{cls}", source=f"f{j}", owner=cls)
            skolems.append((sk, target))
            descriptive.append(
                DescriptiveRule(
                    cls, "member", AtomPattern("instance_of", (PApply(sk, X), target))
                )
            )
        value_edges: List[Tuple[str, SkolemId]] = []
        for sk, _target in skolems:
            if relations and rng.random() < profile.value_prob:
                r = rng.choice(relations)
                descriptive.append(
                    DescriptiveRule(cls, "value", AtomPattern("value", (r, X, PApply(sk, X))))
                )
                value_edges.append((r, sk))
        if relations and len(skolems) >= 2 and rng.random() < 0.3:
            (a, _), (b, _) = rng.sample(skolems, 2)
            if a != b:
                r = rng.choice(relations)
                descriptive.append(
                    DescriptiveRule(
                        cls, "value", AtomPattern("value", (r, PApply(a, X), PApply(b, X)))
                    )
                )

        # same-class equalities; track components so neq never contradicts them
        eq_root: Dict[SkolemId, SkolemId] = {sk: sk for sk, _ in skolems}

        def find(s: SkolemId) -> SkolemId:
            while eq_root[s] != s:
                s = eq_root[s]
            return s

        for i in range(len(skolems)):
            for j in range(i + 1, len(skolems)):
                a, b = skolems[i][0], skolems[j][0]
                if rng.random() < profile.eq_density:
                    equality.append(
                        DescriptiveRule(
                            cls, "eq", AtomPattern("eq", (PApply(a, X), PApply(b, X)))
                        )
                    )
                    eq_root[find(a)] = find(b)
        for i in range(len(skolems)):
            for j in range(i + 1, len(skolems)):
                a, b = skolems[i][0], skolems[j][0]
                if find(a) != find(b) and rng.random() < profile.neq_prob:
                    equality.append(
                        DescriptiveRule(
                            cls, "neq", AtomPattern("neq", (PApply(a, X), PApply(b, X)))
                        )
                    )

        if value_edges and rng.random() < profile.constraint_prob:
            r, sk = rng.choice(value_edges)
            target = dict(skolems)[sk]
            if rng.random() < 0.5:
                pat = AtomPattern("constraint", ("min", X, r, target, 1))
            else:
                pat = AtomPattern("constraint", ("max", X, r, target, len(skolems)))
            constraints.append(DescriptiveRule(cls, "constraint", pat))
        if value_edges and rng.random() < profile.unsat_constraint_prob:
            r, sk = rng.choice(value_edges)
            target = dict(skolems)[sk]
            constraints.append(
                DescriptiveRule(
                    cls, "constraint", AtomPattern("constraint", ("max", X, r, target, 0))
                )
            )

        if relations and rng.random() < profile.sufficient_prob:
            target = rng.choice(classes)
            r = rng.choice(relations)
            sufficient.append(
                SufficientCondition(target, X, (AtomPattern("value", (r, X, Y)),))
            )

    return OOKBDomain.build(
        classes=classes,
        relations=relations,
        subclass_facts=subclass,
        disjoint_facts=disjoint,
        subrelation_facts=subrelation,
        inverse_facts=inverse,
        compose_facts=compose,
        descriptive_rules=descriptive,
        equality_rules=equality,
        constraint_rules=constraints,
        sufficient_conditions=sufficient,
    )
