"""Per-category statement counts for a loaded knowledge base."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .model import OOKBDomain, PApply, Term

__all__ = ["StatsTable", "kb_stats"]


@dataclass(frozen=True)
class StatsTable:
    """Counts per statement category.

    Descriptive rules, equality statements and qualified number constraints
    each count the templates of that family together with ground facts of
    the same family.  ``avg_skolems`` is total Skolem-function occurrences in
    descriptive statements divided by their count (0 when there are none).
    """

    classes: int
    individuals: int
    relations: int
    subclass_of: int
    subrelation_of: int
    instance_of: int
    disjoint: int
    avg_skolems: float
    domain_constraints: int
    range_constraints: int
    inverse: int
    compose: int
    qualified_number_constraints: int
    sufficient_conditions: int
    descriptive_rules: int
    equality_statements: int

    def rows(self) -> List[Tuple[str, object]]:
        return [
            ("classes", self.classes),
            ("individuals", self.individuals),
            ("relations", self.relations),
            ("subclass_of statements", self.subclass_of),
            ("subrelation_of statements", self.subrelation_of),
            ("instance_of statements", self.instance_of),
            ("disjointness statements", self.disjoint),
            ("avg skolem functions per descriptive rule", self.avg_skolems),
            ("domain constraints", self.domain_constraints),
            ("range constraints", self.range_constraints),
            ("inverse relation statements", self.inverse),
            ("compose statements", self.compose),
            ("qualified number constraints", self.qualified_number_constraints),
            ("sufficient conditions", self.sufficient_conditions),
            ("descriptive rules", self.descriptive_rules),
            ("equality statements", self.equality_statements),
        ]

    def to_json(self) -> dict:
        return {
            "classes": self.classes,
            "individuals": self.individuals,
            "relations": self.relations,
            "subclass_of": self.subclass_of,
            "subrelation_of": self.subrelation_of,
            "instance_of": self.instance_of,
            "disjoint": self.disjoint,
            "avg_skolems": self.avg_skolems,
            "domain_constraints": self.domain_constraints,
            "range_constraints": self.range_constraints,
            "inverse": self.inverse,
            "compose": self.compose,
            "qualified_number_constraints": self.qualified_number_constraints,
            "sufficient_conditions": self.sufficient_conditions,
            "descriptive_rules": self.descriptive_rules,
            "equality_statements": self.equality_statements,
        }


def _pattern_skolems(arg) -> int:
    n = 0
    while isinstance(arg, PApply):
        n += 1
        arg = arg.arg
    return n


def _term_skolems(t: Term) -> int:
    return t.depth


def kb_stats(domain: OOKBDomain) -> StatsTable:
    """Exact counts of every declared category."""
    descriptive_count = len(domain.descriptive_rules) + len(domain.value_facts)
    skolem_occurrences = 0
    for rule in domain.descriptive_rules:
        for a in rule.head.args:
            skolem_occurrences += _pattern_skolems(a)
    for _r, x, y in domain.value_facts:
        skolem_occurrences += _term_skolems(x) + _term_skolems(y)
    avg = skolem_occurrences / descriptive_count if descriptive_count else 0.0
    return StatsTable(
        classes=len(domain.classes),
        individuals=len(domain.individuals),
        relations=len(domain.relations),
        subclass_of=len(domain.subclass_facts),
        subrelation_of=len(domain.subrelation_facts),
        instance_of=len(domain.instance_facts),
        disjoint=len(domain.disjoint_facts),
        avg_skolems=avg,
        domain_constraints=len(domain.domain_facts),
        range_constraints=len(domain.range_facts),
        inverse=len(domain.inverse_facts),
        compose=len(domain.compose_facts),
        qualified_number_constraints=len(domain.constraint_rules) + len(domain.constraint_facts),
        sufficient_conditions=len(domain.sufficient_conditions),
        descriptive_rules=descriptive_count,
        equality_statements=len(domain.equality_rules)
        + len(domain.eq_facts)
        + len(domain.neq_facts),
    )
