"""The four practical query families over computed answer sets.

Each query introduces reserved fresh individuals (``__q1_i`` and friends,
which the parser refuses in user KBs), computes one answer set of the domain
extended with the query's input atoms, and reads the result off that answer
set.  Choice-dependent atoms never influence any of these answers, so a
single answer set suffices for cautious reasoning.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .engine import AnswerSet, AtomSet, LEX_MIN_DEPTH, answer_set
from .errors import InconsistentKBError, UnknownSymbolError
from .grounder import DEFAULT_UNIVERSE_CAP
from .model import OOKBDomain, Term, atom, individual

__all__ = [
    "Description",
    "Comparison",
    "Path",
    "subsumes",
    "describe",
    "msc_of",
    "compare",
    "find_paths",
]


@dataclass(frozen=True)
class Description:
    """Answer to "what is a c?": memberships and relation values of a fresh
    instance, every term built over that instance."""

    member_of: Tuple[str, ...]
    values: Tuple[Tuple[str, Term, Term], ...]

    def to_json(self) -> dict:
        return {
            "member_of": list(self.member_of),
            "values": [[r, x.text, y.text] for r, x, y in self.values],
        }


@dataclass(frozen=True)
class Comparison:
    """Similarities and differences between two classes.

    ``dist_classes`` and ``dist_relations`` carry an owner tag naming the
    side the entry belongs to; relation entries leave the domain or range
    slot empty when the difference is not about that slot.
    """

    shared_classes: Tuple[str, ...]
    dist_classes: Tuple[Tuple[str, str], ...]
    shared_relations: Tuple[str, ...]
    dist_relations: Tuple[Tuple[str, Optional[str], Optional[str], str], ...]
    t1: Tuple[Tuple[str, str, str], ...]
    t2: Tuple[Tuple[str, str, str], ...]

    def to_json(self) -> dict:
        return {
            "shared_classes": list(self.shared_classes),
            "dist_classes": [list(x) for x in self.dist_classes],
            "shared_relations": list(self.shared_relations),
            "dist_relations": [list(x) for x in self.dist_relations],
        }


@dataclass(frozen=True)
class Path:
    """A class/relation alternation witnessed by one term chain."""

    classes: Tuple[str, ...]
    relations: Tuple[str, ...]
    witness: Tuple[Term, ...]

    def sequence(self) -> Tuple[str, ...]:
        out: List[str] = [self.classes[0]]
        for rel, cls in zip(self.relations, self.classes[1:]):
            out.append(rel)
            out.append(cls)
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "sequence": list(self.sequence()),
            "witness": [t.text for t in self.witness],
        }


def _require_class(domain: OOKBDomain, name: str):
    if name not in domain.class_set:
        raise UnknownSymbolError(f"unknown class {name!r}")


def _require_relation(domain: OOKBDomain, name: str):
    if name not in domain.relation_set:
        raise UnknownSymbolError(f"unknown relation {name!r}")


def _query_answer_set(domain, seeds, max_depth, universe_cap) -> AnswerSet:
    ans = answer_set(domain, seeds, max_depth, LEX_MIN_DEPTH, universe_cap=universe_cap)
    if not ans.consistent:
        raise InconsistentKBError(
            "constraint", "the knowledge base has no answer set at this depth"
        )
    return ans


def subsumes(
    domain: OOKBDomain,
    c1: str,
    c2: str,
    max_depth: int = 1,
    universe_cap: int = DEFAULT_UNIVERSE_CAP,
) -> bool:
    """Is every instance of ``c1`` necessarily an instance of ``c2``?

    Introduces a fresh individual of ``c1`` and tests membership in ``c2``.
    Sound at any depth; completeness is limited by the nesting bound.
    """
    _require_class(domain, c1)
    _require_class(domain, c2)
    i = individual("__q1_i")
    seeds = [atom("individual", i), atom("instance_of", i, c1)]
    ans = _query_answer_set(domain, seeds, max_depth, universe_cap)
    return ans.atoms.has("instance_of", i, c2)


def msc_of(atoms: AtomSet, i: Term) -> List[str]:
    """Most specific classes of ``i``: memberships with no proper subclass
    membership below them."""
    classes = sorted(c for t, c in atoms.get("instance_of") if t == i)
    subclass = atoms.get("subclass_of")
    out = []
    for p in classes:
        if not any(q != p and (q, p) in subclass for q in classes):
            out.append(p)
    return out


def describe(
    domain: OOKBDomain,
    c: str,
    max_depth: int = 1,
    msc_only: bool = False,
    universe_cap: int = DEFAULT_UNIVERSE_CAP,
) -> Description:
    """Memberships and relation values of a fresh instance of ``c``.

    ``msc_only`` keeps only the most specific memberships and the values
    stated by descriptive rules (dropping those obtained through inverse,
    composition and sub-relation reasoning).
    """
    _require_class(domain, c)
    i = individual("__q2_i")
    seeds = [atom("individual", i), atom("instance_of", i, c)]
    ans = _query_answer_set(domain, seeds, max_depth, universe_cap)
    values = ans.value_triples(root=i)
    if msc_only:
        member = tuple(msc_of(ans.atoms, i))
        values = [v for v in values if v in ans.direct_values]
    else:
        member = tuple(sorted(cl for t, cl in ans.atoms.get("instance_of") if t == i))
    return Description(member, tuple(values))


def _triples_for(ans: AnswerSet, root: Term, msc_cache: Dict[Term, List[str]]) -> Set[Tuple[str, str, str]]:
    def mscs(t: Term) -> List[str]:
        if t not in msc_cache:
            msc_cache[t] = msc_of(ans.atoms, t)
        return msc_cache[t]

    out: Set[Tuple[str, str, str]] = set()
    for r, x, y in ans.value_triples(root=root):
        for p in mscs(x):
            for q in mscs(y):
                out.add((r, p, q))
    return out


def compare(
    domain: OOKBDomain,
    c1: str,
    c2: str,
    max_depth: int = 1,
    universe_cap: int = DEFAULT_UNIVERSE_CAP,
) -> Comparison:
    """Similarities and differences between ``c1`` and ``c2``.

    Classes are compared through the superclass sets; relations through the
    most-specific-class triples of two fresh instances described in one
    answer set.
    """
    _require_class(domain, c1)
    _require_class(domain, c2)
    i1, i2 = individual("__q3_i1"), individual("__q3_i2")
    seeds = [
        atom("individual", i1),
        atom("instance_of", i1, c1),
        atom("individual", i2),
        atom("instance_of", i2, c2),
    ]
    ans = _query_answer_set(domain, seeds, max_depth, universe_cap)
    subclass = ans.atoms.get("subclass_of")
    sup1 = {d for c, d in subclass if c == c1}
    sup2 = {d for c, d in subclass if c == c2}
    shared_classes = tuple(sorted(sup1 & sup2))
    dist_classes = tuple(
        sorted([(d, c1) for d in sup1 - sup2] + [(d, c2) for d in sup2 - sup1])
    )
    msc_cache: Dict[Term, List[str]] = {}
    t1 = _triples_for(ans, i1, msc_cache)
    t2 = _triples_for(ans, i2, msc_cache)
    rels1_dom = {r for r, p, q in t1 if p == c1}
    rels2_dom = {r for r, p, q in t2 if p == c2}
    rels1_rng = {r for r, p, q in t1 if q == c1}
    rels2_rng = {r for r, p, q in t2 if q == c2}
    shared = (rels1_dom & rels2_dom) | (rels1_rng & rels2_rng)
    shared |= {r for r, p, q in t1 & t2}
    # pooled domain/range views drive the difference side
    q_d = {(r, p) for r, p, q in t1 | t2}
    q_r = {(r, q) for r, p, q in t1 | t2}
    dist: Set[Tuple[str, Optional[str], Optional[str], str]] = set()
    for r, p in sorted(q_d):
        if p == c1 and (r, c2) not in q_d:
            dist.add((r, c1, None, c1))
        if p == c2 and (r, c1) not in q_d:
            dist.add((r, c2, None, c2))
    for r, q in sorted(q_r):
        if q == c1 and (r, c2) not in q_r:
            dist.add((r, None, c1, c1))
        if q == c2 and (r, c1) not in q_r:
            dist.add((r, None, c2, c2))
    for r, p, q in t1 - t2:
        dist.add((r, p, q, c1))
    for r, p, q in t2 - t1:
        dist.add((r, p, q, c2))

    def dist_key(e):
        return (e[0], e[1] or "", e[2] or "", e[3])

    return Comparison(
        shared_classes,
        dist_classes,
        tuple(sorted(shared)),
        tuple(sorted(dist, key=dist_key)),
        tuple(sorted(t1)),
        tuple(sorted(t2)),
    )


def find_paths(
    domain: OOKBDomain,
    c1: str,
    c2: str,
    restrict: Iterable[str],
    max_depth: int = 1,
    max_len: int = 3,
    max_paths: Optional[int] = None,
    universe_cap: int = DEFAULT_UNIVERSE_CAP,
) -> List[Path]:
    """Paths from ``c1`` to ``c2`` along the given relations.

    Searches the value graph over the Skolem terms of a fresh ``c1``
    instance.  A path takes at least one segment, never repeats a term, and
    reports intermediate nodes by their most specific classes; paths with the
    same class/relation alternation are deduplicated.  Results come shortest
    first, at most ``max_paths`` of them.
    """
    _require_class(domain, c1)
    _require_class(domain, c2)
    restrict = sorted(set(restrict))
    for r in restrict:
        _require_relation(domain, r)
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    if max_paths is not None and max_paths < 1:
        raise ValueError("max_paths must be positive")
    i1, i2 = individual("__q4_i1"), individual("__q4_i2")
    seeds = [
        atom("individual", i1),
        atom("instance_of", i1, c1),
        atom("individual", i2),
        atom("instance_of", i2, c2),
    ]
    ans = _query_answer_set(domain, seeds, max_depth, universe_cap)
    allowed = set(restrict)
    adjacency: Dict[Term, List[Tuple[str, Term]]] = {}
    for r, x, y in ans.value_triples(root=i1):
        if r in allowed:
            adjacency.setdefault(x, []).append((r, y))
    for edges in adjacency.values():
        edges.sort(key=lambda e: (e[0], e[1].sort_key()))

    term_paths: List[Tuple[Tuple[Term, ...], Tuple[str, ...]]] = []

    def dfs(node: Term, nodes: List[Term], rels: List[str]):
        if len(rels) >= max_len:
            return
        for r, nxt in adjacency.get(node, ()):
            if nxt in nodes:
                continue
            nodes.append(nxt)
            rels.append(r)
            if ans.atoms.has("instance_of", nxt, c2):
                term_paths.append((tuple(nodes), tuple(rels)))
            dfs(nxt, nodes, rels)
            nodes.pop()
            rels.pop()

    dfs(i1, [i1], [])

    msc_cache: Dict[Term, List[str]] = {}

    def mscs(t: Term) -> List[str]:
        if t not in msc_cache:
            msc_cache[t] = msc_of(ans.atoms, t)
        return msc_cache[t]

    found: Dict[Tuple[str, ...], Path] = {}
    for nodes, rels in term_paths:
        inner = nodes[1:-1]
        labelings: List[List[str]] = [[c1]]
        for t in inner:
            labelings = [lab + [m] for lab in labelings for m in mscs(t)]
        for lab in labelings:
            classes = tuple(lab) + (c2,)
            p = Path(classes, rels, nodes)
            found.setdefault(p.sequence(), p)

    paths = sorted(found.values(), key=lambda p: (len(p.relations), p.sequence()))
    if max_paths is not None:
        paths = paths[:max_paths]
    return paths
