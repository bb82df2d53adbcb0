from __future__ import annotations

import pytest

from ookb import (
    AtomSet,
    UnknownSymbolError,
    answer_set,
    atom,
    compare,
    describe,
    find_paths,
    individual,
    msc_of,
    parse_atom,
    parse_kb,
    subsumes,
)
from ookb.synth import GenProfile, generate_synthetic

I = individual("i")


def term(text):
    return parse_atom(f"term({text})").args[0]


# ---------------------------------------------------------------------------
# Q1 subsumption
# ---------------------------------------------------------------------------


def test_subsumes_reflexive(cell_domain):
    assert subsumes(cell_domain, "cell", "cell")


def test_subsumes_taxonomy(cell_domain):
    assert subsumes(cell_domain, "eukaryotic_cell", "cell")
    assert not subsumes(cell_domain, "cell", "eukaryotic_cell")
    assert subsumes(cell_domain, "eukaryotic_chromosome", "chromosome")


def test_subsumes_via_sufficient_condition():
    # membership is forced by a derived value, not by the hierarchy
    d = parse_kb(
        "class(c1). class(c2). class(d). relation(r). "
        "instance_of(f(X), d) :- instance_of(X, c1). "
        "value(r, X, f(X)) :- instance_of(X, c1). "
        "instance_of(X, c2) :- value(r, X, Y)."
    )
    assert subsumes(d, "c1", "c2")
    assert not any(pair == ("c1", "c2") for pair in d.subclass_facts)
    assert not subsumes(d, "c2", "c1")


def test_subsumes_unknown_class(cell_domain):
    with pytest.raises(UnknownSymbolError):
        subsumes(cell_domain, "cell", "nonexistent")


# ---------------------------------------------------------------------------
# Q2 description
# ---------------------------------------------------------------------------


def test_describe_bare_class():
    d = parse_kb("class(alone).")
    desc = describe(d, "alone")
    assert desc.member_of == ("alone",)
    assert desc.values == ()


def test_describe_eukaryotic_cell(cell_domain):
    desc = describe(cell_domain, "eukaryotic_cell")
    assert {"eukaryotic_cell", "cell"} <= set(desc.member_of)
    rels = {r for r, x, y in desc.values}
    assert rels == {"has_part", "is_inside"}
    has_part_sources = {x.text for r, x, y in desc.values if r == "has_part"}
    assert has_part_sources == {"__q2_i"}


def test_describe_values_stay_in_query_tree(parents_eq_domain):
    # the KB's own individuals are not part of the fresh instance's story
    desc = describe(parents_eq_domain, "person")
    assert desc.values == ()
    assert desc.member_of == ("person",)


def test_describe_msc_filter(cell_domain):
    full = describe(cell_domain, "eukaryotic_cell")
    msc = describe(cell_domain, "eukaryotic_cell", msc_only=True)
    assert msc.member_of == ("eukaryotic_cell",)
    assert set(msc.values) <= set(full.values)


def test_describe_monotone_in_depth():
    d = parse_kb(
        "class(a). class(b). relation(r). "
        "instance_of(f(X), b) :- instance_of(X, a). "
        "value(r, X, f(X)) :- instance_of(X, a). "
        "instance_of(g(X), a) :- instance_of(X, b). "
        "value(r, X, g(X)) :- instance_of(X, b)."
    )
    prev = describe(d, "a", max_depth=0)
    for depth in (1, 2, 3):
        cur = describe(d, "a", max_depth=depth)
        assert set(prev.member_of) <= set(cur.member_of)
        assert set(prev.values) <= set(cur.values)
        prev = cur


# ---------------------------------------------------------------------------
# most specific classes
# ---------------------------------------------------------------------------


def test_msc_of_picks_most_specific():
    atoms = AtomSet(
        [
            atom("instance_of", I, "cell"),
            atom("instance_of", I, "eukaryotic_cell"),
            atom("subclass_of", "eukaryotic_cell", "cell"),
        ]
    )
    assert msc_of(atoms, I) == ["eukaryotic_cell"]


def test_msc_of_incomparable_classes():
    atoms = AtomSet([atom("instance_of", I, "a"), atom("instance_of", I, "b")])
    assert msc_of(atoms, I) == ["a", "b"]


def test_msc_of_no_memberships():
    assert msc_of(AtomSet(), I) == []


# ---------------------------------------------------------------------------
# Q3 comparison
# ---------------------------------------------------------------------------

COMPARE_KB = """
class(organelle). class(mitochondrion). class(chloroplast). class(membrane).
relation(has_part).
subclass_of(mitochondrion, organelle).
subclass_of(chloroplast, organelle).
instance_of(f1(X), membrane) :- instance_of(X, mitochondrion).
value(has_part, X, f1(X)) :- instance_of(X, mitochondrion).
instance_of(f1(X), membrane) :- instance_of(X, chloroplast).
value(has_part, X, f1(X)) :- instance_of(X, chloroplast).
"""

CHROMOSOME_KB = """
class(chromosome). class(ribosome). class(protein). class(rna).
relation(has_part).
instance_of(f1(X), protein) :- instance_of(X, chromosome).
value(has_part, X, f1(X)) :- instance_of(X, chromosome).
instance_of(f1(X), rna) :- instance_of(X, ribosome).
value(has_part, X, f1(X)) :- instance_of(X, ribosome).
"""


def test_compare_same_class_no_differences(cell_domain):
    c = compare(cell_domain, "eukaryotic_cell", "eukaryotic_cell")
    assert c.dist_classes == ()
    assert c.dist_relations == ()
    assert c.t1 == c.t2


def test_compare_shared_superclass():
    c = compare(parse_kb(COMPARE_KB), "mitochondrion", "chloroplast")
    assert "organelle" in c.shared_classes
    assert c.dist_classes == ()
    # both have a membrane part: shared under the same (r, p, q) triple
    assert c.shared_relations == ("has_part",)


def test_compare_distinguishing_part():
    c = compare(parse_kb(CHROMOSOME_KB), "chromosome", "ribosome")
    assert ("has_part", "chromosome", "protein", "chromosome") in c.dist_relations
    assert ("has_part", "ribosome", "rna", "ribosome") in c.dist_relations
    assert c.shared_classes == ()


def test_compare_symmetry():
    a = compare(parse_kb(CHROMOSOME_KB), "chromosome", "ribosome")
    b = compare(parse_kb(CHROMOSOME_KB), "ribosome", "chromosome")
    assert a.shared_classes == b.shared_classes
    assert a.shared_relations == b.shared_relations
    assert set(a.dist_classes) == set(b.dist_classes)
    assert set(a.dist_relations) == set(b.dist_relations)
    assert a.t1 == b.t2 and a.t2 == b.t1


def test_compare_symmetry_generated():
    for s in range(4):
        d = generate_synthetic(
            GenProfile(n_classes=6, n_relations=2, skolems_per_rule=2, seed=s)
        )
        c1, c2 = d.classes[0], d.classes[-1]
        a = compare(d, c1, c2)
        b = compare(d, c2, c1)
        assert a.shared_classes == b.shared_classes
        assert set(a.dist_relations) == set(b.dist_relations)


# ---------------------------------------------------------------------------
# Q4 paths
# ---------------------------------------------------------------------------


def test_paths_degenerate_endpoints():
    d = parse_kb("class(c). relation(r).")
    assert find_paths(d, "c", "c", ["r"], max_len=3) == []


def test_paths_cell_to_nucleus(cell_domain):
    paths = find_paths(cell_domain, "eukaryotic_cell", "nucleus", ["has_part"], max_len=3)
    assert [p.sequence() for p in paths] == [("eukaryotic_cell", "has_part", "nucleus")]
    p = paths[0]
    assert [t.text for t in p.witness] == ["__q4_i1", "f3_eukaryotic_cell(__q4_i1)"]


def test_paths_respect_relation_restriction(cell_domain):
    none = find_paths(cell_domain, "eukaryotic_cell", "nucleus", ["is_inside"], max_len=3)
    assert none == []
    both = find_paths(
        cell_domain, "eukaryotic_cell", "nucleus", ["has_part", "is_inside"], max_len=3
    )
    seqs = {p.sequence() for p in both}
    assert ("eukaryotic_cell", "has_part", "nucleus") in seqs
    # two hops through the chromosome: has_part then is_inside
    assert any(len(p.relations) == 2 and p.relations == ("has_part", "is_inside") for p in both)


CHAIN = """
class(a). class(b). class(c). relation(r).
instance_of(f(X), b) :- instance_of(X, a).
value(r, X, f(X)) :- instance_of(X, a).
instance_of(g(X), c) :- instance_of(X, b).
value(r, X, g(X)) :- instance_of(X, b).
"""


def test_paths_chain_two_segments():
    d = parse_kb(CHAIN)
    paths = find_paths(d, "a", "c", ["r"], max_depth=2, max_len=5)
    assert [p.sequence() for p in paths] == [("a", "r", "b", "r", "c")]
    # brute-force DFS over the value graph agrees
    ans = answer_set(d, [atom("individual", individual("__q4_i1")),
                         atom("instance_of", individual("__q4_i1"), "a")], max_depth=2)
    edges = {(x, y) for r, x, y in ans.atoms.get("value")}
    start = individual("__q4_i1")
    reached, frontier = set(), {start}
    while frontier:
        nxt = {y for (x, y) in edges if x in frontier} - reached
        reached |= nxt
        frontier = nxt
    assert any(ans.atoms.has("instance_of", t, "c") for t in reached)


def test_paths_shortest_first_with_cap(cell_domain):
    paths = find_paths(
        cell_domain, "eukaryotic_cell", "nucleus", ["has_part", "is_inside"],
        max_len=4, max_paths=1,
    )
    assert len(paths) == 1
    assert len(paths[0].relations) == 1


def test_paths_witness_atoms_hold(cell_domain):
    seeds = [atom("individual", individual("__q4_i1")),
             atom("instance_of", individual("__q4_i1"), "eukaryotic_cell")]
    ans = answer_set(cell_domain, seeds)
    for p in find_paths(cell_domain, "eukaryotic_cell", "nucleus",
                        ["has_part", "is_inside"], max_len=4):
        for rel, src, tgt in zip(p.relations, p.witness, p.witness[1:]):
            assert ans.atoms.has("value", rel, src, tgt)
        assert ans.atoms.has("instance_of", p.witness[-1], "nucleus")


def test_paths_argument_validation(cell_domain):
    with pytest.raises(ValueError):
        find_paths(cell_domain, "cell", "nucleus", ["has_part"], max_len=0)
    with pytest.raises(ValueError):
        find_paths(cell_domain, "cell", "nucleus", ["has_part"], max_paths=0)
    with pytest.raises(UnknownSymbolError):
        find_paths(cell_domain, "cell", "nucleus", ["no_such_rel"])


def test_json_shapes(cell_domain):
    desc = describe(cell_domain, "eukaryotic_cell")
    d = desc.to_json()
    assert set(d) == {"member_of", "values"}
    comp = compare(cell_domain, "cell", "nucleus")
    c = comp.to_json()
    assert set(c) == {"shared_classes", "dist_classes", "shared_relations", "dist_relations"}
    paths = find_paths(cell_domain, "eukaryotic_cell", "nucleus", ["has_part"])
    pj = paths[0].to_json()
    assert set(pj) == {"sequence", "witness"}
