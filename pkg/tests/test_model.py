from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ookb.model import (
    Atom,
    SkolemId,
    apply_skolem,
    atom,
    individual,
    term_depth,
)

F1 = SkolemId("f1")
F2 = SkolemId("f2")
F3 = SkolemId("f3")


def test_apply_skolem_depth_one():
    t = apply_skolem(F1, individual("i"))
    assert t.fn == F1
    assert t.arg == individual("i")
    assert term_depth(t) == 1


def test_apply_skolem_nested_depth():
    t = apply_skolem(F2, apply_skolem(F1, individual("i")))
    assert term_depth(t) == 2


def test_apply_skolem_deterministic():
    a = apply_skolem(F1, individual("i"))
    b = apply_skolem(F1, individual("i"))
    assert a == b
    assert hash(a) == hash(b)
    assert a is b  # interned


def test_term_depth_base_cases():
    assert term_depth(individual("i")) == 0
    assert term_depth(apply_skolem(F3, apply_skolem(F1, individual("i")))) == 2


def test_skolem_identity_is_by_name():
    assert SkolemId("f1_cell", source="f1", owner="cell") == SkolemId("f1_cell")
    assert SkolemId("f1_cell") != SkolemId("f1_nucleus")


def test_term_root_and_subterms():
    t = apply_skolem(F2, apply_skolem(F1, individual("i")))
    assert t.root() == individual("i")
    assert [s.text for s in t.subterms()] == ["f2(f1(i))", "f1(i)", "i"]


names = st.sampled_from(["i", "j", "k"])
skolems = st.sampled_from([F1, F2, F3])


@st.composite
def terms(draw, max_depth=4):
    t = individual(draw(names))
    for _ in range(draw(st.integers(0, max_depth))):
        t = apply_skolem(draw(skolems), t)
    return t


@given(terms(), skolems)
@settings(max_examples=100)
def test_apply_increments_depth(t, fn):
    assert term_depth(apply_skolem(fn, t)) == term_depth(t) + 1


@given(terms(), terms())
@settings(max_examples=150)
def test_structural_equality_matches_text(a, b):
    # equality is structural: two terms are equal exactly when they render
    # identically, and interning makes equal terms identical
    assert (a == b) == (a.text == b.text)
    if a == b:
        assert a is b


@given(terms(), terms(), skolems, skolems)
@settings(max_examples=150)
def test_apply_skolem_injective(a, b, f, g):
    if apply_skolem(f, a) == apply_skolem(g, b):
        assert f == g and a == b


def test_atom_text_and_order():
    a = atom("value", "has_part", individual("i"), apply_skolem(F1, individual("i")))
    assert a.text == "value(has_part, i, f1(i))"
    neg = atom("instance_of", individual("i"), "cell", neg=True)
    assert neg.text == "-instance_of(i, cell)"
    assert a.sort_key() != neg.sort_key()


def test_atom_equality_includes_polarity():
    pos = atom("instance_of", individual("i"), "cell")
    neg = atom("instance_of", individual("i"), "cell", neg=True)
    assert pos != neg
    assert len({pos, neg}) == 2
