from __future__ import annotations

import pytest

from ookb import (
    InfeasibleProfileError,
    atom,
    build_universe,
    individual,
    kb_stats,
    parse_kb,
    render_domain,
)
from ookb.synth import GenProfile, generate_synthetic


def test_minimal_profile_loads():
    d = generate_synthetic(GenProfile(n_classes=1, n_relations=0, skolems_per_rule=0))
    assert d.classes == ("c1",)
    assert parse_kb(render_domain(d)) == d


def test_same_seed_byte_identical():
    p = GenProfile(n_classes=8, n_relations=3, skolems_per_rule=3,
                   eq_density=0.4, cycle_prob=0.3, seed=42,
                   neq_prob=0.2, constraint_prob=0.3, sufficient_prob=0.4,
                   disjoint_prob=0.2, meta_prob=0.3)
    assert render_domain(generate_synthetic(p)) == render_domain(generate_synthetic(p))


def test_different_seeds_differ():
    a = render_domain(generate_synthetic(GenProfile(seed=1, eq_density=0.5)))
    b = render_domain(generate_synthetic(GenProfile(seed=2, eq_density=0.5)))
    assert a != b


def test_infeasible_eq_density():
    with pytest.raises(InfeasibleProfileError):
        generate_synthetic(GenProfile(skolems_per_rule=1, eq_density=0.5))


def test_infeasible_probability_range():
    with pytest.raises(InfeasibleProfileError):
        generate_synthetic(GenProfile(eq_density=1.5, skolems_per_rule=2))


def test_cycle_prob_one_grows_universe():
    d = generate_synthetic(GenProfile(n_classes=3, n_relations=1,
                                      skolems_per_rule=2, cycle_prob=1.0, seed=7))
    i = individual("i")
    seeds = [atom("individual", i), atom("instance_of", i, d.classes[0])]
    sizes = [len(build_universe(d, seeds, max_depth=depth)) for depth in range(4)]
    assert sizes == sorted(sizes)
    assert all(a < b for a, b in zip(sizes, sizes[1:]))


def test_generated_kbs_pass_load_invariants():
    for s in range(10):
        p = GenProfile(n_classes=6, n_relations=2, skolems_per_rule=3,
                       eq_density=0.5, cycle_prob=0.2, seed=s,
                       neq_prob=0.3, constraint_prob=0.4, sufficient_prob=0.4,
                       disjoint_prob=0.2, meta_prob=0.3)
        d = generate_synthetic(p)
        reparsed = parse_kb(render_domain(d))
        assert kb_stats(reparsed) == kb_stats(d)
