"""Cross-validation of the two decompositions against each other and the
exhaustive oracle."""

import pytest
from hypothesis import given, settings, strategies as st

from basincycles import (
    Energy,
    brute_force_path_cycles,
    enumerate_path_cycles,
    make_landscape,
    random_landscape,
    run_decomposition,
    verify_equivalence,
)
from basincycles.equivalence import report_to_dict
from basincycles.errors import TooLarge

E = Energy.from_int


def test_fig1_report(fig1):
    report = verify_equivalence(fig1)
    assert report.set_equal
    assert report.ok
    assert report.cycle_count == 16
    assert report.he_violations == []
    assert report.hm_violations == []
    assert len(report.conditions) == 5  # iterations 0..4
    assert all(r.ok for r in report.conditions)


def test_fig1_exit_height_is_boundary_depth(fig1):
    trace = run_decomposition(fig1)
    big = frozenset("cdefghij")
    # boundary of the big cycle is {b, k}; its floor sits 5 above the ground
    assert trace.exit_heights[big] == E(5)
    assert min(fig1.energy("b"), fig1.energy("k")) - fig1.min_energy(big) == E(5)


def test_single_state_trivially_equal():
    L = make_landscape({"w": 0}, [])
    report = verify_equivalence(L)
    assert report.ok and report.cycle_count == 1


def test_brute_force_fig1(fig1):
    sets = brute_force_path_cycles(fig1)
    assert sets == enumerate_path_cycles(fig1).member_sets()
    assert len(sets) == 16


def test_brute_force_two_state(two_state):
    assert brute_force_path_cycles(two_state) == {
        frozenset("x"),
        frozenset("y"),
        frozenset("xy"),
    }


def test_brute_force_guard():
    ids = {f"s{i}": 0 for i in range(21)}
    edges = [(f"s{i}", f"s{i+1}") for i in range(20)]
    big = make_landscape(ids, edges)
    with pytest.raises(TooLarge):
        brute_force_path_cycles(big)


def test_flat_landscape_equivalence():
    L = make_landscape({s: 2 for s in "pqrst"}, [("p", "q"), ("q", "r"), ("r", "s"), ("s", "t")])
    report = verify_equivalence(L)
    assert report.ok
    # only the singletons and the whole space: a flat chain has no inner cycle
    assert report.cycle_count == 6


def test_tie_rich_equivalence():
    # two equal-depth wells separated by a plateau at the common top
    L = make_landscape(
        {"u": 0, "v": 3, "w": 3, "x": 0, "y": 1},
        [("u", "v"), ("v", "w"), ("w", "x"), ("x", "y")],
    )
    report = verify_equivalence(L)
    assert report.ok


def test_random_corpus_small():
    for i in range(200):
        L = random_landscape(seed=1_000_000 + i)
        report = verify_equivalence(L)
        assert report.ok, (i, report_to_dict(report))


def test_report_dict_shape(fig1):
    doc = report_to_dict(verify_equivalence(fig1))
    assert doc["ok"] and doc["set_equal"] and doc["cycles"] == 16
    assert doc["he_violations"] == [] and doc["hm_violations"] == []
    assert [c["iteration"] for c in doc["conditions"]] == [0, 1, 2, 3, 4]


@settings(max_examples=120, deadline=None)
@given(st.data())
def test_equivalence_random(data):
    n = data.draw(st.integers(2, 8))
    energies = data.draw(st.lists(st.integers(0, 6), min_size=n, max_size=n))
    parents = [data.draw(st.integers(0, i - 1)) for i in range(1, n)]
    extra = data.draw(
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=10)
    )
    ids = [f"s{i}" for i in range(n)]
    edges = {frozenset((ids[i], ids[p])) for i, p in enumerate(parents, start=1)}
    edges.update(frozenset((ids[a], ids[b])) for a, b in extra if a != b)
    L = make_landscape(
        {ids[i]: energies[i] for i in range(n)},
        sorted(tuple(sorted(e)) for e in edges),
    )
    report = verify_equivalence(L)
    assert report.ok, report_to_dict(report)
    # strict separation of the two height functionals on non-singletons
    trace = run_decomposition(L)
    for cyc in trace.cycles:
        if len(cyc) > 1 and cyc != frozenset(ids):
            assert trace.merge_heights[cyc] < trace.exit_heights[cyc]


def test_generator_parameters():
    for seed in range(30):
        L = random_landscape(seed=seed, min_states=3, max_states=5, max_energy=2)
        assert 3 <= L.n <= 5
        assert all(L.energy(s) <= E(2) for s in L.states)
