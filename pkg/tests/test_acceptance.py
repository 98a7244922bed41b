"""Acceptance suite.

One test per criterion; each prints an ``ACCEPTANCE n: PASS/FAIL`` line
(visible with ``pytest -s`` or in captured output).  Tolerances are pinned
here and nowhere else:

1. golden 11-state example, exact integer arithmetic, < 1 s;
2. equivalence over >= 1000 random landscapes, exact, < 2 min;
3. sweep vs exhaustive oracle on the same corpus, exact, < 2 min;
4. structural invariants on the same corpus, exact;
5. exit-window law on the two-state well at beta 2 and 3 (fraction >= 0.90
   at beta 3, monotone in beta, log-median within +-0.6 of the depth);
6. visit-before-exit law (fractions >= 0.95 and >= 0.90), < 1 min;
7. repeating any randomized step with the same seed is byte-identical.
"""

import json
import time
from contextlib import contextmanager

import pytest

from basincycles import (
    brute_force_path_cycles,
    check_exit_window,
    check_visit_before_exit,
    dumps_landscape,
    enumerate_path_cycles,
    random_landscape,
    run_decomposition,
    verify_equivalence,
)
from basincycles.cli import main
from basincycles.equivalence import report_to_dict

from conftest import FIG1_PATH

FIG1 = str(FIG1_PATH)
CORPUS_SEED = 424242
CORPUS_SIZE = 1000
SIM_SEED = 20260810


@contextmanager
def criterion(number, label):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} [{label}]: FAIL")
        raise
    elapsed = time.perf_counter() - started
    print(f"ACCEPTANCE {number} [{label}]: PASS ({elapsed:.1f}s)")


def corpus_landscape(index):
    return random_landscape(
        seed=CORPUS_SEED * 1_000_003 + index,
        min_states=2,
        max_states=10,
        max_energy=6,
    )


@pytest.fixture(scope="module")
def corpus():
    return [corpus_landscape(i) for i in range(CORPUS_SIZE)]


def test_criterion_1_golden_example(capsys):
    with capsys.disabled(), criterion(1, "golden example, exact"):
        started = time.perf_counter()
        code = main(["graph-cycles", FIG1, "--iterations", "--out", "/dev/null"])
        elapsed = time.perf_counter() - started
        assert code == 0
        assert elapsed < 1.0, f"took {elapsed:.2f}s"

        from basincycles import load_landscape

        trace = run_decomposition(load_landscape(FIG1_PATH.read_text()))
        doc = json.loads(json.dumps(_trace_doc(trace)))  # plain-data view

        level0 = doc["levels"][0]
        cost0 = _cost_map(level0)
        for pair, want in {
            ("a", "b"): "3",
            ("c", "b"): "4",
            ("c", "d"): "1",
            ("f", "g"): "2",
            ("h", "g"): "1",
            ("i", "j"): "1",
            ("i", "h"): "3",
            ("j", "k"): "4",
        }.items():
            assert cost0[((pair[0],), (pair[1],))] == want
        nonzero0 = {k: v for k, v in cost0.items() if v != "0"}
        assert len(nonzero0) == 8

        heights0 = _height_map(level0, "exit_height")
        assert heights0[("a",)] == "3"
        assert heights0[("c",)] == "1"
        assert heights0[("i",)] == "1"
        assert all(heights0[(s,)] == "0" for s in "bdefghjk")

        renorm0 = {k: v for k, v in _cost_map(level0, "renormalized_cost").items() if v != "0"}
        assert renorm0 == {
            (("c",), ("b",)): "3",
            (("f",), ("g",)): "2",
            (("h",), ("g",)): "1",
            (("i",), ("h",)): "2",
            (("j",), ("k",)): "4",
        }

        merge1 = doc["merges"][0]
        assert _sets(merge1["merged"]) == {
            ("a", "b"),
            ("c", "d", "e", "f"),
            ("g",),
            ("h",),
            ("i", "j"),
            ("k",),
        }
        assert _sets(merge1["merged_minimal"]) == {("c", "d", "e", "f"), ("i", "j")}

        level1 = doc["levels"][1]
        assert _sets(level1["classes"]) == {
            ("a",),
            ("b",),
            ("c", "d", "e", "f"),
            ("g",),
            ("h",),
            ("i", "j"),
            ("k",),
        }
        hm1 = _height_map(level1, "merge_height")
        assert hm1[("a",)] == "3"
        assert hm1[("c", "d", "e", "f")] == "1"
        assert hm1[("i", "j")] == "1"
        cost1 = _cost_map(level1)
        for pair, want in {
            (("c", "d", "e", "f"), ("b",)): "4",
            (("c", "d", "e", "f"), ("g",)): "3",
            (("i", "j"), ("h",)): "3",
            (("i", "j"), ("k",)): "5",
            (("b",), ("c", "d", "e", "f")): "0",
            (("g",), ("c", "d", "e", "f")): "0",
            (("h",), ("i", "j")): "0",
            (("k",), ("i", "j")): "0",
        }.items():
            assert cost1[pair] == want

        he1 = _height_map(level1, "exit_height")
        assert he1[("c", "d", "e", "f")] == "3"
        assert he1[("i", "j")] == "3"
        renorm1 = {k: v for k, v in _cost_map(level1, "renormalized_cost").items() if v != "0"}
        assert renorm1 == {
            (("c", "d", "e", "f"), ("b",)): "1",
            (("i", "j"), ("k",)): "2",
            (("h",), ("g",)): "1",
        }
        merge2 = doc["merges"][1]
        assert _sets(merge2["merged"]) == {
            ("a", "b"),
            ("c", "d", "e", "f", "g"),
            ("h", "i", "j"),
            ("k",),
        }
        level2 = doc["levels"][2]
        assert _sets(level2["classes"]) == {
            ("a",),
            ("b",),
            ("c", "d", "e", "f"),
            ("g",),
            ("h", "i", "j"),
            ("k",),
        }
        assert _height_map(level2, "merge_height")[("h", "i", "j")] == "3"

        assert _height_map(level2, "exit_height")[("h", "i", "j")] == "4"
        level3 = doc["levels"][3]
        assert _sets(level3["classes"]) == {
            ("a",),
            ("b",),
            ("c", "d", "e", "f", "g", "h", "i", "j"),
            ("k",),
        }
        big = ("c", "d", "e", "f", "g", "h", "i", "j")
        assert _height_map(level3, "merge_height")[big] == "4"

        assert _height_map(level3, "exit_height")[big] == "5"
        level4 = doc["levels"][4]
        whole = tuple(sorted("abcdefghijk"))
        assert _sets(level4["classes"]) == {whole}
        assert _height_map(level4, "merge_height")[whole] == "5"
        assert _height_map(level4, "exit_height")[whole] == "inf"
        assert doc["iterations"] == 4

        cycles = {tuple(c["members"]) for c in doc["cycles"]}
        singles = {(s,) for s in "abcdefghijk"}
        assert cycles == singles | {
            ("c", "d", "e", "f"),
            ("i", "j"),
            ("h", "i", "j"),
            big,
            whole,
        }
        assert len(cycles) == 16


def _trace_doc(trace):
    from basincycles.graphcycles import trace_to_dict

    return trace_to_dict(trace, include_levels=True)


def _cost_map(level_doc, key="cost"):
    return {
        (tuple(e["from"]), tuple(e["to"])): e["value"] for e in level_doc[key]
    }


def _height_map(level_doc, key):
    return {tuple(e["class"]): e["value"] for e in level_doc[key]}


def _sets(list_of_lists):
    return {tuple(x) for x in list_of_lists}


def test_criterion_2_equivalence_corpus(corpus, capsys):
    with capsys.disabled(), criterion(2, "equivalence theorem, 1000 landscapes"):
        started = time.perf_counter()
        for i, landscape in enumerate(corpus):
            report = verify_equivalence(landscape)
            assert report.set_equal, (i, report_to_dict(report))
            assert not report.he_violations, (i, report.he_violations)
            assert not report.hm_violations, (i, report.hm_violations)
            assert all(r.ok for r in report.conditions), (i, report_to_dict(report))
        assert time.perf_counter() - started < 120


def test_criterion_3_oracle_equivalence(corpus, capsys):
    with capsys.disabled(), criterion(3, "sweep equals exhaustive oracle"):
        started = time.perf_counter()
        for i, landscape in enumerate(corpus):
            swept = enumerate_path_cycles(landscape).member_sets()
            assert swept == brute_force_path_cycles(landscape), i
        assert time.perf_counter() - started < 120


def test_criterion_4_structural_invariants(corpus, capsys):
    with capsys.disabled(), criterion(4, "nesting, non-adjacency, drop, fresh minima"):
        for i, landscape in enumerate(corpus):
            tree = enumerate_path_cycles(landscape)
            sets = sorted(tree.member_sets(), key=len)
            for a_i, small in enumerate(sets):
                for big in sets[a_i + 1 :]:
                    assert not (small & big) or small <= big or big <= small, i
            nontrivial = [n.members for n in tree.nodes if len(n.members) > 1]
            for a in nontrivial:
                for b in nontrivial:
                    if not (a & b):
                        assert not any(
                            landscape.rate(x, y) > 0 for x in a for y in b
                        ), i

            trace = run_decomposition(landscape)
            for k in range(trace.iterations):
                cur, nxt = trace.levels[k], trace.levels[k + 1]
                for cls in set(cur.classes) & set(nxt.classes):
                    assert (
                        nxt.merge_height[cls]
                        == nxt.exit_height[cls]
                        == cur.exit_height[cls]
                    ), i
                assert set(nxt.classes) - set(cur.classes) == set(
                    trace.merges[k].minimal
                ), i


def test_criterion_5_exit_time_law(fig1, capsys):
    with capsys.disabled(), criterion(5, "exit-window law on the i-j well"):
        started = time.perf_counter()
        rows = check_exit_window(
            fig1, {"i", "j"}, [2.0, 3.0], 1.0, 1000, SIM_SEED
        )
        by_key = {(r.beta, r.start): r for r in rows}
        for start in ("i", "j"):
            frac2 = by_key[(2.0, start)].fraction
            frac3 = by_key[(3.0, start)].fraction
            assert frac3 >= 0.90, (start, frac3)
            assert frac3 >= frac2, (start, frac2, frac3)
            log_med = by_key[(3.0, start)].stats.log_median_over_beta
            assert 2.4 <= log_med <= 3.6, (start, log_med)
        assert time.perf_counter() - started < 60


def test_criterion_6_visit_before_exit_law(fig1, capsys):
    with capsys.disabled(), criterion(6, "visit-before-exit law"):
        started = time.perf_counter()
        shallow = check_visit_before_exit(
            fig1, {"i", "j"}, "i", "j", [3.0], 1.0, 1000, SIM_SEED
        )
        assert shallow[0].fraction >= 0.95, shallow[0].fraction
        plateau = check_visit_before_exit(
            fig1, {"c", "d", "e", "f"}, "c", "f", [3.0], 1.0, 1000, SIM_SEED
        )
        assert plateau[0].fraction >= 0.90, plateau[0].fraction
        assert time.perf_counter() - started < 60


def test_criterion_7_determinism(fig1, capsys, tmp_path):
    with capsys.disabled(), criterion(7, "seeded reruns are byte-identical"):
        # corpus regeneration
        first = "".join(dumps_landscape(corpus_landscape(i)) for i in range(100))
        second = "".join(dumps_landscape(corpus_landscape(i)) for i in range(100))
        assert first == second

        # simulation engine rerun (same inputs as criterion 5, smaller batch)
        a = check_exit_window(fig1, {"i", "j"}, [2.0], 1.0, 300, SIM_SEED)
        b = check_exit_window(fig1, {"i", "j"}, [2.0], 1.0, 300, SIM_SEED)
        assert a == b
        va = check_visit_before_exit(fig1, {"i", "j"}, "i", "j", [3.0], 1.0, 300, SIM_SEED)
        vb = check_visit_before_exit(fig1, {"i", "j"}, "i", "j", [3.0], 1.0, 300, SIM_SEED)
        assert va == vb

        # CLI byte-for-byte, randomized subcommands
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        argv = [
            "simulate",
            FIG1,
            "--cycle",
            "i,j",
            "--betas",
            "2,3",
            "--replicas",
            "200",
            "--seed",
            str(SIM_SEED),
            "--start",
            "i",
            "--visit",
            "j",
        ]
        assert main(argv + ["--out", str(out1)]) == 0
        assert main(argv + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

        fuzz = ["fuzz", "--count", "50", "--seed", "42"]
        assert main(fuzz + ["--out", str(out1)]) == 0
        assert main(fuzz + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
