"""Cross-validation of the two cycle decompositions.

For a valid landscape with the Metropolis seed, the family of graph cycles
must equal the family of path cycles, the exit height of every cycle must
equal its boundary depth clamped at zero, and the merge height of every
non-singleton must equal its internal height.  ``verify_equivalence`` checks
all of that mechanically and also re-derives, round by round, the structural
conditions the recursion is supposed to maintain.

``brute_force_path_cycles`` is the independent oracle: an exhaustive bitmask
scan over connected subsets that shares no code with the sweep enumeration.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .energy import DEFAULT_SCALE, INFINITY, Energy
from .errors import TooLarge
from .graphcycles import DecompositionTrace, run_decomposition
from .landscape import Landscape, StateSet, make_landscape
from .pathcycles import enumerate_path_cycles, is_path_cycle, set_key

_BRUTE_FORCE_LIMIT = 20


def brute_force_path_cycles(landscape: Landscape) -> set[StateSet]:
    """Exhaustive oracle: every connected subset whose internal maximum lies
    strictly below its boundary floor, plus all singletons.

    Deliberately re-derives connectivity and boundaries from bitmasks so that
    it shares nothing with the sweep algorithm.
    """
    n = landscape.n
    if n > _BRUTE_FORCE_LIMIT:
        raise TooLarge(f"{n} states exceeds the exhaustive-scan guard")
    states = sorted(landscape.states)
    pos = {s: i for i, s in enumerate(states)}
    energies = [landscape.energy(s) for s in states]
    nbr_mask = [0] * n
    for s in states:
        for t in landscape.neighbors(s):
            nbr_mask[pos[s]] |= 1 << pos[t]

    found: set[StateSet] = set()
    for mask in range(1, 1 << n):
        bits = [i for i in range(n) if mask >> i & 1]
        if len(bits) == 1:
            found.add(frozenset((states[bits[0]],)))
            continue
        # connectivity by flood fill inside the mask
        reached = 1 << bits[0]
        frontier = reached
        while frontier:
            grow = 0
            f = frontier
            while f:
                i = (f & -f).bit_length() - 1
                f &= f - 1
                grow |= nbr_mask[i] & mask
            frontier = grow & ~reached
            reached |= grow
        if reached != mask:
            continue
        inner_max = max(energies[i] for i in bits)
        outside = 0
        for i in bits:
            outside |= nbr_mask[i] & ~mask
        ok = True
        while outside:
            i = (outside & -outside).bit_length() - 1
            outside &= outside - 1
            if energies[i] <= inner_max:
                ok = False
                break
        if ok:
            found.add(frozenset(states[i] for i in bits))
    return found


def random_landscape(
    seed=None,
    rng: random.Random | None = None,
    min_states: int = 2,
    max_states: int = 10,
    max_energy: int = 6,
    extra_edge_prob: float = 0.25,
    scale: int = DEFAULT_SCALE,
) -> Landscape:
    """A random connected landscape: spanning tree plus extra edges, with
    small-integer energies so plateaus and exact ties occur constantly."""
    if rng is None:
        rng = random.Random(seed)
    n = rng.randint(min_states, max_states)
    ids = [f"s{i}" for i in range(n)]
    energies = {sid: rng.randint(0, max_energy) for sid in ids}
    edges = {frozenset((ids[i], ids[rng.randrange(i)])) for i in range(1, n)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < extra_edge_prob:
                edges.add(frozenset((ids[i], ids[j])))
    order = list(ids)
    rng.shuffle(order)
    edge_list = sorted(tuple(sorted(e)) for e in edges)
    rng.shuffle(edge_list)
    return make_landscape([(sid, energies[sid]) for sid in order], edge_list, scale)


@dataclass
class ConditionRecord:
    """Pass/fail of the per-round structural conditions.

    ``classes_are_cycles``: every class is a path cycle.
    ``boundary_costs_ok``: for a non-singleton class connected to a singleton
    class, the cost out equals the climb from the class floor and the cost in
    is zero.  ``exit_heights_ok``: exit height equals boundary depth clamped
    at zero.  ``merge_heights_ok``: freshly merged classes carry their
    internal height.
    """

    iteration: int
    classes_are_cycles: bool
    boundary_costs_ok: bool
    exit_heights_ok: bool
    merge_heights_ok: bool

    @property
    def ok(self) -> bool:
        return (
            self.classes_are_cycles
            and self.boundary_costs_ok
            and self.exit_heights_ok
            and self.merge_heights_ok
        )


@dataclass
class EquivalenceReport:
    """Outcome of the cross-validation on one landscape.  Violations are
    collected exhaustively rather than failing fast."""

    set_equal: bool
    graph_only: list[StateSet]
    path_only: list[StateSet]
    he_violations: list[tuple[StateSet, Energy, Energy]]
    hm_violations: list[tuple[StateSet, Energy, Energy]]
    conditions: list[ConditionRecord] = field(default_factory=list)
    cycle_count: int = 0

    @property
    def ok(self) -> bool:
        return (
            self.set_equal
            and not self.he_violations
            and not self.hm_violations
            and all(record.ok for record in self.conditions)
        )


def _expected_exit_height(landscape: Landscape, members: StateSet) -> Energy:
    outside = [
        landscape.energy(y)
        for x in members
        for y in landscape.neighbors(x)
        if y not in members
    ]
    if not outside:
        return INFINITY
    return (min(outside) - landscape.min_energy(members)).clamp_nonneg()


def _check_conditions(landscape: Landscape, trace: DecompositionTrace) -> list[ConditionRecord]:
    zero = Energy(0, landscape.scale)
    records = []
    for level in trace.levels:
        cycles_ok = all(is_path_cycle(landscape, cls) for cls in level.classes)

        costs_ok = True
        singles = [cls for cls in level.classes if len(cls) == 1]
        bigs = [cls for cls in level.classes if len(cls) > 1]
        for big in bigs:
            floor = landscape.min_energy(big)
            for single in singles:
                (a,) = tuple(single)
                touching = any(landscape.rate(x, a) > 0 for x in big)
                if not touching:
                    continue
                expected_out = landscape.energy(a) - floor
                if level.cost_between(big, single) != expected_out:
                    costs_ok = False
                if level.cost_between(single, big) != zero:
                    costs_ok = False

        heights_ok = all(
            level.exit_height[cls] == _expected_exit_height(landscape, cls)
            for cls in level.classes
        )

        merge_ok = True
        if level.index >= 1:
            fresh = trace.merges[level.index - 1].minimal
            for cls in fresh:
                span = landscape.max_energy(cls) - landscape.min_energy(cls)
                if level.merge_height[cls] != span:
                    merge_ok = False

        records.append(
            ConditionRecord(
                iteration=level.index,
                classes_are_cycles=cycles_ok,
                boundary_costs_ok=costs_ok,
                exit_heights_ok=heights_ok,
                merge_heights_ok=merge_ok,
            )
        )
    return records


def verify_equivalence(landscape: Landscape) -> EquivalenceReport:
    """Compare the two cycle families and their height functionals on one
    landscape (Metropolis seed)."""
    tree = enumerate_path_cycles(landscape)
    trace = run_decomposition(landscape)

    path_sets = tree.member_sets()
    graph_sets = trace.cycle_set()
    graph_only = sorted(graph_sets - path_sets, key=set_key)
    path_only = sorted(path_sets - graph_sets, key=set_key)

    he_violations = []
    hm_violations = []
    for cyc in trace.cycles:
        expected = _expected_exit_height(landscape, cyc)
        got = trace.exit_heights[cyc]
        if got != expected:
            he_violations.append((cyc, got, expected))
        got_m = trace.merge_heights[cyc]
        if len(cyc) > 1:
            expected_m = landscape.max_energy(cyc) - landscape.min_energy(cyc)
        else:
            expected_m = trace.exit_heights[cyc]
        if got_m != expected_m:
            hm_violations.append((cyc, got_m, expected_m))

    return EquivalenceReport(
        set_equal=not graph_only and not path_only,
        graph_only=graph_only,
        path_only=path_only,
        he_violations=he_violations,
        hm_violations=hm_violations,
        conditions=_check_conditions(landscape, trace),
        cycle_count=len(trace.cycles),
    )


def report_to_dict(report: EquivalenceReport) -> dict:
    def sets(items):
        return [list(set_key(s)) for s in items]

    return {
        "cycles": report.cycle_count,
        "set_equal": report.set_equal,
        "graph_only": sets(report.graph_only),
        "path_only": sets(report.path_only),
        "he_violations": [
            {"cycle": list(set_key(c)), "got": str(g), "expected": str(e)}
            for c, g, e in report.he_violations
        ],
        "hm_violations": [
            {"cycle": list(set_key(c)), "got": str(g), "expected": str(e)}
            for c, g, e in report.hm_violations
        ],
        "conditions": [
            {
                "iteration": r.iteration,
                "classes_are_cycles": r.classes_are_cycles,
                "boundary_costs_ok": r.boundary_costs_ok,
                "exit_heights_ok": r.exit_heights_ok,
                "merge_heights_ok": r.merge_heights_ok,
            }
            for r in report.conditions
        ],
        "ok": report.ok,
    }
