"""Path cycles: sub-level components of the energy landscape.

A nonempty set is a path cycle when it is a singleton, or when it is
connected and its internal maximum lies strictly below the floor of its
exterior boundary.  Every connected component of a sub-level set
``{x : H(x) <= c}`` is a cycle, and any two cycles are nested or disjoint,
so the full family forms a tree over the state space.

The enumeration sweeps distinct energy values in ascending order while
merging components with a union-find structure; all states of one energy
value are activated together before components are snapshotted, which is
what keeps flat plateaus from emitting spurious sub-plateau sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .energy import INFINITY, Energy
from .errors import LevelBelowStart, NotACycle
from .landscape import Landscape, StateSet, exterior_boundary, ground, is_connected_subset


def set_key(members: Iterable[str]) -> tuple[str, ...]:
    """Canonical sort key for a state set."""
    return tuple(sorted(members))


def boundary_floor(landscape: Landscape, members: StateSet) -> Energy:
    """Minimal energy on the exterior boundary; INFINITY for the whole space."""
    return landscape.min_energy(exterior_boundary(landscape, members))


def is_path_cycle(landscape: Landscape, members: Iterable[str]) -> bool:
    """Singleton, or connected with max energy strictly below the boundary floor."""
    inside = landscape.subset(members)
    if len(inside) == 1:
        return True
    if not is_connected_subset(landscape, inside):
        return False
    return landscape.max_energy(inside) < boundary_floor(landscape, inside)


def sublevel_component(landscape: Landscape, start: str, cutoff) -> StateSet:
    """States reachable from ``start`` along paths at energy <= ``cutoff``.

    Always a cycle (possibly the singleton).  Cutoffs between two landscape
    energy values behave like the largest value not above them.
    """
    level = landscape.energy_value(cutoff)
    if level < landscape.energy(start):
        raise LevelBelowStart(
            f"cutoff {level} below the energy of {start!r} ({landscape.energy(start)})"
        )
    seen = {start}
    stack = [start]
    while stack:
        for nbr in landscape.neighbors(stack.pop()):
            if nbr not in seen and landscape.energy(nbr) <= level:
                seen.add(nbr)
                stack.append(nbr)
    return frozenset(seen)


@dataclass(eq=False)
class CycleNode:
    """One cycle of the tree with its derived quantities.

    ``depth`` is the boundary floor minus the internal minimum (the barrier
    seen on exit; INFINITY for the root, and possibly <= 0 for a singleton
    that is not a local minimum).  ``resistance`` is the internal maximum
    minus the internal minimum.
    """

    members: StateSet
    depth: Energy
    resistance: Energy
    ground: StateSet
    boundary_floor: Energy
    nontrivial: bool
    parent: Optional["CycleNode"] = None
    children: list["CycleNode"] = field(default_factory=list)

    def __repr__(self) -> str:
        return f"CycleNode({{{','.join(sorted(self.members))}}})"


class CycleTree:
    """All path cycles of a landscape, nested-or-disjoint, rooted at the
    whole space."""

    def __init__(self, root: CycleNode, nodes: tuple[CycleNode, ...]):
        self.root = root
        self.nodes = nodes
        self._by_members = {node.members: node for node in nodes}

    def node(self, members: Iterable[str]) -> CycleNode:
        got = frozenset(members)
        try:
            return self._by_members[got]
        except KeyError:
            raise NotACycle(f"{sorted(got)} is not a cycle of this landscape") from None

    def member_sets(self) -> set[StateSet]:
        return set(self._by_members)

    def __len__(self) -> int:
        return len(self.nodes)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return ra


def _sweep_components(landscape: Landscape) -> list[StateSet]:
    """Every connected component of every sub-level set, each exactly once,
    in ascending order of the level that created it."""
    states = landscape.states
    index = {s: i for i, s in enumerate(states)}
    by_level: dict[Energy, list[str]] = {}
    for s in states:
        by_level.setdefault(landscape.energy(s), []).append(s)

    uf = _UnionFind(len(states))
    comp_members: dict[int, set[str]] = {}
    active: set[str] = set()
    emitted: list[StateSet] = []

    for level in sorted(by_level):
        fresh = by_level[level]
        for s in fresh:
            comp_members[index[s]] = {s}
        active.update(fresh)
        # all states of this energy join before any component is judged
        for s in fresh:
            for nbr in landscape.neighbors(s):
                if nbr in active:
                    ra, rb = uf.find(index[s]), uf.find(index[nbr])
                    if ra != rb:
                        merged = uf.union(ra, rb)
                        other = rb if merged == ra else ra
                        comp_members[merged].update(comp_members.pop(other))
        dirty = {uf.find(index[s]) for s in fresh}
        for root in sorted(dirty, key=lambda r: set_key(comp_members[r])):
            emitted.append(frozenset(comp_members[root]))
    return emitted


def enumerate_path_cycles(landscape: Landscape) -> CycleTree:
    """Every path cycle of the landscape, organized as a nested tree.

    Non-singleton cycles come out of the sub-level sweep; every singleton is
    added as a leaf (flagged trivial when the state is not a local minimum);
    the root is the whole space.
    """
    sets: dict[StateSet, None] = {}
    for comp in _sweep_components(landscape):
        if len(comp) > 1:
            sets[comp] = None
    for s in landscape.states:
        sets[frozenset((s,))] = None
    whole = frozenset(landscape.states)
    sets[whole] = None

    ordered = sorted(sets, key=lambda m: (len(m), set_key(m)))
    nodes: list[CycleNode] = []
    for members in ordered:
        floor = boundary_floor(landscape, members)
        low = landscape.min_energy(members)
        high = landscape.max_energy(members)
        nodes.append(
            CycleNode(
                members=members,
                depth=floor - low,
                resistance=high - low,
                ground=ground(landscape, members),
                boundary_floor=floor,
                nontrivial=len(members) > 1 or high < floor,
            )
        )

    # smallest strict superset = parent; the family is laminar so this is
    # unambiguous and the ascending size order makes the first hit smallest
    for i, node in enumerate(nodes):
        for candidate in nodes[i + 1 :]:
            if len(candidate.members) > len(node.members) and node.members < candidate.members:
                node.parent = candidate
                candidate.children.append(node)
                break
    root = nodes[-1]
    for node in nodes:
        node.children.sort(key=lambda c: set_key(c.members))
    return CycleTree(root, tuple(nodes))


def depth(landscape: Landscape, members: Iterable[str]) -> Energy:
    """Boundary floor minus internal minimum; INFINITY for the whole space."""
    inside = landscape.subset(members)
    if not is_path_cycle(landscape, inside):
        raise NotACycle(f"{sorted(inside)} is not a path cycle")
    return boundary_floor(landscape, inside) - landscape.min_energy(inside)


def resistance_height(landscape: Landscape, members: Iterable[str]) -> Energy:
    """Internal maximum minus internal minimum."""
    inside = landscape.subset(members)
    if not is_path_cycle(landscape, inside):
        raise NotACycle(f"{sorted(inside)} is not a path cycle")
    return landscape.max_energy(inside) - landscape.min_energy(inside)


# -- export --------------------------------------------------------------------


def tree_to_dict(tree: CycleTree) -> dict:
    order = {node.members: i for i, node in enumerate(tree.nodes)}
    nodes = []
    for node in tree.nodes:
        nodes.append(
            {
                "members": list(set_key(node.members)),
                "gamma": str(node.depth),
                "gamma_tilde": str(node.resistance),
                "ground": list(set_key(node.ground)),
                "parent_index": order[node.parent.members] if node.parent else None,
            }
        )
    return {"nodes": nodes}


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def tree_to_dot(tree: CycleTree, graph_name: str = "cycles") -> str:
    """Graph-description text: one node per cycle, edges parent -> child."""
    order = {node.members: i for i, node in enumerate(tree.nodes)}
    lines = [f"digraph {graph_name} {{"]
    lines.append('  node [shape=box, fontname="monospace"];')
    for node in tree.nodes:
        label = _dot_escape("{" + ",".join(set_key(node.members)) + "}")
        lines.append(
            f'  n{order[node.members]} [label="{label}\\n'
            f'Γ={node.depth}, Γ̃={node.resistance}"];'
        )
    for node in tree.nodes:
        for child in node.children:
            lines.append(f"  n{order[node.members]} -> n{order[child.members]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
