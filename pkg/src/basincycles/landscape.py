"""The energy-landscape data model.

A landscape is a finite state set with an exact energy per state and a
symmetric connectivity rate ``q`` on unordered pairs.  Validation enforces:

* symmetry of ``q`` (conflicting directional rates are rejected),
* sub-stochastic rows: for every ``x``, ``sum_y q(x, y) <= 1``,
* irreducibility: the positive-rate graph is connected.

Self-loops are never stored; the diagonal of the Metropolis kernel is the row
remainder.  A landscape is immutable after validation and safe to share
between threads.
"""

from __future__ import annotations

import io
import json
import math
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .energy import DEFAULT_SCALE, INFINITY, Energy, format_exact, parse_exact
from .errors import (
    AsymmetricEdge,
    DisconnectedGraph,
    DuplicateState,
    EmptySet,
    ForeignState,
    MalformedInput,
    NonpositiveBeta,
    RowSumExceedsOne,
    UnknownStateInEdge,
)

StateSet = frozenset


class Landscape:
    """Validated immutable landscape.  Build via :func:`make_landscape` or
    :func:`load_landscape`, not directly."""

    __slots__ = ("states", "scale", "_energy", "_rates", "_adjacency", "_explicit")

    def __init__(self, states, scale, energy, rates, adjacency, explicit):
        self.states: tuple[str, ...] = states
        self.scale: int = scale
        self._energy: dict[str, Energy] = energy
        self._rates: dict[frozenset, Fraction] = rates
        self._adjacency: dict[str, tuple[str, ...]] = adjacency
        self._explicit: frozenset = explicit

    @property
    def n(self) -> int:
        return len(self.states)

    def energy(self, state: str) -> Energy:
        try:
            return self._energy[state]
        except KeyError:
            raise ForeignState(f"unknown state {state!r}") from None

    def energy_value(self, value) -> Energy:
        """Coerce an int (whole energy units), exact string, or Energy to the
        landscape's scale."""
        if isinstance(value, Energy):
            return value
        if isinstance(value, bool) or isinstance(value, float):
            raise MalformedInput(f"energies must be exact, got {value!r}")
        if isinstance(value, int):
            return Energy.from_int(value, self.scale)
        return Energy.parse(value, self.scale)

    def rate(self, x: str, y: str) -> Fraction:
        if x == y:
            return Fraction(0)
        return self._rates.get(frozenset((x, y)), Fraction(0))

    def neighbors(self, state: str) -> tuple[str, ...]:
        try:
            return self._adjacency[state]
        except KeyError:
            raise ForeignState(f"unknown state {state!r}") from None

    def edge_pairs(self) -> list[tuple[str, str]]:
        """All positive-rate unordered pairs, canonically sorted."""
        return sorted(tuple(sorted(pair)) for pair in self._rates)

    def has_state(self, state: str) -> bool:
        return state in self._energy

    def subset(self, members: Iterable[str]) -> StateSet:
        """Validate and freeze a nonempty subset of this landscape's states."""
        got = frozenset(members)
        if not got:
            raise EmptySet("state set must be nonempty")
        for state in got:
            if state not in self._energy:
                raise ForeignState(f"unknown state {state!r}")
        return got

    def min_energy(self, members: Iterable[str]) -> Energy:
        return min((self._energy[x] for x in members), default=INFINITY)

    def max_energy(self, members: Iterable[str]) -> Energy:
        vals = [self._energy[x] for x in members]
        if not vals:
            raise EmptySet("state set must be nonempty")
        return max(vals)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Landscape):
            return NotImplemented
        return (
            set(self.states) == set(other.states)
            and self.scale == other.scale
            and self._energy == other._energy
            and self._rates == other._rates
        )

    def __hash__(self):
        return hash((frozenset(self.states), self.scale))

    def __repr__(self) -> str:
        return f"Landscape({self.n} states, {len(self._rates)} edges, scale={self.scale})"


def make_landscape(energies, edges, scale: int = DEFAULT_SCALE) -> Landscape:
    """Build and validate a landscape.

    ``energies``: mapping id -> int (whole units) | exact string | Energy, or
    an ordered sequence of (id, value) pairs.  ``edges``: iterable of
    ``(x, y)`` or ``(x, y, rate)`` where rate is an exact string, int, or
    Fraction.  Edges without a rate get the uniform default ``1/max_degree``.
    """
    if isinstance(energies, Mapping):
        items = list(energies.items())
    else:
        items = [(str(x), v) for x, v in energies]
    edge_specs = []
    for edge in edges:
        if len(edge) == 2:
            x, y = edge
            edge_specs.append((str(x), str(y), None))
        else:
            x, y, q = edge
            if isinstance(q, str):
                q = parse_exact(q)
            elif isinstance(q, int) and not isinstance(q, bool):
                q = Fraction(q)
            elif not isinstance(q, Fraction):
                raise MalformedInput(f"rates must be exact, got {q!r}")
            edge_specs.append((str(x), str(y), q))
    return _build(items, edge_specs, scale)


def _build(state_items, edge_specs, scale) -> Landscape:
    if not isinstance(scale, int) or scale <= 0:
        raise MalformedInput(f"energy_scale must be a positive integer, got {scale!r}")
    if not state_items:
        raise MalformedInput("landscape has no states")
    states = []
    energy: dict[str, Energy] = {}
    for sid, value in state_items:
        if sid in energy:
            raise DuplicateState(f"state {sid!r} declared twice")
        if isinstance(value, Energy):
            e = value
        elif isinstance(value, bool) or isinstance(value, float):
            raise MalformedInput(f"energy of {sid!r} must be exact, got {value!r}")
        elif isinstance(value, int):
            e = Energy.from_int(value, scale)
        elif isinstance(value, str):
            e = Energy.parse(value, scale)
        else:
            raise MalformedInput(f"energy of {sid!r} must be exact, got {value!r}")
        if e.is_infinite:
            raise MalformedInput(f"energy of {sid!r} must be finite")
        states.append(sid)
        energy[sid] = e

    explicit: dict[frozenset, Fraction] = {}
    defaulted: set[frozenset] = set()
    for x, y, q in edge_specs:
        for sid in (x, y):
            if sid not in energy:
                raise UnknownStateInEdge(f"edge references unknown state {sid!r}")
        if x == y:
            raise MalformedInput(f"self-edge on {x!r}; the diagonal is implicit")
        pair = frozenset((x, y))
        if q is None:
            defaulted.add(pair)
            continue
        if q <= 0 or q > 1:
            raise MalformedInput(f"rate q({x},{y}) = {q} outside (0, 1]")
        if pair in explicit and explicit[pair] != q:
            raise AsymmetricEdge(
                f"conflicting rates for edge {x!r}-{y!r}: {explicit[pair]} vs {q}"
            )
        explicit[pair] = q
    for pair in defaulted & explicit.keys():
        raise AsymmetricEdge(
            f"edge {tuple(sorted(pair))} given both with and without a rate"
        )

    adjacency: dict[str, list[str]] = {s: [] for s in states}
    for pair in list(explicit) + sorted(defaulted, key=sorted):
        x, y = sorted(pair)
        adjacency[x].append(y)
        adjacency[y].append(x)
    max_degree = max((len(v) for v in adjacency.values()), default=0)

    rates: dict[frozenset, Fraction] = dict(explicit)
    if defaulted:
        default_rate = Fraction(1, max_degree)
        for pair in defaulted:
            rates[pair] = default_rate

    row: dict[str, Fraction] = {s: Fraction(0) for s in states}
    for pair, q in rates.items():
        for s in pair:
            row[s] += q
    for s in states:
        if row[s] > 1:
            raise RowSumExceedsOne(f"outgoing rates of {s!r} sum to {row[s]} > 1")

    # irreducibility of the positive-rate graph
    seen = {states[0]}
    stack = [states[0]]
    while stack:
        for nbr in adjacency[stack.pop()]:
            if nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    if len(seen) != len(states):
        missing = sorted(set(states) - seen)[:3]
        raise DisconnectedGraph(f"states unreachable from {states[0]!r}: {missing}...")

    adj = {s: tuple(sorted(adjacency[s])) for s in states}
    return Landscape(
        tuple(states), scale, energy, rates, adj, frozenset(explicit.keys())
    )


# -- file format -------------------------------------------------------------


def load_landscape(source, format: str = "json") -> Landscape:
    """Parse a landscape document from a path, byte/str content, or stream."""
    if format != "json":
        raise MalformedInput(f"unsupported format {format!r}")
    if isinstance(source, (bytes, bytearray)):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    else:
        raise MalformedInput(f"cannot read landscape from {type(source).__name__}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedInput("top level must be an object")

    scale = doc.get("energy_scale", DEFAULT_SCALE)
    raw_states = doc.get("states")
    if not isinstance(raw_states, list):
        raise MalformedInput("missing or invalid 'states' list")
    state_items = []
    for entry in raw_states:
        if not isinstance(entry, dict) or "id" not in entry or "energy" not in entry:
            raise MalformedInput(f"state entries need 'id' and 'energy': {entry!r}")
        value = entry["energy"]
        if not isinstance(value, (str, int)) or isinstance(value, bool):
            raise MalformedInput(
                f"energy of {entry['id']!r} must be a decimal string or integer"
            )
        state_items.append((str(entry["id"]), value))

    raw_edges = doc.get("edges", [])
    if not isinstance(raw_edges, list):
        raise MalformedInput("'edges' must be a list")
    edge_specs = []
    for entry in raw_edges:
        if isinstance(entry, list) and len(entry) == 2:
            edge_specs.append((str(entry[0]), str(entry[1]), None))
        elif isinstance(entry, dict) and "pair" in entry:
            pair = entry["pair"]
            if not isinstance(pair, list) or len(pair) != 2:
                raise MalformedInput(f"edge 'pair' must be a two-element list: {entry!r}")
            q = entry.get("q")
            if q is None:
                edge_specs.append((str(pair[0]), str(pair[1]), None))
            else:
                if not isinstance(q, (str, int)) or isinstance(q, bool):
                    raise MalformedInput("edge rate 'q' must be a decimal string or integer")
                edge_specs.append((str(pair[0]), str(pair[1]), parse_exact(str(q))))
        else:
            raise MalformedInput(f"unrecognized edge entry: {entry!r}")

    return _build(state_items, edge_specs, scale)


def dumps_landscape(landscape: Landscape) -> str:
    """Canonical document: sorted states and edges, exact value strings.
    Round-trips bit-exactly through :func:`load_landscape`."""
    states = [
        {"id": s, "energy": str(landscape.energy(s))}
        for s in sorted(landscape.states)
    ]
    edges = []
    for x, y in landscape.edge_pairs():
        pair = frozenset((x, y))
        if pair in landscape._explicit:
            edges.append({"pair": [x, y], "q": format_exact(landscape.rate(x, y))})
        else:
            edges.append([x, y])
    doc = {"energy_scale": landscape.scale, "states": states, "edges": edges}
    return json.dumps(doc, indent=2) + "\n"


# -- elementary set geometry ---------------------------------------------------


def exterior_boundary(landscape: Landscape, members: Iterable[str]) -> StateSet:
    """States outside the set with a positive-rate edge into it."""
    inside = landscape.subset(members)
    out = set()
    for x in inside:
        for y in landscape.neighbors(x):
            if y not in inside:
                out.add(y)
    return frozenset(out)


def ground(landscape: Landscape, members: Iterable[str]) -> StateSet:
    """The states of the set attaining its minimal energy."""
    inside = landscape.subset(members)
    floor = landscape.min_energy(inside)
    return frozenset(x for x in inside if landscape.energy(x) == floor)


def is_connected_subset(landscape: Landscape, members: Iterable[str]) -> bool:
    """True iff every pair of members is joined by a path inside the set."""
    inside = landscape.subset(members)
    start = next(iter(inside))
    seen = {start}
    stack = [start]
    while stack:
        for nbr in landscape.neighbors(stack.pop()):
            if nbr in inside and nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    return len(seen) == len(inside)


# -- Metropolis kernel ---------------------------------------------------------


class TransitionMatrix:
    """Row-stochastic transition matrix over the landscape's states."""

    __slots__ = ("states", "matrix", "_index")

    def __init__(self, states: tuple[str, ...], matrix: np.ndarray):
        self.states = states
        self.matrix = matrix
        self._index = {s: i for i, s in enumerate(states)}

    def prob(self, x: str, y: str) -> float:
        return float(self.matrix[self._index[x], self._index[y]])

    def row(self, x: str) -> np.ndarray:
        return self.matrix[self._index[x]]

    def cumulative(self) -> np.ndarray:
        """Per-row cumulative distributions with the last column pinned to 1."""
        cum = np.cumsum(self.matrix, axis=1)
        cum[:, -1] = 1.0
        return cum


def transition_matrix(landscape: Landscape, beta: float, allow_zero: bool = False) -> TransitionMatrix:
    if beta < 0 or (beta == 0 and not allow_zero):
        raise NonpositiveBeta(f"beta must be > 0, got {beta}")
    states = landscape.states
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    mat = np.zeros((n, n), dtype=np.float64)
    for i, x in enumerate(states):
        hx = landscape.energy(x)
        for y in landscape.neighbors(x):
            climb = (landscape.energy(y) - hx).clamp_nonneg()
            mat[i, index[y]] = float(landscape.rate(x, y)) * math.exp(
                -beta * climb.to_float()
            )
        mat[i, i] = max(0.0, 1.0 - mat[i].sum())
    return TransitionMatrix(states, mat)


def metropolis_kernel(landscape: Landscape, beta: float) -> TransitionMatrix:
    """The Metropolis chain at inverse temperature ``beta > 0``:
    off-diagonal ``q(x,y) * exp(-beta * (H(y) - H(x))^+)``, diagonal as the
    row remainder."""
    return transition_matrix(landscape, beta, allow_zero=False)
