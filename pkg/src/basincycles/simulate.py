"""Monte Carlo verification of the hitting-time laws.

The sampler runs independent Metropolis chains and records the first step
index at which each chain enters a target set (censored at ``max_steps``).
Replica ``r`` consumes draws only from the stream keyed ``(seed, r)``, so
results are reproducible and independent of batching, replica order, or any
execution parallelism.  Holding steps (the diagonal remainder) count toward
the hitting time.

``beta = 0`` is accepted only by the raw sampler as a diagnostic mode; the
window and visit checks require ``beta > 0`` like every analysis path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .energy import Energy
from .errors import InvalidSpec, NonpositiveBeta, NotACycle, StateOutsideCycle
from .landscape import Landscape, StateSet, exterior_boundary, transition_matrix
from .pathcycles import boundary_floor, is_path_cycle

_MAX_STEP_CAP = 1_000_000_000
_CHUNK = 2048


def _mask64(seed: int) -> int:
    return seed & 0xFFFFFFFFFFFFFFFF


def _subseed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SimulationSpec:
    """One batch of replicas: chain parameters plus the stream seed."""

    landscape: Landscape
    beta: float
    start: str
    target: StateSet
    secondary_target: Optional[str] = None
    max_steps: int = 1_000_000
    replicas: int = 1000
    seed: int = 0

    def validate(self) -> None:
        if self.beta < 0:
            raise InvalidSpec(f"beta must be >= 0, got {self.beta}")
        if self.max_steps < 1:
            raise InvalidSpec("max_steps must be at least 1")
        if self.replicas < 1:
            raise InvalidSpec("replicas must be at least 1")
        if not self.landscape.has_state(self.start):
            raise InvalidSpec(f"unknown start state {self.start!r}")
        if not self.target:
            raise InvalidSpec("target set must be nonempty")
        for s in self.target:
            if not self.landscape.has_state(s):
                raise InvalidSpec(f"unknown target state {s!r}")
        if self.secondary_target is not None and not self.landscape.has_state(
            self.secondary_target
        ):
            raise InvalidSpec(f"unknown secondary target {self.secondary_target!r}")
        if not isinstance(self.seed, int):
            raise InvalidSpec("seed must be an integer")


@dataclass(frozen=True)
class HittingTimeStats:
    """Per-replica hitting times and their summary.

    ``mean``/``median``/fractions are over uncensored samples only (None when
    every replica was censored); censored replicas keep ``samples`` entries
    equal to ``max_steps`` with the flag set.
    """

    beta: float
    replicas: int
    samples: tuple[int, ...]
    censored: tuple[bool, ...]
    censored_count: int
    mean: Optional[float]
    median: Optional[float]
    window: Optional[tuple[float, float]]
    window_fraction: Optional[float]
    log_median_over_beta: Optional[float]
    secondary: Optional[tuple[Optional[int], ...]] = None

    @property
    def all_censored(self) -> bool:
        return self.censored_count == self.replicas


def _summarize(beta, taus, censored, window, secondary) -> HittingTimeStats:
    taus = np.asarray(taus)
    censored = np.asarray(censored)
    alive = taus[~censored]
    mean = float(alive.mean()) if alive.size else None
    median = float(np.median(alive)) if alive.size else None
    fraction = None
    if window is not None and alive.size:
        lo, hi = window
        fraction = float(np.count_nonzero((alive > lo) & (alive < hi)) / alive.size)
    log_med = None
    if beta > 0 and median is not None and median > 0:
        log_med = math.log(median) / beta
    return HittingTimeStats(
        beta=beta,
        replicas=int(taus.size),
        samples=tuple(int(t) for t in taus),
        censored=tuple(bool(c) for c in censored),
        censored_count=int(censored.sum()),
        mean=mean,
        median=median,
        window=window,
        window_fraction=fraction,
        log_median_over_beta=log_med,
        secondary=secondary,
    )


def _run_chains(cum, start_idx, target_mask, sec_idx, max_steps, seed, replicas):
    """Walk ``replicas`` chains in lockstep over per-replica streams.

    Returns (tau, censored, sec) arrays; ``sec[r]`` is the first index at
    which replica r stood on the secondary state (-1 if never, tracked only
    up to the target hit).
    """
    tau = np.full(replicas, max_steps, dtype=np.int64)
    censored = np.ones(replicas, dtype=bool)
    sec = np.full(replicas, -1, dtype=np.int64)

    if sec_idx is not None and sec_idx == start_idx:
        sec[:] = 0
    if target_mask[start_idx]:
        tau[:] = 0
        censored[:] = False
        return tau, censored, sec

    seed = _mask64(seed)
    gens = [np.random.default_rng([seed, r]) for r in range(replicas)]
    alive = np.arange(replicas)
    state = np.full(replicas, start_idx, dtype=np.intp)
    step = 0
    while alive.size and step < max_steps:
        span = min(_CHUNK, max_steps - step)
        draws = np.empty((alive.size, span))
        for i, r in enumerate(alive):
            draws[i] = gens[r].random(span)
        rowsel = np.arange(alive.size)
        for t in range(span):
            rows = cum[state]
            state = (rows <= draws[rowsel, t, None]).sum(axis=1)
            now = step + t + 1
            if sec_idx is not None:
                fresh = (state == sec_idx) & (sec[alive] < 0)
                if fresh.any():
                    sec[alive[fresh]] = now
            hit = target_mask[state]
            if hit.any():
                done = alive[hit]
                tau[done] = now
                censored[done] = False
                keep = ~hit
                alive = alive[keep]
                state = state[keep]
                rowsel = rowsel[keep]
                if alive.size == 0:
                    break
        step += span
    return tau, censored, sec


def simulate_hitting_time(
    spec: SimulationSpec, window: Optional[tuple[float, float]] = None
) -> HittingTimeStats:
    """Sample the first-entry time into ``spec.target`` across replicas."""
    spec.validate()
    landscape = spec.landscape
    kernel = transition_matrix(landscape, spec.beta, allow_zero=True)
    index = {s: i for i, s in enumerate(kernel.states)}
    target_mask = np.zeros(len(kernel.states), dtype=bool)
    for s in spec.target:
        target_mask[index[s]] = True
    sec_idx = index[spec.secondary_target] if spec.secondary_target else None
    tau, censored, sec = _run_chains(
        kernel.cumulative(),
        index[spec.start],
        target_mask,
        sec_idx,
        spec.max_steps,
        spec.seed,
        spec.replicas,
    )
    secondary = None
    if spec.secondary_target is not None:
        secondary = tuple(int(t) if t >= 0 else None for t in sec)
    return _summarize(spec.beta, tau, censored, window, secondary)


def _require_nontrivial_cycle(landscape: Landscape, members: Iterable[str]) -> StateSet:
    cycle = landscape.subset(members)
    if not is_path_cycle(landscape, cycle):
        raise NotACycle(f"{sorted(cycle)} is not a path cycle")
    if landscape.max_energy(cycle) >= boundary_floor(landscape, cycle):
        raise NotACycle(f"{sorted(cycle)} is a trivial cycle (no exit barrier)")
    return cycle


def default_exit_steps(beta: float, cycle_depth: Energy) -> int:
    """Censoring threshold for exit sampling: well past the predicted scale."""
    raw = 100.0 * math.exp(beta * (cycle_depth.to_float() + 1.0))
    if not math.isfinite(raw) or raw >= _MAX_STEP_CAP:
        return _MAX_STEP_CAP
    return max(1, math.ceil(raw))


@dataclass(frozen=True)
class ExitWindowCheck:
    """Exit-time sample for one (beta, start) pair against the window
    ``(exp(beta*(depth - eps)), exp(beta*(depth + eps)))``."""

    beta: float
    start: str
    depth: Energy
    epsilon: float
    stats: HittingTimeStats

    @property
    def fraction(self) -> Optional[float]:
        return self.stats.window_fraction


def check_exit_window(
    landscape: Landscape,
    cycle: Iterable[str],
    beta_list: Sequence[float],
    epsilon: float,
    replicas: int,
    seed: int,
    starts: Optional[Sequence[str]] = None,
    max_steps: Optional[int] = None,
) -> list[ExitWindowCheck]:
    """Fraction of exits inside the predicted window, per beta and start."""
    cycle = _require_nontrivial_cycle(landscape, cycle)
    if epsilon <= 0:
        raise InvalidSpec(f"epsilon must be positive, got {epsilon}")
    for beta in beta_list:
        if beta <= 0:
            raise NonpositiveBeta(f"beta must be > 0, got {beta}")
    depth = boundary_floor(landscape, cycle) - landscape.min_energy(cycle)
    target = exterior_boundary(landscape, cycle)
    if starts is None:
        starts = sorted(cycle)
    else:
        starts = list(starts)
        for s in starts:
            if s not in cycle:
                raise StateOutsideCycle(f"start {s!r} is outside the cycle")

    results = []
    betas = sorted(set(float(b) for b in beta_list))
    gamma = depth.to_float()
    for bi, beta in enumerate(betas):
        steps = max_steps if max_steps is not None else default_exit_steps(beta, depth)
        lo = math.exp(beta * (gamma - epsilon))
        hi = math.exp(beta * (gamma + epsilon))
        for si, start in enumerate(sorted(starts)):
            spec = SimulationSpec(
                landscape=landscape,
                beta=beta,
                start=start,
                target=target,
                max_steps=steps,
                replicas=replicas,
                seed=_subseed(_mask64(seed), 1, bi, si),
            )
            stats = simulate_hitting_time(spec, window=(lo, hi))
            results.append(
                ExitWindowCheck(
                    beta=beta, start=start, depth=depth, epsilon=epsilon, stats=stats
                )
            )
    return results


@dataclass(frozen=True)
class VisitBeforeExitCheck:
    """Fraction of runs reaching the visit state before leaving the cycle and
    within ``exp(beta*(resistance + eps))`` steps."""

    beta: float
    start: str
    visit: str
    resistance: Energy
    epsilon: float
    bound: float
    fraction: float
    stats: HittingTimeStats


def check_visit_before_exit(
    landscape: Landscape,
    cycle: Iterable[str],
    start: str,
    visit: str,
    beta_list: Sequence[float],
    epsilon: float,
    replicas: int,
    seed: int,
) -> list[VisitBeforeExitCheck]:
    """Per-beta fraction of chains that visit ``visit`` before the exterior
    boundary and before the resistance-scale time bound."""
    cycle = _require_nontrivial_cycle(landscape, cycle)
    if epsilon <= 0:
        raise InvalidSpec(f"epsilon must be positive, got {epsilon}")
    for beta in beta_list:
        if beta <= 0:
            raise NonpositiveBeta(f"beta must be > 0, got {beta}")
    for s, what in ((start, "start"), (visit, "visit")):
        if s not in cycle:
            raise StateOutsideCycle(f"{what} state {s!r} is outside the cycle")
    low = landscape.min_energy(cycle)
    resistance = landscape.max_energy(cycle) - low
    target = exterior_boundary(landscape, cycle)

    results = []
    betas = sorted(set(float(b) for b in beta_list))
    for bi, beta in enumerate(betas):
        bound = math.exp(beta * (resistance.to_float() + epsilon))
        steps = _MAX_STEP_CAP if not math.isfinite(bound) else max(1, math.ceil(bound))
        spec = SimulationSpec(
            landscape=landscape,
            beta=beta,
            start=start,
            target=target,
            secondary_target=visit,
            max_steps=min(steps, _MAX_STEP_CAP),
            replicas=replicas,
            seed=_subseed(_mask64(seed), 2, bi),
        )
        stats = simulate_hitting_time(spec)
        hits = sum(
            1 for t in stats.secondary if t is not None and t < bound
        )
        results.append(
            VisitBeforeExitCheck(
                beta=beta,
                start=start,
                visit=visit,
                resistance=resistance,
                epsilon=epsilon,
                bound=bound,
                fraction=hits / replicas,
                stats=stats,
            )
        )
    return results


def sample_single_steps(
    landscape: Landscape, beta: float, start: str, trials: int, seed: int
) -> dict[str, int]:
    """Diagnostic: frequency of each landing state after one step.  Uses one
    shared stream (replica independence is irrelevant for a single step)."""
    kernel = transition_matrix(landscape, beta, allow_zero=True)
    index = {s: i for i, s in enumerate(kernel.states)}
    cum = kernel.cumulative()[index[start]]
    draws = np.random.default_rng(_mask64(seed)).random(trials)
    landed = (cum[None, :] <= draws[:, None]).sum(axis=1)
    counts = np.bincount(landed, minlength=len(kernel.states))
    return {s: int(counts[i]) for i, s in enumerate(kernel.states) if counts[i]}
