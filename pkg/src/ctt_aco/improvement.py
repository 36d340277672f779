"""Greedy swap-neighbourhood colony that lowers soft cost of a feasible timetable."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .aco import AcoParams, TraceRow, ant_stream, full_trail, reward, select_candidate
from .evaluation import Layout, SwapMove, apply_swap, evaluate
from .model import Instance, Timetable

IMPROVE_PHASE = 1

__all__ = [
    "ImprovementResult", "ImproveWalkResult", "InfeasibleTimetableError", "Layout", "SwapMove",
    "admissible_best_swaps", "ant_walk_improve", "apply_swap", "improve",
]


class InfeasibleTimetableError(ValueError):
    pass


def _best_swaps(layout: Layout, a: int) -> tuple[list[SwapMove], int]:
    occ = layout.occupant
    ca = occ[a]
    best, moves = 0, []
    for b in range(len(layout)):
        cb = occ[b]
        if b == a or ca == cb:
            continue
        d = layout.delta(a, b)
        if d is None or d > best:
            continue
        if d < best:
            best, moves = d, [SwapMove(a, b)]
        elif d < 0:
            moves.append(SwapMove(a, b))
    return moves, best


def admissible_best_swaps(instance: Instance, layout: Layout, position_a: int) -> list[SwapMove]:
    """Feasibility-preserving, strictly improving swaps from ``position_a`` that tie for lowest quality."""
    if layout.instance is not instance and layout.instance != instance:
        raise ValueError("layout belongs to a different instance")
    return _best_swaps(layout, position_a)[0]


@dataclass
class ImproveWalkResult:
    layout: Layout
    walked: list[SwapMove]

    @property
    def quality(self) -> int:
        return self.layout.quality

    @property
    def timetable(self) -> Timetable:
        return self.layout.timetable()


def ant_walk_improve(layout: Layout, trail, params: AcoParams, rng: np.random.Generator) -> ImproveWalkResult:
    """Visit each event position of ``layout`` once, in random order, applying the best swap.

    Ties among equally good swaps are broken with the trail (heuristic fixed
    at 1). Positions without an improving admissible swap are skipped. The
    input layout is not modified.
    """
    work = layout.copy()
    walked = []
    ones = None
    for a in rng.permutation(work.n_events):
        a = int(a)
        moves, _ = _best_swaps(work, a)
        if not moves:
            continue
        if len(moves) == 1:
            move = moves[0]
        else:
            row = trail.row(a)
            if ones is None or ones.size < len(moves):
                ones = np.ones(len(moves))
            move = moves[select_candidate(row[[m.position_b for m in moves]], ones[:len(moves)],
                                          params.alpha, params.beta, rng)]
        work.apply(move)
        walked.append(move)
    return ImproveWalkResult(work, walked)


@dataclass
class ImprovementResult:
    timetable: Timetable
    quality: int
    initial_quality: int
    runs: int
    cycles: int
    wall_time: float
    trace: list[TraceRow] = field(default_factory=list)


def improve(instance: Instance, feasible: Timetable, params: AcoParams = AcoParams(), seed: int | None = None,
            observer: Callable[[ImproveWalkResult], None] | None = None,
            on_cycle=None) -> ImprovementResult:
    """Chain colony runs, each seeded with the previous best, until ``stall_limit`` runs fail to improve.

    Every run re-initialises its trail to ``t_max`` and performs
    ``improve_cycles`` cycles of ``ants`` walks from the run's input.
    ``observer`` sees every walk result; ``on_cycle(cycle, trail)`` runs after
    each trail update.
    """
    report = evaluate(instance, feasible)
    if not report.feasible:
        raise InfeasibleTimetableError(f"input timetable violates hard constraints: {report.hc}")
    seed = params.seed if seed is None else seed
    start = time.perf_counter()
    best = Layout(instance, feasible)
    g_best = initial = best.quality
    trace: list[TraceRow] = []
    pool = ThreadPoolExecutor(params.workers) if params.workers > 1 else None
    stall = runs = cycle_no = 0

    def out_of_time() -> bool:
        return (params.improve_time_budget is not None
                and time.perf_counter() - start >= params.improve_time_budget)

    try:
        while stall < params.stall_limit and not out_of_time():
            run_input = Layout(instance, best.timetable())
            run_best = run_input
            run_g = None
            if run_input.quality > 0:
                trail = full_trail(run_input.n_events, len(run_input), params.t_min, params.t_max,
                                   params.trail_budget)
                for cycle in range(params.improve_cycles):
                    def walk(ant: int, cycle=cycle) -> ImproveWalkResult:
                        rng = ant_stream(seed, IMPROVE_PHASE, runs, cycle, ant)
                        return ant_walk_improve(run_input, trail, params, rng)
                    ants = range(params.ants)
                    walks = list(pool.map(walk, ants)) if pool else [walk(a) for a in ants]
                    if observer is not None:
                        for w in walks:
                            observer(w)
                    cycle_best = min(walks, key=lambda w: w.quality)
                    c_best = cycle_best.quality
                    if run_g is None or c_best < run_g:
                        run_g = c_best
                    if c_best < run_best.quality:
                        run_best = cycle_best.layout
                    trace.append(TraceRow("improve", cycle_no, c_best, min(g_best, run_best.quality),
                                          (time.perf_counter() - start) * 1e3))
                    cycle_no += 1
                    if run_g == 0:
                        break
                    trail.deposit(((m.position_a, m.position_b) for m in cycle_best.walked),
                                  reward(c_best, run_g, params.reward_variant))
                    trail.evaporate_and_clamp(params.rho)
                    if on_cycle is not None:
                        on_cycle(cycle_no, trail)
                    if out_of_time():
                        break
            runs += 1
            if run_best.quality < g_best:
                g_best, best, stall = run_best.quality, run_best, 0
            else:
                stall += 1
    finally:
        if pool is not None:
            pool.shutdown()
    return ImprovementResult(best.timetable(), g_best, initial, runs, cycle_no,
                             time.perf_counter() - start, trace)
