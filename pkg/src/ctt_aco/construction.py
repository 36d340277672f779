"""Min-max ant system that builds hard-feasible timetables."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .aco import AcoParams, PheromoneMatrix, TraceRow, ant_stream, reward, select_candidate
from .evaluation import N_HARD
from .model import Event, Instance, Timetable

CONSTRUCT_PHASE = 0


class InfeasibleInstanceError(ValueError):
    pass


@dataclass
class ConstructionGraph:
    """Course -> room-period edges.

    An edge exists when the course is available in the period and the room
    leaves at most one student without a seat. Courses with no such room fall
    back to every room in their available periods (listed in ``relaxed``).
    """

    instance: Instance
    edges: np.ndarray  # bool, courses x room-periods
    relaxed: frozenset[int]

    @property
    def n_rooms(self) -> int:
        return len(self.instance.rooms)

    @property
    def slot_period(self) -> np.ndarray:
        return np.arange(self.edges.shape[1]) // self.n_rooms

    def edge_list(self, course: int) -> np.ndarray:
        return self._edge_lists[course]

    def __post_init__(self) -> None:
        self._edge_lists = [np.flatnonzero(row) for row in self.edges]


def build_construction_graph(instance: Instance) -> ConstructionGraph:
    R, P = len(instance.rooms), instance.n_periods
    cap = np.array([r.capacity for r in instance.rooms])
    edges = np.zeros((len(instance.courses), P * R), dtype=bool)
    relaxed = set()
    for c, course in enumerate(instance.courses):
        available = np.ones(P, dtype=bool)
        available[list(instance.unavailable[c])] = False
        if not available.any():
            raise InfeasibleInstanceError(f"course {course.id} has no available period")
        fits = np.maximum(0, course.students - cap) <= 1
        if not fits.any():
            fits[:] = True
            relaxed.add(c)
        edges[c] = np.outer(available, fits).ravel()
    return ConstructionGraph(instance, edges, frozenset(relaxed))


@dataclass
class AntWalkResult:
    timetable: Timetable
    hard_violations: int
    walked_edges: list[tuple[int, int, bool]]


class _WalkState:
    """Occupancy counts of a partial timetable, vectorised per course."""

    def __init__(self, instance: Instance, graph: ConstructionGraph) -> None:
        P = instance.n_periods
        self.slot_busy = np.zeros(graph.edges.shape[1], dtype=np.int32)
        self.teacher_busy = np.zeros((len(instance.teachers), P), dtype=np.int32)
        self.curr_busy = np.zeros((max(1, len(instance.curricula)), P), dtype=np.int32)
        self.unavail = np.zeros((len(instance.courses), P), dtype=np.int32)
        for c, u in enumerate(instance.unavailable):
            self.unavail[c, list(u)] = 1

    def hard_delta(self, instance: Instance, course: int, slots: np.ndarray, periods: np.ndarray) -> np.ndarray:
        d = (self.slot_busy[slots] > 0).astype(np.int32)
        d += self.teacher_busy[instance.teacher_of[course], periods] > 0
        for q in instance.curricula_of[course]:
            d += self.curr_busy[q, periods] > 0
        d += self.unavail[course, periods]
        return d

    def place(self, instance: Instance, course: int, slot: int, period: int) -> None:
        self.slot_busy[slot] += 1
        self.teacher_busy[instance.teacher_of[course], period] += 1
        for q in instance.curricula_of[course]:
            self.curr_busy[q, period] += 1


def ant_walk_construct(graph: ConstructionGraph, trail: PheromoneMatrix, params: AcoParams,
                       rng: np.random.Generator) -> AntWalkResult:
    """One ant assigns every lecture of every course, courses in random order.

    Candidates are the edge-admitted room-periods adding no hard violation
    (heuristic 5). If there are none, all edge-admitted room-periods compete
    with heuristic ``5 - added violations`` and the chosen edge is flagged.
    """
    instance = graph.instance
    R = graph.n_rooms
    state = _WalkState(instance, graph)
    events: list[Event] = []
    walked: list[tuple[int, int, bool]] = []
    hard = 0
    for c in rng.permutation(len(instance.courses)):
        c = int(c)
        slots = graph.edge_list(c)
        periods = slots // R
        for _ in range(instance.courses[c].lectures):
            delta = state.hard_delta(instance, c, slots, periods)
            ok = delta == 0
            if ok.any():
                cand = slots[ok]
                heur = np.full(cand.size, float(N_HARD))
                violated = False
            else:
                cand = slots
                heur = np.maximum(0, N_HARD - delta).astype(float)
                violated = True
            k = select_candidate(trail.values[c, cand], heur, params.alpha, params.beta, rng)
            slot = int(cand[k])
            if violated:
                hard += int(delta[k])
            period = slot // R
            state.place(instance, c, slot, period)
            events.append(Event(c, slot % R, period))
            walked.append((c, slot, violated))
    return AntWalkResult(Timetable(events), hard, walked)


def update_trail(trail: PheromoneMatrix, best: AntWalkResult, g_best: float, c_best: float,
                 variant: str = "paper_eq2") -> PheromoneMatrix:
    """Elitist deposit on every walked edge that did not cause a violation."""
    amount = reward(c_best, g_best, variant)
    trail.deposit(((c, s) for c, s, violated in best.walked_edges if not violated), amount)
    return trail


@dataclass
class ConstructionResult:
    timetable: Timetable
    hard_violations: int
    feasible: bool
    cycles: int
    wall_time: float
    trace: list[TraceRow] = field(default_factory=list)
    reason: str = "feasible"


def construct_feasible(instance: Instance, params: AcoParams = AcoParams(), seed: int | None = None,
                       graph: ConstructionGraph | None = None, on_cycle=None) -> ConstructionResult:
    """Run colony cycles until an ant finds a timetable without hard violations.

    Stops with ``feasible=False`` and the best timetable seen once
    ``max_cycles`` or ``time_budget`` is exhausted (checked between cycles).
    ``on_cycle(cycle, trail)`` is called after each cycle's trail update.
    """
    seed = params.seed if seed is None else seed
    graph = graph or build_construction_graph(instance)
    trail = PheromoneMatrix(graph.edges, params.t_min, params.t_max)
    start = time.perf_counter()
    g_best = None
    best_walk: AntWalkResult | None = None
    trace: list[TraceRow] = []
    pool = ThreadPoolExecutor(params.workers) if params.workers > 1 else None

    def walk(cycle: int, ant: int) -> AntWalkResult:
        return ant_walk_construct(graph, trail, params, ant_stream(seed, CONSTRUCT_PHASE, 0, cycle, ant))

    cycle = 0
    try:
        while True:
            if params.max_cycles is not None and cycle >= params.max_cycles:
                reason = "max_cycles"
                break
            if params.time_budget is not None and time.perf_counter() - start >= params.time_budget:
                reason = "time_budget"
                break
            ants = range(params.ants)
            walks = list(pool.map(lambda a: walk(cycle, a), ants)) if pool else [walk(cycle, a) for a in ants]
            cycle_best = min(walks, key=lambda w: w.hard_violations)
            c_best = cycle_best.hard_violations
            if g_best is None or c_best < g_best:
                g_best, best_walk = c_best, cycle_best
            trace.append(TraceRow("construct", cycle, c_best, g_best, (time.perf_counter() - start) * 1e3))
            cycle += 1
            if g_best == 0:
                reason = "feasible"
                break
            update_trail(trail, cycle_best, g_best, c_best, params.reward_variant)
            trail.evaporate_and_clamp(params.rho)
            if on_cycle is not None:
                on_cycle(cycle, trail)
    finally:
        if pool is not None:
            pool.shutdown()
    if best_walk is None:
        return ConstructionResult(Timetable(), instance.total_lectures, False, 0,
                                  time.perf_counter() - start, trace, reason)
    return ConstructionResult(best_walk.timetable, g_best, g_best == 0, cycle,
                              time.perf_counter() - start, trace, reason)
