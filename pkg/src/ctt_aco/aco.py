"""Ant-system pieces shared by the construction and improvement colonies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

REWARD_VARIANTS = ("paper_eq2", "eq3")


@dataclass(frozen=True)
class AcoParams:
    alpha: float = 2.0
    beta: float = 8.0
    rho: float = 0.05
    t_min: float = 0.01
    t_max: float = 10.0
    ants: int = 8
    max_cycles: int | None = None
    time_budget: float | None = 350.0
    reward_variant: str = "paper_eq2"
    seed: int = 0
    stall_limit: int = 10
    improve_cycles: int = 5
    improve_time_budget: float | None = None
    workers: int = 1
    trail_budget: int = 1 << 24

    def __post_init__(self) -> None:
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if not 0.0 <= self.t_min < self.t_max:
            raise ValueError("need 0 <= t_min < t_max")
        if self.ants < 1 or self.stall_limit < 1 or self.improve_cycles < 1 or self.workers < 1:
            raise ValueError("ants, stall_limit, improve_cycles and workers must be positive")
        if self.max_cycles is not None and self.max_cycles < 1:
            raise ValueError("max_cycles must be positive")
        if self.reward_variant not in REWARD_VARIANTS:
            raise ValueError(f"reward_variant must be one of {REWARD_VARIANTS}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


class TraceRow(NamedTuple):
    phase: str
    cycle: int
    best_in_cycle: int
    global_best: int
    elapsed_ms: float


def ant_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one walk, keyed by (phase, run, cycle, ant).

    Streams depend only on the key, never on which worker runs the walk.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


def select_candidate(trails, heuristics, alpha: float, beta: float, rng: np.random.Generator) -> int:
    """Draw index i with probability proportional to ``trail_i**alpha + heuristic_i**beta``.

    The additive weighting is deliberate. Falls back to a uniform draw when
    every weight is zero.
    """
    trails = np.asarray(trails, dtype=float)
    heuristics = np.asarray(heuristics, dtype=float)
    if trails.size == 0:
        raise ValueError("no candidates to select from")
    weights = trails**alpha + heuristics**beta
    total = weights.sum()
    if not total > 0 or not math.isfinite(total):
        return int(rng.integers(trails.size))
    idx = int(np.searchsorted(np.cumsum(weights), rng.random() * total, side="right"))
    return min(idx, trails.size - 1)


def reward(c_best: float, g_best: float, variant: str = "paper_eq2") -> float:
    """Deposit for the cycle-best ant.

    ``paper_eq2``: ``1 / (1 + c_best - g_best)`` when the cycle is worse than
    the global best, 1 otherwise (both branches agree at equality).
    ``eq3``: ``1 / (1 + g_best - c_best)`` as printed; it is undefined at
    ``c_best == g_best + 1``, where the deposit saturates to +inf and the
    subsequent clamp pins the edge at ``t_max``.
    """
    if variant == "paper_eq2":
        return 1.0 / (1.0 + c_best - g_best) if c_best > g_best else 1.0
    if variant == "eq3":
        denom = 1.0 + g_best - c_best
        return math.inf if denom == 0 else 1.0 / denom
    raise ValueError(f"unknown reward variant {variant!r}")


class PheromoneMatrix:
    """Dense trail weights with a fixed edge mask; non-edges stay at 0."""

    def __init__(self, mask: np.ndarray, t_min: float, t_max: float) -> None:
        self.mask = np.asarray(mask, dtype=bool)
        self.t_min, self.t_max = t_min, t_max
        self.values = np.where(self.mask, t_max, 0.0)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def row(self, i: int) -> np.ndarray:
        return self.values[i]

    def __getitem__(self, key):
        return self.values[key]

    def deposit(self, pairs: Iterable[tuple[int, int]], amount: float) -> None:
        for i, j in pairs:
            if self.mask[i, j]:
                self.values[i, j] += amount

    def evaporate_and_clamp(self, rho: float) -> None:
        m = self.mask
        self.values[m] = np.clip(self.values[m] * (1.0 - rho), self.t_min, self.t_max)

    def edge_values(self) -> np.ndarray:
        return self.values[self.mask]


class LazyPheromoneMatrix:
    """All-edges trail that materialises rows only when they receive a deposit.

    Untouched rows share one scalar that evaporates and clamps like any entry,
    so reads are identical to a dense matrix started at ``t_max``.
    """

    def __init__(self, n_rows: int, n_cols: int, t_min: float, t_max: float) -> None:
        self.n_rows, self.n_cols = n_rows, n_cols
        self.t_min, self.t_max = t_min, t_max
        self.default = t_max
        self.rows: dict[int, np.ndarray] = {}

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    def row(self, i: int) -> np.ndarray:
        r = self.rows.get(i)
        return r if r is not None else np.full(self.n_cols, self.default)

    def __getitem__(self, key):
        i, j = key
        r = self.rows.get(i)
        return self.default if r is None else r[j]

    def deposit(self, pairs: Iterable[tuple[int, int]], amount: float) -> None:
        for i, j in pairs:
            if i not in self.rows:
                self.rows[i] = np.full(self.n_cols, self.default)
            self.rows[i][j] += amount

    def evaporate_and_clamp(self, rho: float) -> None:
        self.default = min(max(self.default * (1.0 - rho), self.t_min), self.t_max)
        for r in self.rows.values():
            np.clip(r * (1.0 - rho), self.t_min, self.t_max, out=r)

    def edge_values(self) -> np.ndarray:
        parts = [r for r in self.rows.values()]
        if len(self.rows) < self.n_rows:
            parts.append(np.array([self.default]))
        return np.concatenate(parts) if parts else np.empty(0)


def full_trail(n_rows: int, n_cols: int, t_min: float, t_max: float, budget: int):
    if n_rows * n_cols <= budget:
        return PheromoneMatrix(np.ones((n_rows, n_cols), dtype=bool), t_min, t_max)
    return LazyPheromoneMatrix(n_rows, n_cols, t_min, t_max)


def evaporate_and_clamp(trail, rho: float):
    """Multiply every edge entry by ``1 - rho`` then clamp into ``[t_min, t_max]``."""
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    trail.evaporate_and_clamp(rho)
    return trail
