"""
Lowering the soft cost
======================

Starting from a feasible timetable, the improvement colony applies greedy
swaps and moves, breaking ties by trail, and restarts until it stalls.
"""

# %%
import numpy as np

from ctt_aco import AcoParams, construct_feasible, evaluate, improve, load_toy

toy = load_toy()
params = AcoParams(seed=3, max_cycles=100)
start = construct_feasible(toy, params).timetable
print("start:", evaluate(toy, start).as_dict())

# %%
result = improve(toy, start, params)
print(f"quality {result.initial_quality} -> {result.quality} in {result.runs} runs, {result.wall_time:.1f}s")
print("final:", evaluate(toy, result.timetable).as_dict())

# %%
# The global best never goes up.
gb = np.array([r.global_best for r in result.trace])
print(gb[:20], bool(np.all(np.diff(gb) <= 0)))
