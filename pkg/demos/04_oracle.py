"""
Checking against brute force
============================

On instances small enough to enumerate, the exhaustive optimum bounds what
the colonies can reach.
"""

# %%
import numpy as np

from ctt_aco import AcoParams, GenSpec, construct_feasible, enumerate_feasible, exhaustive_optimum, \
    generate_instance, improve

inst = generate_instance(GenSpec(courses=3, rooms=2, days=2, periods_per_day=2, curricula=2,
                                 max_lectures_per_course=2, seed=2))
qualities = np.array([q for _, q in enumerate_feasible(inst)])
print(len(qualities), "feasible timetables; quality min/median/max:",
      qualities.min(), np.median(qualities), qualities.max())

# %%
best = exhaustive_optimum(inst)
print("optimum", best.quality)

# %%
for seed in range(5):
    params = AcoParams(seed=seed, max_cycles=100)
    final = improve(inst, construct_feasible(inst, params).timetable, params)
    print("seed", seed, "solver", final.quality)
