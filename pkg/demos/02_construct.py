"""
Building a feasible timetable
=============================

The construction colony walks a course x room-period graph until some ant
places every lecture without a hard clash.
"""

# %%
from ctt_aco import AcoParams, GenSpec, build_construction_graph, construct_feasible, generate_instance

inst = generate_instance(GenSpec(courses=25, rooms=4, days=5, periods_per_day=4, curricula=25,
                                 max_lectures_per_course=5, unavailability_density=0.5, seed=0))
graph = build_construction_graph(inst)
print(inst.total_lectures, "lectures,", int(graph.edges.sum()), "graph edges")

# %%
result = construct_feasible(inst, AcoParams(max_cycles=200, seed=1))
print("feasible:", result.feasible, "after", result.cycles, "cycles", f"({result.wall_time:.2f}s)")

# %%
# Cycle best and global best hard-violation counts.
for row in result.trace[:10]:
    print(row.cycle, row.best_in_cycle, row.global_best)
