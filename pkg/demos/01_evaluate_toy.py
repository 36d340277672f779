"""
Scoring a timetable
===================

Load the bundled four-course instance, place every lecture by hand and look
at the hard and soft violation counts.
"""

# %%
from ctt_aco import Event, Timetable, evaluate, load_toy, write_solution

toy = load_toy()
print(toy.name, len(toy.courses), "courses,", len(toy.rooms), "rooms,", toy.n_periods, "periods")

# %%
# An empty timetable misses every lecture (HC1) and spreads nothing over days (SC2).
print(evaluate(toy, Timetable()).as_dict())

# %%
# Put lectures one per day in room 0, shifting the slot per course.
events = []
for c, course in enumerate(toy.courses):
    for day in range(course.lectures):
        events.append(Event(c, 0, day * toy.periods_per_day + c))
naive = Timetable(events)
report = evaluate(toy, naive)
print(report.as_dict())

# %%
# Solutions are written one lecture per line: course room day slot.
print(write_solution(toy, naive))
