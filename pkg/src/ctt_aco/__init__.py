"""Two-phase ant colony solver for curriculum-based course timetabling."""

from importlib import resources

from .aco import AcoParams, TraceRow, reward, select_candidate
from .construction import (
    AntWalkResult,
    ConstructionGraph,
    ConstructionResult,
    InfeasibleInstanceError,
    ant_walk_construct,
    build_construction_graph,
    construct_feasible,
    update_trail,
)
from .aco import evaporate_and_clamp
from .evaluation import (
    Layout,
    SwapMove,
    ViolationReport,
    apply_swap,
    count_hard_violations,
    count_soft_violations,
    evaluate,
    incremental_hard_delta,
    quality,
    swap_quality_delta,
)
from .improvement import admissible_best_swaps, ant_walk_improve, improve
from .io import GenSpec, ParseError, generate_instance, parse_instance, parse_solution, write_instance, write_solution
from .model import Course, Curriculum, Event, Instance, Period, Room, Timetable
from .oracle import EnumerationBudget, enumerate_feasible, exhaustive_optimum


def load_toy() -> Instance:
    """The four-course ``Toy`` instance distributed with the ITC-2007 format description."""
    return parse_instance(resources.files(__package__).joinpath("data/toy.ctt").read_text())


__version__ = "0.1.0"
