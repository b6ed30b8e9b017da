"""Small bundled domains and scenarios used by the tests, demos and docs."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .formats import load_domain, load_norms, load_scenario, parse_state
from .model import Domain, State
from .norms import NormSet
from .simulator import Scenario

FIXTURES = ("grammar", "two_trees", "travel", "three_plans")

# the travel domain's start: one route, through london
TRAVEL_INITIAL = parse_state(["at(aberdeen)", "connect(aberdeen,london)", "connect(london,paris)"])
# the same map with a direct connection added, so a second route exists
TRAVEL_INITIAL_DIRECT = State(TRAVEL_INITIAL.atoms | parse_state(["connect(aberdeen,paris)"]).atoms)


def data_path(name: str) -> Path:
    """Filesystem path of a bundled data file, e.g. ``data_path("travel.json")``."""
    return Path(str(resources.files("normid") / "data" / name))


def domain(name: str) -> Domain:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return load_domain(data_path(f"{name}.json"))


def grammar_domain() -> Domain:
    return domain("grammar")


def two_trees_domain() -> Domain:
    return domain("two_trees")


def travel_domain() -> Domain:
    return domain("travel")


def three_plans_domain() -> Domain:
    return domain("three_plans")


def three_plans_norms() -> NormSet:
    return load_norms(data_path("three_plans_norms.json"))


def three_plans_scenario() -> Scenario:
    return load_scenario(data_path("three_plans_scenario.json"))


def two_trees_scenario() -> Scenario:
    return load_scenario(data_path("two_trees_scenario.json"))


def at_london_state(initial: State = TRAVEL_INITIAL) -> State:
    """The full state reached after flying from aberdeen into london."""
    moved = {a for a in initial.atoms if a.name != "at"}
    return State(frozenset(moved) | parse_state(["at(london)"]).atoms)
