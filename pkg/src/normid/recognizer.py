"""Plan recognition: explain an observed action sequence with a decomposition tree."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

from .errors import NoParse, StateMismatch
from .grammar import Grammar, ParseTree, parse, to_grammar
from .grounding import DEFAULT_GROUND_CAP, ground_domain
from .model import Domain, State, Task, applicable, apply
from .planner import DecompositionNode, Plan

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Run:
    """One observed episode: an initial state and the ground primitive tasks executed."""

    initial: State
    observations: tuple[Task, ...]
    goal: Task | None = None

    def __post_init__(self):
        object.__setattr__(self, "observations", tuple(self.observations))
        if not self.observations:
            raise ValueError("a run needs at least one observed action")
        for t in self.observations:
            if not t.is_ground:
                raise ValueError(f"observed action {t} is not ground")

    @classmethod
    def of_plan(cls, plan: Plan, goal: Task | None = None) -> "Run":
        return cls(plan.initial, plan.tasks, goal)


@dataclass(frozen=True)
class Recognition:
    plan: Plan
    ambiguity: int  # number of precondition-consistent parses


class Recognizer:
    """Grounds a domain, builds its grammar and parses runs against it.

    Ground domains and grammars are cached per initial state and goal set,
    so one instance should be reused across the runs of a stream.
    """

    def __init__(self, domain: Domain, goals: Iterable[Task] | None = None, ground_cap: int = DEFAULT_GROUND_CAP):
        self.domain = domain
        self.goals = None if goals is None else tuple(sorted(set(goals)))
        self.ground_cap = ground_cap
        self._ground: dict[State, Domain] = {}
        self._grammars: dict[tuple, Grammar] = {}

    def ground(self, initial: State) -> Domain:
        g = self._ground.get(initial)
        if g is None:
            g = self._ground[initial] = ground_domain(self.domain, initial, self.ground_cap)
        return g

    def default_goals(self, ground: Domain) -> tuple[Task, ...]:
        top = set(self.domain.top_level_symbols)
        return tuple(sorted({m.task for m in ground.methods if m.task.name in top}))

    def grammar(self, initial: State, goals: tuple[Task, ...] | None = None) -> Grammar:
        ground = self.ground(initial)
        goals = goals or self.goals or self.default_goals(ground)
        key = (initial, goals)
        g = self._grammars.get(key)
        if g is None:
            g = self._grammars[key] = to_grammar(ground, goals)
        return g

    def recognize(self, run: Run, run_index: int | None = None) -> Recognition:
        goals = (run.goal,) if run.goal is not None else None
        grammar = self.grammar(run.initial, goals)
        ground = self.ground(run.initial)
        try:
            trees = parse(grammar, run.observations)
        except NoParse as exc:
            raise NoParse(str(exc), run_index) from None
        plans = []
        first_error = None
        for tree in trees:
            if grammar.synthetic_start:
                tree = tree.children[0]
            try:
                root = _replay(tree, run.initial, ground)
            except StateMismatch as exc:
                first_error = first_error or exc
                continue
            plans.append(Plan.from_root(root))
        if not plans:
            raise StateMismatch(str(first_error), run_index)
        best = min(plans, key=lambda p: p.root.key)
        if len(plans) > 1:
            where = f"run {run_index}" if run_index is not None else "run"
            logger.warning("%s has %d consistent parses; using the canonically least", where, len(plans))
        return Recognition(best, len(plans))


def _replay(tree: ParseTree, state: State, ground: Domain) -> DecompositionNode:
    if tree.is_leaf:
        action = ground.action_for(tree.symbol)
        if action is None or not applicable(action, state):
            raise StateMismatch(f"action {tree.symbol} is not applicable in {state}")
        return DecompositionNode(tree.symbol, None, (), state, apply(action, state), action)
    method = tree.production.label
    if not all(a in state for a in method.precond_pos) or any(a in state for a in method.precond_neg):
        raise StateMismatch(f"method {method.ident} is not applicable in {state}")
    children = []
    current = state
    for sub in tree.children:
        node = _replay(sub, current, ground)
        children.append(node)
        current = node.state_after
    return DecompositionNode(tree.symbol, method, tuple(children), state, current)


def recognize(
    domain: Domain,
    run: Run,
    goals: Iterable[Task] | None = None,
    ground_cap: int = DEFAULT_GROUND_CAP,
) -> Plan:
    """The decomposition tree explaining ``run``, with states replayed."""
    return Recognizer(domain, goals, ground_cap).recognize(run).plan
