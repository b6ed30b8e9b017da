"""Total-order HTN decomposition with exhaustive plan enumeration."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .errors import DepthCapExceeded, DomainError
from .model import Action, Domain, Method, State, Task, applicable, apply, match, satisfiers, substitution_key

DEFAULT_DEPTH_CAP = 64

# Root of a plan built from a multi-task network; never a norm context.
SYNTHETIC_ROOT = Task("__top__")


@dataclass(frozen=True)
class DecompositionNode:
    """One task instance in a decomposition tree.

    Primitive leaves carry the ``action`` that realizes them; compound
    nodes carry the ground ``method`` instance used to refine them.
    """

    task: Task
    method: Method | None
    children: tuple["DecompositionNode", ...]
    state_before: State
    state_after: State
    action: Action | None = None

    @property
    def is_primitive(self) -> bool:
        return self.action is not None

    @property
    def is_synthetic(self) -> bool:
        return self.task == SYNTHETIC_ROOT

    def walk(self) -> Iterator["DecompositionNode"]:
        """Pre-order traversal, self first."""
        yield self
        for c in self.children:
            yield from c.walk()

    def descendants(self) -> Iterator["DecompositionNode"]:
        for c in self.children:
            yield from c.walk()

    def leaves(self) -> Iterator["DecompositionNode"]:
        if self.is_primitive:
            yield self
        for c in self.children:
            yield from c.leaves()

    @cached_property
    def subtasks(self) -> frozenset[Task]:
        return frozenset(d.task for d in self.descendants())

    @cached_property
    def states(self) -> tuple[State, ...]:
        """States from ``state_before`` through every action in this subtree."""
        return (self.state_before,) + tuple(leaf.state_after for leaf in self.leaves())

    @property
    def entered_states(self) -> tuple[State, ...]:
        """States entered while this node executes (``state_before`` excluded)."""
        return self.states[1:]

    @cached_property
    def height(self) -> int:
        return 1 + max((c.height for c in self.children), default=0)

    @cached_property
    def key(self) -> tuple:
        """Structural sort key; trees compare by task, method, then children."""
        method = () if self.method is None else (self.method.name, self.method.binding)
        return (self.task, method, tuple(c.key for c in self.children))

    def __str__(self) -> str:
        return format_tree(self)


def format_tree(node: DecompositionNode, indent: str = "  ") -> str:
    """Indented rendering: one node per line, methods in brackets."""
    lines = []

    def emit(n: DecompositionNode, depth: int) -> None:
        label = str(n.task)
        if n.method is not None:
            label += f"  [{n.method.ident}]"
        lines.append(indent * depth + label)
        for c in n.children:
            emit(c, depth + 1)

    emit(node, 0)
    return "\n".join(lines)


def bracketed(node: DecompositionNode) -> str:
    """Compact one-line rendering such as ``T1(T2(a1,a2),T3(a3))``."""
    if not node.children:
        return str(node.task)
    return f"{node.task}({','.join(bracketed(c) for c in node.children)})"


@dataclass(frozen=True)
class Plan:
    actions: tuple[Action, ...]
    root: DecompositionNode
    initial: State

    @classmethod
    def from_root(cls, root: DecompositionNode) -> "Plan":
        return cls(tuple(leaf.action for leaf in root.leaves()), root, root.state_before)

    @property
    def goal(self) -> Task:
        return self.root.task

    def nodes(self) -> Iterator[DecompositionNode]:
        """Every real task node; a synthetic root is skipped."""
        for n in self.root.walk():
            if not n.is_synthetic:
                yield n

    @property
    def tasks(self) -> tuple[Task, ...]:
        return tuple(a.task for a in self.actions)

    def __str__(self) -> str:
        return format_tree(self.root)


def states_of(plan: Plan) -> list[State]:
    """``[initial, apply(a1, ·), ..., apply(an, ·)]`` along the plan."""
    states = [plan.initial]
    for a in plan.actions:
        states.append(apply(a, states[-1]))
    return states


def node_states(node: DecompositionNode) -> list[State]:
    return list(node.states)


def applicable_methods(task: Task, state: State, domain: Domain) -> list[tuple[Method, dict]]:
    """All ``(method, σ)`` refining ``task`` whose preconditions hold in ``state``.

    σ grounds every variable of the method; variables left free by the task
    and the positive preconditions range over the domain constants.
    """
    constants = domain.constants or None
    found = []
    for index, m in enumerate(domain.methods_for(task.name)):
        sigma0 = match(m.task, task)
        if sigma0 is None:
            continue
        for sigma in satisfiers(state, m.preconditions, sigma0, constants, extra_vars=m.variables()):
            found.append(((m.name, index, substitution_key(sigma)), m, sigma))
    found.sort(key=lambda item: item[0])
    return [(m, sigma) for _, m, sigma in found]


class Planner:
    """Depth-first enumerator of every decomposition of a task.

    Expansions are memoized per ``(task, state)``; a planner instance is
    tied to one domain and may be reused across queries.
    """

    def __init__(self, domain: Domain, depth_cap: int = DEFAULT_DEPTH_CAP):
        self.domain = domain
        self.depth_cap = depth_cap
        self._cache: dict[tuple[Task, State], tuple[DecompositionNode, ...]] = {}

    def expand(self, task: Task, state: State, depth: int = 1) -> tuple[DecompositionNode, ...]:
        if depth > self.depth_cap:
            raise DepthCapExceeded(task, self.depth_cap)
        key = (task, state)
        nodes = self._cache.get(key)
        if nodes is None:
            nodes = tuple(self._expand(task, state, depth))
            self._cache[key] = nodes
        if nodes and depth - 1 + max(n.height for n in nodes) > self.depth_cap:
            raise DepthCapExceeded(task, self.depth_cap)
        return nodes

    def _expand(self, task: Task, state: State, depth: int) -> Iterator[DecompositionNode]:
        if not task.is_ground:
            raise ValueError(f"cannot decompose non-ground task {task}")
        if self.domain.is_primitive(task):
            action = self.domain.action_for(task)
            if action is not None and applicable(action, state):
                yield DecompositionNode(task, None, (), state, apply(action, state), action)
            return
        if not self.domain.is_compound(task):
            raise DomainError(f"task {task} is not declared in domain {self.domain.name}")
        for method, sigma in applicable_methods(task, state, self.domain):
            inst = method.instantiate(sigma)
            for children, end in self._sequence(inst.network, state, depth + 1):
                yield DecompositionNode(task, inst, children, state, end)

    def _sequence(self, tasks: Sequence[Task], state: State, depth: int):
        if not tasks:
            yield (), state
            return
        for first in self.expand(tasks[0], state, depth):
            for rest, end in self._sequence(tasks[1:], first.state_after, depth):
                yield (first,) + rest, end

    def all_plans(self, initial: State, goal: Task) -> list[Plan]:
        return [Plan.from_root(n) for n in self.expand(goal, initial)]

    def iter_network(self, initial: State, network: Sequence[Task]) -> Iterator[Plan]:
        network = tuple(network)
        if len(network) == 1:
            for n in self.expand(network[0], initial):
                yield Plan.from_root(n)
            return
        for children, end in self._sequence(network, initial, 2):
            yield Plan.from_root(DecompositionNode(SYNTHETIC_ROOT, None, children, initial, end))


def all_plans(domain: Domain, initial: State, goal: Task, depth_cap: int = DEFAULT_DEPTH_CAP) -> list[Plan]:
    """Every plan decomposing ``goal`` from ``initial``, in canonical order."""
    return Planner(domain, depth_cap).all_plans(initial, goal)


def plan(domain: Domain, initial: State, network: Sequence[Task], depth_cap: int = DEFAULT_DEPTH_CAP):
    """First plan for a ground task network, or None."""
    return next(Planner(domain, depth_cap).iter_network(initial, network), None)
