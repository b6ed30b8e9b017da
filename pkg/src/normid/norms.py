"""Obligations and prohibitions over tasks and states, and when they are violated."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .model import State, Task, match
from .planner import DecompositionNode, Plan


class Modality(str, enum.Enum):
    OBLIGATION = "O"
    PROHIBITION = "F"

    def flipped(self) -> "Modality":
        return Modality.PROHIBITION if self is Modality.OBLIGATION else Modality.OBLIGATION


O = Modality.OBLIGATION
F = Modality.PROHIBITION

Condition = Task | State


def condition_key(cond: Condition) -> tuple:
    if isinstance(cond, Task):
        return (0, cond.name, cond.args)
    return (1, cond.canonical)


@dataclass(frozen=True)
class Norm:
    """``X_y z``: modality X, context task y, condition z (a task or a whole state)."""

    modality: Modality
    context: Task
    condition: Condition

    def __post_init__(self):
        object.__setattr__(self, "modality", Modality(self.modality))
        if not isinstance(self.condition, (Task, State)):
            raise TypeError(f"norm condition must be a Task or State, got {type(self.condition).__name__}")

    @property
    def is_ground(self) -> bool:
        return self.context.is_ground and (isinstance(self.condition, State) or self.condition.is_ground)

    @property
    def pair(self) -> tuple[Task, Condition]:
        return (self.context, self.condition)

    def sort_key(self) -> tuple:
        return (self.modality.value, self.context.name, self.context.args, condition_key(self.condition))

    def __lt__(self, other: "Norm") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"{self.modality.value}_{{{self.context}}} {self.condition}"


@dataclass(frozen=True)
class NormSet:
    """Canonically ordered norms; a (context, condition) pair takes one modality at most.

    ``evidence`` optionally maps norms to (supporting, refuting) counts.
    """

    norms: tuple[Norm, ...] = ()
    evidence: Mapping[Norm, tuple[int, int]] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        norms = tuple(sorted(set(self.norms), key=Norm.sort_key))
        seen: dict = {}
        for n in norms:
            other = seen.setdefault(n.pair, n.modality)
            if other is not n.modality:
                raise ValueError(f"{n.context}/{n.condition} appears as both obligation and prohibition")
        object.__setattr__(self, "norms", norms)

    def __iter__(self) -> Iterator[Norm]:
        return iter(self.norms)

    def __len__(self) -> int:
        return len(self.norms)

    def __contains__(self, norm: Norm) -> bool:
        return norm in set(self.norms)

    def of(self, modality: Modality) -> tuple[Norm, ...]:
        return tuple(n for n in self.norms if n.modality is Modality(modality))

    def __str__(self) -> str:
        return "\n".join(str(n) for n in self.norms)


def state_condition_equality(a: State, b: State) -> bool:
    """Whole-state equality; a subset does not count."""
    return a.atoms == b.atoms


def occurs(condition: Condition, node: DecompositionNode, sigma: Mapping[str, str] | None = None) -> bool:
    """Whether ``condition`` occurs while ``node`` executes.

    A task condition occurs when some proper descendant's task matches it
    (under ``sigma``, the binding obtained from the context). A state
    condition occurs when it is one of the states entered after the node
    starts, up to and including its final state.
    """
    if isinstance(condition, State):
        return any(state_condition_equality(condition, s) for s in node.entered_states)
    pattern = condition.substitute(sigma or {})
    return any(match(pattern, d.task) is not None for d in node.descendants())


def violations(norm: Norm, plan: Plan) -> list[tuple[DecompositionNode, bool]]:
    """Per matching context node, whether the norm is violated there."""
    out = []
    for node in plan.nodes():
        sigma = match(norm.context, node.task)
        if sigma is None:
            continue
        happened = occurs(norm.condition, node, sigma)
        out.append((node, happened if norm.modality is F else not happened))
    return out


def violated(norm: Norm, plan: Plan) -> bool:
    return any(v for _, v in violations(norm, plan))


def complies(plan: Plan, norms: Iterable[Norm]) -> bool:
    return not any(violated(n, plan) for n in norms)
