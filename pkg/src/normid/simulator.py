"""Synthetic societies: generate runs from planted norms and score learned ones.

Random draws come from numpy's PCG64 bit generator
(``numpy.random.Generator(numpy.random.PCG64(seed))``), whose output stream
is fixed across platforms. Each generated run consumes exactly three draws,
in this order:

1. ``choice(len(goals), p=weights)`` picks the goal (weights normalized),
2. ``random()`` is compared against the violation rate,
3. ``integers(k)`` picks a plan uniformly from the chosen pool of ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoCompliantPlan
from .model import Domain, State, Task, match
from .norms import F, Modality, Norm, NormSet, O, complies
from .planner import DEFAULT_DEPTH_CAP, Plan, Planner
from .recognizer import Recognizer, Run


@dataclass(frozen=True)
class Goal:
    task: Task
    weight: float = 1.0
    initial: State | None = None  # falls back to the scenario's initial state


@dataclass(frozen=True)
class Scenario:
    domain: Domain
    planted: NormSet
    goals: tuple[Goal, ...]
    initial: State = State()
    violation_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "goals", tuple(self.goals))
        if not self.goals:
            raise ValueError("a scenario needs at least one goal")
        if any(not g.weight > 0 for g in self.goals):
            raise ValueError("goal weights must be positive")
        if not 0.0 <= self.violation_rate <= 1.0:
            raise ValueError(f"violation rate {self.violation_rate} outside [0, 1]")

    def initial_for(self, goal: Goal) -> State:
        return goal.initial if goal.initial is not None else self.initial


def split_plans(
    domain: Domain,
    initial: State,
    goal: Task,
    norms,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    planner: Planner | None = None,
) -> tuple[list[Plan], list[Plan]]:
    """All plans for ``goal`` partitioned into (compliant, violating)."""
    planner = planner or Planner(domain, depth_cap)
    compliant, violating = [], []
    for p in planner.all_plans(initial, goal):
        (compliant if complies(p, norms) else violating).append(p)
    return compliant, violating


def compliant_plans(
    domain: Domain,
    initial: State,
    goal: Task,
    norms,
    depth_cap: int = DEFAULT_DEPTH_CAP,
) -> list[Plan]:
    compliant, _ = split_plans(domain, initial, goal, norms, depth_cap)
    if not compliant:
        raise NoCompliantPlan(f"no plan for {goal} complies with the planted norms")
    return compliant


def generate_runs(scenario: Scenario, n: int, depth_cap: int = DEFAULT_DEPTH_CAP) -> list[Run]:
    """``n`` runs drawn from ``scenario``; a pure function of (scenario, n)."""
    planner = Planner(scenario.domain, depth_cap)
    pools = []
    for g in scenario.goals:
        compliant, violating = split_plans(
            scenario.domain, scenario.initial_for(g), g.task, scenario.planted, planner=planner
        )
        if not compliant:
            raise NoCompliantPlan(f"no plan for {g.task} complies with the planted norms")
        pools.append((compliant, violating))

    weights = np.array([g.weight for g in scenario.goals], dtype=float)
    weights /= weights.sum()
    rng = np.random.Generator(np.random.PCG64(scenario.seed))
    runs = []
    for _ in range(n):
        gi = int(rng.choice(len(weights), p=weights))
        violate = rng.random() < scenario.violation_rate
        compliant, violating = pools[gi]
        pool = violating if violate and violating else compliant
        chosen = pool[int(rng.integers(len(pool)))]
        runs.append(Run.of_plan(chosen, scenario.goals[gi].task))
    return runs


# -- evaluation ---------------------------------------------------------------


@dataclass
class ModalityScore:
    precision: float
    recall: float
    true_positives: list[Norm] = field(default_factory=list)
    false_positives: list[Norm] = field(default_factory=list)
    missed: list[Norm] = field(default_factory=list)
    learned_empty: bool = False
    nothing_to_recall: bool = False


@dataclass
class EvaluationReport:
    obligations: ModalityScore
    prohibitions: ModalityScore
    observed_contexts: int
    unfalsifiable: list[Norm] = field(default_factory=list)
    unobservable: list[Norm] = field(default_factory=list)

    def score(self, modality: Modality) -> ModalityScore:
        return self.obligations if Modality(modality) is O else self.prohibitions

    def to_dict(self) -> dict:
        def block(s: ModalityScore) -> dict:
            return {
                "precision": s.precision,
                "recall": s.recall,
                "learned_empty": s.learned_empty,
                "nothing_to_recall": s.nothing_to_recall,
                "true_positives": [str(n) for n in s.true_positives],
                "false_positives": [str(n) for n in s.false_positives],
                "missed": [str(n) for n in s.missed],
            }

        return {
            "observed_contexts": self.observed_contexts,
            "obligations": block(self.obligations),
            "prohibitions": block(self.prohibitions),
            "unfalsifiable_obligations": [str(n) for n in self.unfalsifiable],
            "unobservable": [str(n) for n in self.unobservable],
        }

    def to_text(self) -> str:
        lines = [f"observed contexts: {self.observed_contexts}"]
        for label, s in (("obligations", self.obligations), ("prohibitions", self.prohibitions)):
            flags = []
            if s.learned_empty:
                flags.append("nothing learned; precision 1.0 by convention")
            if s.nothing_to_recall:
                flags.append("nothing recallable; recall 1.0 by convention")
            note = f"  ({'; '.join(flags)})" if flags else ""
            lines.append(
                f"{label}: precision {s.precision:.4f} recall {s.recall:.4f} "
                f"tp {len(s.true_positives)} fp {len(s.false_positives)} missed {len(s.missed)}{note}"
            )
            lines.extend(f"  missed {n}" for n in s.missed)
        lines.extend(f"  unfalsifiable {n}" for n in self.unfalsifiable)
        return "\n".join(lines)


@dataclass
class _Observed:
    """Everything evaluation needs to know about a stream of recognized runs."""

    contexts: set  # tasks of observed nodes
    # task y -> list of condition sets, one per y-node of any alternative of an observed node
    alternative_nodes: dict
    # task y -> list of condition sets, one per plan of y from each observed y-node's start state
    own_plans: dict


def _conditions(node) -> frozenset:
    return frozenset(node.subtasks) | frozenset(node.entered_states)


def observe(plans: list[Plan], planner: Planner) -> _Observed:
    contexts = set()
    alt_nodes: dict = {}
    own: dict = {}
    starts = set()
    for p in plans:
        for node in p.nodes():
            contexts.add(node.task)
            starts.add((node.task, node.state_before))
    for task, state in sorted(starts, key=lambda ts: (ts[0], ts[1].canonical)):
        for alt in planner.expand(task, state):
            own.setdefault(task, []).append(_conditions(alt))
            for tau in alt.walk():
                alt_nodes.setdefault(tau.task, []).append(_conditions(tau))
    return _Observed(contexts, alt_nodes, own)


def ground_instances(norm: Norm, obs: _Observed) -> list[Norm]:
    """Ground instances of a planted norm over the observed contexts."""
    out = set()
    for ctx in obs.contexts:
        sigma = match(norm.context, ctx)
        if sigma is None:
            continue
        cond = norm.condition
        if isinstance(cond, State) or cond.substitute(sigma).is_ground:
            out.add(Norm(norm.modality, ctx, cond if isinstance(cond, State) else cond.substitute(sigma)))
            continue
        pattern = cond.substitute(sigma)
        universe = set().union(*obs.alternative_nodes.get(ctx, [frozenset()]))
        for z in universe:
            if isinstance(z, Task) and match(pattern, z) is not None:
                out.add(Norm(norm.modality, ctx, z))
    return sorted(out, key=Norm.sort_key)


def evaluate(
    learned: NormSet,
    planted: NormSet,
    runs: list[Run],
    domain: Domain,
    goals=None,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    plans: list[Plan] | None = None,
) -> EvaluationReport:
    """Precision and recall of ``learned`` against the ground instances of ``planted``.

    Recall only counts planted instances the runs could reveal: the context
    was observed, and the condition occurs under that context in some
    alternative decomposition available from an observed state. Obligations
    whose condition occurs in every such decomposition cannot be told apart
    from convention; they are listed as unfalsifiable and left out.
    """
    planner = Planner(domain, depth_cap)
    if plans is None:
        recognizer = Recognizer(domain, goals)
        plans = [recognizer.recognize(r, i).plan for i, r in enumerate(runs)]
    obs = observe(plans, planner)

    instances = {n for p in planted for n in ground_instances(p, obs)}
    unfalsifiable, unobservable, recallable = [], [], set()
    for n in sorted(instances, key=Norm.sort_key):
        seen_under = obs.alternative_nodes.get(n.context, [])
        if not any(n.condition in conds for conds in seen_under):
            unobservable.append(n)
        elif n.modality is O and all(n.condition in conds for conds in obs.own_plans.get(n.context, [])):
            unfalsifiable.append(n)
        else:
            recallable.add(n)

    def score(modality: Modality) -> ModalityScore:
        got = set(learned.of(modality))
        truth = {n for n in instances if n.modality is modality}
        want = {n for n in recallable if n.modality is modality}
        tp = got & truth
        hit = got & want
        return ModalityScore(
            precision=len(tp) / len(got) if got else 1.0,
            recall=len(hit) / len(want) if want else 1.0,
            true_positives=sorted(tp, key=Norm.sort_key),
            false_positives=sorted(got - truth, key=Norm.sort_key),
            missed=sorted(want - got, key=Norm.sort_key),
            learned_empty=not got,
            nothing_to_recall=not want,
        )

    return EvaluationReport(
        obligations=score(O),
        prohibitions=score(F),
        observed_contexts=len(obs.contexts),
        unfalsifiable=unfalsifiable,
        unobservable=unobservable,
    )
