"""Random propositional HTN domains and scenarios for property tests and demos.

Everything is drawn from a seeded PCG64 generator, so a seed names a
domain (or scenario) for good.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Atom, Domain, Literal, Method, Operator, State, Task
from .norms import F, Norm, NormSet, O, occurs
from .planner import DEFAULT_DEPTH_CAP, Plan, Planner
from .simulator import Goal, Scenario


@dataclass(frozen=True)
class DomainShape:
    max_levels: int = 4  # decomposition trees are at most this tall
    max_methods: int = 3  # per compound task
    max_network: int = 3
    tasks_per_level: int = 2
    primitives: int = 4
    propositions: int = 3
    precondition_rate: float = 0.3


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_domain(seed: int, shape: DomainShape = DomainShape()) -> tuple[Domain, State, Task]:
    """A layered domain, an initial state and its root task.

    Compound tasks sit on levels ``0 .. L-2`` and only decompose into tasks
    on deeper levels or into primitives, which keeps the decomposition graph
    acyclic and every tree at most ``L`` tall.
    """
    rng = _rng(seed)
    levels = int(rng.integers(2, shape.max_levels + 1))
    props = [Atom(f"p{i}") for i in range(shape.propositions)]

    def coin(rate: float) -> bool:
        return bool(rng.random() < rate)

    operators = []
    for i in range(shape.primitives):
        pre = []
        if coin(shape.precondition_rate):
            pre.append(Literal(props[int(rng.integers(len(props)))], coin(0.7)))
        add = [props[j] for j in range(len(props)) if coin(0.3)]
        delete = [props[j] for j in range(len(props)) if coin(0.2) and props[j] not in add]
        operators.append(Operator(Task(f"act{i}"), tuple(pre), tuple(add), tuple(delete)))
    primitives = [o.name for o in operators]

    compound_levels = [[Task("root")]]
    for lvl in range(1, levels - 1):
        count = int(rng.integers(1, shape.tasks_per_level + 1))
        compound_levels.append([Task(f"task{lvl}_{k}") for k in range(count)])

    methods = []
    used: set[Task] = set()
    for lvl, tasks in enumerate(compound_levels):
        deeper = [t for later in compound_levels[lvl + 1:] for t in later]
        # the next level must be reachable, or its tasks would be dead weight
        must = list(compound_levels[lvl + 1]) if lvl + 1 < len(compound_levels) else []
        for task in tasks:
            if lvl > 0 and task not in used:
                continue
            n_methods = int(rng.integers(1, shape.max_methods + 1))
            for m in range(n_methods):
                length = int(rng.integers(1, shape.max_network + 1))
                pool = deeper + primitives
                network = [pool[int(rng.integers(len(pool)))] for _ in range(length)]
                if must:
                    network[int(rng.integers(length))] = must.pop()
                used.update(network)
                pos, neg = [], []
                if coin(shape.precondition_rate):
                    p = props[int(rng.integers(len(props)))]
                    (pos if coin(0.6) else neg).append(p)
                methods.append(Method(Task(f"{task.name}_m{m}"), task, tuple(pos), tuple(neg), tuple(network)))
            if must and task is tasks[-1]:
                # leftovers: attach them to the root's first method set
                for t in must:
                    methods.append(Method(Task(f"{task.name}_x{t.name}"), task, (), (), (t,)))
                    used.add(t)
                must = []

    used_ops = [o for o in operators if o.name in used]
    initial = State(frozenset(p for p in props if coin(0.5)))
    return Domain(tuple(used_ops), tuple(methods), name=f"random{seed}"), initial, Task("root")


def random_planned_domain(
    seed: int, shape: DomainShape = DomainShape(), depth_cap: int = DEFAULT_DEPTH_CAP, tries: int = 50
) -> tuple[Domain, State, Task, list[Plan]]:
    """Like ``random_domain`` but retries (deterministically) until the root has a plan."""
    for k in range(tries):
        domain, initial, root = random_domain(seed * 1000 + k, shape)
        plans = Planner(domain, depth_cap).all_plans(initial, root)
        if plans:
            return domain, initial, root, plans
    raise RuntimeError(f"no plannable domain found for seed {seed}")


def plant_norms(plans: list[Plan], rng: np.random.Generator, max_each: int = 2) -> NormSet:
    """Norms that one randomly chosen plan satisfies, so compliance is always possible.

    Obligations name conditions that occur under every occurrence of a
    context in the chosen plan; prohibitions name conditions that occur under that context in some
    other plan but never in the chosen one.
    """
    keep = plans[int(rng.integers(len(plans)))]
    obligations, prohibitions = set(), set()
    kept_nodes = [n for n in keep.nodes() if not n.is_primitive]
    for node in kept_nodes:
        same = [n for n in kept_nodes if n.task == node.task]
        for z in sorted(node.subtasks):
            # a context can appear more than once with different expansions
            if all(occurs(z, n) for n in same):
                obligations.add(Norm(O, node.task, z))
    for other in plans:
        for node in other.nodes():
            if node.is_primitive:
                continue
            for z in [*sorted(node.subtasks), *node.entered_states]:
                same = [n for n in kept_nodes if n.task == node.task]
                if not any(occurs(z, n) for n in same):
                    prohibitions.add(Norm(F, node.task, z))

    def pick(cands: set) -> list[Norm]:
        ordered = sorted(cands, key=Norm.sort_key)
        k = min(len(ordered), int(rng.integers(0, max_each + 1)))
        idx = rng.choice(len(ordered), size=k, replace=False) if k else []
        return [ordered[int(i)] for i in idx]

    return NormSet(tuple(pick(obligations) + pick(prohibitions)))


def random_scenario(
    seed: int,
    violation_rate: float = 0.0,
    shape: DomainShape = DomainShape(),
    depth_cap: int = DEFAULT_DEPTH_CAP,
) -> Scenario:
    domain, initial, root, plans = random_planned_domain(seed, shape, depth_cap)
    planted = plant_norms(plans, _rng(seed))
    return Scenario(domain, planted, (Goal(root),), initial, violation_rate, seed)
