"""Propositionalization of a lifted domain over its constants."""

from __future__ import annotations

import itertools
import logging

from .errors import GroundingExplosion
from .model import Atom, Domain, Method, State

logger = logging.getLogger(__name__)

DEFAULT_GROUND_CAP = 10**6


def _instances(template, variables, constants):
    for combo in itertools.product(constants, repeat=len(variables)):
        yield template.instantiate(dict(zip(variables, combo)))


def grounding_size(domain: Domain, constants) -> int:
    n = len(constants)
    total = sum(n ** len(o.name.variables()) for o in domain.operators)
    total += sum(n ** len(m.variables()) for m in domain.methods)
    return total


def relaxed_reachable(operators, initial: State) -> frozenset[Atom]:
    """Atoms reachable from ``initial`` when delete effects are ignored."""
    reached = set(initial.atoms)
    pending = list(operators)
    changed = True
    while changed:
        changed = False
        rest = []
        for op in pending:
            if all(lit.atom in reached for lit in op.pre if lit.positive):
                new = set(op.add) - reached
                if new:
                    reached |= new
                    changed = True
            else:
                rest.append(op)
        pending = rest
    return frozenset(reached)


def ground_domain(
    domain: Domain,
    initial: State | None = None,
    cap: int = DEFAULT_GROUND_CAP,
) -> Domain:
    """Replace every operator and method by all of its ground instances.

    With an ``initial`` state, instances that can never fire are dropped:
    positive preconditions must be relaxed-reachable, negative preconditions
    on static predicates (never added or deleted) must not already hold, and
    methods whose network mentions a task with no surviving instance are
    removed until a fixpoint is reached.
    """
    constants = set(domain.constants)
    if initial is not None:
        constants.update(c for a in initial.atoms for c in a.args)
    constants = sorted(constants)

    size = grounding_size(domain, constants)
    if size > cap:
        raise GroundingExplosion(size, cap)

    operators = [g for o in domain.operators for g in _instances(o, o.name.variables(), constants)]
    methods = [g for m in domain.methods for g in _instances(m, m.variables(), constants)]

    if initial is not None:
        fluent = {a.name for o in domain.operators for a in o.add + o.delete}

        def blocked(negatives) -> bool:
            # a static atom that holds initially holds forever
            return any(a.name not in fluent and a in initial for a in negatives)

        operators = [o for o in operators if not blocked(l.atom for l in o.pre if not l.positive)]
        reached = relaxed_reachable(operators, initial)
        operators = [o for o in operators if all(l.atom in reached for l in o.pre if l.positive)]
        methods = [
            m for m in methods
            if all(a in reached for a in m.precond_pos) and not blocked(m.precond_neg)
        ]

    methods = _drop_unproductive(methods, {o.name for o in operators})

    logger.debug("grounded %s: %d operators, %d methods", domain.name, len(operators), len(methods))
    return Domain(
        tuple(operators),
        tuple(methods),
        constants=tuple(constants),
        predicates=domain.predicates,
        name=domain.name,
    )


def _drop_unproductive(methods: list[Method], available) -> list[Method]:
    """Keep only methods whose whole network can bottom out in operators."""
    productive = set(available)
    changed = True
    while changed:
        changed = False
        for m in methods:
            if m.task not in productive and all(t in productive for t in m.network):
                productive.add(m.task)
                changed = True
    return [m for m in methods if all(t in productive for t in m.network)]

