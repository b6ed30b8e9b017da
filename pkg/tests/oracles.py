"""Slow, obviously-correct reference implementations used by the tests."""

from __future__ import annotations

import itertools
from collections import Counter

from normid.model import Domain, State, Task


def signature(node) -> tuple:
    """Structural identity of a decomposition tree (tasks, methods, states)."""
    return (
        str(node.task),
        node.method.ident if node.method is not None else None,
        node.state_before.canonical,
        node.state_after.canonical,
        tuple(signature(c) for c in node.children),
    )


def shape(node) -> tuple:
    return (str(node.task), node.method.ident if node.method is not None else None, tuple(shape(c) for c in node.children))


# -- planner ------------------------------------------------------------------


def structural_trees(domain: Domain, task: Task):
    """Every decomposition of a propositional task ignoring all state."""
    if domain.is_primitive(task):
        yield (task, None, ())
        return
    for m in domain.methods_for(task.name):
        for kids in itertools.product(*(list(structural_trees(domain, t)) for t in m.network)):
            yield (task, m, kids)


def replay(domain: Domain, tree, state: State):
    """Thread ``state`` through a structural tree; None if anything is inapplicable."""
    task, method, kids = tree
    if method is None:
        op = domain.operators_for(task.name)[0]
        pos = all(l.atom in state for l in op.pre if l.positive)
        neg = not any(l.atom in state for l in op.pre if not l.positive)
        if not (pos and neg):
            return None
        after = State((state.atoms | frozenset(op.add)) - frozenset(op.delete))
        return (str(task), None, state.canonical, after.canonical, ()), after
    if any(a not in state for a in method.precond_pos) or any(a in state for a in method.precond_neg):
        return None
    current = state
    children = []
    for k in kids:
        got = replay(domain, k, current)
        if got is None:
            return None
        sig, current = got
        children.append(sig)
    return (str(task), method.ident, state.canonical, current.canonical, tuple(children)), current


def brute_force_plans(domain: Domain, initial: State, goal: Task) -> list[tuple]:
    out = []
    for tree in structural_trees(domain, goal):
        got = replay(domain, tree, initial)
        if got is not None:
            out.append(got[0])
    return out


# -- parser -------------------------------------------------------------------


def derivations(productions, start, max_len: int, max_steps: int = 8):
    """All (yield, tree) pairs reachable by at most ``max_steps`` leftmost rewrites."""
    heads = {p.lhs for p in productions}
    results = []

    def expand(symbol, budget):
        # yields (tree, leaves, steps_used)
        if symbol not in heads:
            yield (str(symbol),), (symbol,), 0
            return
        if budget == 0:
            return
        for p in productions:
            if p.lhs != symbol:
                continue
            for kids, leaves, used in seq(p.rhs, budget - 1):
                yield (str(symbol), str(p.label), kids), leaves, used + 1

    def seq(symbols, budget):
        if not symbols:
            yield (), (), 0
            return
        for t1, l1, u1 in expand(symbols[0], budget):
            for t2, l2, u2 in seq(symbols[1:], budget - u1):
                if len(l1) + len(l2) <= max_len:
                    yield (t1,) + t2, l1 + l2, u1 + u2

    for tree, leaves, _ in expand(start, max_steps):
        results.append((leaves, tree))
    return results


def tree_tuple(t) -> tuple:
    if t.is_leaf:
        return (str(t.symbol),)
    return (str(t.symbol), str(t.production.label), tuple(tree_tuple(c) for c in t.children))


# -- counters -----------------------------------------------------------------


def _entered(node) -> list:
    return [n.state_after for n in node.walk() if not n.children]


def recount(plans, planner):
    """Recount OC/FC from scratch, straight from the counting rules.

    OC support: number of nodes with task y under which z occurs.
    OC refute: number of nodes with task y under which z does not occur.
    FC refute: same as OC support.
    FC support: number of runs in which (y, z) was seen under y in some
    alternative of some node but never under y in the run itself.
    """
    oc_s, oc_visits, fc_r, fc_s = Counter(), Counter(), Counter(), Counter()
    for plan in plans:
        seen_here = set()
        for node in plan.root.walk():
            if node.task.name.startswith("__"):
                continue
            oc_visits[node.task] += 1
            conds = {d.task for d in list(node.walk())[1:]} | set(_entered(node))
            for z in conds:
                oc_s[(node.task, z)] += 1
                fc_r[(node.task, z)] += 1
                seen_here.add((node.task, z))
        avoided = set()
        for node in plan.root.walk():
            if node.task.name.startswith("__"):
                continue
            for alt in planner.expand(node.task, node.state_before):
                for tau in alt.walk():
                    for d in list(tau.walk())[1:]:
                        if (tau.task, d.task) not in seen_here:
                            avoided.add((tau.task, d.task))
                    for s in _entered(tau):
                        if (tau.task, s) not in seen_here:
                            avoided.add((tau.task, s))
        for pair in avoided:
            fc_s[pair] += 1
    oc = {k: (v, oc_visits[k[0]] - v) for k, v in oc_s.items()}
    fc = {k: (fc_s.get(k, 0), fc_r.get(k, 0)) for k in set(fc_s) | set(fc_r)}
    return oc, fc
