"""HTN domains as context-free grammars, and an Earley chart parser.

A ground method ``task -> network`` becomes the production
``task -> network``; ground primitive tasks are the terminals. The parser
works on arbitrary CFGs (epsilon rules, unit rules, any right-hand-side
length) and expands the packed chart into explicit parse trees.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .errors import EmptyGrammar, NoParse
from .model import Domain, Method, Task

logger = logging.getLogger(__name__)

START = Task("__start__")


@dataclass(frozen=True, order=True)
class Production:
    lhs: Hashable
    rhs: tuple
    label: Hashable = None  # the ground method, or the goal for synthetic start rules

    def __str__(self) -> str:
        return f"{self.lhs} -> {' '.join(map(str, self.rhs)) or 'ε'}"


@dataclass(frozen=True)
class Grammar:
    start: Hashable
    productions: tuple[Production, ...]
    terminals: frozenset
    synthetic_start: bool = False
    _by_lhs: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_lhs = defaultdict(list)
        for p in self.productions:
            by_lhs[p.lhs].append(p)
        object.__setattr__(self, "_by_lhs", dict(by_lhs))
        overlap = self.terminals & set(by_lhs)
        if overlap:
            raise ValueError(f"symbols both terminal and nonterminal: {sorted(map(str, overlap))}")

    @property
    def nonterminals(self) -> frozenset:
        return frozenset(self._by_lhs)

    def productions_for(self, symbol) -> list[Production]:
        return self._by_lhs.get(symbol, [])

    def is_terminal(self, symbol) -> bool:
        return symbol not in self._by_lhs

    def __str__(self) -> str:
        return "\n".join(str(p) for p in self.productions)


@dataclass(frozen=True)
class ParseTree:
    symbol: Hashable
    production: Production | None = None
    children: tuple["ParseTree", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.production is None

    def leaves(self) -> list:
        if self.is_leaf:
            return [self.symbol]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out

    def sort_key(self) -> tuple:
        label = self.production.label if self.production is not None else None
        return (str(self.symbol), _label_key(label), tuple(c.sort_key() for c in self.children))

    def __str__(self) -> str:
        if self.is_leaf:
            return str(self.symbol)
        return f"{self.symbol}({','.join(str(c) for c in self.children)})"


def _label_key(label) -> tuple:
    if label is None:
        return ()
    if isinstance(label, Method):
        return (str(label.name), label.binding)
    return (str(label),)


def to_grammar(domain: Domain, goals: Iterable[Task]) -> Grammar:
    """Grammar whose derivations are the decompositions of ``goals``.

    ``domain`` should be ground. With several goals a synthetic start
    symbol gets one unit production per goal.
    """
    goals = sorted(set(goals))
    productions = [Production(m.task, m.network, m) for m in domain.methods]
    terminals = frozenset(o.name for o in domain.operators)
    heads = {p.lhs for p in productions}
    live = [g for g in goals if g in heads or g in terminals]
    if not live:
        raise EmptyGrammar(f"no method refines any of the goals {[str(g) for g in goals]}")
    if len(goals) == 1 and goals[0] in heads:
        start, synthetic = goals[0], False
    else:
        productions += [Production(START, (g,), g) for g in live]
        start, synthetic = START, True
    reachable = _reachable(productions, start)
    productions = sorted((p for p in productions if p.lhs in reachable), key=_production_key)
    used = {s for p in productions for s in p.rhs if s not in heads}
    return Grammar(start, tuple(productions), frozenset(terminals & (used | {start})), synthetic)


def _production_key(p: Production) -> tuple:
    return (str(p.lhs), _label_key(p.label), tuple(map(str, p.rhs)))


def _reachable(productions, start) -> set:
    by_lhs = defaultdict(list)
    for p in productions:
        by_lhs[p.lhs].append(p)
    seen = {start}
    stack = [start]
    while stack:
        sym = stack.pop()
        for p in by_lhs.get(sym, ()):
            for s in p.rhs:
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
    return seen


# Earley parsing. Items are (production, dot, origin); chart[k] holds the
# items ending at position k.


def _nullable(grammar: Grammar) -> set:
    nullable = set()
    changed = True
    while changed:
        changed = False
        for p in grammar.productions:
            if p.lhs not in nullable and all(s in nullable for s in p.rhs):
                nullable.add(p.lhs)
                changed = True
    return nullable


def earley_chart(grammar: Grammar, tokens: Sequence) -> list[set]:
    nullable = _nullable(grammar)
    n = len(tokens)
    chart: list[set] = [set() for _ in range(n + 1)]
    for p in grammar.productions_for(grammar.start):
        chart[0].add((p, 0, 0))

    for k in range(n + 1):
        agenda = list(chart[k])
        while agenda:
            prod, dot, origin = agenda.pop()
            new = []
            if dot < len(prod.rhs):
                sym = prod.rhs[dot]
                if grammar.is_terminal(sym):
                    if k < n and tokens[k] == sym:
                        chart[k + 1].add((prod, dot + 1, origin))
                else:
                    for q in grammar.productions_for(sym):
                        new.append((q, 0, k))
                    if sym in nullable:
                        # Aycock-Horspool: step over a nullable symbol immediately
                        new.append((prod, dot + 1, origin))
            else:
                for (p2, d2, o2) in list(chart[origin]):
                    if d2 < len(p2.rhs) and p2.rhs[d2] == prod.lhs:
                        new.append((p2, d2 + 1, o2))
            for item in new:
                if item not in chart[k]:
                    chart[k].add(item)
                    agenda.append(item)
    return chart


def parse(grammar: Grammar, tokens: Sequence, limit: int | None = None) -> list[ParseTree]:
    """All parse trees of ``tokens`` from the start symbol, canonically ordered.

    Raises :class:`NoParse` when the sequence is not in the language.
    """
    tokens = tuple(tokens)
    unknown = [t for t in tokens if t not in grammar.terminals]
    if unknown:
        raise NoParse(f"unknown terminal(s) {', '.join(sorted(set(map(str, unknown))))}")
    chart = earley_chart(grammar, tokens)
    n = len(tokens)
    complete: dict[tuple, list[Production]] = defaultdict(list)
    for k, items in enumerate(chart):
        for prod, dot, origin in items:
            if dot == len(prod.rhs):
                complete[(prod.lhs, origin, k)].append(prod)
    if not complete.get((grammar.start, 0, n)):
        shown = " ".join(map(str, tokens)) or "<empty>"
        raise NoParse(f"sequence {shown} is not derivable from {grammar.start}")

    memo: dict[tuple, list[ParseTree]] = {}
    active: set = set()

    def trees(symbol, i: int, j: int) -> list[ParseTree]:
        if grammar.is_terminal(symbol):
            return [ParseTree(symbol)] if j == i + 1 and tokens[i] == symbol else []
        key = (symbol, i, j)
        if key in memo:
            return memo[key]
        if key in active:
            return []  # cyclic unit/epsilon derivations are cut
        active.add(key)
        out = []
        for prod in sorted(set(complete.get(key, ())), key=_production_key):
            for kids in splits(prod.rhs, i, j):
                out.append(ParseTree(symbol, prod, kids))
        active.discard(key)
        out.sort(key=ParseTree.sort_key)
        memo[key] = out
        return out

    def splits(rhs: tuple, i: int, j: int):
        if not rhs:
            if i == j:
                yield ()
            return
        head, rest = rhs[0], rhs[1:]
        ends = [i + 1] if grammar.is_terminal(head) else range(i, j + 1)
        for m in ends:
            if m > j or (rest == () and m != j):
                continue
            firsts = trees(head, i, m)
            if not firsts:
                continue
            for tail in splits(rest, m, j):
                for t in firsts:
                    yield (t,) + tail

    result = trees(grammar.start, 0, n)
    if limit is not None:
        result = result[:limit]
    return result
