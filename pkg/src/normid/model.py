"""First-order planning language: terms, atoms, states, operators, methods, domains.

Terms are plain strings. Following the Prolog convention, a term whose first
character is uppercase or ``_`` is a variable; anything else is a constant.
Substitutions are ordinary ``dict[str, str]`` maps from variable to term.

All value types are immutable and totally ordered so that every enumeration
in the package can be made deterministic.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import DomainError

Substitution = dict  # variable name -> term


def is_variable(term: str) -> bool:
    return term[:1].isupper() or term[:1] == "_"


def _format(name: str, args: tuple[str, ...]) -> str:
    if not args:
        return name
    return f"{name}({','.join(args)})"


@dataclass(frozen=True, order=True)
class _Compound:
    name: str
    args: tuple[str, ...] = ()

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    def __str__(self) -> str:
        return _format(self.name, self.args)

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_ground(self) -> bool:
        return not any(is_variable(a) for a in self.args)

    def variables(self) -> tuple[str, ...]:
        """Variables in order of first appearance."""
        return tuple(dict.fromkeys(a for a in self.args if is_variable(a)))

    def substitute(self, sigma: Mapping[str, str]):
        if not sigma:
            return self
        return type(self)(self.name, tuple(sigma.get(a, a) for a in self.args))


class Atom(_Compound):
    """A predicate applied to terms, e.g. ``at(X)``."""


class Task(_Compound):
    """A task symbol applied to terms, e.g. ``travel(aberdeen,paris)``."""


@dataclass(frozen=True, order=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"!{self.atom}"

    def substitute(self, sigma: Mapping[str, str]) -> "Literal":
        return Literal(self.atom.substitute(sigma), self.positive)


def match(pattern: _Compound, ground: _Compound, sigma: Mapping[str, str] | None = None):
    """One-way unification of ``pattern`` against a ground compound.

    Returns the extended substitution, or ``None`` when they do not match.
    """
    if pattern.name != ground.name or len(pattern.args) != len(ground.args):
        return None
    out = dict(sigma) if sigma else {}
    for p, g in zip(pattern.args, ground.args):
        if is_variable(p):
            bound = out.get(p)
            if bound is None:
                out[p] = g
            elif bound != g:
                return None
        elif p != g:
            return None
    return out


def substitution_key(sigma: Mapping[str, str]) -> tuple:
    return tuple(sorted(sigma.items()))


@dataclass(frozen=True)
class State:
    """A finite set of ground atoms."""

    atoms: frozenset[Atom] = frozenset()

    def __post_init__(self):
        atoms = frozenset(self.atoms)
        for a in atoms:
            if not a.is_ground:
                raise ValueError(f"state atom {a} is not ground")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def of(cls, *atoms: Atom) -> "State":
        return cls(frozenset(atoms))

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.atoms

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.canonical)

    def __len__(self) -> int:
        return len(self.atoms)

    def __lt__(self, other: "State") -> bool:
        return self.canonical < other.canonical

    def __le__(self, other: "State") -> bool:
        return self.canonical <= other.canonical

    @cached_property
    def canonical(self) -> tuple[Atom, ...]:
        return tuple(sorted(self.atoms))

    @cached_property
    def by_predicate(self) -> dict[tuple[str, int], tuple[Atom, ...]]:
        index = defaultdict(list)
        for a in self.canonical:
            index[(a.name, a.arity)].append(a)
        return {k: tuple(v) for k, v in index.items()}

    def __str__(self) -> str:
        return "{" + ", ".join(str(a) for a in self.canonical) + "}"

    def __repr__(self) -> str:
        return f"State({self})"


def satisfiers(
    state: State,
    goal: Iterable[Literal],
    sigma: Mapping[str, str] | None = None,
    constants: Iterable[str] | None = None,
    extra_vars: Iterable[str] = (),
) -> Iterator[dict]:
    """Yield every substitution under which ``state`` satisfies ``goal``.

    Positive literals bind variables against state atoms. Variables that
    remain unbound afterwards (appearing only in negative literals or in
    ``extra_vars``) range over ``constants``. When ``constants`` is None a
    negative literal with unbound variables holds iff no state atom matches it.
    """
    goal = list(goal)
    positives = sorted((lit.atom for lit in goal if lit.positive), key=lambda a: (a.is_ground, a))
    negatives = [lit.atom for lit in goal if not lit.positive]
    consts = None if constants is None else sorted(set(constants))

    def finish(s: dict) -> Iterator[dict]:
        pending = set(extra_vars)
        for n in negatives:
            pending.update(n.variables())
        pending = sorted(v for v in pending if v not in s)
        if pending and consts is not None:
            choices = itertools.product(consts, repeat=len(pending))
        else:
            choices = [()]
        for combo in choices:
            full = dict(s)
            full.update(zip(pending, combo))
            if all(_negative_holds(state, n.substitute(full)) for n in negatives):
                yield full

    def search(i: int, s: dict) -> Iterator[dict]:
        if i == len(positives):
            yield from finish(s)
            return
        pattern = positives[i].substitute(s)
        if pattern.is_ground:
            if pattern in state:
                yield from search(i + 1, s)
            return
        for candidate in state.by_predicate.get((pattern.name, pattern.arity), ()):
            ext = match(pattern, candidate, s)
            if ext is not None:
                yield from search(i + 1, ext)

    yield from search(0, dict(sigma) if sigma else {})


def _negative_holds(state: State, atom: Atom) -> bool:
    if atom.is_ground:
        return atom not in state
    return not any(match(atom, a) is not None for a in state.by_predicate.get((atom.name, atom.arity), ()))


def satisfies(state: State, goal: Iterable[Literal], constants: Iterable[str] | None = None):
    """Canonically least substitution σ with ``state ⊨ σ(goal)``, or None."""
    found = list(satisfiers(state, goal, constants=constants))
    if not found:
        return None
    return min(found, key=substitution_key)


def _check_vars_distinct(name: _Compound, what: str) -> None:
    seen = [a for a in name.args if is_variable(a)]
    if len(seen) != len(set(seen)):
        raise DomainError(f"{what} {name}: parameter variables must be distinct")


@dataclass(frozen=True, order=True)
class Operator:
    """Action template ``(name, pre, post+, post-)``."""

    name: Task
    pre: tuple[Literal, ...] = ()
    add: tuple[Atom, ...] = ()
    delete: tuple[Atom, ...] = ()

    def __post_init__(self):
        for attr in ("pre", "add", "delete"):
            object.__setattr__(self, attr, tuple(sorted(set(getattr(self, attr)))))
        _check_vars_distinct(self.name, "operator")
        params = set(self.name.variables())
        free = {v for lit in self.pre for v in lit.atom.variables()}
        free |= {v for a in self.add + self.delete for v in a.variables()}
        if not free <= params:
            raise DomainError(f"operator {self.name}: free variables {sorted(free - params)} not in name")

    def instantiate(self, sigma: Mapping[str, str]) -> "Operator":
        return Operator(
            self.name.substitute(sigma),
            tuple(lit.substitute(sigma) for lit in self.pre),
            tuple(a.substitute(sigma) for a in self.add),
            tuple(a.substitute(sigma) for a in self.delete),
        )


@dataclass(frozen=True, order=True)
class Action:
    """A ground instance of an operator."""

    operator: Operator
    grounding: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if isinstance(self.grounding, Mapping):
            object.__setattr__(self, "grounding", substitution_key(self.grounding))
        missing = set(self.operator.name.variables()) - {v for v, _ in self.grounding}
        if missing:
            raise ValueError(f"action of {self.operator.name} leaves {sorted(missing)} unbound")

    @cached_property
    def ground(self) -> Operator:
        return self.operator.instantiate(dict(self.grounding))

    @property
    def task(self) -> Task:
        return self.ground.name

    @property
    def pre(self) -> tuple[Literal, ...]:
        return self.ground.pre

    @property
    def add(self) -> tuple[Atom, ...]:
        return self.ground.add

    @property
    def delete(self) -> tuple[Atom, ...]:
        return self.ground.delete

    def __str__(self) -> str:
        return str(self.task)


def applicable(action: Action, state: State) -> bool:
    return all((lit.atom in state) == lit.positive for lit in action.pre)


def apply(action: Action, state: State) -> State:
    """Successor state ``(s ∪ add) \\ del``; ``s`` itself when inapplicable.

    The deletion is applied after the union, so an atom both added and
    deleted ends up absent.
    """
    if not applicable(action, state):
        return state
    return State((state.atoms | frozenset(action.add)) - frozenset(action.delete))


@dataclass(frozen=True, order=True)
class Method:
    """Decomposition rule ``(name, task, precond+, precond-, network)``.

    ``binding`` is empty for lifted methods; ground instances produced by
    :meth:`instantiate` record the full substitution there, which keeps
    instances distinct even when the name does not mention every variable.
    """

    name: Task
    task: Task
    precond_pos: tuple[Atom, ...] = ()
    precond_neg: tuple[Atom, ...] = ()
    network: tuple[Task, ...] = ()
    binding: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "precond_pos", tuple(sorted(set(self.precond_pos))))
        object.__setattr__(self, "precond_neg", tuple(sorted(set(self.precond_neg))))
        object.__setattr__(self, "network", tuple(self.network))
        head = set(self.name.variables()) | set(self.task.variables())
        pre = {v for a in self.precond_pos + self.precond_neg for v in a.variables()}
        body = {v for t in self.network for v in t.variables()}
        if not body <= head | pre:
            raise DomainError(
                f"method {self.name}: network variables {sorted(body - head - pre)} are never bound"
            )

    @property
    def preconditions(self) -> tuple[Literal, ...]:
        return tuple(Literal(a) for a in self.precond_pos) + tuple(Literal(a, False) for a in self.precond_neg)

    def variables(self) -> tuple[str, ...]:
        seen = list(self.name.variables()) + list(self.task.variables())
        for a in self.precond_pos + self.precond_neg:
            seen.extend(a.variables())
        for t in self.network:
            seen.extend(t.variables())
        return tuple(dict.fromkeys(seen))

    def instantiate(self, sigma: Mapping[str, str]) -> "Method":
        return Method(
            self.name.substitute(sigma),
            self.task.substitute(sigma),
            tuple(a.substitute(sigma) for a in self.precond_pos),
            tuple(a.substitute(sigma) for a in self.precond_neg),
            tuple(t.substitute(sigma) for t in self.network),
            substitution_key({**dict(self.binding), **{v: sigma[v] for v in self.variables() if v in sigma}}),
        )

    @property
    def ident(self) -> str:
        """Stable textual identifier, unique among ground instances."""
        text = str(self.name)
        if not self.binding:
            return text
        return f"{text}[{','.join(f'{v}={c}' for v, c in self.binding)}]"

    def __str__(self) -> str:
        return self.ident


@dataclass(frozen=True, eq=False)
class Domain:
    """Operators and methods over a finite symbolic language.

    ``predicates`` maps predicate names to arities; when omitted it is
    inferred from the atoms used. Validation runs at construction time.
    """

    operators: tuple[Operator, ...]
    methods: tuple[Method, ...]
    constants: tuple[str, ...] = ()
    predicates: Mapping[str, int] | None = None
    name: str = "domain"
    _ops: dict = field(init=False, repr=False, compare=False)
    _methods: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "operators", tuple(self.operators))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "constants", tuple(sorted(set(self.constants))))
        ops = defaultdict(list)
        for o in self.operators:
            ops[o.name.name].append(o)
        meths = defaultdict(list)
        for m in self.methods:
            meths[m.task.name].append(m)
        object.__setattr__(self, "_ops", dict(ops))
        object.__setattr__(self, "_methods", dict(meths))
        if self.predicates is None:
            object.__setattr__(self, "predicates", self._inferred_predicates())
        else:
            object.__setattr__(self, "predicates", dict(self.predicates))
        self._validate()

    def _atoms(self) -> Iterator[Atom]:
        for o in self.operators:
            yield from (lit.atom for lit in o.pre)
            yield from o.add
            yield from o.delete
        for m in self.methods:
            yield from m.precond_pos
            yield from m.precond_neg

    def _inferred_predicates(self) -> dict[str, int]:
        arities: dict[str, int] = {}
        for a in self._atoms():
            if arities.setdefault(a.name, a.arity) != a.arity:
                raise DomainError(f"predicate {a.name} used with arities {arities[a.name]} and {a.arity}")
        return arities

    def _validate(self) -> None:
        for a in self._atoms():
            if self.predicates.get(a.name) != a.arity:
                raise DomainError(f"atom {a} does not match a declared predicate")
        primitive = set(self._ops)
        compound = set(self._methods)
        if primitive & compound:
            raise DomainError(f"task symbols both primitive and compound: {sorted(primitive & compound)}")
        tasks = primitive | compound
        clash = (set(self.predicates) & tasks) | (set(self.constants) & (tasks | set(self.predicates)))
        if clash:
            raise DomainError(f"names used in more than one namespace: {sorted(clash)}")
        arity: dict[str, int] = {}
        for t in self._all_tasks():
            if arity.setdefault(t.name, t.arity) != t.arity:
                raise DomainError(f"task symbol {t.name} used with different arities")
            if t.name not in tasks:
                raise DomainError(f"task {t} has neither an operator nor a method")
        for m in self.methods:
            for c in itertools.chain(m.name.args, m.task.args, *(t.args for t in m.network)):
                if not is_variable(c) and self.constants and c not in self.constants:
                    raise DomainError(f"method {m.name} uses undeclared constant {c}")
        self._check_acyclic()

    def _all_tasks(self) -> Iterator[Task]:
        for o in self.operators:
            yield o.name
        for m in self.methods:
            yield m.task
            yield from m.network

    def _check_acyclic(self) -> None:
        edges = {s: {t.name for m in ms for t in m.network} for s, ms in self._methods.items()}
        state: dict[str, int] = {}

        def visit(sym: str, path: list[str]) -> None:
            mark = state.get(sym)
            if mark == 2:
                return
            if mark == 1:
                cycle = path[path.index(sym):] + [sym]
                raise DomainError(f"cyclic decomposition: {' -> '.join(cycle)}")
            state[sym] = 1
            for nxt in sorted(edges.get(sym, ())):
                visit(nxt, path + [sym])
            state[sym] = 2

        for sym in sorted(edges):
            visit(sym, [])

    # lookups

    def is_primitive(self, task: Task) -> bool:
        return task.name in self._ops

    def is_compound(self, task: Task) -> bool:
        return task.name in self._methods

    @property
    def primitive_symbols(self) -> tuple[str, ...]:
        return tuple(sorted(self._ops))

    @property
    def compound_symbols(self) -> tuple[str, ...]:
        return tuple(sorted(self._methods))

    @property
    def top_level_symbols(self) -> tuple[str, ...]:
        """Compound symbols that never appear inside a method network."""
        inner = {t.name for m in self.methods for t in m.network}
        return tuple(s for s in self.compound_symbols if s not in inner)

    def operators_for(self, symbol: str) -> tuple[Operator, ...]:
        return tuple(self._ops.get(symbol, ()))

    def methods_for(self, symbol: str) -> tuple[Method, ...]:
        return tuple(self._methods.get(symbol, ()))

    def action_for(self, task: Task) -> Action | None:
        """The action realizing a ground primitive task, if any operator matches."""
        for op in self._ops.get(task.name, ()):
            sigma = match(op.name, task)
            if sigma is not None:
                return Action(op, sigma)
        return None
