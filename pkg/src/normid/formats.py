"""JSON file formats for domains, runs, norms and scenarios.

Atoms, literals and tasks are written as strings: ``name`` or
``name(arg1,arg2)``, with a leading ``!`` marking a negative literal.
See ``docs/formats.md`` for the full grammar.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any, Iterable

from .errors import DomainError
from .model import Atom, Domain, Literal, Method, Operator, State, Task
from .norms import Modality, Norm, NormSet
from .recognizer import Run
from .simulator import Goal, Scenario

_IDENT = r"[A-Za-z0-9_][A-Za-z0-9_\-]*"
_EXPR = re.compile(rf"^\s*(!?)\s*({_IDENT})\s*(?:\(\s*(.*?)\s*\))?\s*$")
_ARG = re.compile(rf"^{_IDENT}$")


def _parse(text: str, cls, allow_negation: bool = False):
    m = _EXPR.match(text)
    if m is None:
        raise ValueError(f"cannot parse {text!r}")
    neg, name, body = m.groups()
    if neg and not allow_negation:
        raise ValueError(f"negation not allowed in {text!r}")
    args = () if not body else tuple(a.strip() for a in body.split(","))
    for a in args:
        if not _ARG.match(a):
            raise ValueError(f"bad argument {a!r} in {text!r}")
    return cls(name, args), bool(neg)


def parse_atom(text: str) -> Atom:
    return _parse(text, Atom)[0]


def parse_task(text: str) -> Task:
    return _parse(text, Task)[0]


def parse_literal(text: str) -> Literal:
    atom, neg = _parse(text, Atom, allow_negation=True)
    return Literal(atom, not neg)


def parse_state(items: Iterable[str]) -> State:
    return State(frozenset(parse_atom(a) for a in items))


def state_to_list(state: State) -> list[str]:
    return [str(a) for a in state.canonical]


# -- domain -------------------------------------------------------------------


def _predicates(raw) -> dict[str, int] | None:
    if raw is None:
        return None
    if isinstance(raw, dict):
        return {str(k): int(v) for k, v in raw.items()}
    out = {}
    for item in raw:
        if isinstance(item, str):
            name, _, arity = item.partition("/")
            out[name] = int(arity or 0)
        else:
            name, arity = item
            out[name] = int(arity)
    return out


def domain_from_dict(data: dict, name: str = "domain") -> Domain:
    try:
        operators = [
            Operator(
                Task(o["name"], tuple(o.get("params", ()))),
                tuple(parse_literal(x) for x in o.get("pre", ())),
                tuple(parse_atom(x) for x in o.get("add", ())),
                tuple(parse_atom(x) for x in o.get("del", ())),
            )
            for o in data.get("operators", ())
        ]
        methods = [
            Method(
                Task(m["name"], tuple(m.get("params", ()))),
                parse_task(m["task"]),
                tuple(parse_atom(x) for x in m.get("precond_pos", ())),
                tuple(parse_atom(x) for x in m.get("precond_neg", ())),
                tuple(parse_task(x) for x in m.get("subtasks", ())),
            )
            for m in data.get("methods", ())
        ]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed domain {name}: {exc}") from exc
    return Domain(
        tuple(operators),
        tuple(methods),
        constants=tuple(data.get("constants", ())),
        predicates=_predicates(data.get("predicates")),
        name=data.get("name", name),
    )


def domain_to_dict(domain: Domain) -> dict:
    def pos(atoms):
        return [str(a) for a in atoms]

    return {
        "name": domain.name,
        "constants": list(domain.constants),
        "predicates": dict(sorted(domain.predicates.items())),
        "operators": [
            {
                "name": o.name.name,
                "params": list(o.name.args),
                "pre": [str(l) for l in o.pre],
                "add": pos(o.add),
                "del": pos(o.delete),
            }
            for o in domain.operators
        ],
        "methods": [
            {
                "name": m.name.name,
                "params": list(m.name.args),
                "task": str(m.task),
                "precond_pos": pos(m.precond_pos),
                "precond_neg": pos(m.precond_neg),
                "subtasks": [str(t) for t in m.network],
            }
            for m in domain.methods
        ],
    }


# -- runs ---------------------------------------------------------------------


def runs_from_list(data: list) -> list[Run]:
    runs = []
    for i, r in enumerate(data):
        try:
            goal = r.get("goal")
            runs.append(
                Run(
                    parse_state(r.get("initial_state", ())),
                    tuple(parse_task(a) for a in r["actions"]),
                    parse_task(goal) if goal else None,
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"run {i}: {exc}") from exc
    return runs


def runs_to_list(runs: Iterable[Run]) -> list[dict]:
    out = []
    for r in runs:
        item: dict[str, Any] = {
            "initial_state": state_to_list(r.initial),
            "actions": [str(t) for t in r.observations],
        }
        if r.goal is not None:
            item["goal"] = str(r.goal)
        out.append(item)
    return out


# -- norms --------------------------------------------------------------------


def norm_from_dict(d: dict) -> Norm:
    cond = d["condition"]
    if isinstance(cond, dict):
        condition = parse_state(cond["state"])
    else:
        condition = parse_task(cond)
    return Norm(Modality(d["modality"]), parse_task(d["context"]), condition)


def norm_to_dict(norm: Norm, evidence: tuple[int, int] | None = None) -> dict:
    cond = norm.condition
    out: dict[str, Any] = {
        "modality": norm.modality.value,
        "context": str(norm.context),
        "condition": {"state": state_to_list(cond)} if isinstance(cond, State) else str(cond),
    }
    if evidence is not None:
        out["evidence"] = {"supporting": evidence[0], "refuting": evidence[1]}
    return out


def norms_from_list(data: list) -> NormSet:
    norms, evidence = [], {}
    for d in data:
        n = norm_from_dict(d)
        norms.append(n)
        if "evidence" in d:
            evidence[n] = (int(d["evidence"]["supporting"]), int(d["evidence"]["refuting"]))
    return NormSet(tuple(norms), evidence=evidence)


def norms_to_list(norms: NormSet | Iterable[Norm]) -> list[dict]:
    evidence = getattr(norms, "evidence", {}) or {}
    ordered = norms.norms if isinstance(norms, NormSet) else sorted(norms, key=Norm.sort_key)
    return [norm_to_dict(n, evidence.get(n)) for n in ordered]


# -- files --------------------------------------------------------------------


def dumps(obj) -> str:
    """Deterministic JSON text (stable key order, trailing newline)."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def read_json(path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def load_domain(path) -> Domain:
    return domain_from_dict(read_json(path), name=Path(path).stem)


def load_runs(path) -> list[Run]:
    return runs_from_list(read_json(path))


def save_runs(path, runs: Iterable[Run]) -> None:
    write_json(path, runs_to_list(runs))


def load_norms(path) -> NormSet:
    return norms_from_list(read_json(path))


def save_norms(path, norms) -> None:
    write_json(path, norms_to_list(norms))


def scenario_from_dict(data: dict, base: Path | None = None) -> Scenario:
    base = Path(base) if base is not None else Path(".")

    def resolve(p):
        p = Path(p)
        return p if p.is_absolute() else base / p

    domain = data["domain"]
    domain = domain_from_dict(domain) if isinstance(domain, dict) else load_domain(resolve(domain))
    norms = data.get("norms", [])
    planted = norms_from_list(norms) if isinstance(norms, list) else load_norms(resolve(norms))
    goals = tuple(
        Goal(
            parse_task(g["task"]),
            float(g.get("weight", 1.0)),
            parse_state(g["initial_state"]) if "initial_state" in g else None,
        )
        for g in data["goals"]
    )
    return Scenario(
        domain=domain,
        planted=planted,
        goals=goals,
        initial=parse_state(data.get("initial_state", ())),
        violation_rate=float(data.get("violation_rate", 0.0)),
        seed=int(data.get("seed", 0)),
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    return scenario_from_dict(read_json(path), base=path.parent)
