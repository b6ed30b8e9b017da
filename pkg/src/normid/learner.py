"""Norm identification from observed runs.

Two learners share the same evidence extraction:

* :class:`NormLearner` / :func:`learn_norms` assume every observed agent is
  compliant. Executed conditions can never be prohibited and the potential
  obligations of a context shrink to what every observation of it shares.
* :func:`t_learn_norms` tallies supporting and refuting evidence per
  candidate in :class:`CounterTable` objects and keeps candidates whose
  support-to-refutation ratio clears a threshold, tolerating violations.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping

from .errors import InvalidThreshold, NoParse, StateMismatch
from .grounding import DEFAULT_GROUND_CAP
from .model import Domain, Task
from .norms import F, Modality, Norm, NormSet, O
from .planner import DEFAULT_DEPTH_CAP, Plan, Planner
from .recognizer import Recognizer, Run

logger = logging.getLogger(__name__)


# -- evidence -----------------------------------------------------------------


def context_conditions(plan: Plan) -> Iterator[tuple[Task, set]]:
    """Per task node: its context and the distinct conditions occurring under it."""
    for node in plan.nodes():
        conds = set(node.subtasks)
        conds.update(node.entered_states)
        yield node.task, conds


def extract_compliance_evidence(plan: Plan) -> tuple[set[Norm], set[Norm]]:
    """``(pO, notF)``: every executed subtask and entered state, per context."""
    p_o, not_f = set(), set()
    for ctx, conds in context_conditions(plan):
        for z in conds:
            p_o.add(Norm(O, ctx, z))
            not_f.add(Norm(F, ctx, z))
    return p_o, not_f


def _occurrence_index(plan: Plan) -> dict[Task, set]:
    index: dict[Task, set] = defaultdict(set)
    for ctx, conds in context_conditions(plan):
        index[ctx] |= conds
    return index


def avoided_pairs(plan: Plan, planner: Planner) -> set[tuple[Task, object]]:
    """Context/condition pairs seen in alternative plans but not in ``plan``.

    For every node t of ``plan``, every decomposition of t's task from the
    state t started in is enumerated. Each node τ of such an alternative
    contributes the subtasks and entered states it has that no node of
    ``plan`` with the same task has.
    """
    seen = _occurrence_index(plan)
    avoided = set()
    for node in plan.nodes():
        for alt in planner.expand(node.task, node.state_before):
            for tau in alt.walk():
                have = seen.get(tau.task, set())
                for z in tau.subtasks:
                    if z not in have:
                        avoided.add((tau.task, z))
                for s in tau.entered_states:
                    if s not in have:
                        avoided.add((tau.task, s))
    return avoided


def extract_avoidance_evidence(plan: Plan, domain_or_planner) -> set[Norm]:
    """``pF``: prohibitions that would explain what the alternatives did and ``plan`` did not."""
    planner = domain_or_planner if isinstance(domain_or_planner, Planner) else Planner(domain_or_planner)
    return {Norm(F, y, z) for y, z in avoided_pairs(plan, planner)}


# -- basic learner ------------------------------------------------------------

TOP = None  # lattice entry meaning "every obligation with this context is still possible"


@dataclass(frozen=True)
class ObligationLattice:
    """Potential obligations stored per context.

    A context absent from ``entries`` is TOP: nothing has been ruled out.
    Once a context is observed it holds an explicit condition set that
    only ever shrinks.
    """

    entries: Mapping[Task, frozenset] = field(default_factory=dict)

    def get(self, context: Task):
        return self.entries.get(context, TOP)

    def is_top(self, context: Task) -> bool:
        return context not in self.entries

    def contexts(self) -> list[Task]:
        return sorted(self.entries)

    def possible(self, context: Task, condition) -> bool:
        entry = self.get(context)
        return entry is TOP or condition in entry

    def norms(self) -> list[Norm]:
        """Explicit (observed-context) obligations, canonically ordered."""
        out = [Norm(O, c, z) for c, zs in self.entries.items() for z in zs]
        return sorted(out, key=Norm.sort_key)

    def __len__(self) -> int:
        return sum(len(zs) for zs in self.entries.values())


def context_intersect(
    pot_o: ObligationLattice,
    p_o: Iterable[Norm],
    contexts: Iterable[Task] = (),
) -> ObligationLattice:
    """Context-sensitive intersection of ``pot_o`` with the obligations ``p_o``.

    Contexts mentioned in ``p_o`` (or listed in ``contexts``, for observed
    contexts under which nothing occurred) are intersected; TOP becomes the
    explicit set. All other contexts pass through untouched.
    """
    grouped: dict[Task, set] = {c: set() for c in contexts}
    for n in p_o:
        grouped.setdefault(n.context, set()).add(n.condition)
    entries = dict(pot_o.entries)
    for ctx, conds in grouped.items():
        old = entries.get(ctx, TOP)
        entries[ctx] = frozenset(conds) if old is TOP else old & conds
    return ObligationLattice(entries)


class NormLearner:
    """Incremental violation-free learner; feed runs with :meth:`observe`.

    ``not_f`` accumulates over every run seen, so a prohibition ruled out
    once stays ruled out.
    """

    def __init__(
        self,
        domain: Domain,
        goals: Iterable[Task] | None = None,
        depth_cap: int = DEFAULT_DEPTH_CAP,
        ground_cap: int = DEFAULT_GROUND_CAP,
    ):
        self.domain = domain
        self.recognizer = Recognizer(domain, goals, ground_cap)
        self.planner = Planner(domain, depth_cap)
        self.pot_o = ObligationLattice()
        self.pot_f: frozenset[Norm] = frozenset()
        self.not_f: frozenset[Norm] = frozenset()
        self.plans: list[Plan] = []

    def observe(self, run: Run, run_index: int | None = None) -> Plan:
        if run_index is None:
            run_index = len(self.plans)
        plan = _recognize(self.recognizer, run, run_index)
        p_o, not_f = extract_compliance_evidence(plan)
        p_f = extract_avoidance_evidence(plan, self.planner)
        self.not_f = self.not_f | not_f
        self.pot_f = (self.pot_f | p_f) - self.not_f
        self.pot_o = context_intersect(self.pot_o, p_o, (n.task for n in plan.nodes()))
        self.plans.append(plan)
        return plan

    def norms(self) -> NormSet:
        return NormSet(tuple(self.pot_o.norms()) + tuple(self.pot_f))


def _recognize(recognizer: Recognizer, run: Run, index: int) -> Plan:
    try:
        return recognizer.recognize(run, index).plan
    except (NoParse, StateMismatch) as exc:
        if getattr(exc, "run_index", None) is None:
            raise type(exc)(str(exc), index) from exc
        raise


def learn_norms(
    runs: Iterable[Run],
    domain: Domain,
    goals: Iterable[Task] | None = None,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    ground_cap: int = DEFAULT_GROUND_CAP,
) -> tuple[ObligationLattice, frozenset[Norm]]:
    """Potential obligations and prohibitions consistent with compliant ``runs``."""
    learner = NormLearner(domain, goals, depth_cap, ground_cap)
    for i, run in enumerate(runs):
        learner.observe(run, i)
    return learner.pot_o, learner.pot_f


# -- threshold learner --------------------------------------------------------


class CounterTable:
    """(supporting, refuting) tallies per candidate norm of one modality.

    Missing candidates read as (0, 0). When ``derive_refutation`` is set
    the refuting count of ``X_y z`` is not stored but computed as the
    number of recorded visits to context y minus the visits in which z
    occurred (the supporting count), i.e. every y-node that completed
    without z. Tables merge by addition.
    """

    def __init__(self, modality: Modality, derive_refutation: bool = False):
        self.modality = Modality(modality)
        self.derive_refutation = derive_refutation
        self.supporting: Counter = Counter()
        self.refuting: Counter = Counter()
        self.visits: Counter = Counter()

    def __getitem__(self, norm: Norm) -> tuple[int, int]:
        key = norm.pair
        s = self.supporting.get(key, 0)
        if self.derive_refutation:
            if key not in self.supporting:
                return (0, 0)
            return (s, self.visits[norm.context] - s)
        return (s, self.refuting.get(key, 0))

    def keys(self) -> list[tuple[Task, object]]:
        keys = set(self.supporting)
        if not self.derive_refutation:
            keys |= set(self.refuting)
        return sorted(keys, key=lambda k: Norm(self.modality, *k).sort_key())

    def items(self) -> Iterator[tuple[Norm, tuple[int, int]]]:
        for key in self.keys():
            norm = Norm(self.modality, *key)
            yield norm, self[norm]

    def __len__(self) -> int:
        return len(self.keys())

    def __add__(self, other: "CounterTable") -> "CounterTable":
        if other.modality is not self.modality or other.derive_refutation != self.derive_refutation:
            raise ValueError("cannot merge counter tables of different kinds")
        out = CounterTable(self.modality, self.derive_refutation)
        out.supporting = self.supporting + other.supporting
        out.refuting = self.refuting + other.refuting
        out.visits = self.visits + other.visits
        return out

    def as_dict(self) -> dict[Norm, tuple[int, int]]:
        return dict(self.items())


def new_counters(refute_obligations: bool = True) -> tuple[CounterTable, CounterTable]:
    return CounterTable(O, derive_refutation=refute_obligations), CounterTable(F)


def count_plan(
    plan: Plan,
    oc: CounterTable,
    fc: CounterTable,
    planner: Planner,
) -> tuple[CounterTable, CounterTable]:
    """Fold one recognized plan into the counters (in place; also returned).

    Each task node t counts once per distinct condition z occurring under
    it: ``OC[O_t z]`` gains support and ``FC[F_t z]`` gains refutation.
    Every pair avoided relative to the alternative plans gains one unit of
    support in ``FC`` per run.
    """
    for ctx, conds in context_conditions(plan):
        oc.visits[ctx] += 1
        for z in conds:
            oc.supporting[(ctx, z)] += 1
            fc.refuting[(ctx, z)] += 1
    for pair in avoided_pairs(plan, planner):
        fc.supporting[pair] += 1
    return oc, fc


def update_counter(
    run: Run,
    oc: CounterTable,
    fc: CounterTable,
    domain: Domain,
    goals: Iterable[Task] | None = None,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    ground_cap: int = DEFAULT_GROUND_CAP,
) -> tuple[CounterTable, CounterTable]:
    """Recognize ``run`` and fold it into ``oc``/``fc``; see :func:`count_plan`."""
    plan = Recognizer(domain, goals, ground_cap).recognize(run).plan
    return count_plan(plan, oc, fc, Planner(domain, depth_cap))


def ratio_obligation(supporting: int, refuting: int, threshold: float) -> bool:
    return (refuting == 0 and supporting > 0) or (refuting != 0 and supporting / refuting > threshold)


def ratio_prohibition(supporting: int, refuting: int, threshold: float) -> bool:
    return refuting == 0 or supporting / refuting > threshold


ThresholdTest = Callable[[int, int, float], bool]


def filter_counters(
    oc: CounterTable,
    fc: CounterTable,
    ot: float,
    ft: float,
    keep_obligation: ThresholdTest = ratio_obligation,
    keep_prohibition: ThresholdTest = ratio_prohibition,
) -> NormSet:
    """Threshold the counters, then drop pairs kept under both modalities."""
    check_thresholds(ot, ft)
    pot_o = {n: c for n, c in oc.items() if keep_obligation(*c, ot)}
    pot_f = {n: c for n, c in fc.items() if keep_prohibition(*c, ft)}
    clash = {n.pair for n in pot_o} & {n.pair for n in pot_f}
    kept = {n: c for n, c in list(pot_o.items()) + list(pot_f.items()) if n.pair not in clash}
    return NormSet(tuple(kept), evidence=kept)


def check_thresholds(ot: float, ft: float) -> None:
    for name, value in (("OT", ot), ("FT", ft)):
        if not value > 0:
            raise InvalidThreshold(f"{name} must be > 0, got {value}")


@dataclass
class ThresholdLearning:
    norms: NormSet
    oc: CounterTable
    fc: CounterTable
    plans: list[Plan]


def count_runs(
    runs: Iterable[Run],
    domain: Domain,
    goals: Iterable[Task] | None = None,
    refute_obligations: bool = True,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    ground_cap: int = DEFAULT_GROUND_CAP,
) -> tuple[CounterTable, CounterTable, list[Plan]]:
    recognizer = Recognizer(domain, goals, ground_cap)
    planner = Planner(domain, depth_cap)
    oc, fc = new_counters(refute_obligations)
    plans = []
    for i, run in enumerate(runs):
        plan = _recognize(recognizer, run, i)
        count_plan(plan, oc, fc, planner)
        plans.append(plan)
    return oc, fc, plans


def t_learn_norms(
    runs: Iterable[Run],
    ot: float,
    ft: float,
    domain: Domain,
    goals: Iterable[Task] | None = None,
    refute_obligations: bool = True,
    keep_obligation: ThresholdTest = ratio_obligation,
    keep_prohibition: ThresholdTest = ratio_prohibition,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    ground_cap: int = DEFAULT_GROUND_CAP,
) -> ThresholdLearning:
    """Violation-tolerant learning: count evidence over ``runs`` and threshold it.

    With ``refute_obligations=False`` obligations are never refuted, which
    reduces their test to "supported at least once".
    """
    check_thresholds(ot, ft)
    oc, fc, plans = count_runs(runs, domain, goals, refute_obligations, depth_cap, ground_cap)
    norms = filter_counters(oc, fc, ot, ft, keep_obligation, keep_prohibition)
    return ThresholdLearning(norms, oc, fc, plans)

