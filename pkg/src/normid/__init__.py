"""Identify the obligations and prohibitions followed by a society of agents
by recognizing their plans in an HTN domain and comparing each run against
the alternatives the agents passed up."""

from .errors import (
    DepthCapExceeded,
    DomainError,
    EmptyGrammar,
    GroundingExplosion,
    InvalidThreshold,
    NoCompliantPlan,
    NoParse,
    NormIdError,
    StateMismatch,
)
from .grammar import Grammar, ParseTree, Production, parse, to_grammar
from .grounding import ground_domain
from .learner import (
    CounterTable,
    NormLearner,
    ObligationLattice,
    context_intersect,
    count_plan,
    extract_avoidance_evidence,
    extract_compliance_evidence,
    filter_counters,
    learn_norms,
    t_learn_norms,
    update_counter,
)
from .model import Action, Atom, Domain, Literal, Method, Operator, State, Task, applicable, apply, satisfies
from .norms import F, Modality, Norm, NormSet, O, complies, occurs, state_condition_equality, violated
from .planner import DecompositionNode, Plan, Planner, all_plans, applicable_methods, format_tree, plan, states_of
from .recognizer import Recognizer, Run, recognize
from .simulator import EvaluationReport, Goal, Scenario, compliant_plans, evaluate, generate_runs

__all__ = [name for name in dir() if not name.startswith("_")]
