import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normid import fixtures as fx
from normid.formats import parse_state, parse_task
from normid.model import State, Task
from normid.norms import F, Modality, Norm, NormSet, O, complies, occurs, state_condition_equality, violated, violations
from normid.planner import Planner, all_plans, plan
from normid.synthetic import random_domain


def travel_plan():
    return plan(fx.travel_domain(), fx.TRAVEL_INITIAL, [parse_task("travel(aberdeen,paris)")])


def two_trees():
    return all_plans(fx.two_trees_domain(), State(), Task("t1"))


def node(p, name):
    return next(n for n in p.nodes() if n.task.name == name)


def test_at_london_occurs_in_travel():
    p = travel_plan()
    assert occurs(fx.at_london_state(), p.root)


def test_task_conditions_in_two_trees():
    left, _ = two_trees()
    assert occurs(Task("t4"), node(left, "t2"))
    assert not occurs(Task("t9"), node(left, "t1"))


def test_entry_state_does_not_count():
    p = travel_plan()
    assert not occurs(fx.TRAVEL_INITIAL, p.root)
    assert occurs(p.root.state_after, p.root)


def test_travel_prohibition_is_violated():
    norm = Norm(F, parse_task("travel(X,Y)"), fx.at_london_state())
    assert violated(norm, travel_plan())


def test_obligation_kept_in_left_tree():
    left, _ = two_trees()
    assert not violated(Norm(O, Task("t1"), Task("t2")), left)


def test_vacuous_context():
    left, _ = two_trees()
    assert not violated(Norm(O, Task("nowhere"), Task("t2")), left)
    assert not violated(Norm(F, Task("nowhere"), Task("t2")), left)
    assert violations(Norm(O, Task("nowhere"), Task("t2")), left) == []


def test_variable_condition_bound_by_context():
    p = travel_plan()
    # goto(X,Z) with X bound from the context to aberdeen
    assert occurs(parse_task("goto(X,Z)"), p.root, {"X": "aberdeen", "Y": "paris"})
    assert not occurs(parse_task("goto(Y,Z)"), p.root, {"X": "aberdeen", "Y": "paris"})
    assert violated(Norm(F, parse_task("travel(X,Y)"), parse_task("goto(X,london)")), p)
    assert not violated(Norm(F, parse_task("travel(X,Y)"), parse_task("goto(Y,london)")), p)


def test_state_condition_equality():
    assert state_condition_equality(parse_state(["at(london)"]), parse_state(["at(london)"]))
    assert state_condition_equality(parse_state(["p(a)", "q(b)"]), parse_state(["q(b)", "p(a)"]))
    assert not state_condition_equality(parse_state(["p(a)"]), parse_state(["p(a)", "q(b)"]))


def test_normset_rejects_both_modalities():
    with pytest.raises(ValueError):
        NormSet((Norm(O, Task("g"), Task("a")), Norm(F, Task("g"), Task("a"))))


def test_normset_is_canonical():
    a = Norm(F, Task("g"), Task("d"))
    b = Norm(O, Task("g"), Task("a"))
    assert NormSet((a, b, a)).norms == (a, b)
    assert NormSet((b, a)) == NormSet((a, b))
    assert NormSet((a, b)).of("O") == (b,)


def test_norm_rendering():
    assert str(Norm("F", parse_task("travel(X,Y)"), parse_state(["at(london)"]))) == "F_{travel(X,Y)} {at(london)}"
    assert Modality("O").flipped() is F


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5000))
def test_duality_and_monotonicity(seed):
    domain, initial, root = random_domain(seed)
    for p in Planner(domain).all_plans(initial, root):
        nodes = list(p.nodes())
        conds = {d.task for n in nodes for d in n.descendants()}
        for n in nodes:
            for z in conds:
                o = any(v for m, v in violations(Norm(O, n.task, z), p) if m is n)
                f = any(v for m, v in violations(Norm(F, n.task, z), p) if m is n)
                assert o != f
                if occurs(z, n):
                    for anc in nodes:
                        if n in list(anc.descendants()):
                            assert occurs(z, anc)


def test_complies():
    left, right = two_trees()
    norms = [Norm(F, Task("t1"), Task("t9"))]
    assert complies(left, norms) and not complies(right, norms)
