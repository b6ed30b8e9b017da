import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normid import fixtures as fx
from normid.errors import DepthCapExceeded
from normid.formats import parse_state, parse_task
from normid.model import Domain, Method, Operator, State, Task
from normid.planner import Planner, all_plans, applicable_methods, bracketed, node_states, plan, states_of
from normid.synthetic import random_domain

from oracles import brute_force_plans, signature


def leaves(p):
    return [str(t) for t in p.tasks]


def test_two_trees_has_exactly_two_plans():
    plans = all_plans(fx.two_trees_domain(), State(), Task("t1"))
    assert [leaves(p) for p in plans] == [["t3", "t4", "t6", "t7", "t8"], ["t3", "t4", "t6", "t10"]]
    assert bracketed(plans[0].root) == "t1(t2(t3,t4),t5(t6,t7,t8))"
    assert bracketed(plans[1].root) == "t1(t2(t3,t4),t9(t6,t10))"


def test_grammar_domain_generates_two_strings():
    plans = all_plans(fx.grammar_domain(), State(), Task("T1"))
    assert [leaves(p) for p in plans] == [["a1", "a2", "a3"], ["a1", "a2", "a4", "a5"]]


def test_primitive_goal():
    d = fx.travel_domain()
    ok = all_plans(d, fx.TRAVEL_INITIAL, parse_task("goto(aberdeen,london)"))
    assert [leaves(p) for p in ok] == [["goto(aberdeen,london)"]]
    assert all_plans(d, fx.TRAVEL_INITIAL, parse_task("goto(paris,london)")) == []


def test_applicable_methods_travel():
    found = applicable_methods(parse_task("travel(aberdeen,paris)"), fx.TRAVEL_INITIAL, fx.travel_domain())
    assert [(m.name.name, s) for m, s in found] == [("fly", {"X": "aberdeen", "Y": "paris", "Z": "london"})]
    assert applicable_methods(parse_task("travel(aberdeen,paris)"), parse_state(["at(aberdeen)"]), fx.travel_domain()) == []


def test_applicable_methods_two_in_canonical_order():
    op = Operator(Task("a"), (), (), ())
    d = Domain((op,), (Method(Task("zeta"), Task("g"), (), (), (Task("a"),)), Method(Task("alpha"), Task("g"), (), (), (Task("a"), Task("a")))))
    assert [m.name.name for m, _ in applicable_methods(Task("g"), State(), d)] == ["alpha", "zeta"]


def test_travel_plan_goes_through_london():
    p = plan(fx.travel_domain(), fx.TRAVEL_INITIAL, [parse_task("travel(aberdeen,paris)")])
    assert leaves(p) == ["goto(aberdeen,london)", "goto(london,paris)"]
    ats = [[str(a) for a in s if a.name == "at"] for s in states_of(p)]
    assert ats == [["at(aberdeen)"], ["at(london)"], ["at(paris)"]]


def test_empty_network_and_no_plan():
    empty = plan(fx.travel_domain(), fx.TRAVEL_INITIAL, [])
    assert empty.actions == () and empty.initial == fx.TRAVEL_INITIAL
    assert states_of(empty) == [fx.TRAVEL_INITIAL]
    assert plan(fx.travel_domain(), parse_state(["at(paris)"]), [parse_task("travel(aberdeen,paris)")]) is None


def test_leaf_states():
    p = plan(fx.travel_domain(), fx.TRAVEL_INITIAL, [parse_task("travel(aberdeen,paris)")])
    leaf = p.root.children[0]
    assert node_states(leaf) == [leaf.state_before, leaf.state_after]


def test_depth_cap():
    ops = (Operator(Task("a"), (), (), ()),)
    chain = [Method(Task(f"m{i}"), Task(f"t{i}"), (), (), (Task(f"t{i + 1}"),)) for i in range(10)]
    chain.append(Method(Task("m10"), Task("t10"), (), (), (Task("a"),)))
    d = Domain(ops, tuple(chain))
    assert len(all_plans(d, State(), Task("t0"), depth_cap=12)) == 1
    with pytest.raises(DepthCapExceeded):
        all_plans(d, State(), Task("t0"), depth_cap=5)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_all_plans_matches_brute_force(seed):
    domain, initial, root = random_domain(seed)
    plans = Planner(domain).all_plans(initial, root)
    got = [signature(p.root) for p in plans]
    expected = brute_force_plans(domain, initial, root)
    assert sorted(got) == sorted(expected)
    assert len(set(got)) == len(got)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_plans_are_sound_and_coherent(seed):
    domain, initial, root = random_domain(seed)
    plans = Planner(domain).all_plans(initial, root)
    for p in plans:
        assert states_of(p)[0] == initial
        for a, before, after in zip(p.actions, states_of(p), states_of(p)[1:]):
            assert all((l.atom in before) == l.positive for l in a.pre)
        assert [leaf.task for leaf in p.root.leaves()] == list(p.tasks)
        for node in p.root.walk():
            if node.children:
                assert node.children[0].state_before == node.state_before
                assert node.children[-1].state_after == node.state_after
                for x, y in zip(node.children, node.children[1:]):
                    assert x.state_after == y.state_before
    again = Planner(domain).all_plans(initial, root)
    assert [signature(p.root) for p in plans] == [signature(p.root) for p in again]
