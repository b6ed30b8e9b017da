import itertools

import pytest

from normid import fixtures as fx
from normid.errors import GroundingExplosion
from normid.formats import parse_atom, parse_literal, parse_task
from normid.grounding import ground_domain, relaxed_reachable
from normid.model import Domain, Operator, State, Task


def goto_domain(constants):
    op = Operator(parse_task("goto(X,Y)"), (parse_literal("at(X)"),), (parse_atom("at(Y)"),), (parse_atom("at(X)"),))
    return Domain((op,), (), constants=constants)


def test_goto_over_two_constants():
    g = ground_domain(goto_domain(("a", "b")))
    assert sorted(str(o.name) for o in g.operators) == ["goto(a,a)", "goto(a,b)", "goto(b,a)", "goto(b,b)"]
    assert all(o.name.is_ground for o in g.operators)


def test_propositional_domain_is_unchanged():
    d = fx.two_trees_domain()
    g = ground_domain(d)
    assert g.operators == d.operators
    assert g.methods == d.methods


def test_travel_has_27_fly_instances_before_pruning():
    g = ground_domain(fx.travel_domain())
    fly = [m for m in g.methods if m.name.name == "fly"]
    assert len(fly) == 27
    assert all(m.task.is_ground and all(t.is_ground for t in m.network) for m in g.methods)


def test_travel_pruning_keeps_only_reachable_instances():
    initial = fx.TRAVEL_INITIAL
    cities = ["aberdeen", "london", "paris"]
    connect = {(a.args[0], a.args[1]) for a in initial if a.name == "connect"}
    # at(.) is reachable for every city through goto; connect is static
    expected_fly = {
        (x, y, z) for x, y, z in itertools.product(cities, repeat=3) if (x, z) in connect and (z, y) in connect
    }
    expected_direct = {(x, y) for x, y in itertools.product(cities, repeat=2) if (x, y) in connect}
    g = ground_domain(fx.travel_domain(), initial)
    fly = {(m.task.args[0], m.task.args[1], dict(m.binding)["Z"]) for m in g.methods if m.name.name == "fly"}
    direct = {m.task.args for m in g.methods if m.name.name == "direct"}
    assert fly == expected_fly == {("aberdeen", "paris", "london")}
    assert direct == expected_direct


def test_relaxed_reachability_ignores_deletes():
    ops = ground_domain(goto_domain(("a", "b", "c"))).operators
    reached = relaxed_reachable(ops, State.of(parse_atom("at(a)")))
    assert reached == {parse_atom("at(a)"), parse_atom("at(b)"), parse_atom("at(c)")}


def test_static_negative_precondition_blocks_instance():
    op = Operator(parse_task("go(X)"), (parse_literal("!blocked(X)"),), (parse_atom("gone(X)"),), ())
    d = Domain((op,), (), constants=("a", "b"))
    g = ground_domain(d, State.of(parse_atom("blocked(a)")))
    assert [str(o.name) for o in g.operators] == ["go(b)"]


def test_grounding_cap():
    with pytest.raises(GroundingExplosion) as info:
        ground_domain(goto_domain(tuple(f"c{i}" for i in range(10))), cap=50)
    assert info.value.count == 100 and info.value.cap == 50


def test_unproductive_methods_are_dropped():
    d = fx.travel_domain()
    g = ground_domain(d, State.of(parse_atom("at(aberdeen)")))
    # with no connections nothing can be travelled
    assert g.methods == ()
    assert Task("travel", ("aberdeen", "paris")) not in {m.task for m in g.methods}
