"""A prohibition on a whole state: never stand in london while travelling."""

from normid import fixtures as fx
from normid.formats import parse_task
from normid.norms import F, Norm, violated
from normid.planner import bracketed, plan
from normid.simulator import compliant_plans

domain = fx.travel_domain()
goal = parse_task("travel(aberdeen,paris)")

via_london = plan(domain, fx.TRAVEL_INITIAL, [goal])
norm = Norm(F, parse_task("travel(X,Y)"), fx.at_london_state())
print("plan:", bracketed(via_london.root))
print("violates", norm, "->", violated(norm, via_london))

# add a direct flight; the london route is filtered out
norm = Norm(F, parse_task("travel(X,Y)"), fx.at_london_state(fx.TRAVEL_INITIAL_DIRECT))
for p in compliant_plans(domain, fx.TRAVEL_INITIAL_DIRECT, goal, [norm]):
    print("compliant:", bracketed(p.root))
