"""Learn from a single compliant run of a goal with two decompositions.

The observed run takes the left branch, so everything only the right
branch does becomes a candidate prohibition.
"""

from normid import fixtures as fx
from normid.model import State, Task
from normid.learner import learn_norms
from normid.planner import all_plans, bracketed
from normid.recognizer import Run

domain = fx.two_trees_domain()
print("plans for t1:")
for p in all_plans(domain, State(), Task("t1")):
    print("  ", bracketed(p.root))

run = Run(State(), tuple(Task(x) for x in ["t3", "t4", "t6", "t7", "t8"]))
pot_o, pot_f = learn_norms([run], domain)

print("\nobligations still possible under t1:")
for n in pot_o.norms():
    if n.context == Task("t1"):
        print("  ", n)
print("\nprohibitions under t1:")
for n in sorted(pot_f, key=lambda n: n.sort_key()):
    if n.context == Task("t1"):
        print("  ", n)
