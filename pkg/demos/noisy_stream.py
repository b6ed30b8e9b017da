"""Recover planted norms from a stream where one run in ten breaks them."""

from normid import fixtures as fx
from normid.learner import t_learn_norms
from normid.simulator import evaluate, generate_runs

scenario = fx.three_plans_scenario()
runs = generate_runs(scenario, 200)
result = t_learn_norms(runs, 3.0, 3.0, scenario.domain)

print("planted:", ", ".join(str(n) for n in scenario.planted))
print("learned:")
for n in result.norms:
    print(f"  {n}  evidence={result.norms.evidence.get(n)}")
print()
print(evaluate(result.norms, scenario.planted, runs, scenario.domain, plans=result.plans).to_text())
