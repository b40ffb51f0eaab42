"""
Seeded fuzzing against the verifiers and the exhaustive optimum
===============================================================

The benchmark draws random markets for both regimes, runs the matching
auction, verifies each outcome and compares revenue with the optimum on the
markets small enough to solve exactly.
"""

import json

from efmarket.experiments import BenchConfig, bench

report, ok = bench(BenchConfig(seed=1, count=60, n=5, m=5, oracle_cap=(4, 4)))
print(json.dumps(report, indent=2, sort_keys=True))

# %%
# Any violation stops the run and the report carries a minimised market.
if not ok:
    print("minimised counterexample:", report["failure"]["minimized"])
