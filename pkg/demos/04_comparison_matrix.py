"""Run every scenario and print the status matrix of the four principles.

Each cell shows the empirical symbols next to the published ones: '+' the
principle held on every instance, '-' a certified counterexample or a failing
sweep, '+-' a partial result. Cells whose published entry carries '?' are
reported as empirical-only. Artifacts go to $PLAP_OUT_DIR (default ./plap-out).
"""

import sys

from plap import scenarios as sc

results = sc.run_scenarios(jobs=int(sys.argv[1]) if len(sys.argv) > 1 else 1)
for res in results:
    print(f"{res.name:<26} pass={res.passed}  {res.claim}")
print()
print(sc.status_matrix_report(results))
