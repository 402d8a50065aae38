"""
Choosing the frame rate for fresh frames
========================================

Sending frames more often keeps the display fresher until queues build
up. The p99 peak age therefore has a sweet spot in tau. We sweep tau,
locate the minimum, and then let the optimizer pick tau for several
coding rates.
"""

import numpy as np

from multipath_aoi import Scenario, Scheme, SweepSpec, SystemConfig, sweep

grid = tuple(np.geomspace(0.6, 8.0, 20))
for scheme in (Scheme.alternating(), Scheme.replicated(), Scheme.split(), Scheme.coded(0.75)):
    base = Scenario("demo", SystemConfig.make(scheme, 1.0), metrics=("p99_paoi",), simulate=False)
    rows = [r for r in sweep(SweepSpec(base, "tau", grid)) if r.metric == "p99_paoi"]
    for q in scheme.qualities:
        vals = [(r.axis_value, r.value) for r in rows if r.quality == q.value]
        tau, best = min(vals, key=lambda v: v[1])
        print(f"{scheme.label:>12}/{q.value:<5}  best tau on grid {tau:.2f}  p99 PAoI {best:.3f}")

###############################################################################
# With ``optimize`` set, every eta point reports the p99 PAoI at its own best
# tau, found by golden-section search on the analytic curve.

base = Scenario("demo", SystemConfig.make(Scheme.coded(0.75), 2.0, eps=(0.2, 0.2)),
                metrics=("p99_paoi",), simulate=False)
rows = sweep(SweepSpec(base, "eta", (0.5, 0.6, 0.7, 0.8, 0.9, 1.0), optimize="minimize_p99_paoi"))
print("\neta   quality  tau*    p99 PAoI")
for r in rows:
    if r.metric == "tau_opt":
        p99 = next(x.value for x in rows if x.metric == "p99_paoi" and x.axis_value == r.axis_value
                   and x.quality == r.quality)
        print(f"{r.axis_value:<5} {r.quality:<8} {r.value:.3f}  {p99:.3f}")
