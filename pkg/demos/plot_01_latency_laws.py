"""
Frame latency under each scheme
===============================

How long does a frame take to reach the receiver when two links share the
work? This walk-through builds the analytic latency laws and prints their
99th percentiles as the frame period changes.
"""

import numpy as np

from multipath_aoi import Scheme, SystemConfig, assert_stable, latency_curve, solve_sigma

# A single link fed every d time units with exponential service of rate m
# behaves like a D/M/1 queue. Everything hinges on its root sigma.
for a in (1.1, 1.5, 2.0, 4.0):
    r = solve_sigma(a)
    print(f"a = {a:4.1f}  sigma = {r.sigma:.6f}  residual = {r.residual:.1e}")

###############################################################################
# The schemes trade packet size against redundancy. Replicated frames wait
# for the first copy, split frames for both halves, coded frames for one
# descriptor (LQ) or both (HQ).

schemes = [Scheme.alternating(), Scheme.replicated(), Scheme.split(), Scheme.coded(0.75)]
taus = [0.75, 1.0, 1.5, 2.0, 4.0]

print("\np99 latency, mu = (1, 1), no erasures")
print("tau    " + "".join(f"{s.label + '/' + q.value:>18}" for s in schemes for q in s.qualities))
for tau in taus:
    cells = []
    for s in schemes:
        for q in s.qualities:
            cfg = SystemConfig.make(s, tau)
            cells.append(latency_curve(cfg, q).percentile(0.99) if assert_stable(cfg) else np.inf)
    print(f"{tau:<7}" + "".join(f"{c:18.3f}" for c in cells))

###############################################################################
# Replication doubles the load on each path: at tau = 0.75 it is unstable,
# while splitting still copes.

print()
print(assert_stable(SystemConfig.make(Scheme.replicated(), 0.75)))
print(assert_stable(SystemConfig.make(Scheme.split(), 0.75)))
