"""
Erasures, delivery and the coding rate
======================================

Lossy links make redundancy attractive. Replication survives unless both
copies are lost, splitting needs both halves, and multiple description
coding lets the receiver show a low-quality frame from either descriptor.
"""

from multipath_aoi import Scheme, delivery_probability, latency_curve, SystemConfig

print("eps   replicated  alternating  split   coded LQ  coded HQ")
for k in range(9):
    e = 0.05 * k
    row = [delivery_probability(Scheme.replicated(), None, e, e),
           delivery_probability(Scheme.alternating(), None, e, e),
           delivery_probability(Scheme.split(), None, e, e),
           delivery_probability(Scheme.coded(0.75), "lq", e, e),
           delivery_probability(Scheme.coded(0.75), "hq", e, e)]
    print(f"{e:<5.2f} " + "  ".join(f"{p:9.4f}" for p in row))

###############################################################################
# The coding rate eta sets the descriptor size 1/(2 eta). Small eta means
# bigger, more redundant descriptors and more load.

print("\np99 latency at tau = 1.5, eps = 0.2")
for eta in (0.5, 0.6, 0.7, 0.8, 0.9, 1.0):
    cfg = SystemConfig.make(Scheme.coded(eta), 1.5, eps=(0.2, 0.2))
    lq = latency_curve(cfg, "lq").percentile(0.99)
    hq = latency_curve(cfg, "hq").percentile(0.99)
    print(f"eta={eta:.1f}  LQ {lq:6.3f}  HQ {hq:6.3f}")
