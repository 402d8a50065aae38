"""Empirical distributions, percentiles and KS distance."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

PERCENTILE_XTOL = 1e-9


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    samples: np.ndarray  # sorted, read-only

    @property
    def count(self) -> int:
        return int(self.samples.size)

    def cdf(self, t):
        """Right-continuous step function: fraction of samples <= t."""
        out = np.searchsorted(self.samples, np.asarray(t, dtype=float), side="right") / self.count
        return float(out) if np.ndim(out) == 0 else out

    def mean(self) -> float:
        return float(self.samples.mean())

    def percentile(self, p: float) -> float:
        return percentile(self, p)


def empirical_cdf(samples) -> EmpiricalDistribution:
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("cannot build an empirical distribution from an empty sample")
    if np.isnan(x).any():
        raise ValueError("samples contain NaN")
    x.setflags(write=False)
    return EmpiricalDistribution(x)


def invert_cdf(cdf, p: float, scale: float = 1.0, lo: float = 0.0) -> float:
    """Smallest t with cdf(t) >= p, by bisection to PERCENTILE_XTOL.

    The upper bracket starts at ``lo + scale`` and doubles until it covers p.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    step = scale if scale > 0 and math.isfinite(scale) else 1.0
    hi = lo + step
    for _ in range(200):
        if cdf(hi) >= p:
            break
        lo, hi = hi, hi + step
        step *= 2.0
    else:
        raise ArithmeticError(f"cdf never reaches {p}")
    if cdf(lo) >= p:
        return lo
    return optimize.bisect(lambda t: cdf(t) - p, lo, hi, xtol=PERCENTILE_XTOL, maxiter=500)


def percentile(dist, p: float) -> float:
    """p-quantile of an empirical sample (order statistic) or of an analytic curve."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    if isinstance(dist, EmpiricalDistribution):
        k = math.ceil(p * dist.count)  # 1-based order statistic
        return float(dist.samples[max(k, 1) - 1])
    if hasattr(dist, "percentile"):
        return dist.percentile(p)
    raise TypeError(f"cannot take a percentile of {type(dist).__name__}")


def ks_distance(emp: EmpiricalDistribution, cdf) -> float:
    """sup_t |F_emp(t) - F(t)| for a continuous reference cdf.

    Evaluated at the distinct sample values, comparing F with both the value
    of the step function and its left limit there.
    """
    if not isinstance(emp, EmpiricalDistribution):
        emp = empirical_cdf(emp)
    x, first = np.unique(emp.samples, return_index=True)
    n = emp.count
    below = first / n                                   # F_emp just left of x
    at = np.append(first[1:], n) / n                    # F_emp at x
    f = np.asarray(cdf(x), dtype=float)
    return float(max(np.max(np.abs(at - f)), np.max(np.abs(f - below))))
