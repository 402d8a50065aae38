"""Single-path D/M/1 building blocks.

With deterministic interarrival period ``d`` and exponential service rate
``m``, the queue length seen by an arrival is geometric with parameter
``sigma``, the root in (0, 1) of ``x = exp(a (x - 1))`` where ``a = m d``.
The sojourn time of a packet is then exponential with rate ``m (1 - sigma)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class SigmaRoot:
    a: float
    sigma: float
    residual: float


def _residual(a: float, x: float) -> float:
    return abs(x - math.exp(a * (x - 1.0)))


def solve_sigma(a: float) -> SigmaRoot:
    """Root in (0, 1) of ``x = exp(a (x - 1))`` for ``a > 1``.

    ``a`` is the product of the effective service rate and the per-path
    interarrival period, i.e. ``1 / rho``. Starting from ``exp(-a)``, which
    lies below the root, both the fixed-point map and Newton's method on
    ``x - exp(a (x - 1))`` (concave, increasing left of the root) approach
    the root monotonically from below.
    """
    a = float(a)
    if not a > 1.0:
        raise ValueError(f"no root in (0, 1) for a={a}: the path is unstable (need rho = 1/a < 1)")
    x = math.exp(-a)
    # a few plain fixed-point steps; cheap and monotone
    for _ in range(4):
        x = math.exp(a * (x - 1.0))
    for _ in range(200):
        e = math.exp(a * (x - 1.0))
        g = x - e
        dg = 1.0 - a * e
        if dg <= 0.0:
            # right of the maximum of g; fall back to a fixed-point step
            step = e - x
        else:
            step = -g / dg
        x_new = x + step
        if not 0.0 < x_new < 1.0:
            x_new = e
        if abs(x_new - x) <= 1e-17 + 1e-16 * x:
            x = x_new
            break
        x = x_new
    res = _residual(a, x)
    if res >= RESIDUAL_TOL:
        raise ArithmeticError(f"sigma iteration did not converge for a={a} (residual {res:.3g})")
    return SigmaRoot(a, x, res)


def _sigma_value(sigma) -> float:
    return sigma.sigma if isinstance(sigma, SigmaRoot) else float(sigma)


def queue_state_pmf(sigma, q):
    """Probability of finding ``q`` packets in the path just before an arrival."""
    s = _sigma_value(sigma)
    q = np.asarray(q)
    if np.any(q < 0):
        raise ValueError("queue length must be nonnegative")
    out = (1.0 - s) * np.power(s, q)
    return float(out) if out.ndim == 0 else out


def dm1_latency_pdf(mu_eff: float, sigma, t):
    rate = mu_eff * (1.0 - _sigma_value(sigma))
    t = np.asarray(t, dtype=float)
    out = np.where(t >= 0.0, rate * np.exp(-rate * np.maximum(t, 0.0)), 0.0)
    return float(out) if out.ndim == 0 else out


def dm1_latency_cdf(mu_eff: float, sigma, t):
    rate = mu_eff * (1.0 - _sigma_value(sigma))
    t = np.asarray(t, dtype=float)
    out = np.where(t > 0.0, -np.expm1(-rate * np.maximum(t, 0.0)), 0.0)
    return float(out) if out.ndim == 0 else out
