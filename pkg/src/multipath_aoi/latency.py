"""Latency laws of delivered frames for each transmission scheme.

Every law here is a finite linear combination of exponentials, so curves are
stored as ``(weights, rates)`` with survival ``sum(w * exp(-r t))``. Laws are
conditioned on the frame being decoded: lost frames never enter a latency
distribution.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dm1 import SigmaRoot, solve_sigma
from .model import (Kind, Quality, Scheme, SystemConfig, check_quality, decodes_on_first,
                    packet_size, require_stable)


@dataclass(frozen=True)
class DistributionCurve:
    """Frame latency law as a signed mixture of exponentials.

    ``pdf(t) = sum(w_k r_k exp(-r_k t))`` and ``cdf(t) = 1 - sum(w_k exp(-r_k t))``
    for ``t >= 0``; the weights sum to one.
    """

    weights: tuple[float, ...]
    rates: tuple[float, ...]
    label: str = ""
    support_lo: float = 0.0

    def _terms(self, t):
        t = np.asarray(t, dtype=float)
        tt = np.maximum(t, 0.0)[..., None]
        w = np.asarray(self.weights)
        r = np.asarray(self.rates)
        return t, w, r, np.exp(-r * tt)

    def pdf(self, t):
        t, w, r, e = self._terms(t)
        out = np.where(t >= 0.0, np.clip((w * r * e).sum(axis=-1), 0.0, None), 0.0)
        return float(out) if out.ndim == 0 else out

    def sf(self, t):
        t, w, r, e = self._terms(t)
        out = np.where(t >= 0.0, np.clip((w * e).sum(axis=-1), 0.0, 1.0), 1.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, t):
        t, w, r, _ = self._terms(t)
        tt = np.maximum(t, 0.0)[..., None]
        # 1 - sum(w e^{-rt}) == sum(w (1 - e^{-rt})) since sum(w) == 1; expm1 keeps small t exact
        out = np.where(t > 0.0, np.clip((w * -np.expm1(-r * tt)).sum(axis=-1), 0.0, 1.0), 0.0)
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        return float(sum(w / r for w, r in zip(self.weights, self.rates)))

    @property
    def tail_rate(self) -> float:
        """Slowest decay rate among terms with nonzero weight."""
        return min(r for w, r in zip(self.weights, self.rates) if w != 0.0)

    def percentile(self, p: float) -> float:
        from .stats import invert_cdf

        return invert_cdf(self.cdf, p, scale=self.mean())


@dataclass(frozen=True)
class ErasureWeights:
    ps_min: float
    phi_12: float
    phi_1: float
    phi_2: float
    ps_max: float


def erasure_weights(eps1: float, eps2: float) -> ErasureWeights:
    """Success probabilities and the split of successful min-frames by surviving path(s)."""
    for e in (eps1, eps2):
        if not 0.0 <= e < 1.0:
            raise ValueError(f"erasure probability must be in [0, 1), got {e}")
    ps_min = 1.0 - eps1 * eps2
    return ErasureWeights(
        ps_min=ps_min,
        phi_12=(1.0 - eps1) * (1.0 - eps2) / ps_min,
        phi_1=(1.0 - eps1) * eps2 / ps_min,
        phi_2=(1.0 - eps2) * eps1 / ps_min,
        ps_max=(1.0 - eps1) * (1.0 - eps2),
    )


def _reject_queue_based(scheme: Scheme):
    if scheme.kind is Kind.QUEUE_BASED:
        raise ValueError("the queue-based scheduler has no analytic model; simulate it instead")


def path_sigmas(cfg: SystemConfig) -> tuple[SigmaRoot, SigmaRoot]:
    """Erlang roots of both paths (``a = mu_j / L * interarrival_j``)."""
    _reject_queue_based(cfg.scheme)
    require_stable(cfg)
    L = packet_size(cfg.scheme)
    period = 2.0 * cfg.tau if cfg.scheme.kind is Kind.ALTERNATING else cfg.tau
    return tuple(solve_sigma(mu / L * period) for mu in cfg.mu)


def path_rates(cfg: SystemConfig) -> tuple[float, float]:
    """Sojourn-time rates ``mu_j / L * (1 - sigma_j)`` of the two paths."""
    L = packet_size(cfg.scheme)
    s1, s2 = path_sigmas(cfg)
    return (cfg.mu[0] / L * (1.0 - s1.sigma), cfg.mu[1] / L * (1.0 - s2.sigma))


def _require(cfg: SystemConfig, synchronized: bool):
    _reject_queue_based(cfg.scheme)
    if synchronized and not cfg.scheme.synchronized:
        raise ValueError(f"{cfg.scheme.label} is not a synchronized scheme")
    if not synchronized and cfg.scheme.kind is not Kind.ALTERNATING:
        raise ValueError(f"expected the alternating scheme, got {cfg.scheme.label}")


def alt_latency(cfg: SystemConfig) -> DistributionCurve:
    """Latency of a random delivered frame under round-robin scheduling."""
    _require(cfg, synchronized=False)
    r1, r2 = path_rates(cfg)
    return DistributionCurve((0.5, 0.5), (r1, r2), "alternating")


def min_latency(cfg: SystemConfig) -> DistributionCurve:
    """Error-free first-arrival latency of a synchronized frame: exponential."""
    _require(cfg, synchronized=True)
    r1, r2 = path_rates(cfg)
    return DistributionCurve((1.0,), (r1 + r2,), f"{cfg.scheme.label}/min")


def min_latency_err(cfg: SystemConfig) -> DistributionCurve:
    """First-arrival latency of frames with at least one surviving packet.

    Mixture over which packets survived: both (min of the two paths), only
    path 1, only path 2. Reduces to :func:`min_latency` when both erasure
    probabilities are zero.
    """
    _require(cfg, synchronized=True)
    r1, r2 = path_rates(cfg)
    w = erasure_weights(*cfg.eps)
    return DistributionCurve((w.phi_12, w.phi_1, w.phi_2), (r1 + r2, r1, r2),
                             f"{cfg.scheme.label}/min")


def max_latency(cfg: SystemConfig) -> DistributionCurve:
    """Last-arrival latency; only frames with both packets delivered count.

    Erasures thin frames independently of queueing, so the law does not
    depend on epsilon.
    """
    _require(cfg, synchronized=True)
    r1, r2 = path_rates(cfg)
    return DistributionCurve((1.0, 1.0, -1.0), (r1, r2, r1 + r2), f"{cfg.scheme.label}/max")


def coded_latency(cfg: SystemConfig, quality: Quality) -> DistributionCurve:
    """Low-quality (any descriptor) or high-quality (both descriptors) latency.

    At eta = 0.5 each descriptor is a full copy, so HQ coincides with LQ.
    """
    if cfg.scheme.kind is not Kind.CODED:
        raise ValueError(f"expected the coded scheme, got {cfg.scheme.label}")
    quality = Quality(quality)
    if quality is Quality.LQ or (quality is Quality.HQ and cfg.scheme.eta == 0.5):
        return min_latency_err(cfg)
    if quality is Quality.HQ:
        return max_latency(cfg)
    raise ValueError("coded latency needs quality LQ or HQ")


def latency_curve(cfg: SystemConfig, quality=None) -> DistributionCurve:
    """Dispatch to the latency law matching the scheme and quality."""
    quality = check_quality(cfg.scheme, quality)
    kind = cfg.scheme.kind
    if kind is Kind.ALTERNATING:
        return alt_latency(cfg)
    if kind is Kind.REPLICATED:
        return min_latency_err(cfg)
    if kind is Kind.SPLIT:
        return max_latency(cfg)
    if kind is Kind.CODED:
        return coded_latency(cfg, quality)
    _reject_queue_based(cfg.scheme)


def delivery_probability(scheme: Scheme, quality, eps1: float, eps2: float) -> float:
    """Fraction of frames decoded at the requested quality."""
    _reject_queue_based(scheme)
    quality = check_quality(scheme, quality)
    w = erasure_weights(eps1, eps2)
    if scheme.kind is Kind.ALTERNATING:
        return 1.0 - 0.5 * (eps1 + eps2)
    return w.ps_min if decodes_on_first(scheme, quality) else w.ps_max
