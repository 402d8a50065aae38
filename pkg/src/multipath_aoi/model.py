"""System parameterization for two-path frame delivery.

A frame is generated every ``tau`` time units and pushed over two parallel
FCFS links with exponential service and independent packet erasures. The
scheme decides how a frame maps onto packets:

* alternating   -- whole frame (L=1) on path 1, 2, 1, 2, ...
* replicated    -- a full copy (L=1) on each path
* split         -- one half (L=0.5) on each path
* coded(eta)    -- one MDC descriptor of size 1/(2 eta) on each path
* queue_based   -- whole frame on the path with fewer packets in system

A packet of size L on path j is served at rate ``mu_j / L``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass


class Kind(str, enum.Enum):
    ALTERNATING = "alternating"
    REPLICATED = "replicated"
    SPLIT = "split"
    CODED = "coded"
    QUEUE_BASED = "queue_based"


class Quality(str, enum.Enum):
    WHOLE = "whole"
    LQ = "lq"
    HQ = "hq"


class UnstableSystemError(ValueError):
    """Raised by analytic routines when a path load is >= 1."""

    def __init__(self, report: "StabilityReport"):
        self.report = report
        super().__init__(str(report))


@dataclass(frozen=True)
class PathParams:
    mu: float
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"service rate must be positive, got mu={self.mu}")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError(f"erasure probability must be in [0, 1), got {self.epsilon}")


@dataclass(frozen=True)
class Scheme:
    kind: Kind
    eta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.CODED:
            if self.eta is None or not 0.5 <= self.eta <= 1.0:
                raise ValueError(f"coded scheme needs 0.5 <= eta <= 1, got {self.eta}")
        elif self.eta is not None:
            raise ValueError(f"eta is only meaningful for the coded scheme, not {self.kind.value}")

    @classmethod
    def alternating(cls) -> "Scheme":
        return cls(Kind.ALTERNATING)

    @classmethod
    def replicated(cls) -> "Scheme":
        return cls(Kind.REPLICATED)

    @classmethod
    def split(cls) -> "Scheme":
        return cls(Kind.SPLIT)

    @classmethod
    def coded(cls, eta: float) -> "Scheme":
        return cls(Kind.CODED, float(eta))

    @classmethod
    def queue_based(cls) -> "Scheme":
        return cls(Kind.QUEUE_BASED)

    @classmethod
    def parse(cls, name: str, eta: float | None = None) -> "Scheme":
        """Build a scheme from a name such as ``"split"`` or ``"coded"`` (with ``eta``)."""
        kind = Kind(name.strip().lower().replace("-", "_"))
        return cls(kind, eta if kind is Kind.CODED else None)

    @property
    def synchronized(self) -> bool:
        """True when every frame puts one packet on each path."""
        return self.kind in (Kind.REPLICATED, Kind.SPLIT, Kind.CODED)

    @property
    def effective_eta(self) -> float:
        """Coding rate seen by the synchronized analysis (replicated 0.5, split 1)."""
        if self.kind is Kind.REPLICATED:
            return 0.5
        if self.kind is Kind.SPLIT:
            return 1.0
        if self.kind is Kind.CODED:
            return self.eta
        raise ValueError(f"{self.kind.value} scheme has no coding rate")

    @property
    def qualities(self) -> tuple[Quality, ...]:
        if self.kind is Kind.CODED:
            return (Quality.LQ, Quality.HQ)
        return (Quality.WHOLE,)

    @property
    def label(self) -> str:
        if self.kind is Kind.CODED:
            return f"coded({self.eta:g})"
        return self.kind.value


@dataclass(frozen=True)
class SystemConfig:
    scheme: Scheme
    tau: float
    paths: tuple[PathParams, PathParams]

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"inter-frame period must be positive, got tau={self.tau}")
        paths = tuple(self.paths)
        if len(paths) != 2:
            raise ValueError(f"exactly two paths are supported, got {len(paths)}")
        object.__setattr__(self, "paths", paths)

    @classmethod
    def make(cls, scheme: Scheme, tau: float, mu=(1.0, 1.0), eps=(0.0, 0.0)) -> "SystemConfig":
        """Shorthand: ``SystemConfig.make(Scheme.split(), 1.5, mu=(1, 1.5), eps=(0.2, 0.2))``."""
        return cls(scheme, float(tau), (PathParams(float(mu[0]), float(eps[0])),
                                        PathParams(float(mu[1]), float(eps[1]))))

    def replace(self, **changes) -> "SystemConfig":
        scheme = changes.pop("scheme", self.scheme)
        tau = changes.pop("tau", self.tau)
        mu = changes.pop("mu", (self.paths[0].mu, self.paths[1].mu))
        eps = changes.pop("eps", (self.paths[0].epsilon, self.paths[1].epsilon))
        if changes:
            raise TypeError(f"unknown fields: {sorted(changes)}")
        return SystemConfig.make(scheme, tau, mu, eps)

    @property
    def mu(self) -> tuple[float, float]:
        return (self.paths[0].mu, self.paths[1].mu)

    @property
    def eps(self) -> tuple[float, float]:
        return (self.paths[0].epsilon, self.paths[1].epsilon)


def packet_size(scheme: Scheme) -> float:
    """Normalized packet size L (a full frame is 1)."""
    if scheme.kind is Kind.SPLIT:
        return 0.5
    if scheme.kind is Kind.CODED:
        return 1.0 / (2.0 * scheme.eta)
    # alternating, replicated; queue-based also ships whole frames
    return 1.0


def arrival_rate(scheme: Scheme, tau: float) -> float:
    """Average per-path packet arrival rate."""
    if not tau > 0:
        raise ValueError(f"inter-frame period must be positive, got tau={tau}")
    if scheme.kind in (Kind.ALTERNATING, Kind.QUEUE_BASED):
        return 1.0 / (2.0 * tau)
    return 1.0 / tau


def path_load(cfg: SystemConfig, path_index: int) -> float:
    """Load rho_j = L * lambda_j / mu_j of path 1 or 2."""
    if path_index not in (1, 2):
        raise ValueError(f"path_index must be 1 or 2, got {path_index}")
    mu = cfg.paths[path_index - 1].mu
    return packet_size(cfg.scheme) * arrival_rate(cfg.scheme, cfg.tau) / mu


@dataclass(frozen=True)
class StabilityReport:
    loads: tuple[float, float]
    unstable_paths: tuple[int, ...]

    @property
    def stable(self) -> bool:
        return not self.unstable_paths

    def __bool__(self) -> bool:
        return self.stable

    def __str__(self) -> str:
        if self.stable:
            return "stable (rho = {:.6g}, {:.6g})".format(*self.loads)
        bad = ", ".join(f"path {j}: rho={self.loads[j - 1]:.6g}" for j in self.unstable_paths)
        return f"unstable, load must be < 1 on both paths ({bad})"


def assert_stable(cfg: SystemConfig) -> StabilityReport:
    """Check both path loads; the report is falsy when a path has rho >= 1.

    Does not raise. Analytic code uses :func:`require_stable` instead.
    """
    loads = (path_load(cfg, 1), path_load(cfg, 2))
    return StabilityReport(loads, tuple(j for j, rho in zip((1, 2), loads) if not rho < 1.0))


def require_stable(cfg: SystemConfig) -> StabilityReport:
    report = assert_stable(cfg)
    if not report:
        raise UnstableSystemError(report)
    return report


def check_quality(scheme: Scheme, quality=None) -> Quality:
    """Validate that ``quality`` applies to ``scheme``; ``None`` picks the default.

    Coded frames come in LQ and HQ; every other scheme has a single WHOLE quality.
    """
    if quality is None:
        return scheme.qualities[0]
    quality = Quality(quality)
    if quality not in scheme.qualities:
        allowed = ", ".join(q.value for q in scheme.qualities)
        raise ValueError(f"quality {quality.value!r} does not apply to {scheme.label} (use {allowed})")
    return quality


def decodes_on_first(scheme: Scheme, quality: Quality) -> bool:
    """True if a synchronized frame is decoded as soon as one packet survives.

    Replicated frames and coded LQ frames decode on the first packet. At
    eta = 0.5 a coded descriptor is a full copy, so HQ decodes on the first too.
    """
    if scheme.kind is Kind.REPLICATED:
        return True
    if scheme.kind is Kind.CODED:
        return Quality(quality) is Quality.LQ or scheme.eta == 0.5
    return False
