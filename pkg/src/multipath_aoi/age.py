"""Peak Age of Information (PAoI) distributions.

The PAoI sample at an informative delivery is the reception time minus the
generation time of the frame it replaces on the display. All densities here
are piecewise smooth with breaks at multiples of ``tau``; :class:`PaoiCurve`
integrates them numerically with Gauss-Legendre panels aligned to those
breaks.
"""
from __future__ import annotations

import math

import numpy as np

from .latency import DistributionCurve, erasure_weights, latency_curve, path_rates, path_sigmas
from .model import Kind, SystemConfig, check_quality, decodes_on_first

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(10)


class PaoiCurve:
    """PAoI law given by a vectorized density on ``[0, inf)``.

    ``cdf`` is the running integral of ``pdf``. It is built from a table of
    panel integrals (panels of width ``tau / m`` so every jump or kink at a
    multiple of ``tau`` falls on a panel edge), plus one Gauss-Legendre
    quadrature over the partial panel that holds the query point.
    """

    def __init__(self, pdf, tau: float, rate_hint: float, label: str = "",
                 is_lower_bound: bool = False):
        self._pdf = pdf
        self.tau = float(tau)
        self.label = label
        self.is_lower_bound = is_lower_bound
        m = max(1, math.ceil(self.tau * rate_hint))
        self.h = self.tau / m
        self._cum = np.zeros(1)      # integral of pdf up to panel edge k * h
        self._moment = np.zeros(1)   # integral of delta * pdf up to the same edges
        self._mass = None

    def pdf(self, delta):
        delta = np.asarray(delta, dtype=float)
        out = np.where(delta >= 0.0, self._pdf(np.maximum(delta, 0.0)), 0.0)
        return float(out) if out.ndim == 0 else out

    def _quad(self, a, b, moment=False):
        """Gauss-Legendre integral of pdf (or delta * pdf) over [a, b], elementwise."""
        a = np.asarray(a, dtype=float)[..., None]
        half = (np.asarray(b, dtype=float)[..., None] - a) / 2.0
        x = a + half * (_NODES + 1.0)
        f = self._pdf(x)
        if moment:
            f = f * x
        return (half[..., 0]) * (f * _WEIGHTS).sum(axis=-1)

    def _extend(self, n_panels: int):
        have = self._cum.size - 1
        if n_panels <= have:
            return
        # grow geometrically to keep repeated extensions cheap
        target = max(n_panels, 2 * have, 64)
        edges = np.arange(have, target + 1) * self.h
        mass = self._quad(edges[:-1], edges[1:])
        mom = self._quad(edges[:-1], edges[1:], moment=True)
        self._cum = np.concatenate((self._cum, self._cum[-1] + np.cumsum(mass)))
        self._moment = np.concatenate((self._moment, self._moment[-1] + np.cumsum(mom)))

    def cdf(self, delta):
        delta = np.asarray(delta, dtype=float)
        d = np.maximum(delta, 0.0)
        if d.size > self.DENSE_LIMIT:
            out = self._cdf_dense(d)
        else:
            k = np.floor(d / self.h).astype(np.int64)
            if k.size:
                self._extend(int(k.max()) + 1)
            out = self._cum[k] + self._quad(k * self.h, d)
        out = np.where(delta > 0.0, out, 0.0)
        return float(out) if out.ndim == 0 else out

    # above this many query points, cdf switches to cubic Hermite interpolation
    DENSE_LIMIT = 4096
    _SUB = 32

    def _cdf_dense(self, d):
        """cdf on many points: Hermite interpolation of (cdf, pdf) on a fine grid.

        The fine grid refines the panel grid, so density breaks stay on cell
        edges and the interpolant is smooth inside each cell. One-sided pdf
        values are taken just inside each cell.
        """
        w = self.h / self._SUB
        n = int(np.floor(d.max() / w)) + 1
        self._extend(n // self._SUB + 1)
        edges = np.arange(n + 1) * w
        k = np.arange(n + 1) // self._SUB
        c = self._cum[k] + self._quad(k * self.h, edges)
        nudge = 1e-9 * w
        p0 = self._pdf(edges[:-1] + nudge) * w
        p1 = self._pdf(edges[1:] - nudge) * w
        j = np.minimum(np.floor(d / w).astype(np.int64), n - 1)
        t = d / w - j
        t2, t3 = t * t, t * t * t
        return ((2 * t3 - 3 * t2 + 1) * c[j] + (t3 - 2 * t2 + t) * p0[j]
                + (-2 * t3 + 3 * t2) * c[j + 1] + (t3 - t2) * p1[j])

    def _settle(self):
        """Extend the table until the remaining tail mass is negligible."""
        if self._mass is not None:
            return
        per_tau = round(self.tau / self.h)
        self._extend(per_tau * 4)
        while True:
            n = self._cum.size - 1
            last = self._cum[n] - self._cum[max(n - per_tau, 0)]
            if last <= 1e-15 * self._cum[n] or n > 10 ** 7:
                break
            self._extend(2 * n)
        self._mass = float(self._cum[-1])

    @property
    def mass(self) -> float:
        """Total integral of the density (1 for exact laws)."""
        self._settle()
        return self._mass

    def mean(self) -> float:
        self._settle()
        return float(self._moment[-1] / self._mass)

    def percentile(self, p: float) -> float:
        from .stats import invert_cdf

        return invert_cdf(self.cdf, p, scale=2.0 * self.tau)


# ---------------------------------------------------------------- synchronized


def sync_paoi_pdf(p_s: float, latency: DistributionCurve, tau: float, delta):
    """Density of the PAoI for a synchronized scheme with success probability p_s.

    Failures before a success are geometric and each adds one period, so
    ``p(delta) = p_s * sum_{f=0}^{floor(delta/tau)-1} (1-p_s)^f p_T(delta-(f+1) tau)``.
    The sum is finite and evaluated exactly.
    """
    if not 0.0 < p_s <= 1.0:
        raise ValueError(f"success probability must be in (0, 1], got {p_s}")
    delta = np.asarray(delta, dtype=float)
    n = np.floor(np.maximum(delta, 0.0) / tau).astype(np.int64)
    out = np.zeros(delta.shape)
    top = int(n.max()) if n.size else 0
    w = p_s
    for f in range(top):
        live = f < n
        if not live.any():
            break
        out += np.where(live, w * latency.pdf(delta - (f + 1) * tau), 0.0)
        w *= 1.0 - p_s
        if w == 0.0:
            break
    return float(out) if out.ndim == 0 else out


def success_probability(cfg: SystemConfig, quality=None) -> float:
    scheme = cfg.scheme
    quality = check_quality(scheme, quality)
    w = erasure_weights(*cfg.eps)
    return w.ps_min if decodes_on_first(scheme, quality) else w.ps_max


def sync_paoi(cfg: SystemConfig, quality=None) -> PaoiCurve:
    """PAoI curve of replicated, split or coded frames at the given quality."""
    if not cfg.scheme.synchronized:
        raise ValueError(f"{cfg.scheme.label} is not a synchronized scheme")
    quality = check_quality(cfg.scheme, quality)
    lat = latency_curve(cfg, quality)
    p_s = success_probability(cfg, quality)
    rate = max(lat.rates)

    def pdf(delta):
        return sync_paoi_pdf(p_s, lat, cfg.tau, delta)

    return PaoiCurve(pdf, cfg.tau, rate, label=f"{lat.label} paoi")


# ---------------------------------------------------------------- alternating


def _alt_params(cfg: SystemConfig):
    if cfg.scheme.kind is not Kind.ALTERNATING:
        raise ValueError(f"expected the alternating scheme, got {cfg.scheme.label}")
    s1, s2 = path_sigmas(cfg)
    r1, r2 = path_rates(cfg)
    return (s1.sigma, s2.sigma), (r1, r2)


def alt_relevance_probability(cfg: SystemConfig) -> tuple[float, float]:
    """Probability that a frame on path j is not overtaken by the next frame.

    The next frame goes out one period later on the other path, so for path 1
    this is ``P(T_1 < tau + T_2) = 1 - exp(-r_1 tau) r_2 / (r_1 + r_2)``.
    """
    _, (r1, r2) = _alt_params(cfg)
    tau = cfg.tau
    p1 = 1.0 - math.exp(-r1 * tau) * (1.0 - r1 / (r1 + r2))
    p2 = 1.0 - math.exp(-r2 * tau) * (1.0 - r2 / (r1 + r2))
    return p1, p2


def _alt_path_density(delta, tau, mu_a, s_a, mu_b, s_b, pr_a):
    """PAoI density when the informative frame travels on path a (error-free).

    Below 2 tau the previous frame (other path) must already be in. From 2 tau
    on, either the previous frame arrived and the next one on the other path
    does not overtake (this part uses the exact D/M/1 coupling of consecutive
    packets on path b), or the previous frame was itself overtaken and the age
    is counted from the frame two periods back.
    """
    r_a = mu_a * (1.0 - s_a)
    r_b = mu_b * (1.0 - s_b)
    d = np.asarray(delta, dtype=float)
    head = (1.0 - s_a) / pr_a * mu_a * np.exp(-r_a * (d - tau))
    early = -np.expm1(-r_b * d)
    # (1-s)/s * e^{-mu d} (e^{mu s d} - e^{2 mu s tau}), rewritten to avoid cancellation at small s
    coupled = ((1.0 - s_b) * np.exp(-mu_b * d + 2.0 * mu_b * s_b * tau)
               * np.expm1(mu_b * s_b * (d - 2.0 * tau)) / s_b)
    late = (np.exp(-r_b * (d - tau) + r_a * tau)
            + -np.expm1(-2.0 * r_b * tau) * np.exp(-mu_b * (d - 2.0 * tau))
            + coupled)
    body = np.where(d < 2.0 * tau, early, late)
    return np.where(d >= tau, head * body, 0.0)


def alt_paoi_path_pdfs(cfg: SystemConfig, delta):
    """Per-path conditional PAoI densities ``(p_{Delta,1}, p_{Delta,2})``."""
    (s1, s2), _ = _alt_params(cfg)
    mu1, mu2 = cfg.mu
    p1, p2 = alt_relevance_probability(cfg)
    return (_alt_path_density(delta, cfg.tau, mu1, s1, mu2, s2, p1),
            _alt_path_density(delta, cfg.tau, mu2, s2, mu1, s1, p2))


def alt_paoi(cfg: SystemConfig) -> PaoiCurve:
    """Error-free PAoI of the alternating scheme.

    The density jumps at 2 tau, where frames that were overtaken by their
    successor start contributing; the curve keeps that kink.
    """
    if any(e > 0.0 for e in cfg.eps):
        raise ValueError("alt_paoi is the error-free law; use alt_paoi_bound with erasures")
    p1, p2 = alt_relevance_probability(cfg)
    rate = max(cfg.mu) * 2.0

    def pdf(delta):
        d1, d2 = alt_paoi_path_pdfs(cfg, delta)
        return (p1 * d1 + p2 * d2) / (p1 + p2)

    return PaoiCurve(pdf, cfg.tau, rate, label="alternating paoi")


def _relevant_latency_pdf(t, tau, r_a, r_b, eps_b, pr_a):
    """Latency density of a path-a frame given no overtaking by the next frame.

    The next frame (other path) is either erased or arrives later.
    """
    t = np.asarray(t, dtype=float)
    tt = np.maximum(t, 0.0)
    not_overtaken = np.where(tt >= tau, np.exp(-r_b * (tt - tau)), 1.0)
    num = r_a * np.exp(-r_a * tt) * (eps_b + (1.0 - eps_b) * not_overtaken)
    return np.where(t >= 0.0, num / (eps_b + (1.0 - eps_b) * pr_a), 0.0)


def _unconstrained_alt_density(delta, tau, r_a, r_b):
    """PAoI density of a path-a frame when the next frame is erased (cannot overtake).

    The previous frame (other path) either arrived first, so the age counts
    from it, or arrived later, so the age counts from two periods back.
    """
    d = np.asarray(delta, dtype=float)
    direct = np.where(d >= tau, r_a * np.exp(-r_a * (d - tau)) * -np.expm1(-r_b * d), 0.0)
    skipped = np.where(d >= 2.0 * tau, r_a * np.exp(-r_a * (d - 2.0 * tau) - r_b * (d - tau)), 0.0)
    return direct + skipped


BOUND_FORMS = ("normalized", "printed")


def alt_paoi_bound_pdf(cfg: SystemConfig, delta, form: str = "normalized"):
    """Error-prone alternating PAoI density, optimistic approximation.

    Assumes a frame is only ever overtaken by its direct successor and that
    the newest delivered frame before a failure run is already on screen.
    A run of ``f`` erasures before a path-1 frame alternates paths, so it has
    probability ``eps1^floor(f/2) eps2^ceil(f/2)`` times the survival of the
    frame that ends it (mirrored for path 2).

    ``form="normalized"`` weighs every term by its full probability (run
    length, survival of the run's end, chance of not being overtaken), which
    makes the density integrate to one. ``form="printed"`` keeps the published
    expression, which omits those factors and carries about 5% excess mass
    at eps = 0.2.
    """
    if form not in BOUND_FORMS:
        raise ValueError(f"form must be one of {BOUND_FORMS}, got {form!r}")
    normalized = form == "normalized"
    _, (r1, r2) = _alt_params(cfg)
    e1, e2 = cfg.eps
    tau = cfg.tau
    p1, p2 = alt_relevance_probability(cfg)
    keep1 = e2 + (1.0 - e2) * p1  # next frame erased, or delivered later
    keep2 = e1 + (1.0 - e1) * p2
    d = np.asarray(delta, dtype=float)
    d1, d2 = alt_paoi_path_pdfs(cfg, d)
    part1 = (1.0 - e2) * p1 * d1
    part2 = (1.0 - e1) * p2 * d2
    if normalized:
        part1 = (1.0 - e2) * (part1 + e2 * _unconstrained_alt_density(d, tau, r1, r2))
        part2 = (1.0 - e1) * (part2 + e1 * _unconstrained_alt_density(d, tau, r2, r1))
    n = np.floor(np.maximum(d, 0.0) / tau).astype(np.int64)
    top = int(n.max()) if n.size else 0
    for f in range(1, top + 1):
        live = f <= n
        if not live.any():
            break
        w1 = e1 ** (f // 2) * e2 ** ((f + 1) // 2)
        w2 = e1 ** ((f + 1) // 2) * e2 ** (f // 2)
        if w1 == 0.0 and w2 == 0.0:
            break
        if normalized:
            # frame i-f-1 ends the run: other path when f is even
            w1 *= keep1 * ((1.0 - e2) if f % 2 == 0 else (1.0 - e1))
            w2 *= keep2 * ((1.0 - e1) if f % 2 == 0 else (1.0 - e2))
        t = d - (f + 1) * tau
        part1 = part1 + np.where(live, w1 * _relevant_latency_pdf(t, tau, r1, r2, e2, p1), 0.0)
        part2 = part2 + np.where(live, w2 * _relevant_latency_pdf(t, tau, r2, r1, e1, p2), 0.0)
    norm = (1.0 - e1) * keep1 + (1.0 - e2) * keep2
    out = ((1.0 - e1) * part1 + (1.0 - e2) * part2) / norm
    return float(out) if np.ndim(out) == 0 else out


def alt_paoi_bound(cfg: SystemConfig, form: str = "normalized") -> PaoiCurve:
    """Optimistic (lower-bound style) PAoI law of the error-prone alternating scheme.

    Meant to sit at or above the true PAoI cdf; it is tight at low load but
    ignores overtaking beyond the direct successor, so it is not a strict
    bound everywhere. With zero erasures it coincides with :func:`alt_paoi`.
    """
    _alt_params(cfg)
    if form not in BOUND_FORMS:
        raise ValueError(f"form must be one of {BOUND_FORMS}, got {form!r}")
    rate = max(cfg.mu) * 2.0
    return PaoiCurve(lambda d: alt_paoi_bound_pdf(cfg, d, form), cfg.tau, rate,
                     label="alternating paoi bound", is_lower_bound=True)


def paoi_curve(cfg: SystemConfig, quality=None) -> PaoiCurve:
    """Dispatch: alternating (exact if error-free, bound otherwise) or synchronized."""
    if cfg.scheme.kind is Kind.ALTERNATING:
        if any(e > 0.0 for e in cfg.eps):
            return alt_paoi_bound(cfg)
        return alt_paoi(cfg)
    return sync_paoi(cfg, quality)
