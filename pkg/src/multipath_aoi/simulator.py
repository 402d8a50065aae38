"""Monte Carlo simulation of the two-path system.

Frames are generated at ``i * tau``. Each packet joins its path's FCFS queue
and is served for an exponential time of rate ``mu_j / L``. At service
completion an independent Bernoulli(eps_j) draw decides whether it is
erased; erased packets still occupy the server for their full service.

Random numbers come from four independent streams spawned from one seed:
service on path 1, service on path 2, erasure on path 1, erasure on path 2.
The k-th packet sent on path j always uses the k-th draw of that path's
streams. Schemes with the same per-path packet sequence (for example
``coded(0.5)`` and ``replicated``) therefore see identical realizations, and
changing eps never moves a delivery time.

Fixed-assignment schemes use a vectorized Lindley recursion per path. The
queue-based scheduler must look at queue lengths when each frame arrives,
so it runs through :func:`_event_engine`, which handles any scheme and is
also used to cross-check the Lindley path.
"""
from __future__ import annotations

import csv
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .model import Kind, SystemConfig, assert_stable, check_quality, decodes_on_first, packet_size

DEFAULT_WARMUP = 1000

NOTSENT, DELIVERED, ERASED = 0, 1, 2
STATUS_NAMES = {NOTSENT: "notsent", DELIVERED: "delivered", ERASED: "erased"}


@dataclass(frozen=True)
class FrameRecord:
    index: int
    gen_time: float
    # per path: delivery time, or None with status "erased" / "notsent"
    path_status: tuple[str, str]
    path_time: tuple[float | None, float | None]


@dataclass(frozen=True, eq=False)
class FrameTrace:
    """Per-frame outcome of a run.

    Arrays have one row per generated frame (warm-up included, since stale
    warm-up frames still matter when deciding which later frames are fresh);
    ``status`` and ``depart`` have one column per path. ``depart`` holds the
    service completion time of every sent packet, erased ones included.
    """

    cfg: SystemConfig
    seed: int
    n_frames: int
    warmup_trimmed: int
    gen_time: np.ndarray
    status: np.ndarray
    depart: np.ndarray
    service: np.ndarray
    notes: tuple[str, ...] = field(default=())

    def delivery_time(self, path: int) -> np.ndarray:
        """Delivery time on path 1 or 2; NaN when erased or not sent."""
        j = path - 1
        return np.where(self.status[:, j] == DELIVERED, self.depart[:, j], np.nan)

    @property
    def records(self) -> list[FrameRecord]:
        """Post-warm-up frames as record objects (slow; for inspection and tests)."""
        out = []
        for i in range(self.warmup_trimmed, self.n_frames):
            st = tuple(STATUS_NAMES[int(s)] for s in self.status[i])
            tm = tuple(float(self.depart[i, j]) if self.status[i, j] == DELIVERED else None
                       for j in range(2))
            out.append(FrameRecord(i, float(self.gen_time[i]), st, tm))
        return out

    def fingerprint(self) -> bytes:
        return b"".join(a.tobytes() for a in (self.gen_time, self.status, self.depart, self.service))

    def to_csv(self, path) -> None:
        """Write ``index,gen_time,path1_status,path1_time,path2_status,path2_time`` rows."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "gen_time", "path1_status", "path1_time", "path2_status", "path2_time"])
            for i in range(self.n_frames):
                row = [i, repr(float(self.gen_time[i]))]
                for j in range(2):
                    s = int(self.status[i, j])
                    row += [STATUS_NAMES[s], repr(float(self.depart[i, j])) if s == DELIVERED else ""]
                w.writerow(row)


def _streams(seed: int):
    children = np.random.SeedSequence(seed).spawn(4)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def lindley(arrivals: np.ndarray, services: np.ndarray) -> np.ndarray:
    """Departure times of a FCFS single-server queue.

    ``d_k = max(a_k, d_{k-1}) + s_k`` unrolled as
    ``d_k = C_k + max_{j<=k}(a_j - C_{j-1})`` with ``C`` the running service sum.
    """
    c = np.cumsum(services)
    return c + np.maximum.accumulate(arrivals - (c - services))


def _assignment(cfg: SystemConfig, n: int) -> np.ndarray:
    """Boolean (n, 2) mask of which paths carry a packet of each frame."""
    sent = np.zeros((n, 2), dtype=bool)
    if cfg.scheme.kind is Kind.ALTERNATING:
        sent[0::2, 0] = True
        sent[1::2, 1] = True
    else:
        sent[:] = True
    return sent


def _event_engine(cfg: SystemConfig, gen: np.ndarray, service_std, erase_u):
    """Arrival-driven engine with explicit per-path queues.

    Each path keeps the departure times of the packets currently in system.
    Before a frame joins, packets that have finished by its generation time
    leave, so ``len(queue)`` is the number in system just before arrival.
    """
    n = gen.size
    L = packet_size(cfg.scheme)
    scale = [L / cfg.mu[0], L / cfg.mu[1]]
    kind = cfg.scheme.kind
    # tie-break for the queue-based scheduler: faster path, then path 1
    prefer = 1 if cfg.mu[1] > cfg.mu[0] else 0
    queues = (deque(), deque())
    last = [0.0, 0.0]
    count = [0, 0]
    status = np.zeros((n, 2), dtype=np.int8)
    depart = np.full((n, 2), np.nan)
    service = np.full((n, 2), np.nan)
    for i in range(n):
        g = gen[i]
        for q in queues:
            while q and q[0] <= g:
                q.popleft()
        if kind is Kind.QUEUE_BASED:
            n1, n2 = len(queues[0]), len(queues[1])
            targets = (0,) if n1 < n2 else (1,) if n2 < n1 else (prefer,)
        elif kind is Kind.ALTERNATING:
            targets = (i % 2,)
        else:
            targets = (0, 1)
        for j in targets:
            k = count[j]
            s = service_std[j][k] * scale[j]
            d = max(g, last[j]) + s
            last[j] = d
            queues[j].append(d)
            count[j] = k + 1
            service[i, j] = s
            depart[i, j] = d
            status[i, j] = ERASED if erase_u[j][k] < cfg.paths[j].epsilon else DELIVERED
    return status, depart, service


def _lindley_engine(cfg: SystemConfig, gen: np.ndarray, service_std, erase_u):
    n = gen.size
    L = packet_size(cfg.scheme)
    sent = _assignment(cfg, n)
    status = np.zeros((n, 2), dtype=np.int8)
    depart = np.full((n, 2), np.nan)
    service = np.full((n, 2), np.nan)
    for j in range(2):
        rows = np.flatnonzero(sent[:, j])
        m = rows.size
        s = service_std[j][:m] * (L / cfg.mu[j])
        service[rows, j] = s
        depart[rows, j] = lindley(gen[rows], s)
        status[rows, j] = np.where(erase_u[j][:m] < cfg.paths[j].epsilon, ERASED, DELIVERED)
    return status, depart, service


def run(cfg: SystemConfig, n_frames: int, seed: int, warmup: int = DEFAULT_WARMUP,
        engine: str = "auto") -> FrameTrace:
    """Simulate ``n_frames`` frames; deterministic in ``(cfg, n_frames, seed)``.

    ``engine`` is ``"auto"`` (Lindley where possible), ``"lindley"`` or ``"event"``.
    Unstable configurations run, with a note on the trace; queues then grow
    without bound and memory stays O(n_frames).
    """
    n_frames = int(n_frames)
    if warmup < 0:
        raise ValueError("warmup must be nonnegative")
    if n_frames < warmup + 1000:
        raise ValueError(f"need at least warmup + 1000 = {warmup + 1000} frames, got {n_frames}")
    if engine == "auto":
        engine = "event" if cfg.scheme.kind is Kind.QUEUE_BASED else "lindley"
    if engine == "lindley" and cfg.scheme.kind is Kind.QUEUE_BASED:
        raise ValueError("the queue-based scheduler needs the event engine")
    streams = _streams(seed)
    service_std = [streams[0].standard_exponential(n_frames), streams[1].standard_exponential(n_frames)]
    erase_u = [streams[2].random(n_frames), streams[3].random(n_frames)]
    gen = np.arange(n_frames, dtype=float) * cfg.tau
    if engine == "event":
        status, depart, service = _event_engine(cfg, gen, service_std, erase_u)
    elif engine == "lindley":
        status, depart, service = _lindley_engine(cfg, gen, service_std, erase_u)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    notes = ()
    report = assert_stable(cfg)
    if not report:
        notes = (f"{report}; queues grow without bound",)
        warnings.warn(notes[0], RuntimeWarning, stacklevel=2)
    for a in (gen, status, depart, service):
        a.setflags(write=False)
    return FrameTrace(cfg, int(seed), n_frames, int(warmup), gen, status, depart, service, notes)


def reception_times(trace: FrameTrace, quality=None) -> np.ndarray:
    """Time at which each frame becomes decodable at ``quality``; inf if never."""
    scheme = trace.cfg.scheme
    quality = check_quality(scheme, quality)
    t1 = np.where(trace.status[:, 0] == DELIVERED, trace.depart[:, 0], np.inf)
    t2 = np.where(trace.status[:, 1] == DELIVERED, trace.depart[:, 1], np.inf)
    if scheme.kind in (Kind.ALTERNATING, Kind.QUEUE_BASED) or decodes_on_first(scheme, quality):
        # single-packet schemes have inf on the unused path
        return np.minimum(t1, t2)
    return np.maximum(t1, t2)


def extract_latencies(trace: FrameTrace, quality=None) -> np.ndarray:
    """Latencies of decoded post-warm-up frames, in frame order."""
    r = reception_times(trace, quality)[trace.warmup_trimmed:]
    g = trace.gen_time[trace.warmup_trimmed:]
    ok = np.isfinite(r)
    return r[ok] - g[ok]


def delivered_fraction(trace: FrameTrace, quality=None) -> tuple[int, int]:
    """(decoded, total) post-warm-up frame counts."""
    r = reception_times(trace, quality)[trace.warmup_trimmed:]
    return int(np.isfinite(r).sum()), int(r.size)


def extract_paoi(trace: FrameTrace, quality=None) -> np.ndarray:
    """Peak ages at informative receptions of post-warm-up frames.

    Receptions are walked in time order. A reception is informative only if
    its frame is newer than every frame shown so far; the sample is its
    reception time minus the generation time of the frame it replaces.
    Overtaken frames are dropped without producing a sample.
    """
    r = reception_times(trace, quality)
    idx = np.flatnonzero(np.isfinite(r))
    seq = idx[np.argsort(r[idx], kind="stable")]
    prev = np.empty_like(seq)
    prev[0] = -1
    np.maximum.accumulate(seq[:-1], out=prev[1:])
    keep = (seq > prev) & (prev >= 0) & (seq >= trace.warmup_trimmed)
    return r[seq[keep]] - trace.gen_time[prev[keep]]


def audit(trace: FrameTrace) -> None:
    """Check FCFS order and work conservation on each path; raises AssertionError."""
    for j in range(2):
        rows = np.flatnonzero(trace.status[:, j] != NOTSENT)
        d = trace.depart[rows, j]
        a = trace.gen_time[rows]
        s = trace.service[rows, j]
        assert np.all(np.diff(d) >= 0), f"path {j + 1}: departures out of FCFS order"
        start = np.maximum(a, np.concatenate(([-np.inf], d[:-1])))
        assert np.allclose(start + s, d, rtol=0, atol=1e-9 * max(1.0, float(d[-1]))), \
            f"path {j + 1}: server idle while work was queued"
