"""Latency and peak age of information for frames sent over two parallel lossy paths."""
from .age import (PaoiCurve, alt_paoi, alt_paoi_bound, alt_relevance_probability, paoi_curve,
                  success_probability, sync_paoi)
from .dm1 import SigmaRoot, solve_sigma
from .experiments import Row, Scenario, SweepSpec, emit_csv, run_preset, run_scenario, sweep
from .latency import (DistributionCurve, alt_latency, coded_latency, delivery_probability, latency_curve,
                      max_latency, min_latency, min_latency_err)
from .model import (Kind, PathParams, Quality, Scheme, StabilityReport, SystemConfig, UnstableSystemError,
                    arrival_rate, assert_stable, packet_size, path_load)
from .simulator import FrameTrace, extract_latencies, extract_paoi
from .simulator import run as simulate
from .stats import EmpiricalDistribution, empirical_cdf, ks_distance, percentile

__version__ = "0.1.0"

__all__ = [
    "DistributionCurve", "EmpiricalDistribution", "FrameTrace", "Kind", "PaoiCurve", "PathParams",
    "Quality", "Row", "Scenario", "Scheme", "SigmaRoot", "StabilityReport", "SweepSpec", "SystemConfig",
    "UnstableSystemError", "alt_latency", "alt_paoi", "alt_paoi_bound", "alt_relevance_probability",
    "arrival_rate", "assert_stable", "coded_latency", "delivery_probability", "emit_csv", "empirical_cdf",
    "extract_latencies", "extract_paoi", "ks_distance", "latency_curve", "max_latency", "min_latency",
    "min_latency_err", "packet_size", "paoi_curve", "path_load", "percentile", "run_preset",
    "run_scenario", "simulate", "solve_sigma", "success_probability", "sweep", "sync_paoi",
]
