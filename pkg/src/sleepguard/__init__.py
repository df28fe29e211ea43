"""Discrete-event simulator of clustered wireless sensor networks under
denial-of-sleep attack, with an energy/distance cluster election, duty-cycled
MAC, RSA + interlock key exchange, square-residue identification, and a
SYN-rate cluster authentication defense."""

from ._kernels import implementation as kernel_implementation
from .config import DefenseParams, PowerProfile, RadioParams, SimConfig, parse_config
from .engine import Simulator, run, run_with_trace
from .metrics import (
    RunMetrics,
    detection_metrics,
    network_lifetime,
    pdr_percent,
    residual_energy_percent,
    throughput_kbps,
)

__version__ = "0.1.0"

__all__ = [
    "DefenseParams",
    "PowerProfile",
    "RadioParams",
    "RunMetrics",
    "SimConfig",
    "Simulator",
    "detection_metrics",
    "kernel_implementation",
    "network_lifetime",
    "parse_config",
    "pdr_percent",
    "residual_energy_percent",
    "run",
    "run_with_trace",
    "throughput_kbps",
    "__version__",
]
