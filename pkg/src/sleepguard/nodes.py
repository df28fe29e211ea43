"""Node state and topology generation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import SimConfig
from .energy import EnergyLedger, Mode
from .mac import DutyCycleSchedule


class Role(Enum):
    MEMBER = "member"
    CLUSTER_HEAD = "cluster_head"
    BASE_STATION = "base_station"
    ATTACKER = "attacker"


@dataclass
class NodeState:
    id: int
    position: tuple[float, float]
    residual_energy: float
    role: Role
    radio_mode: Mode = Mode.IDLE
    schedule: DutyCycleSchedule | None = None
    keys: object | None = None
    ledger: EnergyLedger = field(default_factory=EnergyLedger)

    @property
    def alive(self) -> bool:
        return self.residual_energy > 0

    @property
    def is_base_station(self) -> bool:
        return self.role is Role.BASE_STATION


def attacker_count(node_count: int, ratio: float) -> int:
    """Number of misbehaving nodes: ceil(ratio * n), so any positive ratio
    yields at least one attacker."""
    return math.ceil(ratio * node_count)


def build_topology(config: SimConfig, rng: np.random.Generator | None = None) -> list[NodeState]:
    """Place ``node_count`` sensors uniformly over the field plus one base
    station at the configured position (field centre by default).

    The base station is appended last with id ``node_count`` and unbounded
    energy. ``ceil(misbehaving_ratio * node_count)`` sensors, chosen without
    replacement from the seeded generator, are flagged as attackers.
    """
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    n = config.node_count
    xs = rng.uniform(0.0, config.field_width_m, size=n)
    ys = rng.uniform(0.0, config.field_height_m, size=n)
    n_attackers = attacker_count(n, config.misbehaving_ratio)
    attacker_ids = set(rng.choice(n, size=n_attackers, replace=False).tolist()) if n_attackers else set()

    schedule = lambda: DutyCycleSchedule(
        slot_length=config.slot_length_s,
        slots_per_cycle=config.duty_cycle_slots,
        awake_slots=config.awake_slots,
        current_sleep_time=config.nominal_sleep_s,
    )
    nodes = [
        NodeState(
            id=i,
            position=(float(xs[i]), float(ys[i])),
            residual_energy=config.initial_energy_j,
            role=Role.ATTACKER if i in attacker_ids else Role.MEMBER,
            schedule=schedule(),
        )
        for i in range(n)
    ]
    nodes.append(
        NodeState(
            id=n,
            position=config.bs_position,
            residual_energy=math.inf,
            role=Role.BASE_STATION,
        )
    )
    return nodes
