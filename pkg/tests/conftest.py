import numpy as np
import pytest

from sleepguard import _kernels
from sleepguard.config import SimConfig
from sleepguard.engine import Simulator


def make_sim(cfg: SimConfig, positions=None, attackers=None, record_trace=False) -> Simulator:
    """Simulator with optional fixed sensor positions / attacker set, for
    scripted scenarios where the random topology would get in the way."""
    sim = Simulator(cfg, record_trace=record_trace)
    if positions is not None:
        assert len(positions) == cfg.node_count
        sim.xs = np.array([p[0] for p in positions], dtype=np.float64)
        sim.ys = np.array([p[1] for p in positions], dtype=np.float64)
        sim.dist_bs = np.hypot(sim.xs - sim.bs_pos[0], sim.ys - sim.bs_pos[1])
        sim.adj_indptr, sim.adj_indices = _kernels.build_adjacency(
            sim.xs, sim.ys, cfg.transmission_range_m
        )
        for i, node in enumerate(sim.nodes[: cfg.node_count]):
            node.position = (float(sim.xs[i]), float(sim.ys[i]))
    if attackers is not None:
        from sleepguard.attacker import AttackerProfile, AttackKind
        from sleepguard.nodes import Role

        sim.is_attacker[:] = False
        for i in attackers:
            sim.is_attacker[i] = True
        sim.attacker_ids = set(int(i) for i in attackers)
        for i, node in enumerate(sim.nodes[: cfg.node_count]):
            node.role = Role.ATTACKER if sim.is_attacker[i] else Role.MEMBER
        sim.attackers = {
            i: AttackerProfile(
                node_id=i,
                kind=AttackKind(cfg.attack_kind),
                interval_s=cfg.attack_interval_s,
                start_offset_s=0.0,
            )
            for i in sorted(sim.attacker_ids)
        }
        if cfg.defense_enabled and sim.registry is not None:
            from sleepguard.crypto import make_identification

            sim.materials = {}
            sim.registry.squares.clear()
            sim.registry.secrets.clear()
            for i in range(cfg.node_count):
                if not sim.is_attacker[i]:
                    material = make_identification(sim.registry.modulus_g, sim.crypto_rng)
                    sim.materials[i] = material
                    sim.registry.register(i, material)
    return sim


@pytest.fixture
def tiny_cfg():
    return SimConfig(node_count=8, sim_time_s=4.0, rng_seed=3)
