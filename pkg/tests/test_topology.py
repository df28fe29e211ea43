import math

import numpy as np

from sleepguard.config import SimConfig
from sleepguard.nodes import Role, attacker_count, build_topology


def test_node_and_attacker_counts():
    nodes = build_topology(SimConfig(rng_seed=1, node_count=300, misbehaving_ratio=0.0))
    sensors = [n for n in nodes if not n.is_base_station]
    assert len(sensors) == 300
    assert sum(n.role is Role.ATTACKER for n in sensors) == 0


def test_five_percent_of_300_is_15_attackers():
    nodes = build_topology(SimConfig(rng_seed=1, node_count=300, misbehaving_ratio=0.05))
    assert sum(n.role is Role.ATTACKER for n in nodes) == 15


def test_attacker_count_rounds_up():
    assert attacker_count(300, 0.001) == 1
    assert attacker_count(300, 0.05) == 15
    assert attacker_count(10, 0.0) == 0


def test_same_seed_reproduces_positions_and_attackers():
    cfg = SimConfig(rng_seed=42, node_count=50, misbehaving_ratio=0.2)
    a = build_topology(cfg)
    b = build_topology(cfg)
    assert [n.position for n in a] == [n.position for n in b]
    assert [n.role for n in a] == [n.role for n in b]


def test_positions_inside_field_and_bs_at_centre():
    cfg = SimConfig(rng_seed=7, node_count=80)
    nodes = build_topology(cfg)
    for n in nodes[:-1]:
        assert 0.0 <= n.position[0] <= cfg.field_width_m
        assert 0.0 <= n.position[1] <= cfg.field_height_m
    bs = nodes[-1]
    assert bs.role is Role.BASE_STATION
    assert bs.position == (40.0, 40.0)
    assert math.isinf(bs.residual_energy)


def test_exactly_one_base_station_with_id_n():
    nodes = build_topology(SimConfig(rng_seed=1, node_count=10))
    stations = [n for n in nodes if n.is_base_station]
    assert len(stations) == 1
    assert stations[0].id == 10


def test_bs_position_override():
    cfg = SimConfig(rng_seed=1, node_count=5, bs_x_m=1.0, bs_y_m=2.0)
    assert build_topology(cfg)[-1].position == (1.0, 2.0)
