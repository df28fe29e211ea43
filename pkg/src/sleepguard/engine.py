"""Deterministic simulation engine.

One run wires together topology, duty-cycle energy accounting, per-cycle
cluster elections, member-to-head-to-sink traffic, denial-of-sleep attack
emission and the two-level authentication defense, then folds the counters
into :class:`~sleepguard.metrics.RunMetrics`.

Time structure: duty cycles of ``cycle_period_s`` start at t = 0, period,
2*period, ... Each cycle opens with election and defense bookkeeping,
protocol traffic runs shortly into the awake window, attack ticks fire on
their own clocks, and idle/sleep residency is integrated lazily up to every
instant a node is touched, so no node acts past its exact death time.

Reception model: a broadcast is heard only by nodes whose radio is on when
it arrives; unicast exchanges may wake the peer (the sender leads with a
wakeup preamble). A node that honours a schedule-bearing frame outside its
listen window stays awake one extra listen window, so a sustained flood
with gaps shorter than that window never lets it sleep. Filtered frames
(bad or stale token, sender rejected) cost reception energy only. All
nodes, attackers included, run the same receive stack: with the defense on
an attacker's radio also drops unauthenticated floods, with it off every
radio is held awake alike.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .attacker import AttackerProfile, AttackKind
from .clustering import DIRECT_TO_SINK, MIN_CLUSTERED_NODES
from .config import SimConfig
from .crypto import (
    InterlockState,
    generate_rsa_keypair,
    make_identification,
    rsa_decrypt,
    rsa_encrypt,
)
from .defense import (
    AuthMode,
    ClusterAuthState,
    Registry,
    SynOutcome,
    Verdict,
    VerdictBook,
    final_classification,
    interlock_exchange,
    make_token,
    maybe_exit_auth_mode,
    network_authenticate,
    on_syn_received,
)
from .energy import Category, aggregation_energy, rx_energy, tx_energy
from .events import EventQueue
from .mac import Frame, FrameKind, update_sleep_time
from .metrics import RunMetrics
from .nodes import Role, build_topology

# Primes of this size back the per-run base-station keypair.
SIM_PRIME_BITS = 512


@dataclass
class TraceRecorder:
    """Raw event log for independent metric recomputation in tests."""

    frames: list = field(default_factory=list)      # (t, kind, src, dst, bits, delivered)
    energy: list = field(default_factory=list)      # (t, node, category, joules)
    deaths: list = field(default_factory=list)      # (t, node)
    verdict_events: list = field(default_factory=list)  # (t, node, "rejected")
    tenures: list = field(default_factory=list)     # (node, start, end)
    ticks: list = field(default_factory=list)       # (t, attacker)


class Simulator:
    """Single-run simulator; construct, then call :meth:`run` once."""

    def __init__(self, config: SimConfig, record_trace: bool = False):
        config.validate()
        self.cfg = config
        self.trace = TraceRecorder() if record_trace else None

        seq = np.random.SeedSequence(config.rng_seed)
        topo_seq, offset_seq, sweep_seq = seq.spawn(3)
        self.topo_rng = np.random.default_rng(topo_seq)
        self.offset_rng = np.random.default_rng(offset_seq)
        self.sweep_rng = np.random.default_rng(sweep_seq)
        self.crypto_rng = random.Random(config.rng_seed ^ 0x9E3779B97F4A7C15)

        self.nodes = build_topology(config, rng=self.topo_rng)
        n = config.node_count
        self.n = n
        self.bs_id = n
        self.bs_pos = config.bs_position

        self.xs = np.array([node.position[0] for node in self.nodes[:n]], dtype=np.float64)
        self.ys = np.array([node.position[1] for node in self.nodes[:n]], dtype=np.float64)
        self.dist_bs = np.hypot(self.xs - self.bs_pos[0], self.ys - self.bs_pos[1])
        self.is_attacker = np.array(
            [node.role is Role.ATTACKER for node in self.nodes[:n]], dtype=bool
        )
        self.attacker_ids = set(np.flatnonzero(self.is_attacker).tolist())

        self.residual = np.full(n, config.initial_energy_j, dtype=np.float64)
        self.initial = self.residual.copy()
        self.led = np.zeros((len(Category), n), dtype=np.float64)
        self.active = np.ones(n, dtype=np.uint8)
        self.t0s = np.zeros(n, dtype=np.float64)
        self.held_until = np.zeros(n, dtype=np.float64)
        self.sleep_len = np.full(n, config.nominal_sleep_s, dtype=np.float64)
        self.death_times: dict[int, float] = {}

        self.sent = np.zeros(n + 1, dtype=np.int64)
        self.received = np.zeros(n + 1, dtype=np.int64)

        self.member_of = np.full(n, DIRECT_TO_SINK, dtype=np.int64)
        self.member_map: dict[int, int] = {}
        self.head_mask = np.zeros(n, dtype=bool)
        self.clustered = False
        self.tenure_start: dict[int, float] = {}
        self.head_tenures: list[tuple[int, float, float]] = []

        self.queue = EventQueue()
        self.cycle_index = -1
        self.cycle_start = 0.0
        self.cycle_end = config.cycle_period_s
        self.awake_end = config.awake_window_s
        self.traffic_offset = min(5 * config.link_latency_s, config.awake_window_s / 2)

        if n > 0:
            self.adj_indptr, self.adj_indices = _kernels.build_adjacency(
                self.xs, self.ys, config.transmission_range_m
            )
        else:
            self.adj_indptr = np.zeros(1, dtype=np.int64)
            self.adj_indices = np.zeros(0, dtype=np.int64)

        # Defense state. Built only when the defense is on, so a defense-off
        # run is bit-for-bit independent of DefenseParams.
        self.verdicts = VerdictBook()
        self.auth_states: dict[int, ClusterAuthState] = {}
        self.registry: Registry | None = None
        self.materials: dict[int, object] = {}
        self.auth_known = np.zeros(n, dtype=bool)
        self.beacon_seen_cycle = np.full(n, -1, dtype=np.int64)
        self.pending_auth: dict[int, int] = {}
        self.sweep_order: list[int] = []
        self.escalations = 0
        self.attack_ticks = 0
        if config.defense_enabled and n > 0:
            self.bs_keypair = generate_rsa_keypair(SIM_PRIME_BITS, self.crypto_rng)
            self.registry = Registry(modulus_g=self.bs_keypair.modulus)
            for i in range(n):
                if not self.is_attacker[i]:
                    material = make_identification(self.bs_keypair.modulus, self.crypto_rng)
                    self.materials[i] = material
                    self.registry.register(i, material)
            self.sweep_order = self.sweep_rng.permutation(n).tolist()

        self.attackers: dict[int, AttackerProfile] = {}
        for i in sorted(self.attacker_ids):
            offset = float(self.offset_rng.uniform(0.0, config.attack_interval_s))
            self.attackers[i] = AttackerProfile(
                node_id=i,
                kind=AttackKind(config.attack_kind),
                interval_s=config.attack_interval_s,
                start_offset_s=offset,
            )

    # ------------------------------------------------------------------
    # Energy plumbing
    # ------------------------------------------------------------------

    def _debit_point(self, node_id: int, category: Category, joules: float, now: float) -> None:
        """Instant energy debit for one sensor node (the base station is free)."""
        if node_id == self.bs_id or node_id < 0 or node_id >= self.n:
            return
        if not self.active[node_id] or joules <= 0:
            return
        self._debit_many(np.array([node_id], dtype=np.int64), joules, category, now)

    def _debit_many(self, idx: np.ndarray, amounts, category: Category, now: float) -> None:
        if idx.size == 0:
            return
        if np.isscalar(amounts):
            amounts = np.full(idx.size, float(amounts), dtype=np.float64)
        before = self.led[category][idx].copy() if self.trace is not None else None
        deaths = _kernels.point_debits(
            idx.astype(np.int64), np.asarray(amounts, dtype=np.float64), now,
            self.residual, self.led[category], self.active,
        )
        if self.trace is not None:
            # record the amounts actually charged (partial on death)
            charged = self.led[category][idx] - before
            for k, i in enumerate(idx.tolist()):
                if charged[k] > 0:
                    self.trace.energy.append((now, int(i), int(category), float(charged[k])))
        self._process_deaths(deaths)

    def _accrue_all(self, t1: float) -> None:
        """Integrate idle/sleep residency for every active node up to t1."""
        snapshot = None
        if self.trace is not None:
            snapshot = (self.led[Category.IDLE].copy(), self.led[Category.SLEEP].copy())
        deaths = _kernels.accrue_spans(
            self.t0s, t1, self.cycle_start, self.cycle_end, self.awake_end,
            self.held_until, self.sleep_len,
            self.cfg.power.idle_w, self.cfg.power.sleep_w,
            self.residual, self.led[Category.IDLE], self.led[Category.SLEEP],
            self.active,
        )
        if self.trace is not None:
            d_idle = self.led[Category.IDLE] - snapshot[0]
            d_sleep = self.led[Category.SLEEP] - snapshot[1]
            for i in np.flatnonzero(d_idle > 0).tolist():
                self.trace.energy.append((t1, i, int(Category.IDLE), float(d_idle[i])))
            for i in np.flatnonzero(d_sleep > 0).tolist():
                self.trace.energy.append((t1, i, int(Category.SLEEP), float(d_sleep[i])))
        self._process_deaths(deaths)

    def _process_deaths(self, deaths) -> None:
        for i, t in deaths:
            i = int(i)
            self.death_times[i] = float(t)
            if self.trace is not None:
                self.trace.deaths.append((float(t), i))
            if self.head_mask[i]:
                self.head_mask[i] = False
                if i in self.tenure_start:
                    self.head_tenures.append((i, self.tenure_start.pop(i), float(t)))

    def _awake_mask(self, t: float) -> np.ndarray:
        """Which active sensors have their radio on at instant t."""
        a_end = np.maximum(self.awake_end, np.minimum(self.held_until, self.cycle_end))
        s_end = np.minimum(a_end + self.sleep_len, self.cycle_end)
        return (self.active != 0) & ((t < a_end) | (t >= s_end))

    def _hold(self, idx: np.ndarray, t: float) -> None:
        """An honoured schedule-bearing frame keeps its receivers listening
        for one extra window past the arrival; a flood with gaps shorter
        than the window chains these extensions and the victims never
        sleep. A fresh chain can only start while receivers are awake, so
        each cycle the flood must land a frame inside some listen window."""
        if idx.size == 0:
            return
        until = min(t + self.cfg.awake_window_s, self.cycle_end)
        np.maximum.at(self.held_until, idx, until)

    def _pos(self, i: int):
        if i == self.bs_id:
            return self.bs_pos
        return float(self.xs[i]), float(self.ys[i])

    def _dist(self, a: int, b: int) -> float:
        ax, ay = self._pos(a)
        bx, by = self._pos(b)
        return math.hypot(ax - bx, ay - by)

    def _trace_frame(self, t, kind, src, dst, bits, delivered) -> int:
        if self.trace is None:
            return -1
        self.trace.frames.append((t, kind.value, src, dst, bits, int(delivered)))
        return len(self.trace.frames) - 1

    # ------------------------------------------------------------------
    # MAC operations
    # ------------------------------------------------------------------

    def exchange_data(self, src: int, dst: int, payload_bytes: int, now: float) -> bool:
        """RTS/CTS/DATA/ACK handshake from src to dst.

        Debits every frame leg on both ends, wakes a sleeping destination,
        and counts the DATA emission at the source and the delivery at the
        destination on ACK completion. A dead destination aborts after the
        RTS; a malicious destination absorbs the DATA and never
        acknowledges. Zero-byte payloads run the control sequence only.
        """
        cbits = self.cfg.control_bits()
        d = self._dist(src, dst)
        radio = self.cfg.radio

        def alive(i: int) -> bool:
            return i == self.bs_id or (0 <= i < self.n and bool(self.active[i]))

        dst_alive = alive(dst)
        self._debit_point(src, Category.TX, tx_energy(cbits, d, radio), now)
        self._trace_frame(now, FrameKind.RTS, src, dst, cbits, dst_alive)
        if not dst_alive or not alive(src):
            return False
        self._debit_point(dst, Category.RX, rx_energy(cbits, radio), now)

        # CTS reply
        self._debit_point(dst, Category.TX, tx_energy(cbits, d, radio), now)
        self._trace_frame(now, FrameKind.CTS, dst, src, cbits, True)
        self._debit_point(src, Category.RX, rx_energy(cbits, radio), now)
        if not alive(dst) or not alive(src):
            return False

        sinkhole = dst != self.bs_id and bool(self.is_attacker[dst])
        data_idx = -1
        if payload_bytes > 0:
            dbits = 8 * payload_bytes
            self._debit_point(src, Category.TX, tx_energy(dbits, d, radio), now)
            self.sent[src] += 1
            data_idx = self._trace_frame(now, FrameKind.DATA, src, dst, dbits, False)
            if not alive(src):
                return False
            self._debit_point(dst, Category.RX, rx_energy(dbits, radio), now)
            if not alive(dst) or sinkhole:
                return False

        # ACK
        self._debit_point(dst, Category.TX, tx_energy(cbits, d, radio), now)
        self._debit_point(src, Category.RX, rx_energy(cbits, radio), now)
        self._trace_frame(now, FrameKind.ACK, dst, src, cbits, True)
        if not alive(dst):
            return False
        if payload_bytes > 0:
            self.received[dst] += 1
            if data_idx >= 0:
                t, kind, s, dd, bits, _ = self.trace.frames[data_idx]
                self.trace.frames[data_idx] = (t, kind, s, dd, bits, 1)
        return True

    def _charge_control_frames(self, a: int, b: int, a_tx: int, b_tx: int, now: float) -> None:
        """Debit a control-frame conversation between a and b (either may be
        the base station, whose side is free)."""
        cbits = self.cfg.control_bits()
        d = self._dist(a, b)
        radio = self.cfg.radio
        if a != self.bs_id:
            self._debit_point(a, Category.TX, a_tx * tx_energy(cbits, d, radio), now)
            self._debit_point(a, Category.RX, b_tx * rx_energy(cbits, radio), now)
        if b != self.bs_id:
            self._debit_point(b, Category.TX, b_tx * tx_energy(cbits, d, radio), now)
            self._debit_point(b, Category.RX, a_tx * rx_energy(cbits, radio), now)

    # ------------------------------------------------------------------
    # Cycle structure
    # ------------------------------------------------------------------

    def _dispatch(self, event) -> None:
        kind, arg = event.payload
        if kind == "cycle":
            self._on_cycle(arg, event.time)
        elif kind == "traffic":
            self._on_traffic(arg, event.time)
        elif kind == "attack":
            self._on_attack(arg, event.time)

    def _on_cycle(self, c: int, now: float) -> None:
        cfg = self.cfg
        if c > 0:
            self._accrue_all(now)  # close out the previous cycle
        self.cycle_index = c
        self.cycle_start = now
        self.cycle_end = now + cfg.cycle_period_s
        self.awake_end = now + cfg.awake_window_s
        self.sleep_len[:] = cfg.nominal_sleep_s
        self.held_until[:] = 0.0

        # Sensing action once per cycle for every live sensor.
        self._debit_many(
            np.flatnonzero(self.active), cfg.radio.sensing_energy_j, Category.SENSING, now
        )

        if cfg.defense_enabled:
            self._defense_cycle(c, now)
        else:
            self._commit_election(*self._compute_election(), now=now)
        serving = np.flatnonzero(self.head_mask)
        self.held_until[serving] = self.cycle_end  # heads stay up to serve

        self.queue.schedule(now + self.traffic_offset, ("traffic", c))
        next_start = self.cycle_end
        if next_start < cfg.sim_time_s:
            self.queue.schedule(next_start, ("cycle", c + 1))

    def _compute_election(self, extra_excluded: set | None = None):
        """One election round over the current energies; rejected (and
        explicitly excluded) nodes can neither win nor join."""
        excluded = {i for i, _ in self.verdicts.items() if self.verdicts.is_rejected(i)}
        if extra_excluded:
            excluded |= extra_excluded
        eligible = self.active != 0
        if excluded:
            eligible = eligible & ~np.isin(np.arange(self.n), sorted(excluded))

        if int(eligible.sum()) < MIN_CLUSTERED_NODES:
            return (
                np.zeros(self.n, dtype=bool),
                np.full(self.n, DIRECT_TO_SINK, dtype=np.int64),
                {},
                False,
            )
        if self.cfg.head_score == "energy_over_distance":
            score = self.residual / (1.0 + self.dist_bs)
        else:
            score = self.residual * self.dist_bs
        elig8 = eligible.astype(np.uint8)
        head_mask = np.asarray(
            _kernels.elect_heads(score, elig8, self.adj_indptr, self.adj_indices),
            dtype=bool,
        )
        member_of = _kernels.assign_members(
            self.xs, self.ys, elig8, head_mask.view(np.uint8),
            self.cfg.transmission_range_m,
        )
        member_map = {
            int(i): int(member_of[i])
            for i in np.flatnonzero(eligible).tolist()
            if member_of[i] >= 0
        }
        return head_mask, member_of, member_map, True

    def _commit_election(self, head_mask, member_of, member_map, clustered, now: float) -> None:
        old_heads = set(np.flatnonzero(self.head_mask).tolist())
        self.head_mask = head_mask
        self.member_of = member_of
        self.member_map = member_map
        self.clustered = self.clustered or clustered
        new_heads = set(np.flatnonzero(head_mask).tolist())

        for h in sorted(old_heads - new_heads):
            if h in self.tenure_start:
                self.head_tenures.append((h, self.tenure_start.pop(h), now))
        for h in sorted(new_heads - old_heads):
            self.tenure_start[h] = now
            # A node elected out of a cluster that was in authentication
            # mode keeps that mode up as the new head.
            if self.cfg.defense_enabled and self.auth_known[h] and not self.is_attacker[h]:
                self._state_for(h).enter_auth_mode(now)

    # ------------------------------------------------------------------
    # Defense
    # ------------------------------------------------------------------

    def _state_for(self, head: int) -> ClusterAuthState:
        state = self.auth_states.get(head)
        if state is None:
            state = ClusterAuthState(head_id=head, params=self.cfg.defense, verdicts=self.verdicts)
            self.auth_states[head] = state
        return state

    def _session_key_for(self, node_id: int):
        return self.registry.session_keys.get(node_id) if self.registry else None

    def _reject(self, node_id: int, now: float) -> None:
        self.verdicts.reject(node_id)
        if self.trace is not None:
            self.trace.verdict_events.append((now, node_id, "rejected"))

    def _identify_and_key(self, evaluator: int, target: int, now: float) -> bool:
        """Run the identification rounds and, on success, the interlock key
        transfer; charges every frame and registers the session key."""
        p = self.cfg.defense
        rounds = p.fs_rounds
        # F lookup at the base station plus the round-trip conversation.
        if evaluator != self.bs_id:
            self._charge_control_frames(evaluator, self.bs_id, 1, 1, now)
        self._charge_control_frames(target, evaluator, 2 * rounds, rounds + 1, now)
        material = self.materials.get(target)
        ok = network_authenticate(material, target, self.registry, rounds, self.crypto_rng)
        if not ok:
            return False
        # Interlock transfer of the session key to the base station: the
        # wrapping key rides on an RSA-encrypted control frame.
        wrap_key = self.crypto_rng.getrandbits(128).to_bytes(16, "big")
        wrapped = rsa_encrypt(int.from_bytes(wrap_key, "big"), self.bs_keypair.public)
        rsa_decrypt(wrapped, self.bs_keypair.private)  # base-station side
        session = interlock_exchange(target, self.bs_id, wrap_key, self.crypto_rng)
        self._charge_control_frames(target, self.bs_id, 3, 2, now)
        if session.state != InterlockState.COMPLETE:
            return False
        self.registry.session_keys[target] = session.session_key
        self.verdicts.mark_verified(target)
        return True

    def _defense_cycle(self, c: int, now: float) -> None:
        """Per-cycle defense work, all drawing on one authentication budget
        at the base station: resolve challenge timeouts, authenticate fresh
        election winners (re-electing around challenged candidates), then
        sweep authentication-mode clusters."""
        p = self.cfg.defense

        # Challenge timeouts: unresponsive nodes are rejected.
        for target, deadline in sorted(self.pending_auth.items()):
            if c >= deadline:
                del self.pending_auth[target]
                self._reject(target, now)
        slots = p.auth_capacity - len(self.pending_auth)

        # Election: a winner must identify itself to the base station before
        # serving. Responsive (benign) winners verify in place; silent ones
        # are challenged and the election re-runs without them. Only when
        # the budget is exhausted does an unverified winner serve.
        challenged: set[int] = set(self.pending_auth)
        while True:
            head_mask, member_of, member_map, flag = self._compute_election(challenged)
            progressed = False
            for h in sorted(np.flatnonzero(head_mask).tolist()):
                if h in self.verdicts.verified:
                    continue
                if slots <= 0:
                    continue
                slots -= 1
                if self.is_attacker[h]:
                    self.pending_auth[h] = c + p.auth_timeout_cycles
                    self._charge_control_frames(h, self.bs_id, 0, 1, now)  # unanswered
                    challenged.add(h)
                    progressed = True
                else:
                    self._identify_and_key(self.bs_id, h, now)
            if not progressed:
                break
        self._commit_election(head_mask, member_of, member_map, flag, now)
        serving = sorted(np.flatnonzero(self.head_mask).tolist())

        # Cluster sweeps while in authentication mode.
        for h in serving:
            if self.is_attacker[h] or not self.active[h]:
                continue
            state = self._state_for(h)
            if state.mode != AuthMode.AUTH_REQUIRED:
                continue
            if maybe_exit_auth_mode(state, now):
                self._broadcast_mode_flag(h, FrameKind.NO_SYN_A, now)
                continue
            if slots <= 0:
                continue
            member_set = {
                i for i in self.member_map
                if self.member_map[i] == h and i != h and self.active[i]
                and not self.verdicts.is_rejected(i)
            }
            suspected = sorted(
                i for i in member_set
                if self.verdicts.get(i) == Verdict.SUSPECTED
                and i not in self.verdicts.verified and i not in self.pending_auth
            )
            rest = [
                i for i in self.sweep_order
                if i in member_set and i not in self.verdicts.verified
                and i not in self.pending_auth and i not in suspected
            ]
            for target in (suspected + rest)[:slots]:
                slots -= 1
                if self.is_attacker[target]:
                    self.pending_auth[target] = c + p.auth_timeout_cycles
                    self._charge_control_frames(h, target, 1, 0, now)  # unanswered
                else:
                    self._identify_and_key(h, target, now)

    def _escalate(self, head: int, now: float) -> None:
        self.escalations += 1
        self._broadcast_mode_flag(head, FrameKind.SYN_A, now)

    def _broadcast_mode_flag(self, head: int, kind: FrameKind, now: float) -> None:
        """SYN-A / NO-SYN-A broadcast: awake cluster members flip their
        authentication flag; sleepers catch up from the next beacon."""
        cbits = self.cfg.control_bits()
        self._debit_point(head, Category.TX,
                          tx_energy(cbits, self.cfg.transmission_range_m, self.cfg.radio), now)
        self._trace_frame(now, kind, head, -1, cbits, True)
        if self.n == 0:
            return
        awake = self._awake_mask(now)
        in_cluster = self.member_of == head
        receivers = np.flatnonzero(awake & in_cluster & (np.arange(self.n) != head))
        self._debit_many(receivers, rx_energy(cbits, self.cfg.radio), Category.RX, now)
        self.auth_known[receivers] = kind == FrameKind.SYN_A

    # ------------------------------------------------------------------
    # Traffic
    # ------------------------------------------------------------------

    def _on_traffic(self, c: int, now: float) -> None:
        cfg = self.cfg
        self._accrue_all(now)
        serving = sorted(np.flatnonzero(self.head_mask).tolist())

        for h in serving:
            self._broadcast_beacon(h, c, now)

        for h in serving:
            if not self.active[h]:
                continue
            members = sorted(
                i for i in self.member_map
                if self.member_map[i] == h and i != h and self.active[i]
            )
            delivered_count = 0
            for m in members:
                if self.verdicts.is_rejected(m):
                    continue  # isolated: the head ignores it, the node backs off
                if self.is_attacker[m]:
                    if not self.auth_known[m]:
                        self._member_syn(m, h, c, now)
                    continue
                self._member_syn(m, h, c, now)
                if not self.active[m] or not self.active[h]:
                    continue
                if self.exchange_data(m, h, cfg.packet_size_bytes, now):
                    delivered_count += 1
            if self.is_attacker[h] or not self.active[h]:
                continue  # a malicious head never forwards
            agg = aggregation_energy(delivered_count, cfg.packet_bits(), cfg.radio)
            self._debit_point(h, Category.AGGREGATION, agg, now)
            if self.active[h]:
                self.exchange_data(h, self.bs_id, cfg.packet_size_bytes, now)

        # Unclustered (or head-unreachable) nodes report straight to the sink.
        direct = sorted(
            i for i in np.flatnonzero(self.active).tolist()
            if self.member_of[i] == DIRECT_TO_SINK
            and not self.is_attacker[i] and not self.verdicts.is_rejected(i)
        )
        for i in direct:
            if self.active[i]:
                self.exchange_data(i, self.bs_id, cfg.packet_size_bytes, now)

    def _member_syn(self, m: int, h: int, c: int, now: float) -> None:
        cfg = self.cfg
        token = None
        extra_bits = 0
        if cfg.defense_enabled and self.auth_known[m]:
            key = self._session_key_for(m)
            if key is not None:
                token = make_token(key, c, m, cfg.defense.token_bytes)
                extra_bits = 8 * cfg.defense.token_bytes
        frame = Frame(
            kind=FrameKind.SYN, size_bytes=cfg.syn_frame_bytes, src=m, dst=h,
            sent_at=now, sleep_time_field=float(self.sleep_len[m]),
            auth_token=token, cycle_index=c,
        )
        bits = frame.bits + extra_bits
        d = self._dist(m, h)
        self._debit_point(m, Category.TX, tx_energy(bits, d, cfg.radio), now)
        self._trace_frame(now, FrameKind.SYN, m, h, bits, True)
        if not self.active[h]:
            return
        self._debit_point(h, Category.RX, rx_energy(bits, cfg.radio), now)
        if self.is_attacker[h]:
            return  # malicious head runs no defense and ignores schedules
        if cfg.defense_enabled:
            state = self._state_for(h)
            outcome = on_syn_received(state, frame, self.member_map, now, self._session_key_for)
            if outcome == SynOutcome.ESCALATE_AUTH:
                self._escalate(h, now)
            elif outcome == SynOutcome.ACCEPT:
                self.sleep_len[h] = update_sleep_time(
                    float(self.sleep_len[h]), frame.sleep_time_field, cfg.syn_update_mode
                )
        else:
            self.sleep_len[h] = update_sleep_time(
                float(self.sleep_len[h]), frame.sleep_time_field, cfg.syn_update_mode
            )

    def _broadcast_beacon(self, h: int, c: int, now: float) -> None:
        """Per-cycle schedule beacon from a serving head: members synchronise
        their sleep time to it; in defense mode it also carries the cluster's
        authentication flag. Attackers in listening range capture it as their
        replay template."""
        cfg = self.cfg
        if not self.active[h]:
            return
        frame = Frame(
            kind=FrameKind.SYN, size_bytes=cfg.syn_frame_bytes, src=h, dst=-1,
            sent_at=now, sleep_time_field=float(self.sleep_len[h]), cycle_index=c,
        )
        self._debit_point(h, Category.TX,
                          tx_energy(frame.bits, cfg.transmission_range_m, cfg.radio), now)
        self._trace_frame(now, FrameKind.SYN, h, -1, frame.bits, True)
        awake = self._awake_mask(now)
        hearers = np.flatnonzero(awake & (np.arange(self.n) != h))
        self._debit_many(hearers, rx_energy(frame.bits, cfg.radio), Category.RX, now)

        in_cluster = self.member_of[hearers] == h
        members = hearers[in_cluster]
        fresh = self.beacon_seen_cycle[members] < c
        members = members[fresh]
        self.beacon_seen_cycle[members] = c
        if members.size:
            if cfg.syn_update_mode == "literal":
                self.sleep_len[members] = self.sleep_len[members] + frame.sleep_time_field / 2.0
            else:
                self.sleep_len[members] = (self.sleep_len[members] + frame.sleep_time_field) / 2.0
            if cfg.defense_enabled and not self.is_attacker[h]:
                state = self._state_for(h)
                self.auth_known[members] = state.mode == AuthMode.AUTH_REQUIRED

        for i in hearers.tolist():
            profile = self.attackers.get(int(i))
            if profile is not None:
                profile.capture_syn(frame)

    # ------------------------------------------------------------------
    # Attack traffic
    # ------------------------------------------------------------------

    def _on_attack(self, attacker_id: int, now: float) -> None:
        profile = self.attackers[attacker_id]
        if not self.active[attacker_id]:
            return  # a dead attacker schedules nothing further
        self.attack_ticks += 1
        if self.trace is not None:
            self.trace.ticks.append((now, attacker_id))
        self._accrue_all(now)

        if profile.kind == AttackKind.RTS_FLOOD:
            self._rts_flood(attacker_id, now)
        else:
            if profile.kind == AttackKind.SYN_REPLAY:
                frame = profile.replay_frame(now)
            else:
                frame = profile.forged_syn(now, self.n + 1000, self.cfg.syn_frame_bytes)
            if frame is not None:
                self._broadcast_attack_syn(attacker_id, frame, now)

        nxt = now + profile.interval_s
        if nxt < self.cfg.sim_time_s and self.active[attacker_id]:
            self.queue.schedule(nxt, ("attack", attacker_id))

    def _broadcast_attack_syn(self, attacker_id: int, frame: Frame, now: float) -> None:
        cfg = self.cfg
        bits = frame.bits + (8 * len(frame.auth_token) if frame.auth_token else 0)
        self._debit_point(attacker_id, Category.TX,
                          tx_energy(bits, cfg.transmission_range_m, cfg.radio), now)
        self._trace_frame(now, FrameKind.SYN, frame.src, -1, bits, True)
        if not self.active[attacker_id]:
            return
        awake = self._awake_mask(now)
        hearers = np.flatnonzero(awake & (np.arange(self.n) != attacker_id))
        if hearers.size == 0:
            return
        self._debit_many(hearers, rx_energy(bits, cfg.radio), Category.RX, now)

        rejected_src = cfg.defense_enabled and self.verdicts.is_rejected(frame.src)

        honored = []
        for i in hearers.tolist():
            i = int(i)
            if not self.active[i]:
                continue
            if self.head_mask[i] and not self.is_attacker[i]:
                if cfg.defense_enabled:
                    state = self._state_for(i)
                    outcome = on_syn_received(state, frame, self.member_map, now,
                                              self._session_key_for)
                    if outcome == SynOutcome.ESCALATE_AUTH:
                        self._escalate(i, now)
                    elif outcome == SynOutcome.ACCEPT:
                        self.sleep_len[i] = update_sleep_time(
                            float(self.sleep_len[i]), frame.sleep_time_field or 0.0,
                            cfg.syn_update_mode)
                else:
                    self.sleep_len[i] = update_sleep_time(
                        float(self.sleep_len[i]), frame.sleep_time_field or 0.0,
                        cfg.syn_update_mode)
                continue
            if cfg.defense_enabled and rejected_src:
                continue
            if cfg.defense_enabled and self.auth_known[i]:
                # Strict mode: only the own head's fresh beacon is honoured.
                if frame.src != self.member_map.get(i) or frame.cycle_index != self.cycle_index \
                        or self.beacon_seen_cycle[i] >= self.cycle_index:
                    continue
            honored.append(i)

        if honored:
            idx = np.array(honored, dtype=np.int64)
            fld = frame.sleep_time_field or 0.0
            if cfg.syn_update_mode == "literal":
                self.sleep_len[idx] = self.sleep_len[idx] + fld / 2.0
            else:
                self.sleep_len[idx] = (self.sleep_len[idx] + fld) / 2.0
            self._hold(idx, now)

    def _rts_flood(self, attacker_id: int, now: float) -> None:
        """Unicast RTS to every in-range node; the wakeup preamble reaches
        sleepers too. Honouring victims answer with a CTS and stay awake."""
        cfg = self.cfg
        cbits = cfg.control_bits()
        victims = np.flatnonzero(self.active).tolist()
        victims = [v for v in victims if v != attacker_id]
        if not victims:
            return
        vidx = np.array(victims, dtype=np.int64)
        dx = self.xs[vidx] - self.xs[attacker_id]
        dy = self.ys[vidx] - self.ys[attacker_id]
        dist = np.hypot(dx, dy)
        in_range = dist <= cfg.transmission_range_m
        vidx = vidx[in_range]
        dist = dist[in_range]
        if vidx.size == 0:
            return
        d0 = math.sqrt(cfg.radio.eps_fs / cfg.radio.eps_mp)
        amp = np.where(dist < d0, cfg.radio.eps_fs * dist**2, cfg.radio.eps_mp * dist**4)
        tx_each = cbits * (cfg.radio.e_elec + amp)
        self._debit_point(attacker_id, Category.TX, float(tx_each.sum()), now)
        self._trace_frame(now, FrameKind.RTS, attacker_id, -1, cbits * vidx.size, True)
        if not self.active[attacker_id]:
            return
        self._debit_many(vidx, rx_energy(cbits, cfg.radio), Category.RX, now)

        honored = []
        cts_cost = []
        for k, v in enumerate(vidx.tolist()):
            v = int(v)
            if not self.active[v]:
                continue
            if cfg.defense_enabled:
                if self.verdicts.is_rejected(attacker_id):
                    continue
                if self.auth_known[v] and attacker_id not in self.verdicts.verified:
                    continue
            if self.head_mask[v] and not self.is_attacker[v] and cfg.defense_enabled:
                # heads feed control-frame floods into the same rate tracker
                state = self._state_for(v)
                is_member = self.member_map.get(attacker_id) == v
                state.record_arrival(attacker_id, now, member=is_member)
                rate = state.rate(attacker_id, now) if is_member else state.stranger_rate(now)
                if state.mode == AuthMode.NORMAL and rate > cfg.defense.syn_rate_threshold:
                    if attacker_id not in self.verdicts.verified:
                        self.verdicts.suspect(attacker_id)
                    state.enter_auth_mode(now)
                    self._escalate(v, now)
            honored.append(v)
            cts_cost.append(tx_energy(cbits, float(dist[k]), cfg.radio))
        if honored:
            idx = np.array(honored, dtype=np.int64)
            self._debit_many(idx, np.array(cts_cost), Category.TX, now)
            self._hold(idx, now)

    # ------------------------------------------------------------------
    # Run loop
    # ------------------------------------------------------------------

    def run(self) -> RunMetrics:
        cfg = self.cfg
        if self.n > 0 and cfg.sim_time_s > 0:
            self.queue.schedule(0.0, ("cycle", 0))
            for i in sorted(self.attackers):
                offset = self.attackers[i].start_offset_s
                if offset < cfg.sim_time_s:
                    self.queue.schedule(offset, ("attack", i))
            self.queue.run_until(cfg.sim_time_s, self._dispatch)
            self._accrue_all(cfg.sim_time_s)
        for h, start in sorted(self.tenure_start.items()):
            self.head_tenures.append((h, start, cfg.sim_time_s))
        self.tenure_start.clear()
        if self.trace is not None:
            self.trace.tenures.extend(self.head_tenures)

        confusion = final_classification(self.verdicts, self.attacker_ids, range(self.n))
        return RunMetrics(
            node_count=self.n,
            packet_size_bytes=cfg.packet_size_bytes,
            start_time_s=0.0,
            stop_time_s=cfg.sim_time_s,
            sent=self.sent.copy(),
            received=self.received.copy(),
            initial_energy=self.initial.copy(),
            residual_energy=self.residual.copy(),
            ledger=self.led.T.copy(),
            head_tenures=list(self.head_tenures),
            confusion=confusion,
            clustered=self.clustered,
            death_times=dict(self.death_times),
            attacker_ids=set(self.attacker_ids),
            attack_ticks=self.attack_ticks,
            escalations=self.escalations,
        )


def run(config: SimConfig, record_trace: bool = False) -> RunMetrics:
    """Execute one simulation run; bit-identical for identical config+seed."""
    return Simulator(config, record_trace=record_trace).run()


def run_with_trace(config: SimConfig) -> tuple[RunMetrics, TraceRecorder]:
    sim = Simulator(config, record_trace=True)
    metrics = sim.run()
    return metrics, sim.trace
