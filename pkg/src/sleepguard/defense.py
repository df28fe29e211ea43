"""Two-level authentication against denial-of-sleep floods.

Cluster level: each head tracks per-sender SYN arrival rates. A sender
outside the cluster is rejected outright; a rate above the threshold flips
the cluster into authentication mode (broadcast SYN-A), where only SYNs
carrying a fresh keyed token are accepted. Once every observed rate falls
back below threshold * exit_factor the head broadcasts NO-SYN-A and
returns to normal mode.

Network level: the base station stores each registered node's published
square F = P^2 mod G and acts as the trusted third party. An evaluator
fetches F and runs the challenge-response identification against the
prover; nodes without a registration, or without the secret, fail.

Verdicts move accepted -> suspected -> rejected and never backward within
a round; rejection is absorbing and isolates the node.
"""

from __future__ import annotations

import hashlib
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum, IntEnum

from .config import DefenseParams
from .crypto import (
    AuthenticationError,
    CryptoError,
    IdentificationMaterial,
    InterlockSession,
    InterlockState,
    fs_identify,
    symmetric_decrypt,
    symmetric_encrypt,
)
from .mac import Frame


class Verdict(IntEnum):
    ACCEPTED = 0
    SUSPECTED = 1
    REJECTED = 2


class AuthMode(Enum):
    NORMAL = "normal"
    AUTH_REQUIRED = "auth_required"


class SynOutcome(Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    ESCALATE_AUTH = "escalate_auth"


class VerdictBook:
    """Network-wide verdict map shared by all cluster heads and the base
    station. Rejection is permanent; a suspected node can be cleared back
    to accepted only by passing verification (a later round)."""

    def __init__(self) -> None:
        self._verdicts: dict[int, Verdict] = {}
        self.verified: set[int] = set()

    def get(self, node_id: int) -> Verdict:
        return self._verdicts.get(node_id, Verdict.ACCEPTED)

    def suspect(self, node_id: int) -> None:
        if self.get(node_id) == Verdict.ACCEPTED:
            self._verdicts[node_id] = Verdict.SUSPECTED

    def reject(self, node_id: int) -> None:
        self._verdicts[node_id] = Verdict.REJECTED

    def mark_verified(self, node_id: int) -> None:
        self.verified.add(node_id)
        if self.get(node_id) == Verdict.SUSPECTED:
            self._verdicts[node_id] = Verdict.ACCEPTED

    def is_rejected(self, node_id: int) -> bool:
        return self.get(node_id) == Verdict.REJECTED

    def items(self):
        return self._verdicts.items()


@dataclass
class ClusterAuthState:
    """Per-cluster defense state owned by the serving head."""

    head_id: int
    params: DefenseParams
    verdicts: VerdictBook
    mode: AuthMode = AuthMode.NORMAL
    auth_entered_at: float = 0.0
    last_syn_arrival: dict[int, float] = field(default_factory=dict)
    arrivals: dict[int, deque] = field(default_factory=dict)
    stranger_arrivals: deque = field(default_factory=deque)
    invalid_in_auth: dict[int, int] = field(default_factory=dict)
    accepted_cycles: dict[int, int] = field(default_factory=dict)

    def enter_auth_mode(self, now: float) -> None:
        self.mode = AuthMode.AUTH_REQUIRED
        self.auth_entered_at = now

    def _prune(self, q: deque, now: float) -> None:
        horizon = now - self.params.rate_window_s
        while q and q[0] < horizon:
            q.popleft()

    def record_arrival(self, sender: int, now: float, member: bool) -> None:
        self.last_syn_arrival[sender] = now
        q = self.arrivals.setdefault(sender, deque()) if member else self.stranger_arrivals
        q.append(now)
        self._prune(q, now)

    def rate(self, sender: int, now: float) -> float:
        q = self.arrivals.get(sender)
        if not q:
            return 0.0
        self._prune(q, now)
        return len(q) / self.params.rate_window_s

    def stranger_rate(self, now: float) -> float:
        self._prune(self.stranger_arrivals, now)
        return len(self.stranger_arrivals) / self.params.rate_window_s

    def observed_rates(self, now: float) -> list[float]:
        rates = [self.rate(s, now) for s in list(self.arrivals)]
        rates.append(self.stranger_rate(now))
        return rates


def make_token(session_key: bytes, cycle_index: int, sender_id: int, token_bytes: int = 8) -> bytes:
    """Keyed token binding a SYN to its sender and duty cycle."""
    payload = cycle_index.to_bytes(8, "big", signed=False) + sender_id.to_bytes(8, "big", signed=False)
    return hashlib.blake2b(payload, key=session_key, digest_size=token_bytes).digest()


def verify_token(session_key: bytes | None, frame: Frame, token_bytes: int = 8) -> bool:
    if session_key is None or frame.auth_token is None or frame.cycle_index is None:
        return False
    expected = make_token(session_key, frame.cycle_index, frame.src, token_bytes)
    return frame.auth_token == expected


def on_syn_received(
    state: ClusterAuthState,
    frame: Frame,
    member_of: dict[int, int],
    now: float,
    session_key_for=lambda node_id: None,
) -> SynOutcome:
    """Cluster-head decision for one received SYN.

    Outcomes: senders outside the cluster are rejected; in normal mode a
    sender whose arrival rate stays at or below the threshold is accepted
    without a token, while a rate crossing escalates to authentication
    mode; in authentication mode only a fresh valid token is accepted and
    everything else is rejected with the sender marked suspected.
    """
    p = state.params
    sender = frame.src
    is_member = member_of.get(sender) == state.head_id or sender == state.head_id
    if state.verdicts.is_rejected(sender):
        is_member = False
    state.record_arrival(sender, now, member=is_member)

    if not is_member:
        if state.mode == AuthMode.NORMAL and state.stranger_rate(now) > p.syn_rate_threshold:
            state.enter_auth_mode(now)
            return SynOutcome.ESCALATE_AUTH
        return SynOutcome.REJECT

    if state.mode == AuthMode.NORMAL:
        if state.rate(sender, now) > p.syn_rate_threshold:
            if sender not in state.verdicts.verified:
                state.verdicts.suspect(sender)
            state.enter_auth_mode(now)
            return SynOutcome.ESCALATE_AUTH
        return SynOutcome.ACCEPT

    # Authentication mode: token required.
    if verify_token(session_key_for(sender), frame, p.token_bytes):
        if state.accepted_cycles.get(sender) == frame.cycle_index:
            # duplicate (sender, cycle): a same-cycle replay of a valid SYN
            return SynOutcome.REJECT
        state.accepted_cycles[sender] = frame.cycle_index
        return SynOutcome.ACCEPT
    if sender not in state.verdicts.verified:
        state.verdicts.suspect(sender)
        count = state.invalid_in_auth.get(sender, 0) + 1
        state.invalid_in_auth[sender] = count
        if count >= p.reject_after_invalid and state.rate(sender, now) > p.syn_rate_threshold:
            state.verdicts.reject(sender)
    return SynOutcome.REJECT


def maybe_exit_auth_mode(state: ClusterAuthState, now: float) -> bool:
    """Leave authentication mode once every observed rate has calmed down
    below threshold * exit_factor. Returns True when NO-SYN-A should go out.

    The head must have watched the cluster for at least one full rate
    window since entering the mode; otherwise an empty arrival history
    would read as instant calm."""
    if state.mode != AuthMode.AUTH_REQUIRED:
        return False
    if now - state.auth_entered_at < state.params.rate_window_s:
        return False
    limit = state.params.syn_rate_threshold * state.params.auth_mode_exit_factor
    if all(r < limit for r in state.observed_rates(now)):
        state.mode = AuthMode.NORMAL
        state.invalid_in_auth.clear()
        return True
    return False


# Network-level authentication -------------------------------------------


@dataclass
class Registry:
    """Base-station side store: registered identification squares and, once
    verified, per-node session keys."""

    modulus_g: int
    squares: dict[int, int] = field(default_factory=dict)
    secrets: dict[int, IdentificationMaterial] = field(default_factory=dict)
    session_keys: dict[int, bytes] = field(default_factory=dict)

    def register(self, node_id: int, material: IdentificationMaterial) -> None:
        self.squares[node_id] = material.square_f
        self.secrets[node_id] = material

    def lookup(self, node_id: int) -> tuple[int, int] | None:
        f = self.squares.get(node_id)
        return None if f is None else (self.modulus_g, f)


def network_authenticate(
    prover: IdentificationMaterial | None,
    node_id: int,
    registry: Registry,
    fs_rounds: int,
    rng: random.Random,
) -> bool:
    """Identification through the base station as the trusted third party.

    Returns False for unregistered ids; otherwise runs the round protocol.
    ``prover=None`` models an impersonator holding no secret.
    """
    registered = registry.lookup(node_id)
    if registered is None:
        return False
    return fs_identify(prover, registered, fs_rounds, rng)


# Interlock key transfer ---------------------------------------------------


def interlock_exchange(
    initiator: int,
    responder: int,
    wrap_key: bytes,
    rng: random.Random,
    respond: bool = True,
    tamper: str | None = None,
    probe: bytes = b"schedule-sync-probe",
) -> InterlockSession:
    """Run a split-key transfer and confirm it with a probe decryption.

    ``respond=False`` models a peer that never acknowledges (timeout);
    ``tamper`` models a man in the middle: ``"replay_first"`` substitutes a
    copy of the first half for the second, ``"corrupt_half"`` flips a bit of
    the second half, ``"drop_second"`` suppresses it entirely.
    """
    session_key = rng.getrandbits(128).to_bytes(16, "big")
    session = InterlockSession(initiator, responder, session_key, wrap_key)
    msg_a = session.first_message(rng)
    if not respond:
        session.state = InterlockState.FAILED
        return session
    msg_b = session.second_message(rng)
    if tamper == "replay_first":
        msg_b = msg_a
    elif tamper == "corrupt_half":
        msg_b = msg_b[:-1] + bytes([msg_b[-1] ^ 0x01])
    elif tamper == "drop_second":
        session.state = InterlockState.FAILED
        return session
    probe_blob = symmetric_encrypt(session_key, probe, rng)
    try:
        joined = InterlockSession.reassemble(wrap_key, msg_a, msg_b)
        if symmetric_decrypt(joined, probe_blob) != probe:
            raise AuthenticationError("probe mismatch")
    except (AuthenticationError, CryptoError):
        session.state = InterlockState.FAILED
        return session
    session.state = InterlockState.COMPLETE
    return session


# Final scoring -------------------------------------------------------------


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def final_classification(
    verdicts: VerdictBook,
    attacker_ids: set[int],
    node_ids,
) -> ConfusionMatrix:
    """Score every sensor node: a rejected attacker is a true positive, a
    rejected benign node a false positive, and so on."""
    tp = fp = tn = fn = 0
    for i in node_ids:
        rejected = verdicts.is_rejected(i)
        if i in attacker_ids:
            if rejected:
                tp += 1
            else:
                fn += 1
        else:
            if rejected:
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)
