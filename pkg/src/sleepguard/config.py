"""Simulation configuration: parameter records, validation, and the flat
``key = value`` config-file format used by the CLI.

Defaults reproduce the reference scenario: an 80 x 80 m field, 300 nodes,
70 s of simulated time, a 20-slot duty cycle, 512-byte data packets,
30-byte control frames and 35 J of initial energy per node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path


class ConfigError(ValueError):
    """Raised for unknown keys, type mismatches or out-of-range values."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        prefix = ""
        if key is not None:
            prefix += f"key '{key}'"
        if line is not None:
            prefix += f" (line {line})"
        super().__init__(f"{prefix}: {message}" if prefix else message)


@dataclass(frozen=True)
class RadioParams:
    """First-order radio constants (per-bit energies)."""

    e_elec: float = 100e-9          # J/bit, transmit or receive circuitry
    eps_fs: float = 20e-12          # J/bit/m^2, free-space amplifier
    eps_mp: float = 0.0015e-12      # J/bit/m^4, multipath amplifier
    eda: float = 5e-9               # J/bit, aggregation cost per bit
    sensing_energy_j: float = 5e-8  # J per sensing action

    def validate(self) -> None:
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ConfigError("must be strictly positive", key=f.name)


@dataclass(frozen=True)
class PowerProfile:
    """Per-mode radio power draw in watts."""

    idle_w: float = 41e-3
    rx_w: float = 45e-3
    tx_w: float = 41e-3
    sleep_w: float = 25e-6

    def validate(self) -> None:
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ConfigError("must be strictly positive", key=f.name)
        if self.sleep_w >= self.idle_w:
            raise ConfigError("sleep power must be below idle power", key="sleep_w")


@dataclass(frozen=True)
class DefenseParams:
    """Knobs of the two-level authentication defense.

    ``syn_rate_threshold`` is expressed in SYN frames per second per sender;
    a cluster head escalates to token-authentication mode when any sender
    (or the aggregate of unknown-id senders) exceeds it. The head leaves
    authentication mode once all observed rates drop below
    ``threshold * auth_mode_exit_factor``.
    """

    syn_rate_threshold: float = 2.0
    auth_mode_exit_factor: float = 0.5
    fs_rounds: int = 8
    token_bytes: int = 8
    # Protocol constants without a published value: how many identification
    # exchanges a head may keep outstanding per duty cycle, and how many
    # cycles an unresponsive challenge is retried before rejection.
    auth_capacity: int = 7
    auth_timeout_cycles: int = 2
    rate_window_s: float = 3.0
    reject_after_invalid: int = 3

    def validate(self) -> None:
        if self.syn_rate_threshold <= 0:
            raise ConfigError("must be strictly positive", key="syn_rate_threshold")
        if not 0 < self.auth_mode_exit_factor <= 1:
            raise ConfigError("must lie in (0, 1]", key="auth_mode_exit_factor")
        if self.fs_rounds < 1:
            raise ConfigError("must be >= 1", key="fs_rounds")
        if self.token_bytes < 1:
            raise ConfigError("must be >= 1", key="token_bytes")
        if self.auth_capacity < 1:
            raise ConfigError("must be >= 1", key="auth_capacity")
        if self.auth_timeout_cycles < 1:
            raise ConfigError("must be >= 1", key="auth_timeout_cycles")
        if self.rate_window_s <= 0:
            raise ConfigError("must be strictly positive", key="rate_window_s")
        if self.reject_after_invalid < 1:
            raise ConfigError("must be >= 1", key="reject_after_invalid")


ATTACK_KINDS = ("syn_replay", "rts_flood", "forged_id_syn")
HEAD_SCORES = ("energy_distance", "energy_over_distance")
SYN_UPDATE_MODES = ("mean", "literal")


@dataclass(frozen=True)
class SimConfig:
    """Complete description of one simulation run."""

    field_width_m: float = 80.0
    field_height_m: float = 80.0
    node_count: int = 300
    sim_time_s: float = 70.0
    duty_cycle_slots: int = 20
    transmission_range_m: float = 150.0
    packet_size_bytes: int = 512
    control_frame_bytes: int = 30
    syn_frame_bytes: int = 10
    initial_energy_j: float = 35.0
    misbehaving_ratio: float = 0.0
    attack_interval_s: float = 1.5
    defense_enabled: bool = True
    rng_seed: int = 1
    radio: RadioParams = field(default_factory=RadioParams)
    power: PowerProfile = field(default_factory=PowerProfile)
    defense: DefenseParams = field(default_factory=DefenseParams)

    # Scheduling details with no published value.
    cycle_period_s: float = 1.0
    awake_slots: int = 2
    link_latency_s: float = 1e-3
    attack_kind: str = "syn_replay"
    head_score: str = "energy_distance"
    syn_update_mode: str = "mean"
    # Base-station position; NaN means field centre.
    bs_x_m: float = math.nan
    bs_y_m: float = math.nan

    def validate(self) -> "SimConfig":
        positive = (
            "field_width_m", "field_height_m", "duty_cycle_slots",
            "transmission_range_m", "packet_size_bytes", "control_frame_bytes",
            "syn_frame_bytes", "initial_energy_j", "attack_interval_s",
            "cycle_period_s", "link_latency_s",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError("must be strictly positive", key=name)
        # node_count = 0 and sim_time_s = 0 are allowed as degenerate runs.
        if self.node_count < 0:
            raise ConfigError("must be >= 0", key="node_count")
        if self.sim_time_s < 0:
            raise ConfigError("must be >= 0", key="sim_time_s")
        if not 0.0 <= self.misbehaving_ratio <= 1.0:
            raise ConfigError("must lie in [0, 1]", key="misbehaving_ratio")
        if not 1 <= self.awake_slots <= self.duty_cycle_slots:
            raise ConfigError("must lie in [1, duty_cycle_slots]", key="awake_slots")
        if self.attack_kind not in ATTACK_KINDS:
            raise ConfigError(f"must be one of {ATTACK_KINDS}", key="attack_kind")
        if self.head_score not in HEAD_SCORES:
            raise ConfigError(f"must be one of {HEAD_SCORES}", key="head_score")
        if self.syn_update_mode not in SYN_UPDATE_MODES:
            raise ConfigError(f"must be one of {SYN_UPDATE_MODES}", key="syn_update_mode")
        self.radio.validate()
        self.power.validate()
        self.defense.validate()
        return self

    # Derived quantities -------------------------------------------------

    @property
    def slot_length_s(self) -> float:
        return self.cycle_period_s / self.duty_cycle_slots

    @property
    def awake_window_s(self) -> float:
        return self.awake_slots * self.slot_length_s

    @property
    def nominal_sleep_s(self) -> float:
        return self.cycle_period_s - self.awake_window_s

    @property
    def bs_position(self) -> tuple[float, float]:
        x = self.field_width_m / 2.0 if math.isnan(self.bs_x_m) else self.bs_x_m
        y = self.field_height_m / 2.0 if math.isnan(self.bs_y_m) else self.bs_y_m
        return (x, y)

    def packet_bits(self) -> int:
        return 8 * self.packet_size_bytes

    def control_bits(self) -> int:
        return 8 * self.control_frame_bytes

    def syn_bits(self) -> int:
        return 8 * self.syn_frame_bytes


# Flat key = value parsing -----------------------------------------------

_BOOL_WORDS = {"true": True, "on": True, "yes": True, "1": True,
               "false": False, "off": False, "no": False, "0": False}

_INT_KEYS = {
    "node_count", "duty_cycle_slots", "packet_size_bytes", "control_frame_bytes",
    "syn_frame_bytes", "rng_seed", "awake_slots",
    "fs_rounds", "token_bytes", "auth_capacity", "auth_timeout_cycles",
    "reject_after_invalid",
}
_BOOL_KEYS = {"defense_enabled"}
_STR_KEYS = {"attack_kind", "head_score", "syn_update_mode"}

_RADIO_KEYS = {f.name for f in fields(RadioParams)}
_POWER_KEYS = {f.name for f in fields(PowerProfile)}
_DEFENSE_KEYS = {f.name for f in fields(DefenseParams)}
_TOP_KEYS = {f.name for f in fields(SimConfig)} - {"radio", "power", "defense"}


def _convert(key: str, raw: str, line: int):
    if key in _BOOL_KEYS:
        word = raw.strip().lower()
        if word not in _BOOL_WORDS:
            raise ConfigError(f"expected a boolean, got {raw!r}", key=key, line=line)
        return _BOOL_WORDS[word]
    if key in _STR_KEYS:
        return raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw.strip())
        return float(raw.strip())
    except ValueError:
        kind = "an integer" if key in _INT_KEYS else "a number"
        raise ConfigError(f"expected {kind}, got {raw!r}", key=key, line=line) from None


def parse_config_text(text: str, base: SimConfig | None = None) -> SimConfig:
    """Parse flat ``key = value`` text into a validated :class:`SimConfig`.

    Blank lines and ``#`` comments are ignored. Unknown keys are rejected
    with the offending line number; unspecified keys keep their defaults.
    """
    top: dict = {}
    radio: dict = {}
    power: dict = {}
    defense: dict = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        stripped = raw_line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key in _TOP_KEYS:
            top[key] = _convert(key, raw, lineno)
        elif key in _RADIO_KEYS:
            radio[key] = _convert(key, raw, lineno)
        elif key in _POWER_KEYS:
            power[key] = _convert(key, raw, lineno)
        elif key in _DEFENSE_KEYS:
            defense[key] = _convert(key, raw, lineno)
        else:
            raise ConfigError("unknown key", key=key, line=lineno)

    cfg = base if base is not None else SimConfig()
    if radio:
        cfg = replace(cfg, radio=replace(cfg.radio, **radio))
    if power:
        cfg = replace(cfg, power=replace(cfg.power, **power))
    if defense:
        cfg = replace(cfg, defense=replace(cfg.defense, **defense))
    if top:
        cfg = replace(cfg, **top)
    return cfg.validate()


def parse_config(path: str | Path, base: SimConfig | None = None) -> SimConfig:
    """Load a config file; see :func:`parse_config_text` for the format."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text(), base=base)
