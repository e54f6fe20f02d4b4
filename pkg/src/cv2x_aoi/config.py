"""Scenario configuration: every tunable of the simulator plus validation.

Units are SI unless a key says otherwise (dBm keys are converted to watts
at parse time, km/h to m/s). Time-valued fields are in slots of ``slot_s``
seconds (1 ms subframes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from enum import IntEnum


class ConfigError(ValueError):
    """Raised when a scenario configuration violates an invariant."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class MessageType(IntEnum):
    """The four sidelink message classes, ordered by strict priority.

    Lower value = higher priority: HPD > DENM > CAM > MHD.
    """

    HPD = 0
    DENM = 1
    CAM = 2
    MHD = 3


ALLOWED_RRI = (20, 50, 100)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts * 1e3)


def kmh_to_mps(kmh: float) -> float:
    return kmh / 3.6


@dataclass(frozen=True)
class ScenarioConfig:
    """Raw scenario parameters. Validate with :func:`validate` before use."""

    # Scene
    num_vehicles: int = 30          # Nv, >= 2
    road_length_m: float = 500.0    # D
    lanes: int = 4                  # U, even; lanes 1..U/2 forward, rest reverse
    lane_width_m: float = 4.0       # d_y
    edge_offset_m: float = 2.0      # y0, typically d_y/2
    speed_mps: float = kmh_to_mps(120.0)  # V

    # Time / resource pool
    slot_s: float = 1e-3            # tau, one subframe
    sim_duration: int = 100_000     # slots
    rri: int = 100                  # slots; selection window Gamma == rri
    total_rbs: int = 50
    rbs_per_subchannel: int = 10
    bandwidth_per_rb_hz: float = 180e3

    # PHY
    message_size_bits: int = 4000   # Q; 500 bytes
    tx_power_dbm: float = 23.0
    noise_power_dbm: float = -95.0  # sigma^2 over one subchannel (not given
                                    # by the source model; documented default)
    path_loss_exponent: float = 2.0  # eta
    fading_mode: str = "constant"   # "constant" | "random" (unit-mean exp per slot)
    access_mode: str = "OMA"        # "OMA" | "NOMA"
    sic_gated: bool = False         # stricter SIC: cancel only decoded stronger signals
    distance_mode: str = "2d"       # "2d" uses lane offset, "1d" along-road only
    max_range_m: float = 0.0        # 0 disables the reception-range cutoff

    # Traffic
    cam_period: int = 100           # T_c, slots
    cam_mode: str = "periodic"      # "periodic" | "bernoulli" (p = 1/T_c per slot)
    cam_phase_mode: str = "synced"  # "synced" (all phases 0) | "random"
    lambda_hpd: float = 1e-4        # expected arrivals per slot
    lambda_denm: float = 1e-4
    lambda_mhd: float = 1e-4
    retrans_period_hpd: int = 100   # T_H, slots
    retrans_period_denm: int = 500  # T_D, slots
    retrans_count_hpd: int = 8      # K_H, total transmissions incl. the first
    retrans_count_denm: int = 5     # K_D
    retrans_birth: str = "reset"    # copy age: "reset" at re-arrival | "inherit" original
    queue_capacity: int = 5         # L, per priority queue
    queue_discipline: str = "priority"  # "priority" (four queues) | "single" (one FIFO)

    # SPS
    keep_probability_complement: float = 1.0  # P_rk, P(new selection at RC=0)
    decrement_on_silence: bool = False  # empty-queue opportunity burns the grant

    # Run control
    rng_seed: int = 1
    discard_slots: int = 0          # warm-up prefix excluded from summary averages
    allow_any_rri: bool = False     # lift the rri in {20,50,100} restriction


@dataclass(frozen=True)
class ValidatedConfig:
    """A checked :class:`ScenarioConfig` plus derived quantities."""

    raw: ScenarioConfig
    num_subchannels: int
    subchannel_bandwidth_hz: float
    selection_window: int           # Gamma == rri
    csr: int                        # candidate resources: Gamma * subchannels
    tx_power_w: float
    noise_power_w: float
    sinr_threshold: float
    cam_probability: float          # per-slot CAM probability 1/T_c
    arrival_probs: tuple            # Bernoulli p = lambda * exp(-lambda), by MessageType

    def __getattr__(self, name):
        # Fall through to the raw config so cfg.rri etc. keep working.
        return getattr(self.raw, name)


def _sinr_threshold(q_bits: float, b_hz: float, tau_s: float) -> float:
    """SINR at which Shannon rate over one slot carries exactly q_bits.

    The rate threshold equals Q over one subframe, so the exponent is
    normalized by the slot duration: 2^(Q/(B*tau)) - 1.
    """
    if q_bits <= 0 or b_hz <= 0 or tau_s <= 0:
        raise ConfigError("sinr_threshold requires positive Q, B and tau")
    exponent = q_bits / (b_hz * tau_s)
    if exponent > 60.0:
        raise ConfigError(
            f"spectral load Q/(B*tau) = {exponent:.1f} bits/s/Hz is unphysical"
        )
    return 2.0 ** exponent - 1.0


def validate(cfg: ScenarioConfig) -> ValidatedConfig:
    """Check every invariant and derive the dependent quantities.

    Pure: the same input record always yields the same result. Raises
    :class:`ConfigError` listing every violated invariant.
    """
    bad = []
    if cfg.num_vehicles < 2:
        bad.append(f"num_vehicles={cfg.num_vehicles}: need at least one receiver")
    if cfg.road_length_m <= 0:
        bad.append("road_length_m must be > 0")
    if cfg.lanes < 2 or cfg.lanes % 2 != 0:
        bad.append(f"lanes={cfg.lanes}: must be even and >= 2 (two-way road)")
    if cfg.lane_width_m <= 0:
        bad.append("lane_width_m must be > 0")
    if cfg.speed_mps < 0:
        bad.append("speed_mps must be >= 0")
    if cfg.slot_s <= 0:
        bad.append("slot_s must be > 0")
    if cfg.sim_duration < 0:
        bad.append("sim_duration must be >= 0")
    if cfg.sim_duration > 10_000_000:
        bad.append("sim_duration above 1e7 slots is not supported")
    if cfg.rri not in ALLOWED_RRI and not cfg.allow_any_rri:
        bad.append(f"rri={cfg.rri}: must be one of {ALLOWED_RRI} (or set allow_any_rri)")
    if cfg.rri < 1:
        bad.append("rri must be >= 1")
    if cfg.total_rbs <= 0 or cfg.rbs_per_subchannel <= 0:
        bad.append("total_rbs and rbs_per_subchannel must be > 0")
    elif cfg.total_rbs % cfg.rbs_per_subchannel != 0:
        bad.append(
            f"total_rbs={cfg.total_rbs} not divisible by "
            f"rbs_per_subchannel={cfg.rbs_per_subchannel}"
        )
    if cfg.bandwidth_per_rb_hz <= 0:
        bad.append("bandwidth_per_rb_hz must be > 0")
    if cfg.message_size_bits <= 0:
        bad.append("message_size_bits must be > 0")
    if cfg.path_loss_exponent <= 0:
        bad.append("path_loss_exponent must be > 0")
    if cfg.fading_mode not in ("constant", "random"):
        bad.append(f"fading_mode={cfg.fading_mode!r}: constant or random")
    if cfg.access_mode not in ("OMA", "NOMA"):
        bad.append(f"access_mode={cfg.access_mode!r}: OMA or NOMA")
    if cfg.distance_mode not in ("1d", "2d"):
        bad.append(f"distance_mode={cfg.distance_mode!r}: 1d or 2d")
    if cfg.max_range_m < 0:
        bad.append("max_range_m must be >= 0 (0 disables the cutoff)")
    if cfg.cam_period < 1:
        bad.append("cam_period must be >= 1")
    if cfg.cam_mode not in ("periodic", "bernoulli"):
        bad.append(f"cam_mode={cfg.cam_mode!r}: periodic or bernoulli")
    if cfg.cam_phase_mode not in ("synced", "random"):
        bad.append(f"cam_phase_mode={cfg.cam_phase_mode!r}: synced or random")
    for name in ("lambda_hpd", "lambda_denm", "lambda_mhd"):
        lam = getattr(cfg, name)
        if not 0.0 <= lam <= 1.0:
            bad.append(f"{name}={lam}: arrival rate must be in [0, 1]")
    if cfg.retrans_period_hpd < 1 or cfg.retrans_period_denm < 1:
        bad.append("retransmission periods must be >= 1 slot")
    if cfg.retrans_count_hpd < 1 or cfg.retrans_count_denm < 1:
        bad.append("retransmission counts must be >= 1")
    if cfg.retrans_birth not in ("reset", "inherit"):
        bad.append(f"retrans_birth={cfg.retrans_birth!r}: reset or inherit")
    if cfg.queue_capacity < 1:
        bad.append("queue_capacity must be >= 1")
    if cfg.queue_discipline not in ("priority", "single"):
        bad.append(f"queue_discipline={cfg.queue_discipline!r}: priority or single")
    if not 0.0 <= cfg.keep_probability_complement <= 1.0:
        bad.append("keep_probability_complement must be in [0, 1]")
    if not 0 <= cfg.discard_slots:
        bad.append("discard_slots must be >= 0")
    if bad:
        raise ConfigError(bad)

    num_subchannels = cfg.total_rbs // cfg.rbs_per_subchannel
    subchannel_bw = cfg.rbs_per_subchannel * cfg.bandwidth_per_rb_hz
    gamma = cfg.rri  # the selection window equals the RRI
    return ValidatedConfig(
        raw=cfg,
        num_subchannels=num_subchannels,
        subchannel_bandwidth_hz=subchannel_bw,
        selection_window=gamma,
        csr=gamma * num_subchannels,
        tx_power_w=dbm_to_watts(cfg.tx_power_dbm),
        noise_power_w=dbm_to_watts(cfg.noise_power_dbm),
        sinr_threshold=_sinr_threshold(cfg.message_size_bits, subchannel_bw, cfg.slot_s),
        cam_probability=1.0 / cfg.cam_period,
        arrival_probs=(
            cfg.lambda_hpd * math.exp(-cfg.lambda_hpd),
            cfg.lambda_denm * math.exp(-cfg.lambda_denm),
            1.0 / cfg.cam_period,
            cfg.lambda_mhd * math.exp(-cfg.lambda_mhd),
        ),
    )


# --- flat key=value config files -------------------------------------------

_BOOL_FIELDS = frozenset(
    f.name for f in fields(ScenarioConfig) if f.type == "bool" or isinstance(f.default, bool)
)
_INT_FIELDS = frozenset(
    f.name
    for f in fields(ScenarioConfig)
    if isinstance(f.default, int) and not isinstance(f.default, bool)
)
_STR_FIELDS = frozenset(
    f.name for f in fields(ScenarioConfig) if isinstance(f.default, str)
)
# Convenience keys translated into canonical fields at parse time.
_ALIASES = {
    "speed_kmh": ("speed_mps", kmh_to_mps),
}


def coerce_value(key: str, value: str):
    """Parse one config value string into the field's native type."""
    if key in _BOOL_FIELDS:
        low = value.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}={value!r}: expected a boolean")
    if key in _INT_FIELDS:
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"{key}={value!r}: expected an integer") from exc
    if key in _STR_FIELDS:
        return value.strip()
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"{key}={value!r}: expected a number") from exc


def apply_overrides(cfg: ScenarioConfig, overrides: dict) -> ScenarioConfig:
    """Apply key -> value (strings allowed) overrides onto a config."""
    known = {f.name for f in fields(ScenarioConfig)}
    parsed = {}
    for key, value in overrides.items():
        if key in _ALIASES:
            target, conv = _ALIASES[key]
            parsed[target] = conv(float(value))
            continue
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        parsed[key] = coerce_value(key, value) if isinstance(value, str) else value
    return replace(cfg, **parsed)


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_config(path=None, overrides=None) -> ScenarioConfig:
    """Build a ScenarioConfig from an optional file plus overrides."""
    cfg = ScenarioConfig()
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = apply_overrides(cfg, parse_config_text(fh.read()))
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg


def config_to_dict(cfg: ScenarioConfig) -> dict:
    return {f.name: getattr(cfg, f.name) for f in fields(ScenarioConfig)}
