"""Scenario configuration: defaults, YAML round-trip, and validation.

The YAML mirrors the dataclass tree one-to-one; unknown keys are hard errors
(silent typos in simulation configs are how wrong plots get published).
Spectrum sanity checks against the ITU RR identifications for platform base
stations live here too, since they are pure config concerns.
"""

from __future__ import annotations

import dataclasses
import math
import typing
from dataclasses import dataclass, field

import yaml

from .channel import NtnParams, RmaParams
from .network import RateParams


class ConfigError(Exception):
    """Bad configuration input; message names the offending key."""


@dataclass(frozen=True)
class CarrierConfig:
    frequency_hz: float = 2.0e9
    bandwidth_hz: float = 20e6


PATTERN_SIDELOBE_MODES = ("floor", "bessel")


@dataclass(frozen=True)
class HibsConfig:
    """Platform segment: one stratospheric platform over the area center."""

    altitude_m: float = 20_000.0
    footprint_diameter_m: float = 10_000.0  # innermost beam, sets the beamwidth
    n_rings: int = 2  # 2 hex rings -> 19 beams
    service_area_km2: float = 4_000.0
    peak_gain_dbi: float = 16.5
    pattern_floor_db: float = 30.0
    pattern_sidelobes: str = "floor"  # "floor" = main lobe only, "bessel" = Airy rings
    tx_power_dbm: float = 49.0  # per beam
    noise_figure_db: float = 5.0


@dataclass(frozen=True)
class TerrestrialConfig:
    """Macro segment: one ring of 3-sector sites around the same area.

    Rotation 60 points one sector of each site at the central hole the ring
    encloses and splays the other two over the annulus; the gentle 3-degree
    tilt keeps usable gain out to the multi-kilometre edges of these large
    rural cells.
    """

    n_sites: int = 12
    isd_m: float = 9_000.0
    site_height_m: float = 30.0
    sector_rotation_deg: float = 60.0
    peak_gain_dbi: float = 17.0
    h_hpbw_deg: float = 65.0
    v_hpbw_deg: float = 10.0
    front_back_db: float = 30.0
    sla_db: float = 30.0
    downtilt_deg: float = 3.0
    tx_power_dbm: float = 49.0
    noise_figure_db: float = 5.0


@dataclass(frozen=True)
class UeConfig:
    height_m: float = 1.5
    tx_power_dbm: float = 23.0
    antenna_gain_dbi: float = 0.0
    noise_figure_db: float = 9.0


@dataclass(frozen=True)
class ChannelConfig:
    shadowing: bool = True
    ntn: NtnParams = field(default_factory=NtnParams)
    rma: RmaParams = field(default_factory=RmaParams)


A3_DECISION_SIGNALS = ("longterm", "shadowed")


@dataclass(frozen=True)
class MobilityConfig:
    """Straight-line trajectories through the area center.

    Inbound users spawn in the outer terrestrial annulus, between
    `tn_spawn_near` and `tn_spawn_far` site-ring radii, and park on reaching
    the center. Outbound users spawn within `hibs_spawn_radius_m` of the
    center and park `outbound_stop_margin_m` beyond the site ring, so no
    track leaves the modeled coverage and re-triggers at its rim.

    `decision_signal` picks what the A3 rule compares: "longterm" uses the
    distance/pattern/LOS-state received power (cell-selection grade, the
    default), "shadowed" adds the per-measurement correlated shadowing —
    which lets shadow swings several times the hysteresis drive the
    handovers, burying the geometric crossing pattern in ping-pong.
    """

    speed_mps: float = 30.0 / 3.6
    time_step_s: float = 0.1
    measurement_period_s: float = 0.2
    a3_offset_db: float = 3.0
    time_to_trigger_s: float = 0.64
    sim_duration_s: float = 2_400.0
    decision_signal: str = "longterm"
    shadow_decorrelation_m: float = 50.0
    tn_spawn_near: float = 1.05  # inbound spawn band, in site-ring radii
    tn_spawn_far: float = 1.30
    hibs_spawn_radius_m: float = 2_000.0  # outbound users start near the center
    outbound_stop_margin_m: float = 1_000.0
    n_inbound: int = 120
    n_outbound: int = 120


UL_INTERFERENCE_MODES = ("full_load", "coscheduled", "none")


@dataclass(frozen=True)
class SchedulerConfig:
    """Round-robin TDM is fixed; what varies is the interference environment.

    `ul_interference` picks what a scheduled uplink user competes against:

    - "full_load": one full-power UE per other beam, uniform in that beam's
      footprint (busy-system assumption; uplink statistics independent of
      the dropped-user density by construction)
    - "coscheduled": the actual round-robin co-scheduled users of the other
      active cells (interference scales with load)
    - "none": pure uplink SNR

    `overlay_cochannel_beams` is the downlink mirror of "full_load" for the
    overlay scenario: the platform's non-center beams stay on the air as
    co-channel interferers even though only the center beam serves there.
    Disable for a platform that truly powers down to a single beam.
    """

    ul_interference: str = "full_load"
    overlay_cochannel_beams: bool = True


@dataclass(frozen=True)
class BandCheckConfig:
    enabled: bool = True
    region: str = "R1"


@dataclass(frozen=True)
class ScenarioConfig:
    carrier: CarrierConfig = field(default_factory=CarrierConfig)
    hibs: HibsConfig = field(default_factory=HibsConfig)
    terrestrial: TerrestrialConfig = field(default_factory=TerrestrialConfig)
    ue: UeConfig = field(default_factory=UeConfig)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    rate: RateParams = field(default_factory=RateParams)
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    mobility: MobilityConfig = field(default_factory=MobilityConfig)
    band_check: BandCheckConfig = field(default_factory=BandCheckConfig)


def _coerce_scalar(value, ftype, path: str):
    if ftype is bool:
        if isinstance(value, bool):
            return value
        raise ConfigError(f"{path}: expected true/false, got {value!r}")
    if ftype is float:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if ftype is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if ftype is str:
        if isinstance(value, str):
            return value
        raise ConfigError(f"{path}: expected a string, got {value!r}")
    raise ConfigError(f"{path}: unsupported value {value!r}")


def _coerce_p_los_table(value, path: str):
    if isinstance(value, dict):
        pairs = list(value.items())
    elif isinstance(value, (list, tuple)):
        pairs = [tuple(p) for p in value]
    else:
        raise ConfigError(f"{path}: expected a mapping of elevation_deg: p_los")
    try:
        pairs = sorted((float(e), float(p)) for e, p in pairs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return tuple(pairs)


def _build_dataclass(cls, data, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping")
    hints = typing.get_type_hints(cls)
    known = {f.name: hints[f.name] for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"unknown config key '{path}.{key}'")
        ftype = known[key]
        sub_path = f"{path}.{key}"
        if dataclasses.is_dataclass(ftype):
            kwargs[key] = _build_dataclass(ftype, value, sub_path)
        elif key == "p_los_table":
            kwargs[key] = _coerce_p_los_table(value, sub_path)
        else:
            kwargs[key] = _coerce_scalar(value, ftype, sub_path)
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def config_from_dict(data: dict | None) -> ScenarioConfig:
    cfg = _build_dataclass(ScenarioConfig, data or {}, "scenario")
    validate_config(cfg)
    return cfg


def config_to_dict(cfg: ScenarioConfig) -> dict:
    out = dataclasses.asdict(cfg)
    out["channel"]["ntn"]["p_los_table"] = {
        float(e): float(p) for e, p in cfg.channel.ntn.p_los_table
    }
    return out


def load_config(path: str) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        raise ConfigError(f"{path}: YAML parse error{where}: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return config_from_dict(data)


def dumps_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)


def save_config(cfg: ScenarioConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_config(cfg))


def _require(ok: bool, key: str, msg: str):
    if not ok:
        raise ConfigError(f"{key}: {msg}")


def validate_config(cfg: ScenarioConfig) -> None:
    c = cfg.carrier
    _require(c.frequency_hz > 0, "carrier.frequency_hz", "must be positive")
    _require(c.bandwidth_hz > 0, "carrier.bandwidth_hz", "must be positive")
    h = cfg.hibs
    _require(h.altitude_m > 0, "hibs.altitude_m", "must be positive")
    _require(h.footprint_diameter_m > 0, "hibs.footprint_diameter_m", "must be positive")
    _require(h.n_rings >= 0, "hibs.n_rings", "must be >= 0")
    _require(h.service_area_km2 > 0, "hibs.service_area_km2", "must be positive")
    _require(h.pattern_floor_db > 0, "hibs.pattern_floor_db", "must be positive")
    _require(
        h.pattern_sidelobes in PATTERN_SIDELOBE_MODES,
        "hibs.pattern_sidelobes",
        f"must be one of {list(PATTERN_SIDELOBE_MODES)}",
    )
    _require(h.noise_figure_db >= 0, "hibs.noise_figure_db", "must be >= 0")
    bw_deg = 2.0 * math.degrees(math.atan(0.5 * h.footprint_diameter_m / h.altitude_m))
    _require(
        1.0 <= bw_deg <= 90.0,
        "hibs.footprint_diameter_m",
        f"implies a 3 dB beamwidth of {bw_deg:.2f} deg, outside [1, 90]",
    )
    t = cfg.terrestrial
    _require(t.n_sites >= 2, "terrestrial.n_sites", "must be >= 2")
    _require(t.isd_m > 0, "terrestrial.isd_m", "must be positive")
    _require(t.site_height_m > 0, "terrestrial.site_height_m", "must be positive")
    _require(t.h_hpbw_deg > 0, "terrestrial.h_hpbw_deg", "must be positive")
    _require(t.v_hpbw_deg > 0, "terrestrial.v_hpbw_deg", "must be positive")
    _require(t.noise_figure_db >= 0, "terrestrial.noise_figure_db", "must be >= 0")
    u = cfg.ue
    _require(u.height_m > 0, "ue.height_m", "must be positive")
    _require(u.height_m < t.site_height_m, "ue.height_m", "must be below the site height")
    _require(u.noise_figure_db >= 0, "ue.noise_figure_db", "must be >= 0")
    _require(
        math.isfinite(cfg.rate.sinr_min_db), "rate.sinr_min_db", "must be finite"
    )
    _require(
        cfg.scheduler.ul_interference in UL_INTERFERENCE_MODES,
        "scheduler.ul_interference",
        f"must be one of {list(UL_INTERFERENCE_MODES)}",
    )
    m = cfg.mobility
    _require(m.speed_mps > 0, "mobility.speed_mps", "must be positive")
    _require(m.time_step_s > 0, "mobility.time_step_s", "must be positive")
    _require(
        m.time_step_s <= m.measurement_period_s,
        "mobility.measurement_period_s",
        "must be >= time_step_s",
    )
    _require(
        m.measurement_period_s <= m.time_to_trigger_s,
        "mobility.time_to_trigger_s",
        "must be >= measurement_period_s",
    )
    _require(m.sim_duration_s > 0, "mobility.sim_duration_s", "must be positive")
    _require(
        m.shadow_decorrelation_m > 0,
        "mobility.shadow_decorrelation_m",
        "must be positive",
    )
    _require(
        m.decision_signal in A3_DECISION_SIGNALS,
        "mobility.decision_signal",
        f"must be one of {list(A3_DECISION_SIGNALS)}",
    )
    _require(m.tn_spawn_near >= 1.0, "mobility.tn_spawn_near", "must be >= 1.0")
    _require(
        m.tn_spawn_far >= m.tn_spawn_near,
        "mobility.tn_spawn_far",
        "must be >= tn_spawn_near",
    )
    _require(m.hibs_spawn_radius_m > 0, "mobility.hibs_spawn_radius_m", "must be positive")
    _require(
        m.outbound_stop_margin_m >= 0,
        "mobility.outbound_stop_margin_m",
        "must be >= 0",
    )
    _require(m.n_inbound >= 0, "mobility.n_inbound", "must be >= 0")
    _require(m.n_outbound >= 0, "mobility.n_outbound", "must be >= 0")
    _require(
        cfg.band_check.region in HIBS_DL_BANDS_MHZ,
        "band_check.region",
        f"must be one of {sorted(HIBS_DL_BANDS_MHZ)}",
    )


# ITU RR identifications for IMT base stations on high-altitude platforms
# (Res. 221): frequency ranges in MHz, per ITU region.
HIBS_UL_BANDS_MHZ = {
    "R1": ((1885.0, 1980.0), (2010.0, 2025.0)),
    "R2": ((1885.0, 1980.0),),
    "R3": ((1885.0, 1980.0), (2010.0, 2025.0)),
}
HIBS_DL_BANDS_MHZ = {
    "R1": ((2110.0, 2170.0),),
    "R2": ((2110.0, 2160.0),),
    "R3": ((2110.0, 2170.0),),
}
# Ranges under study for an expanded identification (WRC-23 agenda item 1.4).
WRC23_CANDIDATE_BANDS_MHZ = {
    "R1": ((694.0, 960.0), (1710.0, 1885.0), (2500.0, 2690.0)),
    "R2": ((694.0, 960.0), (1710.0, 1885.0), (2500.0, 2690.0)),
    "R3": ((694.0, 960.0), (1710.0, 1885.0), (2500.0, 2655.0)),
}


def _in_bands(f_mhz: float, bands) -> bool:
    return any(lo <= f_mhz <= hi for lo, hi in bands)


def validate_band(frequency_hz: float, region: str = "R1", direction: str = "DL") -> str | None:
    """Check a carrier against the platform-station identifications.

    Returns None when the frequency is permitted for the given link direction
    and region, otherwise a human-readable warning (never an exception: odd
    carriers are legal to simulate, just flagged).
    """
    region = region.upper()
    if region not in HIBS_DL_BANDS_MHZ:
        raise ConfigError(f"band_check.region: must be one of {sorted(HIBS_DL_BANDS_MHZ)}")
    direction = direction.upper()
    if direction not in ("DL", "UL"):
        raise ValueError("direction must be 'DL' or 'UL'")
    f_mhz = frequency_hz / 1e6
    permitted = (
        HIBS_DL_BANDS_MHZ[region] if direction == "DL" else HIBS_UL_BANDS_MHZ[region]
    )
    if _in_bands(f_mhz, permitted):
        return None
    for lo, hi in WRC23_CANDIDATE_BANDS_MHZ[region]:
        if lo <= f_mhz <= hi:
            return (
                f"{f_mhz:g} MHz is not identified for platform base stations in "
                f"{region} ({direction}); it falls in the WRC-23 AI 1.4 candidate "
                f"band {lo:g}-{hi:g} MHz"
            )
    nearest = min(
        permitted, key=lambda b: 0.0 if b[0] <= f_mhz <= b[1] else min(abs(f_mhz - b[0]), abs(f_mhz - b[1]))
    )
    return (
        f"{f_mhz:g} MHz is outside the platform-station bands for {region} "
        f"({direction}); nearest permitted band is {nearest[0]:g}-{nearest[1]:g} MHz"
    )
