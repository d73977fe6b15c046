"""Propagation models: free space, platform-to-ground rural, and TR 38.901 RMa.

Every public function returns dB quantities and leaves antenna gains out of
the pathloss itself; `coupling_loss_db` assembles the full link afterwards.
Shadow fading is drawn here (one i.i.d. normal per link per call) so that a
single Generator passed down from the engine fixes the whole drop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT_M_S = 299_792_458.0

# Elevation-binned LOS probability for a rural platform-to-ground path,
# TR 38.811 table 6.6.1-1 flavor: (elevation_deg, p_los).
DEFAULT_P_LOS_TABLE = (
    (10.0, 0.25),
    (20.0, 0.55),
    (30.0, 0.70),
    (40.0, 0.80),
    (50.0, 0.85),
    (60.0, 0.90),
    (70.0, 0.95),
    (80.0, 0.99),
    (90.0, 1.00),
)


def fspl_db(distance_m, frequency_hz):
    """Free-space pathloss 20*log10(4*pi*d*f/c), rejecting the near field."""
    d = np.asarray(distance_m, dtype=float)
    f = np.asarray(frequency_hz, dtype=float)
    if np.any(d < 1.0):
        raise ValueError("free-space model needs distance >= 1 m")
    if np.any(f <= 0.0):
        raise ValueError("frequency must be positive")
    return 20.0 * np.log10(4.0 * math.pi * d * f / SPEED_OF_LIGHT_M_S)


def noise_power_dbm(
    bandwidth_hz: float, noise_figure_db: float, thermal_dbm_hz: float = -174.0
) -> float:
    """Receiver noise floor over the given bandwidth."""
    if bandwidth_hz <= 0.0:
        raise ValueError("bandwidth must be positive")
    return thermal_dbm_hz + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


def coupling_loss_db(
    pathloss_db, shadow_db=0.0, clutter_db=0.0, g_tx_dbi=0.0, g_rx_dbi=0.0
):
    """Total loss between transmit and receive ports (gains subtract)."""
    return (
        np.asarray(pathloss_db, dtype=float)
        + shadow_db
        + clutter_db
        - g_tx_dbi
        - g_rx_dbi
    )


@dataclass(frozen=True)
class NtnParams:
    """Platform-to-ground rural channel knobs.

    Pathloss is free space at the slant range in both LOS and NLOS; NLOS adds
    an elevation-dependent clutter loss, linear from `clutter_low_db` at 10
    deg elevation down to `clutter_high_db` at zenith. `los_only` forces the
    LOS branch everywhere (clean-sky variant).
    """

    p_los_table: tuple = DEFAULT_P_LOS_TABLE
    clutter_low_db: float = 19.0  # at 10 deg elevation
    clutter_high_db: float = 10.0  # at 90 deg elevation
    sigma_los_db: float = 4.0
    sigma_nlos_db: float = 8.0
    los_only: bool = False

    def __post_init__(self):
        elev = [e for e, _ in self.p_los_table]
        if list(elev) != sorted(elev) or not elev:
            raise ValueError("p_los_table must be sorted by elevation")
        for e, p in self.p_los_table:
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"p_los out of [0, 1] at elevation {e}")
        if self.sigma_los_db < 0.0 or self.sigma_nlos_db < 0.0:
            raise ValueError("shadowing sigmas must be >= 0")

    def p_los(self, elevation_deg):
        e = np.asarray(elevation_deg, dtype=float)
        xs = np.array([x for x, _ in self.p_los_table])
        ps = np.array([p for _, p in self.p_los_table])
        return np.interp(e, xs, ps)

    def clutter_db(self, elevation_deg):
        e = np.asarray(elevation_deg, dtype=float)
        return np.interp(e, [10.0, 90.0], [self.clutter_low_db, self.clutter_high_db])


def ntn_rural_pathloss(
    elevation_deg,
    distance_m,
    frequency_hz: float,
    rng: np.random.Generator,
    params: NtnParams = NtnParams(),
    shadowing: bool = True,
):
    """Platform-to-ground link pieces: (pathloss, shadow, clutter, los).

    LOS state is Bernoulli(p_los(elevation)) per link; the clutter column is
    zero on LOS links. Elevations outside [10, 90] degrees are rejected: the
    LOS table does not extrapolate.
    """
    elev = np.asarray(elevation_deg, dtype=float)
    if np.any(elev < 10.0 - 1e-9) or np.any(elev > 90.0 + 1e-9):
        raise ValueError("elevation must lie in [10, 90] degrees")
    pl = fspl_db(distance_m, frequency_hz)
    shape = np.broadcast(elev, np.asarray(distance_m, dtype=float)).shape
    if params.los_only:
        los = np.ones(shape, dtype=bool)
    else:
        los = rng.random(shape) < params.p_los(elev)
    clutter = np.where(los, 0.0, params.clutter_db(elev))
    sigma = np.where(los, params.sigma_los_db, params.sigma_nlos_db)
    shadow = sigma * rng.standard_normal(shape) if shadowing else np.zeros(shape)
    return np.broadcast_to(pl, shape).copy(), shadow, clutter, los


@dataclass(frozen=True)
class RmaParams:
    """TR 38.901 RMa scenario constants (table 7.4.1-1 row RMa)."""

    street_width_m: float = 20.0
    building_height_m: float = 5.0
    sigma_los_near_db: float = 4.0  # before the breakpoint
    sigma_los_far_db: float = 6.0  # beyond the breakpoint
    sigma_nlos_db: float = 8.0
    min_d2d_m: float = 10.0
    max_d2d_m: float = 21_000.0

    def __post_init__(self):
        if not 5.0 <= self.building_height_m <= 50.0:
            raise ValueError("avg building height valid range is [5, 50] m")
        if not 5.0 <= self.street_width_m <= 50.0:
            raise ValueError("street width valid range is [5, 50] m")
        if self.min_d2d_m <= 0.0 or self.max_d2d_m <= self.min_d2d_m:
            raise ValueError("need 0 < min_d2d < max_d2d")


def _rma_pl1_db(d3d_m, f_ghz, h_m):
    """RMa LOS sub-breakpoint curve; `h_m` is the average building height."""
    a = min(0.03 * h_m**1.72, 10.0)
    b = min(0.044 * h_m**1.72, 14.77)
    return (
        20.0 * np.log10(40.0 * math.pi * d3d_m * f_ghz / 3.0)
        + a * np.log10(d3d_m)
        - b
        + 0.002 * math.log10(h_m) * d3d_m
    )


def rma_median_pathloss(
    d2d_m,
    frequency_hz: float,
    h_bs_m: float = 30.0,
    h_ut_m: float = 1.5,
    params: RmaParams = RmaParams(),
):
    """Fading-free RMa curves: (pl_los, pl_nlos, pre_breakpoint, p_los, clamped).

    `pl_nlos` is already max(LOS curve, NLOS formula) as the model requires.
    2D distances outside [min_d2d, max_d2d] are clamped to the model window
    and flagged.
    """
    d2d = np.asarray(d2d_m, dtype=float)
    clamped = (d2d < params.min_d2d_m) | (d2d > params.max_d2d_m)
    d2d = np.clip(d2d, params.min_d2d_m, params.max_d2d_m)
    dz = h_bs_m - h_ut_m
    d3d = np.hypot(d2d, dz)
    f_ghz = frequency_hz / 1e9
    h = params.building_height_m

    d_bp = 2.0 * math.pi * h_bs_m * h_ut_m * frequency_hz / SPEED_OF_LIGHT_M_S
    d3d_bp = math.hypot(d_bp, dz)
    pre_bp = d2d <= d_bp
    pl_los = np.where(
        pre_bp,
        _rma_pl1_db(d3d, f_ghz, h),
        _rma_pl1_db(d3d_bp, f_ghz, h) + 40.0 * np.log10(d3d / d3d_bp),
    )

    pl_nlos = (
        161.04
        - 7.1 * math.log10(params.street_width_m)
        + 7.5 * math.log10(h)
        - (24.37 - 3.7 * (h / h_bs_m) ** 2) * math.log10(h_bs_m)
        + (43.42 - 3.1 * math.log10(h_bs_m)) * (np.log10(d3d) - 3.0)
        + 20.0 * math.log10(f_ghz)
        - (3.2 * math.log10(11.75 * h_ut_m) ** 2 - 4.97)
    )
    pl_nlos = np.maximum(pl_los, pl_nlos)

    p_los = np.where(d2d <= 10.0, 1.0, np.exp(-(d2d - 10.0) / 1000.0))
    return pl_los, pl_nlos, pre_bp, p_los, clamped


def rma_pathloss(
    d2d_m,
    frequency_hz: float,
    rng: np.random.Generator,
    h_bs_m: float = 30.0,
    h_ut_m: float = 1.5,
    params: RmaParams = RmaParams(),
    shadowing: bool = True,
):
    """TR 38.901 rural-macro pathloss: (pathloss, shadow, los, clamped).

    Dual-slope LOS around the breakpoint 2*pi*h_bs*h_ut*f/c; NLOS is the max
    of the LOS curve and the RMa NLOS formula.
    """
    pl_los, pl_nlos, pre_bp, p_los, clamped = rma_median_pathloss(
        d2d_m, frequency_hz, h_bs_m, h_ut_m, params
    )
    shape = pl_los.shape
    los = rng.random(shape) < p_los
    pl = np.where(los, pl_los, pl_nlos)
    sigma = np.where(
        los,
        np.where(pre_bp, params.sigma_los_near_db, params.sigma_los_far_db),
        params.sigma_nlos_db,
    )
    shadow = sigma * rng.standard_normal(shape) if shadowing else np.zeros(shape)
    return pl, shadow, los, clamped


@dataclass(frozen=True)
class LinkBudget:
    """One transmitter-to-receiver link, fully itemized (all dB/dBi/m)."""

    distance_m: float
    elevation_deg: float
    pathloss_db: float
    shadow_db: float
    clutter_db: float
    g_tx_dbi: float
    g_rx_dbi: float
    coupling_loss_db: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self,
            "coupling_loss_db",
            self.pathloss_db
            + self.shadow_db
            + self.clutter_db
            - self.g_tx_dbi
            - self.g_rx_dbi,
        )
