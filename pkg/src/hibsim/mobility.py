"""Straight-line mobility with A3 handovers between the overlay layers.

Users drive radial lines through the area center at constant speed: inbound
users spawn in the outer terrestrial annulus heading for the center, outbound
users spawn near the center heading out. Tracks park at their destination
(the center core, or just past the site ring) so nobody wanders off the
modeled coverage and picks up rim artifacts.

The A3 rule compares received powers per measurement period. By default the
decision signal is the long-term level — median channel plus the track's
LOS state — which makes handover locations trace the geometry of the two
layers. The "shadowed" signal adds distance-correlated (AR(1)) shadowing on
top; with shadow swings several times the hysteresis, handovers then fire
all over the contest band in alternating pairs (ping-pong), and the mean
positions of the two directions collapse onto each other. LOS state per
(user, cell) comes from one uniform threshold held for the whole track, so
it flips only where the LOS probability itself moves — redrawing it every
step would chop the track into fast LOS/NLOS noise that no time-to-trigger
filter is meant to survive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from . import antenna, channel, network
from .config import ScenarioConfig
from .engine import _MOBILITY, Scenario, build_combined_scenario, derive_rng
from .network import CellKind

TN_TO_HIBS = "tn_to_hibs"
HIBS_TO_TN = "hibs_to_tn"

# Inbound tracks park on reaching this distance from the center: the task
# ("drive into the platform-only zone") is complete there.
CENTER_PARK_RADIUS_M = 500.0


@dataclass(frozen=True)
class HandoverEvent:
    """One cross-layer handover: where and when the A3 trigger fired."""

    time_s: float
    user_id: int
    from_cell_id: int
    to_cell_id: int
    x_m: float
    y_m: float
    direction: str  # TN_TO_HIBS or HIBS_TO_TN


@dataclass
class MobilityResult:
    events: list[HandoverEvent]
    n_users: int
    a3_offset_db: float
    sim_duration_s: float
    seed: int

    def distances_m(self, direction: str) -> np.ndarray:
        return np.array(
            [math.hypot(e.x_m, e.y_m) for e in self.events if e.direction == direction]
        )


def _consecutive_needed(time_to_trigger_s: float, period_s: float) -> int:
    """Measurements the A3 condition must span: smallest k with
    (k - 1) * period >= time_to_trigger."""
    return max(2, math.ceil(time_to_trigger_s / period_s + 1.0 - 1e-9))


def _first_sustained(cond: np.ndarray, k: int) -> int:
    """Index of the first measurement ending a run of k consecutive True, or
    -1. Runs must lie wholly inside `cond` (the trigger clock resets at the
    segment start)."""
    if cond.size < k:
        return -1
    c = np.cumsum(cond.astype(np.int64))
    window = c[k - 1 :] - np.concatenate(([0], c[:-k]))
    hits = np.flatnonzero(window == k)
    return int(hits[0]) + k - 1 if hits.size else -1


def _track_rx_power_dbm(
    scenario: Scenario,
    pos_xyz: np.ndarray,
    rng: np.random.Generator,
    rho: float,
    shadowed: bool,
) -> np.ndarray:
    """Received DL power (T, n_cells) along one track.

    Draw order per cell: one LOS threshold, then (shadowed only) T AR(1)
    innovations; cells in id order — a fixed (seed, user) pair reproduces
    the track exactly, and the LOS pattern is identical across the two
    decision signals.
    """
    cfg = scenario.cfg
    n_t = pos_xyz.shape[0]
    n_c = scenario.n_cells
    rx = np.empty((n_t, n_c))
    innov_scale = math.sqrt(max(1.0 - rho * rho, 0.0))
    for i, cell in enumerate(scenario.cells):
        if cell.kind is CellKind.HIBS_BEAM:
            slant, elev, off_axis = network.hibs_link_geometry(cell, pos_xyz)
            pl = channel.fspl_db(slant, cfg.carrier.frequency_hz)
            p_los = cfg.channel.ntn.p_los(elev)
            los = (
                np.ones(n_t, dtype=bool)
                if cfg.channel.ntn.los_only
                else rng.random() < p_los
            )
            pl = pl + np.where(los, 0.0, cfg.channel.ntn.clutter_db(elev))
            sigma = np.where(
                los, cfg.channel.ntn.sigma_los_db, cfg.channel.ntn.sigma_nlos_db
            )
            g_tx = antenna.aperture_gain_dbi(off_axis, cell.pattern)
        else:
            d2d, az_off, depression = network.tn_link_geometry(cell, pos_xyz)
            pl_los, pl_nlos, pre_bp, p_los, _ = channel.rma_median_pathloss(
                d2d,
                cfg.carrier.frequency_hz,
                h_bs_m=cell.tx_position[2],
                h_ut_m=cfg.ue.height_m,
                params=cfg.channel.rma,
            )
            los = rng.random() < p_los
            pl = np.where(los, pl_los, pl_nlos)
            sigma = np.where(
                los,
                np.where(
                    pre_bp,
                    cfg.channel.rma.sigma_los_near_db,
                    cfg.channel.rma.sigma_los_far_db,
                ),
                cfg.channel.rma.sigma_nlos_db,
            )
            g_tx = antenna.sector_gain_dbi(az_off, depression, cell.pattern)
        if shadowed and cfg.channel.shadowing:
            innov = rng.standard_normal(n_t)
            innov[1:] *= innov_scale
            unit = lfilter([1.0], [1.0, -rho], innov)
            shadow = sigma * unit
        else:
            shadow = 0.0
        rx[:, i] = (
            cell.tx_power_dbm - pl - shadow + g_tx + cfg.ue.antenna_gain_dbi
        )
    return rx


def run_mobility(
    cfg: ScenarioConfig,
    seed: int = 1,
    threads: int = 1,
    a3_offset_db: float | None = None,
) -> MobilityResult:
    """A3 handover campaign over the combined overlay scenario.

    Returns every cross-layer handover event; intra-layer handovers update
    the serving cell silently. `a3_offset_db` overrides the config offset so
    hysteresis sweeps can reuse one config (and one seed: trajectories and
    channels are identical across offsets).
    """
    m = cfg.mobility
    offset = m.a3_offset_db if a3_offset_db is None else float(a3_offset_db)
    if m.sim_duration_s <= 0.0:
        raise ValueError("sim_duration_s must be positive")
    scenario = build_combined_scenario(cfg)
    kinds = [c.kind for c in scenario.cells]
    ring_m = next(
        math.hypot(c.tx_position[0], c.tx_position[1])
        for c in scenario.cells
        if c.kind is CellKind.TN_SECTOR
    )
    shadowed = m.decision_signal == "shadowed"
    period = m.measurement_period_s
    n_meas = int(math.floor(m.sim_duration_s / period)) + 1
    k_need = _consecutive_needed(m.time_to_trigger_s, period)
    rho = math.exp(-m.speed_mps * period / m.shadow_decorrelation_m)
    n_users = m.n_inbound + m.n_outbound
    times = np.arange(n_meas) * period

    def one_user(u: int) -> list[HandoverEvent]:
        rng = derive_rng(seed, _MOBILITY, u)
        phi = rng.uniform(0.0, 2.0 * math.pi)
        if u < m.n_inbound:
            r0 = ring_m * rng.uniform(m.tn_spawn_near, m.tn_spawn_far)
            heading = phi + math.pi  # straight at (and through) the center
        else:
            r0 = m.hibs_spawn_radius_m * math.sqrt(rng.uniform())
            heading = phi  # radially outward
        pos = np.empty((n_meas, 3))
        pos[:, 0] = r0 * math.cos(phi) + m.speed_mps * times * math.cos(heading)
        pos[:, 1] = r0 * math.sin(phi) + m.speed_mps * times * math.sin(heading)
        pos[:, 2] = cfg.ue.height_m
        r_t = np.hypot(pos[:, 0], pos[:, 1])
        arrived = np.flatnonzero(
            r_t < CENTER_PARK_RADIUS_M
            if u < m.n_inbound
            else r_t > ring_m + m.outbound_stop_margin_m
        )
        if arrived.size:
            pos = pos[: arrived[0] + 1]
        rx = _track_rx_power_dbm(scenario, pos, rng, rho, shadowed)

        events: list[HandoverEvent] = []
        serving = int(np.argmax(rx[0]))
        start = 1
        while start < pos.shape[0]:
            seg = rx[start:]
            others = seg.copy()
            others[:, serving] = -np.inf
            cond = others.max(axis=1) > seg[:, serving] + offset
            rel = _first_sustained(cond, k_need)
            if rel < 0:
                break
            t_idx = start + rel
            row = rx[t_idx].copy()
            row[serving] = -np.inf
            new = int(np.argmax(row))
            if kinds[new] is not kinds[serving]:
                direction = (
                    TN_TO_HIBS if kinds[new] is CellKind.HIBS_BEAM else HIBS_TO_TN
                )
                events.append(
                    HandoverEvent(
                        time_s=float(times[t_idx]),
                        user_id=u,
                        from_cell_id=scenario.cells[serving].cell_id,
                        to_cell_id=scenario.cells[new].cell_id,
                        x_m=float(pos[t_idx, 0]),
                        y_m=float(pos[t_idx, 1]),
                        direction=direction,
                    )
                )
            serving = new
            start = t_idx + 1
        return events

    if threads <= 1:
        per_user = [one_user(u) for u in range(n_users)]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as ex:
            per_user = list(ex.map(one_user, range(n_users)))
    events = [e for lst in per_user for e in lst]
    return MobilityResult(
        events=events,
        n_users=n_users,
        a3_offset_db=offset,
        sim_duration_s=m.sim_duration_s,
        seed=seed,
    )
