"""Monte Carlo drop engine: scenario assembly, drops, and the three sweeps.

Every drop owns an independent generator derived from (seed, experiment,
density index, drop index) via SeedSequence spawn keys, and results are
merged in key order — so the output is bit-identical no matter how many
worker threads execute the drops.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import antenna, geometry, network
from .channel import noise_power_dbm
from .config import ScenarioConfig
from .network import Cell, CellKind

# spawn-key domains, one per experiment, so identical seeds never share streams
_COUPLING, _SINR, _THROUGHPUT, _MOBILITY = 0, 1, 2, 3


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one unit of work under a master seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


@dataclass(frozen=True)
class Scenario:
    """Cells plus the drop region and per-cell arrays the SINR math wants.

    `cells` are the servers users may attach to; `dl_interferers` are extra
    co-channel transmitters that never serve anyone but stay on the air
    (the overlay keeps the platform's non-center beams this way).
    """

    cells: list[Cell]
    cfg: ScenarioConfig
    service_radius_m: float
    beam_centers: np.ndarray = field(repr=False)  # (n serving beams, 3) on ground
    tx_power_dbm: np.ndarray = field(repr=False)  # (n_cells,)
    rx_noise_figure_db: np.ndarray = field(repr=False)  # (n_cells,)
    ring: np.ndarray = field(repr=False)  # (n_cells,) hibs ring or -1
    is_hibs: np.ndarray = field(repr=False)  # (n_cells,) bool
    dl_interferers: tuple = ()

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def interferer_tx_power_dbm(self) -> np.ndarray:
        return np.array([c.tx_power_dbm for c in self.dl_interferers])


def _finish_scenario(
    cells: list[Cell],
    cfg: ScenarioConfig,
    service_radius_m: float,
    beam_centers: np.ndarray,
    dl_interferers: tuple = (),
) -> Scenario:
    return Scenario(
        cells=cells,
        cfg=cfg,
        service_radius_m=service_radius_m,
        beam_centers=beam_centers,
        tx_power_dbm=np.array([c.tx_power_dbm for c in cells]),
        rx_noise_figure_db=np.array([c.rx_noise_figure_db for c in cells]),
        ring=np.array([c.ring if c.ring is not None else -1 for c in cells]),
        is_hibs=np.array([c.kind is CellKind.HIBS_BEAM for c in cells]),
        dl_interferers=dl_interferers,
    )


def _hibs_pattern(cfg: ScenarioConfig) -> antenna.AperturePattern:
    bw_deg = 2.0 * math.degrees(
        math.atan(0.5 * cfg.hibs.footprint_diameter_m / cfg.hibs.altitude_m)
    )
    return antenna.make_aperture_pattern(
        bw_deg,
        cfg.hibs.peak_gain_dbi,
        cfg.hibs.pattern_floor_db,
        bessel_sidelobes=cfg.hibs.pattern_sidelobes == "bessel",
    )


def _tn_pattern(cfg: ScenarioConfig) -> antenna.SectorPattern:
    t = cfg.terrestrial
    return antenna.SectorPattern(
        peak_gain_dbi=t.peak_gain_dbi,
        h_hpbw_deg=t.h_hpbw_deg,
        v_hpbw_deg=t.v_hpbw_deg,
        front_back_db=t.front_back_db,
        sla_db=t.sla_db,
        downtilt_deg=t.downtilt_deg,
    )


def build_hibs_scenario(cfg: ScenarioConfig) -> Scenario:
    """Multi-beam platform alone (19 beams at defaults)."""
    layout = geometry.build_hibs_layout(
        cfg.hibs.footprint_diameter_m,
        cfg.hibs.n_rings,
        cfg.hibs.altitude_m,
        cfg.hibs.service_area_km2,
    )
    cells = network.build_hibs_cells(
        layout, _hibs_pattern(cfg), cfg.hibs.tx_power_dbm, cfg.hibs.noise_figure_db
    )
    return _finish_scenario(cells, cfg, layout.service_radius_m, layout.beam_centers)


def build_combined_scenario(cfg: ScenarioConfig) -> Scenario:
    """Central platform beam overlaying the terrestrial site ring.

    Only the center beam serves, but the platform keeps its whole beam grid
    on the air by default (scheduler.overlay_cochannel_beams): the grid rides
    along as non-serving co-channel interferers, the downlink mirror of the
    busy-system uplink assumption. Users drop over the overlay's own coverage
    region — the site ring plus one nominal cell radius of outskirts — not
    over the platform-only service disk.
    """
    layout = geometry.build_hibs_layout(
        cfg.hibs.footprint_diameter_m,
        cfg.hibs.n_rings,
        cfg.hibs.altitude_m,
        cfg.hibs.service_area_km2,
    )
    beams = network.build_hibs_cells(
        layout, _hibs_pattern(cfg), cfg.hibs.tx_power_dbm, cfg.hibs.noise_figure_db
    )
    cells = beams[:1]
    tn_layout = geometry.build_tn_ring_layout(
        cfg.terrestrial.isd_m,
        cfg.terrestrial.n_sites,
        cfg.terrestrial.site_height_m,
        cfg.terrestrial.sector_rotation_deg,
    )
    cells += network.build_tn_cells(
        tn_layout,
        _tn_pattern(cfg),
        cfg.terrestrial.tx_power_dbm,
        cfg.terrestrial.noise_figure_db,
        first_cell_id=len(cells),
    )
    interferers = ()
    if cfg.scheduler.overlay_cochannel_beams:
        interferers = tuple(
            dataclasses.replace(b, cell_id=len(cells) + i)
            for i, b in enumerate(beams[1:])
        )
    drop_radius_m = tn_layout.ring_radius_m + 0.5 * cfg.terrestrial.isd_m
    return _finish_scenario(
        cells, cfg, drop_radius_m, layout.beam_centers[:1], interferers
    )


def drop_budgets(scenario: Scenario, users_xyz: np.ndarray, rng: np.random.Generator):
    """Coupling-loss matrix over serving cells then dl_interferers (row order
    fixed by cell id so RNG consumption is reproducible)."""
    cfg = scenario.cfg
    return network.coupling_loss_matrix(
        scenario.cells + list(scenario.dl_interferers),
        users_xyz,
        cfg.carrier.frequency_hz,
        cfg.ue.antenna_gain_dbi,
        cfg.channel.ntn,
        cfg.channel.rma,
        rng,
        shadowing=cfg.channel.shadowing,
        ue_height_m=cfg.ue.height_m,
    )


def _map_ordered(worker, keys, threads: int) -> list:
    """Run worker over keys, returning results in key order regardless of
    completion order (the determinism contract across --threads)."""
    if threads <= 1:
        return [worker(k) for k in keys]
    out = [None] * len(keys)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        futures = {ex.submit(worker, k): i for i, k in enumerate(keys)}
        for fut, i in futures.items():
            out[i] = fut.result()
    return out


@dataclass
class CouplingLossResult:
    """Downlink coupling loss of the serving beam, bucketed by beam ring."""

    samples_by_ring: dict[int, np.ndarray]
    n_drops: int
    users_per_drop: int
    seed: int


def run_coupling_loss(
    cfg: ScenarioConfig,
    seed: int = 1,
    n_drops: int = 500,
    users_per_drop: int = 200,
    threads: int = 1,
) -> CouplingLossResult:
    """Serving-beam coupling-loss statistics over the platform-only layout."""
    if n_drops <= 0 or users_per_drop <= 0:
        raise ValueError("n_drops and users_per_drop must be positive")
    scenario = build_hibs_scenario(cfg)

    def one_drop(d: int):
        rng = derive_rng(seed, _COUPLING, d)
        users = geometry.drop_users(
            users_per_drop, rng, scenario.service_radius_m, height_m=cfg.ue.height_m
        )
        budgets = drop_budgets(scenario, users, rng)
        serving = network.associate(budgets.coupling_db)
        cl = budgets.coupling_db[serving, np.arange(users_per_drop)]
        return cl, scenario.ring[serving]

    results = _map_ordered(one_drop, range(n_drops), threads)
    rings = sorted(set(scenario.ring.tolist()))
    by_ring = {
        r: np.concatenate([cl[rg == r] for cl, rg in results]) for r in rings
    }
    return CouplingLossResult(
        samples_by_ring=by_ring,
        n_drops=n_drops,
        users_per_drop=users_per_drop,
        seed=seed,
    )


@dataclass
class SinrSweepResult:
    """Per-user downlink and uplink SINR samples per user density."""

    densities: tuple[float, ...]
    dl_by_density: dict[float, np.ndarray]
    ul_by_density: dict[float, np.ndarray]
    n_drops: int
    seed: int


def _check_densities(densities) -> tuple[float, ...]:
    densities = tuple(float(d) for d in densities)
    if not densities or any(d <= 0 for d in densities):
        raise ValueError("densities must be a non-empty list of positive values")
    return densities


def _ul_sinr_coscheduled(
    coupling_db: np.ndarray,
    serving: np.ndarray,
    active: np.ndarray,
    ue_tx_power_dbm: float,
    noise_mw: np.ndarray,
) -> np.ndarray:
    """One uplink SINR sample per user under round-robin TDM.

    Slot k schedules user (k mod n_c) of every active cell c; the sample for
    a user is taken in its first scheduled slot, with whoever else the round
    robin put into that slot as interferers.
    """
    n_users = serving.shape[0]
    counts = np.bincount(serving, minlength=coupling_db.shape[0])
    act = np.flatnonzero(active)
    users_of = [np.flatnonzero(serving == c) for c in act]
    n_slots = int(counts[act].max())
    rx_lin = 10.0 ** ((ue_tx_power_dbm - coupling_db) / 10.0)
    out = np.empty(n_users)
    for k in range(n_slots):
        sched = np.array([u[k % u.shape[0]] for u in users_of])
        sub = rx_lin[np.ix_(act, sched)]  # rows: rx station, cols: tx user
        s = np.diag(sub)
        interference = sub.sum(axis=1) - s
        sinr = 10.0 * np.log10(s / (interference + noise_mw[act]))
        fresh = k < counts[act]  # first full round-robin cycle only
        out[sched[fresh]] = sinr[fresh]
    return out


def _full_load_ul_interference_mw(
    scenario: Scenario, rng: np.random.Generator
) -> np.ndarray:
    """Uplink interference floor per station under the busy-system assumption:
    every beam carries one full-power UE, uniform in its footprint, all slots.

    Returns (n_cells,) mW; entry c excludes beam c's own user (that slot
    belongs to the user being evaluated)."""
    centers = scenario.beam_centers
    n_b = centers.shape[0]
    cfg = scenario.cfg
    r = 0.5 * cfg.hibs.footprint_diameter_m * np.sqrt(rng.uniform(size=n_b))
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n_b)
    phantoms = centers.copy()
    phantoms[:, 0] += r * np.cos(theta)
    phantoms[:, 1] += r * np.sin(theta)
    phantoms[:, 2] = cfg.ue.height_m
    budgets = drop_budgets(scenario, phantoms, rng)
    rx = 10.0 ** ((cfg.ue.tx_power_dbm - budgets.coupling_db) / 10.0)  # (cells, beams)
    total = rx.sum(axis=1)
    own = np.zeros_like(total)
    own[:n_b] = rx[np.arange(n_b), np.arange(n_b)]  # beam i is cell i by build order
    return total - own


def run_sinr_sweep(
    cfg: ScenarioConfig,
    seed: int = 1,
    n_drops: int = 100,
    densities=(0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0),
    threads: int = 1,
) -> SinrSweepResult:
    """DL and UL SINR distributions vs mean users per cell, platform only."""
    if n_drops <= 0:
        raise ValueError("n_drops must be positive")
    densities = _check_densities(densities)
    scenario = build_hibs_scenario(cfg)
    noise_dl_dbm = noise_power_dbm(cfg.carrier.bandwidth_hz, cfg.ue.noise_figure_db)
    noise_ul_mw = 10.0 ** (
        np.array(
            [
                noise_power_dbm(cfg.carrier.bandwidth_hz, nf)
                for nf in scenario.rx_noise_figure_db
            ]
        )
        / 10.0
    )

    ul_mode = cfg.scheduler.ul_interference

    def one_drop(key):
        di, d = key
        rng = derive_rng(seed, _SINR, di, d)
        n_users = int(rng.poisson(densities[di] * scenario.n_cells))
        if n_users == 0:
            return np.empty(0), np.empty(0)
        users = geometry.drop_users(
            n_users, rng, scenario.service_radius_m, height_m=cfg.ue.height_m
        )
        budgets = drop_budgets(scenario, users, rng)
        serving = network.associate(budgets.coupling_db)
        active = network.active_cells(serving, scenario.n_cells)
        dl = network.dl_sinr_db(
            budgets.coupling_db, serving, scenario.tx_power_dbm, active, noise_dl_dbm
        )
        if ul_mode == "coscheduled":
            ul = _ul_sinr_coscheduled(
                budgets.coupling_db, serving, active, cfg.ue.tx_power_dbm, noise_ul_mw
            )
        else:
            if ul_mode == "full_load":
                i_mw = _full_load_ul_interference_mw(scenario, rng)
            else:  # "none": pure uplink SNR
                i_mw = np.zeros(scenario.n_cells)
            s_dbm = cfg.ue.tx_power_dbm - budgets.coupling_db[
                serving, np.arange(n_users)
            ]
            denom = i_mw[serving] + noise_ul_mw[serving]
            ul = s_dbm - 10.0 * np.log10(denom)
        return dl, ul

    keys = [(di, d) for di in range(len(densities)) for d in range(n_drops)]
    results = _map_ordered(one_drop, keys, threads)
    dl_by_density, ul_by_density = {}, {}
    for di, density in enumerate(densities):
        chunk = results[di * n_drops : (di + 1) * n_drops]
        dl_by_density[density] = np.concatenate([c[0] for c in chunk])
        ul_by_density[density] = np.concatenate([c[1] for c in chunk])
    return SinrSweepResult(
        densities=densities,
        dl_by_density=dl_by_density,
        ul_by_density=ul_by_density,
        n_drops=n_drops,
        seed=seed,
    )


@dataclass(frozen=True)
class ThroughputPoint:
    """Aggregates for one user density in the combined overlay scenario."""

    density: float
    hibs_cell_bps: float
    tn_cell_bps: float
    hibs_user_bps: float
    tn_user_bps: float
    hibs_se_bpshz: float
    tn_se_bpshz: float
    n_hibs_users: int
    n_tn_users: int


@dataclass
class ThroughputSweepResult:
    points: list[ThroughputPoint]
    n_drops: int
    seed: int

    @property
    def hibs_max_se_bpshz(self) -> float:
        return max(p.hibs_se_bpshz for p in self.points)

    @property
    def tn_max_se_bpshz(self) -> float:
        return max(p.tn_se_bpshz for p in self.points)


def run_throughput_sweep(
    cfg: ScenarioConfig,
    seed: int = 1,
    n_drops: int = 100,
    densities=(0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0),
    threads: int = 1,
) -> ThroughputSweepResult:
    """Full-buffer DL throughput in the combined overlay (1 platform beam +
    terrestrial ring), round-robin within each cell.

    Users are dropped over the whole service disk, so the platform beam picks
    up everyone the sector ring does not cover — that coverage split, not the
    beam's own link budget, is what drags its per-user numbers at load.
    """
    if n_drops <= 0:
        raise ValueError("n_drops must be positive")
    densities = _check_densities(densities)
    scenario = build_combined_scenario(cfg)
    noise_dl_dbm = noise_power_dbm(cfg.carrier.bandwidth_hz, cfg.ue.noise_figure_db)
    bw = cfg.carrier.bandwidth_hz
    hibs_mask = scenario.is_hibs
    n_serv = scenario.n_cells
    n_phantom = len(scenario.dl_interferers)
    tx_all_dbm = np.concatenate(
        [scenario.tx_power_dbm, scenario.interferer_tx_power_dbm]
    )

    def one_drop(key):
        di, d = key
        rng = derive_rng(seed, _THROUGHPUT, di, d)
        n_users = int(rng.poisson(densities[di] * n_serv))
        if n_users == 0:
            zeros_cells = np.zeros(n_serv)
            return zeros_cells, np.empty(0), np.empty(0, dtype=int)
        users = geometry.drop_users(
            n_users, rng, scenario.service_radius_m, height_m=cfg.ue.height_m
        )
        budgets = drop_budgets(scenario, users, rng)
        serving = network.associate(budgets.coupling_db[:n_serv])
        # non-serving beams never empty out: they are on-air by construction
        active = np.concatenate(
            [network.active_cells(serving, n_serv), np.ones(n_phantom, dtype=bool)]
        )
        dl = network.dl_sinr_db(
            budgets.coupling_db, serving, tx_all_dbm, active, noise_dl_dbm
        )
        cell_bps, user_bps, _ = network.round_robin_throughput_bps(
            dl, serving, n_serv, bw, cfg.rate
        )
        return cell_bps, user_bps, serving

    keys = [(di, d) for di in range(len(densities)) for d in range(n_drops)]
    results = _map_ordered(one_drop, keys, threads)
    points = []
    for di, density in enumerate(densities):
        chunk = results[di * n_drops : (di + 1) * n_drops]
        cell_bps = np.stack([c[0] for c in chunk])  # (drops, n_cells)
        user_bps = np.concatenate([c[1] for c in chunk])
        serving = np.concatenate([c[2] for c in chunk])
        user_is_hibs = hibs_mask[serving] if serving.size else np.empty(0, dtype=bool)
        hibs_users = user_bps[user_is_hibs]
        tn_users = user_bps[~user_is_hibs]
        hibs_cell = float(cell_bps[:, hibs_mask].mean())
        tn_cell = float(cell_bps[:, ~hibs_mask].mean())
        points.append(
            ThroughputPoint(
                density=density,
                hibs_cell_bps=hibs_cell,
                tn_cell_bps=tn_cell,
                hibs_user_bps=float(hibs_users.mean()) if hibs_users.size else 0.0,
                tn_user_bps=float(tn_users.mean()) if tn_users.size else 0.0,
                hibs_se_bpshz=hibs_cell / bw,
                tn_se_bpshz=tn_cell / bw,
                n_hibs_users=int(hibs_users.size),
                n_tn_users=int(tn_users.size),
            )
        )
    return ThroughputSweepResult(points=points, n_drops=n_drops, seed=seed)
