"""Cells, user association, SINR, and the link-to-rate mapping.

A "cell" is one downlink transmit port: a platform beam or a terrestrial
sector. Coupling losses are computed as (n_cells, n_users) matrices so the
same matrix serves association, downlink SINR, and uplink scheduling.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import antenna, channel, geometry
from .antenna import AperturePattern, SectorPattern
from .channel import NtnParams, RmaParams


class CellKind(str, enum.Enum):
    HIBS_BEAM = "hibs"
    TN_SECTOR = "tn"


@dataclass(frozen=True)
class Cell:
    """One downlink transmit port and its uplink receive chain."""

    cell_id: int
    kind: CellKind
    tx_position: np.ndarray = field(repr=False)  # (3,) antenna phase center
    tx_power_dbm: float
    rx_noise_figure_db: float
    pattern: AperturePattern | SectorPattern
    boresight: np.ndarray | None = field(default=None, repr=False)  # hibs beams
    azimuth_deg: float | None = None  # tn sectors
    ring: int | None = None  # hibs beams: 0 center, 1, 2


def build_hibs_cells(
    layout: geometry.HibsLayout,
    pattern: AperturePattern,
    tx_power_dbm: float,
    rx_noise_figure_db: float,
) -> list[Cell]:
    """One beam per layout cell, boresight steered from the platform to the
    beam center on the ground."""
    platform = layout.platform_position.as_array()
    cells = []
    for i in range(layout.n_beams):
        bore = layout.beam_centers[i] - platform
        bore = bore / np.linalg.norm(bore)
        cells.append(
            Cell(
                cell_id=i,
                kind=CellKind.HIBS_BEAM,
                tx_position=platform,
                tx_power_dbm=tx_power_dbm,
                rx_noise_figure_db=rx_noise_figure_db,
                pattern=pattern,
                boresight=bore,
                ring=int(layout.ring_index[i]),
            )
        )
    return cells


def build_tn_cells(
    layout: geometry.TerrestrialLayout,
    pattern: SectorPattern,
    tx_power_dbm: float,
    rx_noise_figure_db: float,
    first_cell_id: int = 0,
) -> list[Cell]:
    cells = []
    for k in range(layout.n_sectors):
        site = layout.site_positions[layout.sector_site[k]]
        cells.append(
            Cell(
                cell_id=first_cell_id + k,
                kind=CellKind.TN_SECTOR,
                tx_position=site.copy(),
                tx_power_dbm=tx_power_dbm,
                rx_noise_figure_db=rx_noise_figure_db,
                pattern=pattern,
                azimuth_deg=float(layout.sector_azimuth_deg[k]),
            )
        )
    return cells


@dataclass
class DropBudgets:
    """Per-(cell, user) link pieces for one drop; all arrays (n_cells, n_users)."""

    coupling_db: np.ndarray
    pathloss_db: np.ndarray
    shadow_db: np.ndarray
    clutter_db: np.ndarray
    g_tx_dbi: np.ndarray
    los: np.ndarray


def hibs_link_geometry(cell: Cell, users_xyz: np.ndarray):
    """(slant_m, elevation_deg, off_axis_deg) from platform beam to users."""
    delta = users_xyz - cell.tx_position
    slant = np.linalg.norm(delta, axis=1)
    horiz = np.hypot(delta[:, 0], delta[:, 1])
    elev = np.degrees(np.arctan2(-delta[:, 2], horiz))  # platform above users
    cosang = np.clip(delta @ cell.boresight / slant, -1.0, 1.0)
    off_axis = np.degrees(np.arccos(cosang))
    return slant, elev, off_axis


def tn_link_geometry(cell: Cell, users_xyz: np.ndarray):
    """(d2d_m, az_off_deg, depression_deg) from sector antenna to users."""
    dx = users_xyz[:, 0] - cell.tx_position[0]
    dy = users_xyz[:, 1] - cell.tx_position[1]
    d2d = np.hypot(dx, dy)
    az_off = np.degrees(np.arctan2(dy, dx)) - cell.azimuth_deg
    depression = np.degrees(
        np.arctan2(cell.tx_position[2] - users_xyz[:, 2], d2d)
    )
    return d2d, az_off, depression


def coupling_loss_matrix(
    cells: list[Cell],
    users_xyz: np.ndarray,
    frequency_hz: float,
    g_rx_dbi: float,
    ntn_params: NtnParams,
    rma_params: RmaParams,
    rng: np.random.Generator,
    shadowing: bool = True,
    ue_height_m: float = 1.5,
) -> DropBudgets:
    """Full coupling-loss matrix for one drop.

    Cells are processed in list order and each consumes its own slice of the
    generator, so a fixed seed reproduces the matrix bit for bit.
    """
    n_c, n_u = len(cells), users_xyz.shape[0]
    pl = np.zeros((n_c, n_u))
    sh = np.zeros((n_c, n_u))
    cl = np.zeros((n_c, n_u))
    gt = np.zeros((n_c, n_u))
    los = np.zeros((n_c, n_u), dtype=bool)
    for i, cell in enumerate(cells):
        if cell.kind is CellKind.HIBS_BEAM:
            slant, elev, off_axis = hibs_link_geometry(cell, users_xyz)
            pl[i], sh[i], cl[i], los[i] = channel.ntn_rural_pathloss(
                elev, slant, frequency_hz, rng, ntn_params, shadowing
            )
            gt[i] = antenna.aperture_gain_dbi(off_axis, cell.pattern)
        else:
            d2d, az_off, depression = tn_link_geometry(cell, users_xyz)
            pl[i], sh[i], los[i], _ = channel.rma_pathloss(
                d2d,
                frequency_hz,
                rng,
                h_bs_m=cell.tx_position[2],
                h_ut_m=ue_height_m,
                params=rma_params,
                shadowing=shadowing,
            )
            gt[i] = antenna.sector_gain_dbi(az_off, depression, cell.pattern)
    coupling = pl + sh + cl - gt - g_rx_dbi
    return DropBudgets(
        coupling_db=coupling,
        pathloss_db=pl,
        shadow_db=sh,
        clutter_db=cl,
        g_tx_dbi=gt,
        los=los,
    )


def associate(coupling_db: np.ndarray) -> np.ndarray:
    """Serving cell per user: minimum coupling loss, lowest cell index on ties."""
    return np.argmin(coupling_db, axis=0)


def active_cells(serving: np.ndarray, n_cells: int) -> np.ndarray:
    """Boolean mask of cells with at least one associated user (only those
    transmit / schedule)."""
    return np.bincount(serving, minlength=n_cells) > 0


def dl_sinr_db(
    coupling_db: np.ndarray,
    serving: np.ndarray,
    tx_power_dbm: np.ndarray,
    active: np.ndarray,
    noise_dbm: float,
) -> np.ndarray:
    """Downlink SINR per user with all active cells transmitting full power."""
    if not np.all(active[serving]):
        raise ValueError("serving cells must be active")
    rx_lin_mw = np.where(
        active[:, None], 10.0 ** ((tx_power_dbm[:, None] - coupling_db) / 10.0), 0.0
    )
    idx = np.arange(serving.shape[0])
    s = rx_lin_mw[serving, idx]
    interference = rx_lin_mw.sum(axis=0) - s
    noise_mw = 10.0 ** (noise_dbm / 10.0)
    return 10.0 * np.log10(s / (interference + noise_mw))


def ul_sinr_db(
    serving_coupling_db,
    interferer_coupling_db,
    ue_tx_power_dbm: float,
    noise_dbm: float,
):
    """Uplink SINR at a base station for one scheduled user.

    `interferer_coupling_db` holds the coupling losses from the co-scheduled
    users of the *other* active cells to this station (may be empty). No
    uplink power control: every user transmits `ue_tx_power_dbm`.
    """
    s = 10.0 ** ((ue_tx_power_dbm - np.asarray(serving_coupling_db, dtype=float)) / 10.0)
    interferers = np.asarray(interferer_coupling_db, dtype=float)
    i_mw = np.sum(10.0 ** ((ue_tx_power_dbm - interferers) / 10.0), axis=-1) if interferers.size else 0.0
    noise_mw = 10.0 ** (noise_dbm / 10.0)
    return 10.0 * np.log10(s / (i_mw + noise_mw))


@dataclass(frozen=True)
class RateParams:
    """Truncated Shannon link-to-rate mapping."""

    alpha: float = 0.6  # implementation-loss scaling on log2(1 + sinr)
    sinr_min_db: float = -10.0  # below this the link gets nothing
    se_max_bpshz: float = 4.8  # highest MCS ceiling

    def __post_init__(self):
        if self.alpha <= 0.0 or self.se_max_bpshz <= 0.0:
            raise ValueError("alpha and se_max must be positive")


def spectral_efficiency_bpshz(sinr_db, params: RateParams = RateParams()):
    """Attenuated-and-truncated Shannon bound, bps/Hz."""
    s = np.asarray(sinr_db, dtype=float)
    se = params.alpha * np.log2(1.0 + 10.0 ** (s / 10.0))
    return np.where(s < params.sinr_min_db, 0.0, np.minimum(se, params.se_max_bpshz))


def round_robin_throughput_bps(
    sinr_db: np.ndarray,
    serving: np.ndarray,
    n_cells: int,
    bandwidth_hz: float,
    params: RateParams = RateParams(),
):
    """Full-buffer round robin: each user gets an equal time share of its cell.

    Returns (cell_bps, user_bps, users_per_cell); cell throughput is the sum
    of its users' rates, cells with no users carry zero.
    """
    counts = np.bincount(serving, minlength=n_cells)
    se = spectral_efficiency_bpshz(sinr_db, params)
    user_bps = bandwidth_hz * se / counts[serving]
    cell_bps = np.bincount(serving, weights=user_bps, minlength=n_cells)
    return cell_bps, user_bps, counts
