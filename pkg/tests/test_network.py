import dataclasses
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hibsim import engine, geometry, network
from hibsim.antenna import SectorPattern, make_aperture_pattern
from hibsim.channel import NtnParams, RmaParams, noise_power_dbm
from hibsim.config import ScenarioConfig
from hibsim.network import (
    CellKind,
    RateParams,
    active_cells,
    associate,
    build_hibs_cells,
    build_tn_cells,
    coupling_loss_matrix,
    dl_sinr_db,
    round_robin_throughput_bps,
    spectral_efficiency_bpshz,
    ul_sinr_db,
)

BEAMWIDTH_DEG = 2.0 * math.degrees(math.atan(0.25))


def _hibs_cells():
    layout = geometry.build_hibs_layout()
    return build_hibs_cells(layout, make_aperture_pattern(BEAMWIDTH_DEG), 49.0, 5.0)


def test_build_hibs_cells_structure():
    cells = _hibs_cells()
    assert len(cells) == 19
    assert all(c.kind is CellKind.HIBS_BEAM for c in cells)
    assert all(np.array_equal(c.tx_position, cells[0].tx_position) for c in cells)
    assert_allclose([np.linalg.norm(c.boresight) for c in cells], 1.0)
    assert [c.cell_id for c in cells] == list(range(19))
    assert [c.ring for c in cells] == [0] + [1] * 6 + [2] * 12
    # center beam points straight down
    assert_allclose(cells[0].boresight, [0.0, 0.0, -1.0])


def test_build_tn_cells_structure():
    layout = geometry.build_tn_ring_layout(sector_rotation_deg=60.0)
    cells = build_tn_cells(layout, SectorPattern(), 49.0, 5.0, first_cell_id=1)
    assert len(cells) == 36
    assert all(c.kind is CellKind.TN_SECTOR for c in cells)
    assert [c.cell_id for c in cells] == list(range(1, 37))
    assert_allclose([c.azimuth_deg for c in cells[:3]], [60.0, 180.0, 300.0])
    assert_allclose(cells[0].tx_position[2], 30.0)


def test_hibs_link_geometry_nadir():
    cells = _hibs_cells()
    users = np.array([[0.0, 0.0, 0.0], [20_000.0, 0.0, 0.0]])
    slant, elev, off_axis = network.hibs_link_geometry(cells[0], users)
    assert_allclose(slant, [20_000.0, 20_000.0 * math.sqrt(2.0)])
    assert_allclose(elev, [90.0, 45.0])
    assert_allclose(off_axis, [0.0, 45.0])


def test_tn_link_geometry():
    layout = geometry.build_tn_ring_layout()
    cells = build_tn_cells(layout, SectorPattern(), 49.0, 5.0)
    site = cells[0].tx_position  # azimuth 0 sector
    user = np.array([[site[0] + 1_000.0, site[1], 1.5]])
    d2d, az_off, depression = network.tn_link_geometry(cells[0], user)
    assert_allclose(d2d, 1_000.0)
    assert_allclose(az_off, 0.0)
    assert_allclose(depression, math.degrees(math.atan2(28.5, 1_000.0)))


def test_associate_single_cell():
    coupling = np.array([[100.0, 120.0, 90.0]])
    assert np.array_equal(associate(coupling), [0, 0, 0])


def test_associate_tie_break_lowest_id():
    coupling = np.array([[100.0], [100.0], [99.0]])
    assert associate(coupling)[0] == 2
    coupling = np.array([[100.0], [100.0]])
    assert associate(coupling)[0] == 0


def test_associate_center_user_gets_platform_beam(default_cfg):
    scenario = engine.build_combined_scenario(default_cfg)
    users = np.array([[0.0, 0.0, 1.5]])
    for seed in (1, 2, 3):
        rng = engine.derive_rng(seed, 7)
        budgets = engine.drop_budgets(scenario, users, rng)
        serving = associate(budgets.coupling_db[: scenario.n_cells])
        assert scenario.cells[serving[0]].kind is CellKind.HIBS_BEAM


def test_associate_user_next_to_site_gets_facing_sector():
    cfg = ScenarioConfig()
    cfg = dataclasses.replace(
        cfg, channel=dataclasses.replace(cfg.channel, shadowing=False)
    )
    scenario = engine.build_combined_scenario(cfg)
    # site 0 sector boresights point at 60/180/300 deg; stand 300 m along 60 deg
    site = scenario.cells[1].tx_position
    az = math.radians(60.0)
    users = np.array(
        [[site[0] + 300.0 * math.cos(az), site[1] + 300.0 * math.sin(az), 1.5]]
    )
    for seed in (1, 2, 3):
        rng = engine.derive_rng(seed, 8)
        budgets = engine.drop_budgets(scenario, users, rng)
        serving = int(associate(budgets.coupling_db[: scenario.n_cells])[0])
        assert serving == 1
        assert scenario.cells[1].azimuth_deg == 60.0


def test_coupling_loss_matrix_shapes_and_determinism():
    cells = _hibs_cells()
    users = geometry.drop_users(40, np.random.default_rng(2), 35_682.0)
    a = coupling_loss_matrix(
        cells, users, 2.0e9, 0.0, NtnParams(), RmaParams(), np.random.default_rng(5)
    )
    b = coupling_loss_matrix(
        cells, users, 2.0e9, 0.0, NtnParams(), RmaParams(), np.random.default_rng(5)
    )
    assert a.coupling_db.shape == (19, 40)
    assert np.array_equal(a.coupling_db, b.coupling_db)
    assert np.array_equal(a.los, b.los)
    assert_allclose(
        a.coupling_db,
        a.pathloss_db + a.shadow_db + a.clutter_db - a.g_tx_dbi - 0.0,
    )


def test_coupling_loss_center_user_deterministic_budget():
    # nadir user: elevation 90 -> LOS certain, no shadow requested -> 108 dB chain
    cells = _hibs_cells()
    users = np.array([[0.0, 0.0, 1.5]])
    budgets = coupling_loss_matrix(
        cells,
        users,
        2.0e9,
        0.0,
        NtnParams(),
        RmaParams(),
        np.random.default_rng(0),
        shadowing=False,
    )
    assert_allclose(budgets.coupling_db[0, 0], 108.0, atol=0.2)
    assert budgets.los.all()
    assert np.all(budgets.clutter_db == 0.0)


def test_active_cells():
    serving = np.array([0, 0, 3])
    assert np.array_equal(
        active_cells(serving, 5), [True, False, False, True, False]
    )


def test_dl_sinr_lone_active_cell_is_snr():
    coupling = np.array([[108.0], [115.0]])
    serving = np.array([0])
    tx = np.array([49.0, 49.0])
    active = np.array([True, False])
    noise_dbm = noise_power_dbm(20e6, 9.0)
    sinr = dl_sinr_db(coupling, serving, tx, active, noise_dbm)
    assert_allclose(sinr, 49.0 - 108.0 - noise_dbm)


def test_dl_sinr_requires_active_serving():
    coupling = np.array([[100.0], [110.0]])
    with pytest.raises(ValueError, match="active"):
        dl_sinr_db(
            coupling,
            np.array([0]),
            np.array([49.0, 49.0]),
            np.array([False, True]),
            -92.0,
        )


def test_dl_sinr_interference_lowers_sinr():
    coupling = np.array([[100.0, 110.0], [110.0, 100.0]])
    serving = np.array([0, 1])
    tx = np.array([49.0, 49.0])
    noise_dbm = -92.0
    both = dl_sinr_db(coupling, serving, tx, np.array([True, True]), noise_dbm)
    # with 10 dB coupling separation, SINR is interference-dominated near 10 dB
    assert np.all(both < 49.0 - 100.0 - noise_dbm)
    assert_allclose(both, [10.0, 10.0], atol=0.5)


def test_ul_sinr_lone_user_snr():
    # 23 dBm - 108 dB coupling against a -95.99 dBm BS noise floor
    noise = noise_power_dbm(20e6, 5.0)
    sinr = ul_sinr_db(108.0, np.empty(0), 23.0, noise)
    assert_allclose(sinr, 10.99, atol=0.01)


def test_ul_sinr_with_interferers():
    noise = noise_power_dbm(20e6, 5.0)
    alone = ul_sinr_db(108.0, np.empty(0), 23.0, noise)
    crowded = ul_sinr_db(108.0, np.array([110.0, 120.0]), 23.0, noise)
    assert crowded < alone
    # interferer at equal coupling drives SINR to ~0 dB
    equal = ul_sinr_db(108.0, np.array([108.0]), 23.0, noise)
    assert_allclose(equal, 0.0, atol=0.35)


def test_rate_params_validation():
    with pytest.raises(ValueError, match="positive"):
        RateParams(alpha=0.0)
    with pytest.raises(ValueError, match="positive"):
        RateParams(se_max_bpshz=-1.0)


def test_spectral_efficiency_truncation_and_cap():
    params = RateParams()
    assert spectral_efficiency_bpshz(-10.001, params) == 0.0
    assert spectral_efficiency_bpshz(-30.0, params) == 0.0
    assert spectral_efficiency_bpshz(60.0, params) == 4.8
    assert_allclose(spectral_efficiency_bpshz(0.0, params), 0.6)
    # just above the cutoff the mapping is alpha*log2(1 + sinr)
    assert_allclose(
        spectral_efficiency_bpshz(-10.0, params), 0.6 * math.log2(1.1), rtol=1e-12
    )


def test_spectral_efficiency_monotone():
    sinr = np.linspace(-9.9, 40.0, 500)
    se = spectral_efficiency_bpshz(sinr)
    assert np.all(np.diff(se) >= 0.0)


def test_round_robin_single_user_gets_whole_cell():
    # SE(sinr) * bandwidth for a lone user: pick sinr giving SE exactly 1
    sinr_for_se1 = 10.0 * math.log10(2.0 ** (1.0 / 0.6) - 1.0)
    cell_bps, user_bps, counts = round_robin_throughput_bps(
        np.array([sinr_for_se1]), np.array([0]), 3, 20e6, RateParams()
    )
    assert_allclose(user_bps, [20e6], rtol=1e-12)
    assert_allclose(cell_bps, [20e6, 0.0, 0.0], rtol=1e-12)
    assert np.array_equal(counts, [1, 0, 0])


def test_round_robin_shares_time_equally():
    sinr = np.array([20.0, 20.0, 20.0, 0.0])
    serving = np.array([0, 0, 0, 1])
    cell_bps, user_bps, counts = round_robin_throughput_bps(
        sinr, serving, 2, 20e6, RateParams()
    )
    assert_allclose(user_bps[:3], user_bps[0])
    assert_allclose(cell_bps[0], user_bps[:3].sum())
    assert_allclose(cell_bps[1], user_bps[3])
    assert np.array_equal(counts, [3, 1])


def test_round_robin_conserves_cell_throughput():
    rng = np.random.default_rng(21)
    for _ in range(50):
        n_cells = int(rng.integers(1, 8))
        n_users = int(rng.integers(1, 40))
        serving = rng.integers(0, n_cells, size=n_users)
        sinr = rng.uniform(-20.0, 30.0, size=n_users)
        cell_bps, user_bps, _ = round_robin_throughput_bps(
            sinr, serving, n_cells, 20e6
        )
        recon = np.bincount(serving, weights=user_bps, minlength=n_cells)
        assert_allclose(cell_bps, recon, rtol=1e-12, atol=1e-6)


def test_association_equals_max_received_power():
    # argmin coupling == argmax rx power when all tx powers are equal
    rng = np.random.default_rng(22)
    coupling = rng.uniform(80.0, 160.0, size=(7, 30))
    serving = associate(coupling)
    rx_dbm = 49.0 - coupling
    assert np.array_equal(serving, np.argmax(rx_dbm, axis=0))


def test_dl_sinr_single_user_throughput_identity():
    # one user in the system: SINR = SNR and throughput = bw * SE(SNR)
    coupling = np.array([[105.0]])
    serving = np.array([0])
    noise_dbm = noise_power_dbm(20e6, 9.0)
    sinr = dl_sinr_db(coupling, serving, np.array([49.0]), np.array([True]), noise_dbm)
    snr = 49.0 - 105.0 - noise_dbm
    assert_allclose(sinr, [snr])
    _, user_bps, _ = round_robin_throughput_bps(sinr, serving, 1, 20e6)
    assert_allclose(user_bps, 20e6 * spectral_efficiency_bpshz(snr))
