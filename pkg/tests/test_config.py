import pytest

from hibsim.config import (
    ConfigError,
    ScenarioConfig,
    config_from_dict,
    config_to_dict,
    dumps_config,
    load_config,
    save_config,
    validate_band,
    validate_config,
)


def test_default_values(default_cfg):
    assert default_cfg.carrier.frequency_hz == 2.0e9
    assert default_cfg.carrier.bandwidth_hz == 20e6
    assert default_cfg.hibs.altitude_m == 20_000.0
    assert default_cfg.hibs.footprint_diameter_m == 10_000.0
    assert default_cfg.hibs.n_rings == 2
    assert default_cfg.hibs.service_area_km2 == 4_000.0
    assert default_cfg.hibs.tx_power_dbm == 49.0
    assert default_cfg.hibs.peak_gain_dbi == 16.5
    assert default_cfg.hibs.pattern_sidelobes == "floor"
    assert default_cfg.hibs.noise_figure_db == 5.0
    assert default_cfg.terrestrial.n_sites == 12
    assert default_cfg.terrestrial.isd_m == 9_000.0
    assert default_cfg.terrestrial.site_height_m == 30.0
    assert default_cfg.terrestrial.sector_rotation_deg == 60.0
    assert default_cfg.terrestrial.downtilt_deg == 3.0
    assert default_cfg.terrestrial.peak_gain_dbi == 17.0
    assert default_cfg.ue.height_m == 1.5
    assert default_cfg.ue.tx_power_dbm == 23.0
    assert default_cfg.ue.antenna_gain_dbi == 0.0
    assert default_cfg.ue.noise_figure_db == 9.0
    assert default_cfg.channel.shadowing is True
    assert default_cfg.scheduler.ul_interference == "full_load"
    assert default_cfg.scheduler.overlay_cochannel_beams is True
    assert default_cfg.mobility.decision_signal == "longterm"
    assert default_cfg.mobility.time_to_trigger_s == 0.64
    assert default_cfg.mobility.measurement_period_s == 0.2
    assert default_cfg.band_check.enabled is True
    assert default_cfg.band_check.region == "R1"
    validate_config(default_cfg)  # defaults validate cleanly


def test_from_dict_empty_is_default(default_cfg):
    assert config_from_dict({}) == default_cfg
    assert config_from_dict(None) == default_cfg


def test_roundtrip_default(default_cfg):
    assert config_from_dict(config_to_dict(default_cfg)) == default_cfg


def test_roundtrip_customized():
    cfg = config_from_dict(
        {
            "carrier": {"frequency_hz": 2.14e9, "bandwidth_hz": 10e6},
            "hibs": {"pattern_sidelobes": "bessel", "n_rings": 1},
            "terrestrial": {"sector_rotation_deg": 30.0, "n_sites": 6},
            "ue": {"height_m": 2.0},
            "channel": {
                "shadowing": False,
                "ntn": {
                    "p_los_table": {10: 0.3, 50: 0.8, 90: 1.0},
                    "sigma_los_db": 5.0,
                    "los_only": True,
                },
                "rma": {"building_height_m": 10.0},
            },
            "rate": {"alpha": 0.75},
            "scheduler": {
                "ul_interference": "coscheduled",
                "overlay_cochannel_beams": False,
            },
            "mobility": {"decision_signal": "shadowed", "n_inbound": 10},
            "band_check": {"enabled": False, "region": "R2"},
        }
    )
    assert cfg.channel.ntn.p_los_table == ((10.0, 0.3), (50.0, 0.8), (90.0, 1.0))
    assert cfg.channel.ntn.los_only is True
    assert cfg.hibs.pattern_sidelobes == "bessel"
    assert config_from_dict(config_to_dict(cfg)) == cfg


def test_yaml_file_roundtrip(tmp_path, default_cfg):
    path = tmp_path / "scenario.yaml"
    save_config(default_cfg, str(path))
    assert load_config(str(path)) == default_cfg
    # dumps output is plain YAML that parses back to the same dict
    assert "frequency_hz" in dumps_config(default_cfg)


def test_empty_yaml_file_gives_defaults(tmp_path, default_cfg):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    assert load_config(str(path)) == default_cfg


def test_p_los_table_accepts_list_of_pairs():
    cfg = config_from_dict(
        {"channel": {"ntn": {"p_los_table": [[90, 1.0], [10, 0.25]]}}}
    )
    # pairs get sorted by elevation
    assert cfg.channel.ntn.p_los_table == ((10.0, 0.25), (90.0, 1.0))


def test_p_los_table_rejects_scalar():
    with pytest.raises(ConfigError, match="p_los_table"):
        config_from_dict({"channel": {"ntn": {"p_los_table": 0.5}}})


def test_rejects_unknown_key():
    with pytest.raises(ConfigError, match="unknown config key 'scenario.carier'"):
        config_from_dict({"carier": {"frequency_hz": 2e9}})
    with pytest.raises(ConfigError, match="scenario.hibs.altitude"):
        config_from_dict({"hibs": {"altitude": 20e3}})


@pytest.mark.parametrize(
    "data, key",
    [
        ({"carrier": {"bandwidth_hz": -1.0}}, "carrier.bandwidth_hz"),
        ({"carrier": {"frequency_hz": 0.0}}, "carrier.frequency_hz"),
        ({"hibs": {"n_rings": -1}}, "hibs.n_rings"),
        ({"hibs": {"pattern_sidelobes": "airy"}}, "hibs.pattern_sidelobes"),
        ({"hibs": {"footprint_diameter_m": 100e3}}, "hibs.footprint_diameter_m"),
        ({"terrestrial": {"n_sites": 1}}, "terrestrial.n_sites"),
        ({"ue": {"height_m": 40.0}}, "ue.height_m"),
        ({"scheduler": {"ul_interference": "mute"}}, "scheduler.ul_interference"),
        ({"mobility": {"decision_signal": "raw"}}, "mobility.decision_signal"),
        ({"mobility": {"tn_spawn_near": 0.9}}, "mobility.tn_spawn_near"),
        (
            {"mobility": {"tn_spawn_near": 1.4, "tn_spawn_far": 1.2}},
            "mobility.tn_spawn_far",
        ),
        (
            {"mobility": {"time_step_s": 0.5, "measurement_period_s": 0.2}},
            "mobility.measurement_period_s",
        ),
        (
            {"mobility": {"time_to_trigger_s": 0.1}},
            "mobility.time_to_trigger_s",
        ),
        ({"band_check": {"region": "R4"}}, "band_check.region"),
    ],
)
def test_validation_errors_name_the_key(data, key):
    with pytest.raises(ConfigError, match=key.replace(".", r"\.")):
        config_from_dict(data)


def test_ue_height_must_be_below_site_height():
    with pytest.raises(ConfigError, match="below the site height"):
        config_from_dict({"ue": {"height_m": 31.0}})


@pytest.mark.parametrize(
    "data, fragment",
    [
        ({"carrier": {"frequency_hz": "fast"}}, "expected a number"),
        ({"hibs": {"n_rings": 2.5}}, "expected an integer"),
        ({"channel": {"shadowing": "yes"}}, "expected true/false"),
        ({"hibs": {"pattern_sidelobes": 3}}, "expected a string"),
        ({"carrier": "wideband"}, "expected a mapping"),
    ],
)
def test_type_errors(data, fragment):
    with pytest.raises(ConfigError, match=fragment):
        config_from_dict(data)


def test_nested_param_validation_becomes_config_error():
    # NtnParams raises ValueError; the loader wraps it with the key path
    with pytest.raises(ConfigError, match="scenario.channel.ntn"):
        config_from_dict({"channel": {"ntn": {"sigma_los_db": -1.0}}})


def test_yaml_parse_error_reports_line(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("carrier:\n  frequency_hz: [1, 2\n")
    with pytest.raises(ConfigError, match="YAML parse error"):
        load_config(str(path))


def test_yaml_top_level_must_be_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- a\n- b\n")
    with pytest.raises(ConfigError, match="top level must be a mapping"):
        load_config(str(path))


def test_missing_file():
    with pytest.raises(ConfigError, match="cannot read config file"):
        load_config("/nonexistent/scenario.yaml")


def test_validate_band_inside_dl_identification():
    assert validate_band(2.14e9, "R1", "DL") is None
    assert validate_band(2.17e9, "R3", "DL") is None
    assert validate_band(1.9e9, "R1", "UL") is None
    assert validate_band(2.02e9, "R1", "UL") is None
    # lowercase region accepted
    assert validate_band(2.14e9, "r1", "dl") is None


def test_validate_band_region_differences():
    # 2165 MHz: inside the R1/R3 downlink range, above the R2 one
    assert validate_band(2.165e9, "R1", "DL") is None
    msg = validate_band(2.165e9, "R2", "DL")
    assert msg is not None and "2110-2160" in msg
    # 2010-2025 MHz uplink exists in R1/R3 only
    assert validate_band(2.02e9, "R2", "UL") is not None


def test_validate_band_candidate_band_warning():
    msg = validate_band(700e6, "R1", "DL")
    assert msg is not None and "WRC-23" in msg and "694-960" in msg


def test_validate_band_default_carrier_warns_with_nearest():
    msg = validate_band(2.0e9, "R1", "DL")
    assert msg is not None
    assert "2000 MHz" in msg
    assert "2110-2170" in msg


def test_validate_band_bad_inputs():
    with pytest.raises(ConfigError, match="band_check.region"):
        validate_band(2.14e9, "R9", "DL")
    with pytest.raises(ValueError, match="direction"):
        validate_band(2.14e9, "R1", "sideways")
