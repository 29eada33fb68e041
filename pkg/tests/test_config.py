"""Tests for experiment configuration parsing, overrides and presets."""

import math

import pytest

from vphermite.core.config import (
    apply_overrides,
    list_presets,
    load_config,
    load_preset,
    parse_config,
    parse_override_value,
    preset_description,
)
from vphermite.core.exceptions import ConfigurationError
from vphermite.core.models import CaseId, ExperimentConfig

MINIMAL = """
[case]
id = "near_equilibrium"

[scheme]
lambda = 0.1
dt = 0.01
t_final = 1.0
"""

EXPECTED_PRESETS = {
    "ap_sweep",
    "convergence_alpha_half",
    "convergence_alpha_one",
    "fig10",
    "oscillatory_perturbation",
    "smooth_perturbation",
    "temporal_order",
    "two_stream",
}


def test_minimal_config_fills_defaults():
    """Test that omitted settings take their documented defaults."""
    config = parse_config(MINIMAL)

    assert isinstance(config, ExperimentConfig)
    assert config.schema_version == 1
    assert config.case.id is CaseId.NEAR_EQUILIBRIUM
    assert config.case.delta == 0.1
    assert config.case.k_x == pytest.approx(math.pi / 10.0)
    assert config.case.domain == (-10.0, 10.0)
    assert config.scheme.lam == 0.1
    assert config.scheme.order == 2
    assert config.scheme.n_hermite == 32
    assert config.scheme.n_cells == 129
    assert config.scheme.T0 == 1.0
    assert config.sweep_lambdas == [0.1]
    assert config.sweep_alphas == [0.0]
    assert config.output.snapshot_times == []


def test_two_stream_defaults():
    """Test the case-specific defaults of the two-stream setup."""
    config = parse_config(MINIMAL, ["case.id=two_stream"])
    assert config.case.delta == 0.01
    assert config.case.k_x == pytest.approx(math.pi / 6.0)
    assert config.case.domain == (-6.0, 6.0)


def test_even_cell_count_rejected():
    """Test the checkerboard explanation for even N_x."""
    with pytest.raises(ConfigurationError, match="checkerboard") as excinfo:
        parse_config(MINIMAL, ["scheme.n_cells=64"])
    assert "scheme.n_cells" in str(excinfo.value)


def test_unknown_keys_and_bad_values_rejected():
    """Test strict validation with dotted error paths."""
    with pytest.raises(ConfigurationError, match="scheme.gamma"):
        parse_config(MINIMAL, ["scheme.gamma=0.3"])
    with pytest.raises(ConfigurationError, match="scheme.order"):
        parse_config(MINIMAL, ["scheme.order=3"])
    with pytest.raises(ConfigurationError, match="case.alpha"):
        parse_config(MINIMAL, ["case.alpha=1.5"])
    with pytest.raises(ConfigurationError, match="schema_version"):
        parse_config("schema_version = 2\n" + MINIMAL)
    with pytest.raises(ConfigurationError, match="Malformed"):
        parse_config("[case\nid = 1")


def test_override_values_are_typed():
    """Test TOML typing of override values with a bare-string fallback."""
    assert parse_override_value("0.05") == 0.05
    assert parse_override_value("3") == 3
    assert parse_override_value("true") is True
    assert parse_override_value("[1.0, 0.5]") == [1.0, 0.5]
    assert parse_override_value("two_stream") == "two_stream"
    assert parse_override_value('"quoted"') == "quoted"


def test_apply_overrides_creates_sections_without_mutating_input():
    """Test nested assignment on a copy of the raw mapping."""
    raw = {"scheme": {"dt": 0.1}}
    patched = apply_overrides(raw, ["scheme.dt=0.05", "sweep.lambdas=[1.0, 0.1]"])
    assert patched == {"scheme": {"dt": 0.05}, "sweep": {"lambdas": [1.0, 0.1]}}
    assert raw == {"scheme": {"dt": 0.1}}

    with pytest.raises(ConfigurationError, match="key.path=value"):
        apply_overrides(raw, ["scheme.dt"])
    with pytest.raises(ConfigurationError, match="not a section"):
        apply_overrides(raw, ["scheme.dt.value=1"])


def test_lambda_alias_round_trips():
    """Test that dumping by alias gives back the TOML key name."""
    config = parse_config(MINIMAL)
    dumped = config.model_dump(by_alias=True)
    assert dumped["scheme"]["lambda"] == 0.1
    assert ExperimentConfig.model_validate(dumped) == config


def test_all_shipped_presets_parse():
    """Test that every preset validates and carries a description."""
    names = list_presets()
    assert EXPECTED_PRESETS <= set(names)
    for name in names:
        config = load_preset(name)
        assert config.name == name
        assert preset_description(name)


@pytest.mark.parametrize("name", ["smooth_perturbation", "oscillatory_perturbation", "two_stream"])
def test_single_run_presets_declare_no_sweep(name):
    """Test that presets meant for `run` leave every sweep list empty."""
    sweep = load_preset(name).sweep
    assert sweep.lambdas == []
    assert sweep.alphas == []
    assert sweep.dts == []


def test_sweep_alphas_fall_back_to_case_alpha():
    """Test that an empty alpha list sweeps the case alpha only."""
    config = load_preset("convergence_alpha_half")
    assert config.sweep_alphas == [0.5]

    config = load_preset("fig10", ["sweep.alphas=[0.0, 0.5, 1.0]"])
    assert config.sweep_alphas == [0.0, 0.5, 1.0]
    with pytest.raises(ConfigurationError, match="alpha"):
        load_preset("fig10", ["sweep.alphas=[1.5]"])


def test_fig10_preset_values():
    """Test the near-equilibrium convergence preset."""
    config = load_preset("fig10")
    assert config.case.id is CaseId.NEAR_EQUILIBRIUM
    assert config.case.delta == 0.1
    assert config.case.alpha == 0.0
    assert config.case.k_x == pytest.approx(math.pi / 10.0)
    assert config.case.domain == (-10.0, 10.0)
    assert config.sweep_lambdas == [0.32, 0.18, 0.1, 0.056, 0.032]
    assert config.scheme.n_cells % 2 == 1


def test_load_config_sources(tmp_path):
    """Test file and preset loading and the exactly-one-source rule."""
    path = tmp_path / "run.toml"
    path.write_text(MINIMAL)

    assert load_config(path).scheme.dt == 0.01
    assert load_config(path, overrides=["scheme.dt=0.02"]).scheme.dt == 0.02
    assert load_config(preset="two_stream").case.id is CaseId.TWO_STREAM

    with pytest.raises(ConfigurationError, match="exactly one"):
        load_config()
    with pytest.raises(ConfigurationError, match="exactly one"):
        load_config(path, "fig10")
    with pytest.raises(ConfigurationError, match="Unknown preset"):
        load_config(preset="no_such_preset")
    with pytest.raises(ConfigurationError, match="Cannot read"):
        load_config(tmp_path / "missing.toml")
