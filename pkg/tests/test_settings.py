import pytest
import yaml
from pydantic import ValidationError

from src.settings.loader import load_settings
from src.settings.settings_model import AppSettings, OptimizerConfig, PhantomSettings, WedgeSettings


def test_optimizer_defaults():
    cfg = OptimizerConfig()
    assert cfg.l_max == 42
    assert cfg.fixed_bands == [7, 12, 33]
    assert cfg.band_thresholds == [0.5, 0.25, 0.05]
    assert cfg.shift_radius == 4 and cfg.shift_step == 2
    assert cfg.max_candidates == 20


@pytest.mark.parametrize(
    "overrides",
    [
        {"fixed_bands": [12, 7]},
        {"fixed_bands": []},
        {"fixed_bands": [4, 50]},
        {"band_thresholds": [0.2, 0.5]},
        {"band_thresholds": [1.5]},
        {"seed_grid_step": 0.0},
        {"unknown_option": 1},
    ],
)
def test_optimizer_rejects_invalid_values(overrides):
    with pytest.raises(ValidationError):
        OptimizerConfig(**overrides)


def test_energy_ratio_bands_are_allowed():
    cfg = OptimizerConfig(l_max=10, fixed_bands=None)
    assert cfg.fixed_bands is None


def test_only_philox_generator():
    assert PhantomSettings(generator="Philox").generator == "philox"
    with pytest.raises(ValidationError):
        PhantomSettings(generator="mt19937")


def test_wedge_angle_range():
    assert WedgeSettings().theta_max == 60.0
    with pytest.raises(ValidationError):
        WedgeSettings(theta_max=120.0)


def test_settings_are_frozen():
    settings = AppSettings()
    with pytest.raises(ValidationError):
        settings.optimizer.l_max = 3


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_settings(tmp_path / "absent.yaml")


def test_yaml_overrides(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump({"optimizer": {"l_max": 12, "fixed_bands": [4, 8, 12]}, "wedge": {"theta_max": 45.0}}))
    settings = load_settings(path)
    assert settings.optimizer.l_max == 12
    assert settings.optimizer.fixed_bands == [4, 8, 12]
    assert settings.wedge.theta_max == 45.0
    assert settings.phantom.generator == "philox"


def test_yaml_must_be_a_mapping(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("- just\n- a list\n")
    with pytest.raises(ValueError):
        load_settings(path)
