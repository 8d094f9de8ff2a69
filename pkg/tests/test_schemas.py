import math
from pathlib import Path

import pytest
from pydantic import ValidationError

from speiser_escape.models import GluedOrderTwo, PlainWp, PowerLift, WpCosh, WpExp, WpPower
from speiser_escape.orbits import ScheduleKind
from speiser_escape.schemas import CoverKind, ModelVariant, RunConfig

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def test_defaults():
    config = RunConfig()
    assert config.variant is ModelVariant.PLAIN
    assert config.window == (10.0, 1000.0)
    assert config.shift is None


def test_parse_flat_text_with_comments():
    config = RunConfig.from_text(
        "# comment line\nvariant = wp_power\nrho = 0.5  # trailing\nopening_lattice = true\n"
    )
    assert config.variant is ModelVariant.WP_POWER
    assert config.rho == 0.5
    assert config.opening_lattice is True


def test_effective_config_reparses_identically():
    config = RunConfig(
        variant=ModelVariant.WP_POWER,
        rho=0.5,
        opening_lattice=True,
        shift_re=0.1,
        shift_im=0.2,
        cover=CoverKind.PAPER,
        escape_radius=1e6,
        levels=64,
        window_min=20.0,
        window_max=500.0,
    )
    assert RunConfig.from_text(config.to_config_text()) == config


def test_unknown_key_rejected():
    with pytest.raises(ValidationError):
        RunConfig.from_text("variant = plain\nbogus_key = 1\n")


@pytest.mark.parametrize(
    "text",
    [
        "rho = -1",
        "r_min = 100\nr_max = 10",
        "window_min = 5",
        "x_min = 1\nx_max = 0",
        "cover = file",
        "shift_re = 0.1",
        "levels = 1",
        "variant = nonsense",
    ],
)
def test_invalid_configs_rejected(text):
    with pytest.raises(ValidationError):
        RunConfig.from_text(text)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        RunConfig.from_file(tmp_path / "absent.conf")


@pytest.mark.parametrize(
    "variant, expected",
    [
        (ModelVariant.PLAIN, PlainWp),
        (ModelVariant.WP_EXP, WpExp),
        (ModelVariant.WP_COSH, WpCosh),
        (ModelVariant.WP_POWER, WpPower),
        (ModelVariant.GLUED, GluedOrderTwo),
    ],
)
def test_build_model(variant, expected):
    assert isinstance(RunConfig(variant=variant).build_model(), expected)


def test_build_power_lift():
    model = RunConfig(variant=ModelVariant.POWER_LIFT, rho=2.5, opening_lattice=True).build_model()
    assert isinstance(model, PowerLift)
    assert model.n == 2
    assert model.base.rho == pytest.approx(1.25)
    assert math.degrees(math.atan2(model.elliptic.lattice.tau.imag, model.elliptic.lattice.tau.real)) == pytest.approx(112.5)


def test_glued_with_lower_lattice():
    config = RunConfig(
        variant=ModelVariant.GLUED,
        omega2_re=0.3,
        omega2_im=1.1,
        lower_omega2_re=0.3,
        lower_omega2_im=-1.1,
        stack_amplitude=0.05,
    )
    model = config.build_model()
    assert model.lower.lattice == config.lattice().conjugate()


def test_shift_is_used():
    model = RunConfig(variant=ModelVariant.WP_EXP, shift_re=0.1, shift_im=0.2).build_model()
    assert model.c == 0.1 + 0.2j


def test_render_settings():
    config = RunConfig(schedule=ScheduleKind.CONSTANT, schedule_base=50.0, resolution=32)
    assert config.build_schedule().radius(7) == 50.0
    assert config.region().shape == (32, 32)


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.conf")), ids=lambda p: p.stem)
def test_shipped_configs_are_valid(path):
    RunConfig.from_file(path).build_model()
