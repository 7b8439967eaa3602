import numpy as np
import pytest
from hypothesis import given, strategies as st

from vortexpacket.berry import P_MIN
from vortexpacket.config import (
    SCENARIO_KINDS, ConfigError, FieldBlock, IntegratorBlock, PacketBlock, RunConfig, ScenarioBlock,
    UnitsBlock, parse_config, serialize_config, with_block,
)


def test_minimal_config_fills_defaults():
    cfg = parse_config(b'field.type = "free"\npacket.l = 1\n')
    assert cfg.packet.l == 1
    assert cfg.integrator == IntegratorBlock()
    assert cfg.units == UnitsBlock()
    assert cfg.seed == 0


def test_integer_required_message():
    with pytest.raises(ConfigError, match="integer required at packet.l") as info:
        parse_config("packet.l = 1.5")
    assert info.value.key == "packet.l" and info.value.line == 1


@pytest.mark.parametrize("text,key", [
    ("packet.colour = 1", "packet.colour"),
    ("nosection = 1", "nosection"),
    ('field.type = "magnetic"', "field.type"),
    ("field.vector = [1, 2]", "field.vector"),
    ("integrator.rtol = 1e-20", "integrator.rtol"),
    ("scenario.grid_n = 100", "scenario.grid_n"),
    ("packet.p0 = [0, 0, 0]", "packet.p0"),
    ("units.hbar = -1.0", "units.hbar"),
    ("packet.waist = 0.0", "packet.waist"),
    ("scenario.l_values = []", "scenario.l_values"),
    ("integrator.t_final = nan", "integrator.t_final"),
])
def test_validation_names_key(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key
    assert key in str(info.value)


def test_syntax_errors_name_line():
    with pytest.raises(ConfigError) as info:
        parse_config("packet.l = 1\n\njust words\n")
    assert info.value.line == 3
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("packet.l = 1\npacket.l = 2")
    with pytest.raises(ConfigError, match="cannot parse"):
        parse_config("packet.l = [1,")
    with pytest.raises(ConfigError):
        parse_config(b"\xff\xfe")


def test_comments_and_literals():
    cfg = parse_config('''
        # a comment
        seed = 11
        field.type = "uniform_b"   # trailing comment
        field.vector = [0, 0, 1]
        packet.waist = null
        packet.oam_model = "precessing"
        integrator.step = 0.01
    ''')
    assert cfg.seed == 11 and cfg.field.vector == (0.0, 0.0, 1.0)
    assert cfg.packet.waist is None and cfg.integrator.step == 0.01
    assert cfg.integrator_config().oam_model == "precessing"


def test_derived_objects():
    cfg = parse_config('field.type = "uniform_e"\nfield.vector = [0, 0.1, 0]\npacket.l = 2\npacket.p0 = [0, 0, 2]')
    fc = cfg.field_config()
    assert fc.kind == "uniform_e" and fc.gauge_label == "coulomb"
    assert cfg.mode_spec().p_central == 2.0
    np.testing.assert_allclose(cfg.initial_state().l_vec, [0, 0, 2])
    assert cfg.zeeman().l_strength == 2


@pytest.mark.parametrize("p0", ["[0, 0, 0]", "[6.697013540007337e-227, 1e-308, 1e-308]", "[1e-10, 0, 0]"])
def test_momentum_at_monopole_rejected(p0):
    with pytest.raises(ConfigError, match="packet.p0"):
        parse_config(f"packet.p0 = {p0}\n".encode())


finite = st.floats(-10, 10, allow_nan=False).filter(lambda x: x != 0)
pos = st.floats(1e-3, 1e3)
v3 = st.tuples(finite, finite, finite)
momentum = v3.filter(lambda v: np.linalg.norm(v) > P_MIN)


@st.composite
def run_configs(draw):
    return RunConfig(
        units=UnitsBlock(draw(pos), draw(pos), draw(finite)),
        field=FieldBlock(draw(st.sampled_from(["free", "uniform_e", "uniform_b"])), draw(v3), draw(st.floats(0, 4))),
        packet=PacketBlock(draw(st.integers(-9, 9)), draw(st.integers(0, 5)), draw(st.integers(0, 5)),
                           draw(st.none() | pos), draw(st.none() | pos), draw(momentum), draw(v3),
                           draw(st.sampled_from(["slaved", "precessing"]))),
        integrator=IntegratorBlock(draw(st.sampled_from(["rk4", "rk45", "dop853"])), draw(st.none() | pos),
                                   draw(st.floats(1e-12, 1e-3)), draw(pos), draw(st.floats(0, 1e4)),
                                   draw(st.integers(1, 50)), draw(st.sampled_from(["exact", "first_order"])),
                                   draw(pos)),
        scenario=ScenarioBlock(draw(st.sampled_from(SCENARIO_KINDS)),
                               tuple(draw(st.lists(st.integers(-5, 5), min_size=1, max_size=7))),
                               tuple(draw(st.lists(st.floats(0, 4), min_size=1, max_size=4))),
                               draw(st.integers(0, 3)), 2 ** draw(st.integers(5, 10)), draw(pos), draw(pos),
                               draw(pos), draw(pos), draw(pos), draw(st.integers(-5, 5)), draw(st.floats(-1.5, 1.5))),
        seed=draw(st.integers(0, 2**31)),
    )


@given(run_configs())
def test_round_trip(cfg):
    text = serialize_config(cfg)
    back = parse_config(text)
    assert back == cfg
    assert serialize_config(back) == text


def test_with_block():
    cfg = with_block(RunConfig(), "packet", l=3)
    assert cfg.packet.l == 3 and RunConfig().packet.l == 0
