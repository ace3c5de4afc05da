import pytest
from hypothesis import given
from hypothesis import strategies as st

from tritter_qcrb.config import ScenarioConfig, format_config, parse_config
from tritter_qcrb.errors import ConfigError

VALID = "probe = w_state\nN_range = 1,2,3\ngains = 0,0,0\neta = 1\nsigma_mode = fixed 0\nengine = cfpoly\nrel_tol = 1e-8"


def with_line(key, value):
    lines = [l for l in VALID.splitlines() if not l.startswith(key + " ")]
    return "\n".join(lines + [f"{key} = {value}"])


def test_valid():
    cfg = parse_config(VALID)
    assert cfg.probe == "w_state" and cfg.N_range == (1, 2, 3)
    assert cfg.gains == (0, 0, 0) and cfg.eta == 1
    assert (cfg.sigma_mode, cfg.sigma_value) == ("fixed", 0)
    assert cfg.gain_points == [(0, 0, 0)]


def test_comments_and_blank_lines():
    cfg = parse_config("# header\n\n" + VALID.replace("eta = 1", "  # note\neta = 1"))
    assert cfg.eta == 1


def test_optimize_mode():
    assert parse_config(with_line("sigma_mode", "optimize")).sigma_mode == "optimize"


@pytest.mark.parametrize(
    "key,value,fragment",
    [
        ("eta", "0", "eta"),
        ("eta", "1.5", "eta"),
        ("N_range", "0,1", "N_range"),
        ("N_range", "1,x", "integer"),
        ("gains", "0,0", "three"),
        ("gains", "3,0,0", "gains"),
        ("probe", "noon", "probe"),
        ("engine", "gpu", "engine"),
        ("sigma_mode", "best", "sigma_mode"),
        ("rel_tol", "-1", "rel_tol"),
    ],
)
def test_range_errors(key, value, fragment):
    text = with_line(key, value)
    with pytest.raises(ConfigError, match=fragment) as info:
        parse_config(text)
    assert info.value.line == len(text.splitlines())


def test_unknown_key_names_line():
    with pytest.raises(ConfigError, match="line 1: unknown key 'gians'"):
        parse_config("gians = 0,0,0\n" + VALID)


def test_duplicate_key():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(VALID + "\neta = 0.5")


def test_missing_key():
    with pytest.raises(ConfigError, match="missing required key.*rel_tol"):
        parse_config(VALID.replace("rel_tol = 1e-8", ""))


def test_malformed_line():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("probe = w_state\nno equals sign")


def test_r_sweep_replaces_gains():
    cfg = parse_config(VALID + "\nr_sweep = 0,0.5")
    assert cfg.gain_points == [(0, 0, 0), (0.5, 0.5, 0.5)]


def test_overrides_ignore_none():
    cfg = parse_config(VALID)
    assert cfg.with_overrides(engine=None) == cfg
    assert cfg.with_overrides(engine="both").engine == "both"
    with pytest.raises(ConfigError):
        cfg.with_overrides(engine="bogus")


@given(
    st.sampled_from(["w_state", "separable_fock"]),
    st.lists(st.integers(1, 30), min_size=1, max_size=5),
    st.tuples(*[st.floats(-2, 2, allow_nan=False)] * 3),
    st.floats(1e-3, 1.0),
    st.one_of(st.none(), st.floats(-3, 3, allow_nan=False)),
    st.sampled_from(["cfpoly", "focksim", "both"]),
)
def test_format_parse_roundtrip(probe, ns, gains, eta, sigma, engine):
    cfg = ScenarioConfig(
        probe=probe, N_range=tuple(ns), gains=gains, eta=eta,
        sigma_mode="optimize" if sigma is None else "fixed", sigma_value=sigma or 0.0, engine=engine,
    )
    assert parse_config(format_config(cfg)) == cfg
