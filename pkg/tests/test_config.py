import pytest

from nlspec.config import DEFAULTS, RunConfig
from nlspec.errors import ConfigError
from nlspec.spectra import BoundaryCondition


def test_defaults():
    c = RunConfig()
    assert c.params.mu == 1.0 and c.params.lam == 1.0
    assert c.domain.kind == "disk" and c.bc is BoundaryCondition.DIRICHLET
    assert c.seed == DEFAULTS["seed"]
    assert c.tau is None
    assert c.section("symbol_verify")["samples"] == 1000


def test_merge_keeps_sibling_defaults():
    c = RunConfig({"lame": {"lambda": 0.5}, "symbol_verify": {"samples": 10}})
    assert c.params.mu == 1.0 and c.params.lam == 0.5
    assert c.section("symbol_verify")["dims"] == [2, 3, 4]


def test_load_yaml(tmp_path):
    p = tmp_path / "run.yaml"
    p.write_text("lame: {mu: 2, lambda: -1}\ndomain: {kind: rectangle, dims: [2, 1]}\n"
                 "bc: neumann\nsolver: {grid_n: 24}\nsymbol_verify: {tau: [0, 3]}\n")
    c = RunConfig.load(p)
    assert c.params.mu == 2.0 and c.params.lam == -1.0
    assert c.domain.volume == 2.0
    assert c.bc is BoundaryCondition.NEUMANN
    assert c.tau == 3j


def test_empty_file(tmp_path):
    p = tmp_path / "empty.yaml"
    p.write_text("")
    assert RunConfig.load(p).domain.kind == "disk"


@pytest.mark.parametrize("data", [
    {"lame": {"mu": 1, "lamda": 1}},
    {"solvr": {}},
    {"hear": {"tolerance": 0.05, "extra": 1}},
    {"output": {"directory": "x"}},
])
def test_unknown_keys_fail(data):
    with pytest.raises(ConfigError, match="unknown key"):
        RunConfig(data)


@pytest.mark.parametrize("data", [
    {"lame": {"mu": 0}},
    {"lame": {"mu": 1, "lambda": -2}},
    {"lame": {"mu": "one"}},
    {"lame": {"mu": True}},
    {"domain": {"kind": "triangle", "dims": [1]}},
    {"domain": {"kind": "rectangle", "dims": [1]}},
    {"domain": {"kind": "disk", "dims": [-1]}},
    {"bc": "robin"},
    {"bc": "neumann"},
    {"solver": {"grid_n": 8}},
    {"solver": {"refine": [64]}},
    {"solver": {"tau_max": 0}},
    {"trace": {"t_min": 1e-3}},
    {"trace": {"t_min": 1e-2, "t_max": 1e-3}},
    {"trace": {"samples": 4}},
    {"hear": {"tolerance": 0.6}},
    {"symbol_verify": {"fields": ["torus"]}},
    {"symbol_verify": {"tau": [1, 2, 3]}},
    {"output": {"formats": ["pdf"]}},
    {"seed": 1.5},
    [1, 2],
])
def test_bad_values_fail(data):
    with pytest.raises(ConfigError):
        RunConfig(data)


def test_unreadable_and_invalid_yaml(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(tmp_path / "missing.yaml")
    p = tmp_path / "bad.yaml"
    p.write_text("lame: {mu: 1\n")
    with pytest.raises(ConfigError, match="invalid YAML"):
        RunConfig.load(p)
