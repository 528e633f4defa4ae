import pytest

from rbolt.config import ExperimentConfig, load, loads
from rbolt.envs import ConfigError
from rbolt.logic import UndeclaredFluentError

BASE = """
env: {kind: chain, length: 4, max_steps: 20}
bolt:
  specs:
    - {formula: "F a", reward: 2.0}
  shaping: offline
train: {episodes: 10, n: 3}
output: {dir: out, trace: true}
seeds: [1, 2]
verify: {gamma: 0.9, horizon: 12}
"""


def test_load_fields():
    cfg = loads(BASE)
    assert cfg.env == {"kind": "chain", "length": 4, "max_steps": 20}
    assert cfg.bolt.specs[0].reward == 2.0
    assert cfg.train.n == 3 and cfg.output == "out" and cfg.trace
    assert cfg.seeds == [1, 2]
    assert cfg.verify.horizon == 12
    cfg.validate()


def test_roundtrip():
    cfg = loads(BASE)
    again = loads(cfg.dumps())
    assert again == cfg
    assert again.dumps() == cfg.dumps()


def test_builds_env_and_bolt():
    cfg = loads(BASE)
    env = cfg.make_env(seed=3)
    bolt = cfg.make_bolt(env)
    assert bolt.shaping == "offline"
    assert bolt.fluents == {"a", "b", "done"}


def test_string_specs_and_defaults():
    cfg = loads("env: {kind: chain}\nbolt: {specs: ['F b']}\n")
    assert cfg.bolt.specs[0].reward == 1.0 and cfg.bolt.specs[0].logic == "ltlf"
    assert cfg.seeds == [0]


@pytest.mark.parametrize(
    "text",
    [
        "env: {kind: chain}\nbolt: {specs: ['F a']}\nseeds: []\n",
        "env: {kind: chain}\nbolt: {specs: []}\n",
        "env: {kind: chain}\nbolt: {specs: ['F a'], shaping: magic}\n",
        "env: {kind: chain}\nbolt: {specs: ['F a'], scaling: 0}\n",
        "env: {kind: chain}\nbolt: {specs: ['F a'], fluents: [a, zz]}\n",
        "env: {kind: chain}\nbolt: {specs: ['F a']}\ntrain: {epsilon: 2}\n",
        "env: {kind: nope}\nbolt: {specs: ['F a']}\n",
        "env: {kind: chain, wheels: 3}\nbolt: {specs: ['F a']}\n",
    ],
)
def test_invalid_configs(text):
    with pytest.raises(ConfigError):
        loads(text).validate()


@pytest.mark.parametrize(
    "text",
    [
        "env: {kind: chain}\n",
        "env: {kind: chain}\nbolt: {specs: ['F a']}\nextra: 1\n",
        "env: {kind: chain}\nbolt: {specs: ['F a']}\ntrain: {speed: 9}\n",
        "env: {kind: chain}\nbolt: {specs: ['F a']}\nseeds: [a]\n",
        "env: [unclosed\n",
    ],
)
def test_malformed_files(text):
    with pytest.raises(ConfigError):
        loads(text)


def test_formula_must_use_env_fluents():
    with pytest.raises(UndeclaredFluentError):
        loads("env: {kind: chain}\nbolt: {specs: ['F c']}\n").validate()
    loads("env: {kind: chain}\nbolt: {specs: ['F(done & a)']}\n").validate()


def test_load_from_file(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text(BASE)
    assert load(p) == loads(BASE)


def test_example_configs_are_valid():
    import pathlib

    root = pathlib.Path(__file__).resolve().parent.parent / "configs"
    for path in sorted(root.glob("*.yaml")):
        if path.name == "tt.yaml":
            continue
        assert isinstance(load(path).validate(), ExperimentConfig)
