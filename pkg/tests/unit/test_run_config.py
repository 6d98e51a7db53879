"""Unit tests for run configuration documents."""

import json

import pytest

from af_gauge.config.run_config import (
    PRESETS,
    RunConfig,
    build_config,
    parse_config,
    parse_config_text,
    preset_config,
)
from af_gauge.exceptions import ConfigError

CASE2_TOML = """
name = "case2"
source = [2, 2]
target = [4]
mult = [[1, 1]]
seed = 17
threads = 2

[optimizer]
restarts = 4
gtol = 1e-10

[[paths]]
kind = "anti-diagonal"
c = 0.5
start = [0.0]
end = [0.5]
samples = 21

[masses]
points = [[1.0, 1.0], [0.5, 0.0]]
"""


class TestParsing:
    """Test TOML and JSON parsing."""

    def test_toml(self):
        config = parse_config_text(CASE2_TOML)
        assert config.name == "case2"
        assert config.seed == 17
        assert config.optimizer.restarts == 4
        assert config.optimizer.max_iter == 2000
        assert config.paths[0].kind == "anti-diagonal"
        assert config.embedding().pad == (0,)
        assert config.masses.points == [[1.0, 1.0], [0.5, 0.0]]

    def test_json(self):
        document = json.dumps({"source": [2], "target": [3], "mult": [[1]]})
        config = parse_config_text(document, fmt="json")
        assert config.seed == 0
        assert config.threads == 1
        assert config.paths[0].kind == "diagonal"
        assert config.paths[0].samples == 161

    def test_files(self, temp_output_dir):
        toml_path = temp_output_dir / "run.toml"
        toml_path.write_text(CASE2_TOML, encoding="utf-8")
        assert parse_config(toml_path).name == "case2"

        json_path = temp_output_dir / "run.json"
        json_path.write_text(json.dumps(parse_config(toml_path).echo()), encoding="utf-8")
        assert parse_config(json_path) == parse_config(toml_path)

        with pytest.raises(ConfigError):
            parse_config(temp_output_dir / "run.yaml")

    def test_malformed(self):
        with pytest.raises(ConfigError, match="Malformed"):
            parse_config_text("source = [2", fmt="toml")
        with pytest.raises(ConfigError):
            parse_config_text("[1, 2]", fmt="json")
        with pytest.raises(ConfigError):
            parse_config_text("{}", fmt="yaml")


class TestValidation:
    """Test schema and embedding validation."""

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="restart"):
            build_config({"source": [2], "target": [3], "mult": [[1]], "optimizer": {"restart": 3}})

    def test_infeasible_embedding(self):
        with pytest.raises(ConfigError, match="require"):
            build_config({"source": [2], "target": [3], "mult": [[2]]})

    def test_wrong_shape(self):
        with pytest.raises(ConfigError):
            build_config({"source": [2, 2], "target": [4], "mult": [[1]]})

    @pytest.mark.parametrize("seed", [-1, 2 ** 64])
    def test_seed_range(self, seed):
        with pytest.raises(ConfigError, match="seed"):
            build_config({"source": [2], "target": [3], "mult": [[1]], "seed": seed})

    def test_largest_seed(self):
        assert build_config({"source": [2], "target": [3], "mult": [[1]], "seed": 2 ** 64 - 1}).seed == 2 ** 64 - 1

    def test_bad_path(self):
        with pytest.raises(ConfigError):
            build_config({"source": [2], "target": [3], "mult": [[1]], "paths": [{"kind": "anti-diagonal"}]})


class TestEchoAndOverrides:
    """Test reproducibility of echoed configs."""

    def test_echo_round_trip(self):
        config = parse_config_text(CASE2_TOML)
        assert build_config(config.echo()) == config
        assert parse_config_text(json.dumps(config.echo()), fmt="json") == config

    def test_with_overrides(self):
        config = preset_config("case1")
        changed = config.with_overrides(seed=99, threads=None, output_dir="elsewhere")
        assert changed.seed == 99
        assert changed.threads == 1
        assert changed.output_dir == "elsewhere"
        assert config.seed == 0

    def test_minimizer_options(self):
        opts = parse_config_text(CASE2_TOML).minimizer_options()
        assert opts.seed == 17
        assert opts.threads == 2
        assert opts.gtol == 1e-10

    def test_path_specs(self):
        specs = parse_config_text(CASE2_TOML).path_specs()
        assert specs[0].c == 0.5
        assert specs[0].name == "anti-diagonal"


class TestPresets:
    """Test the built-in scan cases."""

    def test_names(self):
        assert sorted(PRESETS) == ["case1", "case2", "case3", "case4"]

    @pytest.mark.parametrize("name, target", [("case1", [3]), ("case3", [5]), ("case4", [5])])
    def test_preset(self, name, target):
        config = preset_config(name)
        assert isinstance(config, RunConfig)
        assert config.name == name
        assert config.target == target

    def test_unknown(self):
        with pytest.raises(ConfigError):
            preset_config("case9")
