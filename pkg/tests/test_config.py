import os

import pytest
import yaml

from linniksieve.config import BUDGET_ENV_VAR, Budgets, RunConfig, _deep_merge, load_config_data
from linniksieve.exceptions import ConfigError
from linniksieve.schema import get_config_schema


@pytest.fixture
def config_file(tmp_path):
    content = """
    output_format: csv
    thread_count: 4
    budgets:
      sieve_bytes: 1000000
      memo_cap: 5000
      enumeration_cap: 12
      segment_size: 4096
    """
    p = tmp_path / "run.yaml"
    p.write_text(content)
    return str(p)


def test_load_valid_config(config_file):
    """Test loading a standard valid configuration."""
    config = RunConfig.from_yaml(config_file)

    assert config.output_format == "csv"
    assert config.thread_count == 4
    assert config.budgets.sieve_bytes == 1_000_000
    assert config.budgets.memo_cap == 5000
    assert config.budgets.enumeration_cap == 12
    # unspecified budgets keep their defaults
    assert config.budgets.replay_limit == Budgets().replay_limit


def test_defaults():
    """Test default configuration values."""
    config = RunConfig()
    assert config.output_format == "human"
    assert config.thread_count == 1
    assert config.verbose is False
    assert config.log_dir is None


def test_env_var_expansion(tmp_path):
    """Test that ${VAR} is expanded in the config."""
    p = tmp_path / "env.yaml"
    p.write_text("log_dir: ${HOME}/logs\n")

    config = RunConfig.from_yaml(str(p))
    assert config.log_dir == f"{os.environ['HOME']}/logs"


def test_local_override_is_deep_merged(config_file, tmp_path):
    """Test that a .local.yaml file is merged over the base."""
    (tmp_path / "run.local.yaml").write_text("budgets:\n  memo_cap: 77\n")

    config = RunConfig.from_yaml(config_file)
    assert config.budgets.memo_cap == 77
    assert config.budgets.sieve_bytes == 1_000_000
    assert config.thread_count == 4


def test_missing_file():
    """Test loading a missing file."""
    with pytest.raises(FileNotFoundError):
        RunConfig.from_yaml("/nonexistent/run.yaml")


def test_unknown_key_fails_schema(tmp_path):
    """Test that unknown top-level keys fail validation."""
    p = tmp_path / "bad.yaml"
    p.write_text("threads: 4\n")
    with pytest.raises(ConfigError, match="schema"):
        RunConfig.from_yaml(str(p))


def test_unknown_budget_fails_schema(tmp_path):
    """Test that unknown budget keys fail validation."""
    p = tmp_path / "bad.yaml"
    p.write_text("budgets:\n  bytes: 10\n")
    with pytest.raises(ConfigError):
        RunConfig.from_yaml(str(p))


def test_invalid_yaml(tmp_path):
    """Test malformed YAML."""
    p = tmp_path / "broken.yaml"
    p.write_text("budgets: [unclosed\n")
    with pytest.raises(ConfigError, match="Invalid YAML"):
        RunConfig.from_yaml(str(p))


def test_non_mapping_yaml(tmp_path):
    """Test YAML that is not a mapping."""
    p = tmp_path / "list.yaml"
    p.write_text("- csv\n- json\n")
    with pytest.raises(ConfigError, match="mapping"):
        load_config_data(str(p))


def test_empty_file_gives_defaults(tmp_path):
    """Test that an empty file gives the defaults."""
    p = tmp_path / "empty.yaml"
    p.write_text("")
    assert RunConfig.from_yaml(str(p)) == RunConfig()


def test_segment_must_fit_budget(tmp_path):
    """Test that the segment size must fit the sieve budget."""
    p = tmp_path / "tight.yaml"
    p.write_text(yaml.dump({"budgets": {"sieve_bytes": 100, "segment_size": 1000}}))
    with pytest.raises(ConfigError, match="segment_size"):
        RunConfig.from_yaml(str(p))


@pytest.mark.parametrize(
    "field,value",
    [("sieve_bytes", 0), ("memo_cap", -1), ("enumeration_cap", 31), ("replay_limit", -5)],
)
def test_budget_validation(field, value):
    """Test range checks on budgets."""
    with pytest.raises(ValueError):
        Budgets(**{field: value})


def test_output_format_validation():
    """Test output format validation."""
    with pytest.raises(ValueError, match="output_format"):
        RunConfig(output_format="xml")
    with pytest.raises(ValueError):
        RunConfig(thread_count=0)


def test_budget_env_override(monkeypatch):
    """Test LINNIK_SIEVE_BUDGET over the defaults."""
    monkeypatch.setenv(BUDGET_ENV_VAR, "123456")
    config = RunConfig.from_env()
    assert config.budgets.sieve_bytes == 123456


def test_budget_env_overrides_file(config_file, monkeypatch):
    """Test LINNIK_SIEVE_BUDGET over a config file."""
    monkeypatch.setenv(BUDGET_ENV_VAR, "2000000")
    assert RunConfig.from_yaml(config_file).budgets.sieve_bytes == 2_000_000


@pytest.mark.parametrize("raw", ["lots", "0", "-3"])
def test_budget_env_invalid(monkeypatch, raw):
    """Test an invalid LINNIK_SIEVE_BUDGET."""
    monkeypatch.setenv(BUDGET_ENV_VAR, raw)
    with pytest.raises(ConfigError):
        RunConfig.from_env()


def test_deep_merge():
    """Test nested dictionary merging."""
    base = {"a": 1, "budgets": {"x": 1, "y": 2}}
    merged = _deep_merge(base, {"budgets": {"y": 3}, "b": 4})
    assert merged == {"a": 1, "budgets": {"x": 1, "y": 3}, "b": 4}
    assert base["budgets"]["y"] == 2


def test_schema_lists_every_budget():
    """Test that the schema names every budget field."""
    budget_keys = set(get_config_schema()["properties"]["budgets"]["properties"])
    assert budget_keys == set(Budgets.model_fields)
