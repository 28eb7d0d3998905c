import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml  # type: ignore[import-untyped]
from pydantic import BaseModel, field_validator, model_validator

from .core_arith import DEFAULT_SEGMENT_SIZE, DEFAULT_SIEVE_BUDGET
from .exceptions import ConfigError
from .linnik import DEFAULT_CROSS_CHECK_LIMIT, DEFAULT_REPLAY_LIMIT
from .reporting import OUTPUT_FORMATS
from .sieve_core import DEFAULT_ENUMERATION_CAP
from .smooth import DEFAULT_MEMO_CAP

try:
    import jsonschema  # type: ignore[import-untyped]

    from .schema import get_config_schema

    SCHEMA_AVAILABLE = True
except ImportError:
    SCHEMA_AVAILABLE = False

BUDGET_ENV_VAR = "LINNIK_SIEVE_BUDGET"


class Budgets(BaseModel):
    sieve_bytes: int = DEFAULT_SIEVE_BUDGET
    memo_cap: int = DEFAULT_MEMO_CAP
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    segment_size: int = DEFAULT_SEGMENT_SIZE
    cross_check_limit: int = DEFAULT_CROSS_CHECK_LIMIT
    replay_limit: int = DEFAULT_REPLAY_LIMIT
    exact_window_primes: int = 10_000

    @field_validator("sieve_bytes", "memo_cap", "segment_size")
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError(f"budget must be positive, got {v}")
        return v

    @field_validator("enumeration_cap")
    @classmethod
    def validate_enumeration_cap(cls, v):
        # 2^(n*d) families are enumerated per shape
        if not 1 <= v <= 30:
            raise ValueError(f"enumeration_cap must lie in [1, 30], got {v}")
        return v

    @field_validator("cross_check_limit", "replay_limit", "exact_window_primes")
    @classmethod
    def validate_non_negative(cls, v):
        if v < 0:
            raise ValueError(f"limit cannot be negative, got {v}")
        return v

    @model_validator(mode="after")
    def validate_segment_fits(self):
        if self.segment_size > self.sieve_bytes:
            raise ValueError(
                f"segment_size {self.segment_size} does not fit sieve_bytes {self.sieve_bytes}"
            )
        return self


class RunConfig(BaseModel):
    output_format: str = "human"
    thread_count: int = 1
    budgets: Budgets = Budgets()
    log_dir: Optional[str] = None
    verbose: bool = False

    @field_validator("output_format")
    @classmethod
    def validate_output_format(cls, v):
        if v not in OUTPUT_FORMATS:
            raise ValueError(
                f"output_format must be one of {', '.join(OUTPUT_FORMATS)}, got {v!r}"
            )
        return v

    @field_validator("thread_count")
    @classmethod
    def validate_thread_count(cls, v):
        if v < 1:
            raise ValueError(f"thread_count must be at least 1, got {v}")
        return v

    @classmethod
    def from_yaml(cls, path: str) -> "RunConfig":
        if not os.path.exists(path):
            raise FileNotFoundError(f"Configuration file does not exist: {path}")

        data = load_config_data(path)

        if SCHEMA_AVAILABLE:
            try:
                jsonschema.validate(data, get_config_schema())
            except jsonschema.ValidationError as e:
                raise ConfigError(f"Configuration schema validation failed: {e.message}")

        try:
            return cls(**data).with_env()
        except ValueError as e:
            raise ConfigError(f"Invalid configuration in {path}: {e}") from e

    @classmethod
    def from_env(cls, **overrides: Any) -> "RunConfig":
        return cls(**overrides).with_env()

    def with_env(self) -> "RunConfig":
        """Apply LINNIK_SIEVE_BUDGET, which overrides the sieve memory cap."""
        raw = os.environ.get(BUDGET_ENV_VAR)
        if not raw:
            return self
        try:
            sieve_bytes = int(raw)
        except ValueError:
            raise ConfigError(f"{BUDGET_ENV_VAR} must be an integer byte count, got {raw!r}")
        if sieve_bytes < 1:
            raise ConfigError(f"{BUDGET_ENV_VAR} must be positive, got {sieve_bytes}")
        budgets = self.budgets.model_copy(
            update={
                "sieve_bytes": sieve_bytes,
                "segment_size": min(self.budgets.segment_size, sieve_bytes),
            }
        )
        return self.model_copy(update={"budgets": budgets})


def load_config_data(path: str) -> Dict[str, Any]:
    """
    Read a YAML config with ${VAR} expansion, then deep-merge the sibling
    ``*.local.yaml`` override when one exists.
    """
    data: Dict[str, Any] = {}
    base = Path(path)
    local = base.with_name(f"{base.stem}.local{base.suffix}")
    for candidate in (base, local):
        if not candidate.exists():
            continue
        with open(candidate, "r") as f:
            content = os.path.expandvars(f.read())
        try:
            loaded = yaml.safe_load(content) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in {candidate}: {e}") from e
        if not isinstance(loaded, dict):
            raise ConfigError(f"Configuration in {candidate} must be a mapping")
        data = _deep_merge(data, loaded)
    return data


def _deep_merge(base: Dict, override: Dict) -> Dict:
    """
    Deep merge two dictionaries.
    """
    result = base.copy()

    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = value

    return result
