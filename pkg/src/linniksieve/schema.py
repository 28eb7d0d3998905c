"""
JSON Schemas for run configuration files and JSON reports.
"""

from typing import Any, Dict

from .reporting import OUTPUT_FORMATS, REPORT_SCHEMA_VERSION


def get_config_schema() -> Dict[str, Any]:
    """
    Returns the JSON schema for linniksieve configuration files.
    """
    positive = {"type": "integer", "minimum": 1}
    non_negative = {"type": "integer", "minimum": 0}
    return {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "type": "object",
        "properties": {
            "output_format": {
                "type": "string",
                "enum": list(OUTPUT_FORMATS),
                "description": "Report rendering",
                "default": "human",
            },
            "thread_count": {**positive, "description": "Worker threads", "default": 1},
            "log_dir": {"type": ["string", "null"], "description": "Directory for log files"},
            "verbose": {"type": "boolean", "default": False},
            "budgets": {
                "type": "object",
                "description": "Resource caps checked before any large allocation",
                "properties": {
                    "sieve_bytes": {**positive, "description": "Sieve and table memory cap"},
                    "memo_cap": {**positive, "description": "Recursive Psi memo entries"},
                    "enumeration_cap": {
                        "type": "integer",
                        "minimum": 1,
                        "maximum": 30,
                        "description": "Largest n*d for exhaustive family enumeration",
                    },
                    "segment_size": {**positive, "description": "Odd numbers per sieve segment"},
                    "cross_check_limit": {
                        **non_negative,
                        "description": "Largest N^3 at which Psi is also enumerated",
                    },
                    "replay_limit": {
                        **non_negative,
                        "description": "Largest d*N^3 for replaying residue sets",
                    },
                    "exact_window_primes": {
                        **non_negative,
                        "description": "Mertens windows up to this many primes are summed exactly",
                    },
                },
                "additionalProperties": False,
                "default": {},
            },
        },
        "additionalProperties": False,
    }


def get_report_schema() -> Dict[str, Any]:
    """
    Returns the JSON schema for ``--output json`` reports.
    """
    cell = {"type": ["string", "integer", "null"]}
    return {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "type": "object",
        "required": ["schema", "command", "passed", "rows"],
        "properties": {
            "schema": {"const": REPORT_SCHEMA_VERSION},
            "command": {"type": "string", "minLength": 1},
            "passed": {"type": "boolean"},
            "rows": {
                "type": "array",
                "items": {"type": "object", "additionalProperties": cell},
            },
        },
        "additionalProperties": False,
    }
