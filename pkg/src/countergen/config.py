"""Run configuration: YAML file merged under defaults, flags on top.

Unknown keys are errors. The fully resolved configuration is written next to
every run's outputs; credentials never appear in it (the API key comes from
the LLM_API_KEY environment variable only).
"""

from __future__ import annotations

import copy
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import ConfigError

__all__ = ["DEFAULT_CONFIG", "load_config", "merge_overrides", "dump_config"]

DEFAULT_CONFIG: dict[str, Any] = {
    "dataset": {
        "format": "tsv",  # "tsv" | "shared_evidence"
        "path": None,
        "claims_path": None,
        "evidence_path": None,
        "name": "dataset",
        "field_map": {
            "claim": "claim",
            "evidence": "main_text",
            "label": "label",
            "explanation": "explanation",
            "id": None,
        },
        "keep_labels": ["false", "mixture"],
    },
    "llm": {
        "endpoint": None,
        "model": "default-model",
        "temperature": 1.0,
        "max_tokens": 512,
        "seed": None,
        "retry_budget": 2,
        "timeout": 60.0,
    },
    "judge": {
        "endpoint": None,
        "model": "judge-model",
        "temperature": 0.0,
        "retry_budget": 2,
        "timeout": 60.0,
    },
    "critics": {
        "mode": "rule",  # "rule" | "model" | "mixed"
        "enabled": ["number", "entity", "topic"],
        "topic_threshold": 0.15,
        "max_critique_tokens": 150,
        "part_token_budget": 30,
        "endpoints": {"number": None, "entity": None, "topic": None},
    },
    "generation": {
        "max_rounds": 1,
        "prompt_char_budget": None,
        "truncate_evidence": False,
        "verify_final": False,
        "template_dir": None,
    },
    "datagen": {
        "number_cap": 20,
        "entity_cap": 20,
        "offtopic_count": 3,
        "retries": 2,
    },
    "eval": {
        "gamma": 10,
    },
    "bench": {
        "items": 100,
        "critic_latency_s": 1 / 0.925,
        "feedback_latency_s": 1 / 0.165,
        "measured": True,
    },
    "split_ratios": [0.8, 0.1, 0.1],
    "seed": 42,
    "parallelism": 1,
    "output_dir": "out",
}


def _check_keys(data: Mapping[str, Any], template: Mapping[str, Any], prefix: str) -> None:
    for key, value in data.items():
        if key not in template:
            raise ConfigError(f"unknown config key: {prefix}{key}")
        if isinstance(value, Mapping) and isinstance(template[key], Mapping):
            _check_keys(value, template[key], f"{prefix}{key}.")


def _deep_merge(base: dict[str, Any], override: Mapping[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(path: str | Path | None = None) -> dict[str, Any]:
    """Defaults, overlaid with the config file when one is given."""
    resolved = copy.deepcopy(DEFAULT_CONFIG)
    if path is None:
        return resolved
    try:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file is not valid YAML: {exc}") from exc
    if raw is None:
        return resolved
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a mapping at the top level")
    _check_keys(raw, DEFAULT_CONFIG, "")
    return _deep_merge(resolved, raw)


def merge_overrides(config: dict[str, Any], overrides: Mapping[str, Any]) -> dict[str, Any]:
    """Apply dotted-path overrides (from CLI flags); None values are skipped."""
    merged = copy.deepcopy(config)
    for dotted, value in overrides.items():
        if value is None:
            continue
        parts = dotted.split(".")
        cursor = merged
        for part in parts[:-1]:
            if part not in cursor or not isinstance(cursor[part], dict):
                raise ConfigError(f"unknown config key: {dotted}")
            cursor = cursor[part]
        if parts[-1] not in cursor:
            raise ConfigError(f"unknown config key: {dotted}")
        cursor[parts[-1]] = value
    return merged


def dump_config(config: Mapping[str, Any], path: str | Path) -> None:
    Path(path).write_text(
        yaml.safe_dump(dict(config), sort_keys=True, default_flow_style=False),
        encoding="utf-8",
    )
