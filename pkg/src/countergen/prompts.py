"""Prompt template loading.

Templates are plain text files with named ``{placeholder}`` fields. The
packaged defaults can be overridden per run by pointing ``template_dir``
at a directory containing same-named files.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

PROMPT_NAMES = (
    "counter_initial_system",
    "counter_initial_user",
    "counter_refine_user",
    "offtopic_rewrite",
    "judge_numerical",
    "judge_entity",
    "judge_faithfulness",
    "judge_refutation",
    "facts_extract",
    "facts_verify",
)


def load_prompt(name: str, template_dir: str | Path | None = None) -> str:
    """Load a template by name, preferring an override directory when given."""
    if name not in PROMPT_NAMES:
        raise KeyError(f"unknown prompt template: {name}")
    if template_dir is not None:
        override = Path(template_dir) / f"{name}.txt"
        if override.exists():
            return override.read_text("utf-8")
    return resources.files(__package__).joinpath(f"prompts/{name}.txt").read_text("utf-8")
