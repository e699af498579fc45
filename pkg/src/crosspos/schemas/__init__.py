"""Published JSON schemas for input files and run reports."""

import json
from importlib import resources

NAMES = ("biform", "symmap", "seeds", "run_report")


def load(name: str) -> dict:
    return json.loads(resources.files(__name__).joinpath(f"{name}.schema.json").read_text())
