"""Access to the bundled synthetic scene scripts."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def scenario_names() -> list[str]:
    root = resources.files("stillscan") / "scenarios"
    return sorted(p.name[: -len(".json")] for p in root.iterdir()
                  if p.name.endswith(".json"))


def scenario_path(name: str) -> Path:
    path = resources.files("stillscan") / "scenarios" / f"{name}.json"
    if not path.is_file():
        raise FileNotFoundError(
            f"no bundled scenario {name!r}; available: {', '.join(scenario_names())}"
        )
    return Path(str(path))
