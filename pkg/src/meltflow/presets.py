"""Bundled scenario presets (desk-scale analogues of the four process
families plus physics-validation cases)."""

from __future__ import annotations

import importlib.resources


def preset_names() -> list[str]:
    root = importlib.resources.files("meltflow") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def preset_text(name: str) -> str | None:
    path = importlib.resources.files("meltflow") / "presets" / f"{name}.toml"
    try:
        return path.read_text()
    except (FileNotFoundError, OSError):
        return None
