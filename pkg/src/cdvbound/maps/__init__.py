"""Bundled example maps, loadable by name."""

from __future__ import annotations

from importlib import resources

from ..surface_map import EmbeddedGraph, parse_map


def available() -> list[str]:
    return sorted(p.name[:-4] for p in resources.files(__name__).iterdir() if p.name.endswith(".map"))


def load(name: str) -> EmbeddedGraph:
    path = resources.files(__name__) / f"{name}.map"
    if not path.is_file():
        raise KeyError(f"no bundled map named {name!r}; choose from {', '.join(available())}")
    return parse_map(path.read_text())
