"""Tunable defaults for contact geometry and signal smoothing.

A single TOML file overrides any subset:

    [filters]
    eye_margin = 1.5
    d_max = 100.0
    face_threshold = 1.0
    eye_threshold = 1.0
    au_intensity_threshold = 1.0
    smooth_gap = 2
    smooth_min = 2

    [emotions]
    happiness = [6, 12]
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .errors import ManifestError

# The only emotion the tool ships with; others come from config.
DEFAULT_EMOTIONS: dict[str, frozenset[int]] = {"happiness": frozenset({6, 12})}


@dataclass(frozen=True)
class FilterConfig:
    eye_margin: float = 1.5
    d_max: float = 100.0
    face_threshold: float = 1.0
    eye_threshold: float = 1.0
    au_intensity_threshold: float = 1.0
    smooth_gap: int = 2
    smooth_min: int = 2


@dataclass(frozen=True)
class EmotionTable:
    """Maps emotion names to the AU-presence conjunction that defines them."""

    entries: dict[str, frozenset[int]]

    @classmethod
    def default(cls) -> "EmotionTable":
        return cls(dict(DEFAULT_EMOTIONS))

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __getitem__(self, name: str) -> frozenset[int]:
        return self.entries[name]


def load_config(path) -> tuple[FilterConfig, EmotionTable]:
    """Read overrides from a TOML file; absent keys keep their defaults."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as e:
        raise ManifestError(f"cannot read config {path}: {e}") from None
    except tomllib.TOMLDecodeError as e:
        raise ManifestError(f"config {path} is not valid TOML: {e}") from None

    cfg = FilterConfig()
    overrides = {
        k: v for k, v in doc.get("filters", {}).items() if hasattr(cfg, k)
    }
    cfg = replace(cfg, **overrides)

    emotions = dict(DEFAULT_EMOTIONS)
    for name, aus in doc.get("emotions", {}).items():
        emotions[str(name)] = frozenset(int(a) for a in aus)
    return cfg, EmotionTable(emotions)
