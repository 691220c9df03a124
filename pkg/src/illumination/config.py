"""Render configuration."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from gmpy2 import mpq

from .geometry import RegionLabel

THREADS_ENV = "ILLUM_THREADS"

LABEL_COLORS = {
    RegionLabel.ILLUMINATED: "#0000FF",
    RegionLabel.SELF_SHADED: "#FF0000",
    RegionLabel.POLAR_SEPARATED: "#000000",
    RegionLabel.BOUNDARY: "#FF00FF",
}

EXTRA_COLORS = {
    "polar": "#00FF00",
    "tangent": "#8B4513",
    "light": "#FFA500",
    "background": "#FFFFFF",
    "plane_lit": "#D3D3D3",
    "plane_shadow": "#696969",
}


def hex_to_rgb(color: str) -> tuple:
    color = color.lstrip("#")
    return tuple(int(color[i:i + 2], 16) for i in (0, 2, 4))


@dataclass
class RenderConfig:
    width: int = 480
    height: int = 480
    samples_per_arc: int = 48
    colors: dict = field(default_factory=lambda: {**{k.value: v for k, v in LABEL_COLORS.items()},
                                                   **EXTRA_COLORS})
    eps_exponent: int = 40
    budget: int = 64
    threads: int | None = None

    def __post_init__(self):
        if self.width < 16 or self.height < 16:
            raise ValueError("image width and height must be at least 16")
        if self.samples_per_arc < 2:
            raise ValueError("samples per arc must be at least 2")
        if self.eps_exponent < 1:
            raise ValueError("the shadow epsilon exponent must be positive")
        if self.budget < 0:
            raise ValueError("the refinement budget cannot be negative")

    @property
    def eps(self) -> mpq:
        return mpq(1, 2 ** self.eps_exponent)

    def color(self, key) -> str:
        if isinstance(key, RegionLabel):
            key = key.value
        return self.colors[key]

    def worker_count(self) -> int:
        """Explicit setting, then ``ILLUM_THREADS``, then the CPU count."""
        if self.threads:
            return max(1, int(self.threads))
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                return max(1, int(env))
            except ValueError:
                raise ValueError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        return os.cpu_count() or 1
