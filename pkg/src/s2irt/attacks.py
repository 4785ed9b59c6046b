"""Pixel-domain perturbations of 8-bit stego images."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .mapper import QuantizedImage


class AttackKind(str, enum.Enum):
    INTENSITY = "intensity-change"
    CONTRAST = "contrast-enhancement"
    SALT_PEPPER = "salt-pepper"
    GAUSSIAN = "gaussian-noise"


# Inclusive magnitude ranges per kind.
MAGNITUDE_RANGE = {
    AttackKind.INTENSITY: (-1.0, 1.0),
    AttackKind.CONTRAST: (-1.0, 10.0),
    AttackKind.SALT_PEPPER: (0.0, 1.0),
    AttackKind.GAUSSIAN: (0.0, 1.0),
}

_ALIASES = {
    "intensity": AttackKind.INTENSITY,
    "contrast": AttackKind.CONTRAST,
    "saltpepper": AttackKind.SALT_PEPPER,
    "sp": AttackKind.SALT_PEPPER,
    "gaussian": AttackKind.GAUSSIAN,
    "noise": AttackKind.GAUSSIAN,
}


@dataclass(frozen=True)
class AttackSpec:
    kind: AttackKind
    magnitude: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", AttackKind(self.kind))
        lo, hi = MAGNITUDE_RANGE[self.kind]
        if not lo <= self.magnitude <= hi:
            raise ValueError(f"{self.kind.value} magnitude must lie in [{lo}, {hi}], got {self.magnitude}")

    @classmethod
    def parse(cls, text: str) -> "AttackSpec":
        """Parse ``KIND:MAG[:SEED]``, e.g. ``salt-pepper:0.03:7``."""
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"attack must look like KIND:MAG[:SEED], got {text!r}")
        name = parts[0].strip().lower()
        kind = _ALIASES.get(name) or AttackKind(name)
        seed = int(parts[2]) if len(parts) == 3 else 0
        return cls(kind, float(parts[1]), seed)


def _round_clamp(v: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(v + 0.5), 0, 255).astype(np.uint8)


def apply(img: QuantizedImage, spec: AttackSpec) -> QuantizedImage:
    s = img.samples.astype(np.float64)
    p = spec.magnitude
    if spec.kind is AttackKind.INTENSITY:
        out = _round_clamp(s * (1.0 + p))
    elif spec.kind is AttackKind.CONTRAST:
        out = _round_clamp(128.0 + (s - 128.0) * (1.0 + p))
    elif spec.kind is AttackKind.SALT_PEPPER:
        rng = np.random.default_rng(spec.seed)
        hit = rng.random(s.shape) < p
        salt = rng.random(s.shape) < 0.5
        out = img.samples.copy()
        out[hit & salt] = 255
        out[hit & ~salt] = 0
    else:
        rng = np.random.default_rng(spec.seed)
        out = _round_clamp(s + 255.0 * rng.normal(0.0, p, s.shape)) if p > 0 else img.samples.copy()
    return QuantizedImage(img.width, img.height, img.channels, out)
