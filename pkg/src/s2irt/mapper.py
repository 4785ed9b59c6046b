"""Invertible latent <-> image maps and 8-bit quantization.

Every mapper takes a flat float64 latent vector of length ``dimension`` to a
flat continuous image in (0, 1) and back. Images are laid out row-major with
interleaved channels, so flat index ``(y * W + x) * C + c``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np
from scipy.special import expit, logit

from .latent import GroupingSpec, assign_group, boundary_margin


class MapperContractError(ValueError):
    pass


class InvertibleMapper(Protocol):
    dimension: int

    def forward(self, z: np.ndarray) -> np.ndarray: ...

    def inverse(self, x: np.ndarray) -> np.ndarray: ...


def _check_dim(v: np.ndarray, dimension: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (dimension,):
        raise MapperContractError(f"expected a vector of length {dimension}, got shape {v.shape}")
    return v


def _clip_open(x: np.ndarray) -> np.ndarray:
    eps = np.finfo(np.float64).eps
    return np.clip(x, eps, 1.0 - eps)


@dataclass(frozen=True)
class LogisticMapper:
    """Element-wise logistic; the 'identity' mapper."""

    dimension: int

    def forward(self, z):
        return _clip_open(expit(_check_dim(z, self.dimension)))

    def inverse(self, x):
        return logit(_clip_open(_check_dim(x, self.dimension)))


@dataclass(frozen=True)
class NoiseChannelMapper:
    """Logistic map whose inverse adds Gaussian latent noise of std ``sigma``.

    The noise is seeded from the image content and ``seed``, so inverse stays
    a pure function.
    """

    dimension: int
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")

    def forward(self, z):
        return _clip_open(expit(_check_dim(z, self.dimension)))

    def inverse(self, x):
        x = _clip_open(_check_dim(x, self.dimension))
        z = logit(x)
        if self.sigma == 0:
            return z
        digest = hashlib.blake2b(x.tobytes(), digest_size=8, key=self.seed.to_bytes(8, "big"))
        rng = np.random.default_rng(int.from_bytes(digest.digest(), "big"))
        return z + rng.normal(0.0, self.sigma, self.dimension)


@dataclass(frozen=True)
class _Coupling:
    perm: np.ndarray
    w_s: np.ndarray
    b_s: np.ndarray
    w_t: np.ndarray
    b_t: np.ndarray
    first_half: bool


def _circular_conv(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    half = len(w) // 2
    out = np.zeros_like(a)
    for j, wj in enumerate(w):
        out += wj * np.roll(a, j - half)
    return out


@dataclass(frozen=True)
class ToyCouplingFlow:
    """Untrained affine coupling flow with frozen, seeded parameters.

    Each layer permutes the vector, keeps one half fixed and applies
    ``b * exp(s(a)) + t(a)`` to the other, with ``s`` and ``t`` circular
    convolutions of the fixed half and ``s`` soft-clamped to [-0.5, 0.5].
    The output is squashed by ``expit(squash_gain * y)``.
    """

    dimension: int
    layers: int = 8
    seed: int = 0
    taps: int = 5
    weight_scale: float = 0.1
    squash_gain: float = 0.5
    max_log_scale: float = 0.5
    _stack: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dimension < 2 or self.dimension % 2:
            raise MapperContractError(f"coupling flow needs an even dimension, got {self.dimension}")
        rng = np.random.default_rng(self.seed)
        half = self.dimension // 2
        std = self.weight_scale / np.sqrt(self.taps)
        stack = []
        for layer in range(self.layers):
            stack.append(
                _Coupling(
                    perm=rng.permutation(self.dimension),
                    w_s=rng.normal(0.0, std, self.taps),
                    b_s=rng.normal(0.0, 0.1 * self.weight_scale, half),
                    w_t=rng.normal(0.0, std, self.taps),
                    b_t=rng.normal(0.0, 0.1 * self.weight_scale, half),
                    first_half=layer % 2 == 0,
                )
            )
        object.__setattr__(self, "_stack", tuple(stack))

    def _scale_shift(self, c: _Coupling, a: np.ndarray):
        s = self.max_log_scale * np.tanh(_circular_conv(a, c.w_s) + c.b_s)
        t = _circular_conv(a, c.w_t) + c.b_t
        return s, t

    def _split(self, c: _Coupling, v: np.ndarray):
        half = self.dimension // 2
        if c.first_half:
            return v[:half], v[half:]
        return v[half:], v[:half]

    def _join(self, c: _Coupling, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.concatenate([a, b] if c.first_half else [b, a])

    def latent_to_pre_squash(self, z):
        v = _check_dim(z, self.dimension).copy()
        for c in self._stack:
            v = v[c.perm]
            a, b = self._split(c, v)
            s, t = self._scale_shift(c, a)
            v = self._join(c, a, b * np.exp(s) + t)
        return v

    def pre_squash_to_latent(self, y):
        v = _check_dim(y, self.dimension).copy()
        for c in reversed(self._stack):
            a, b = self._split(c, v)
            s, t = self._scale_shift(c, a)
            v = self._join(c, a, (b - t) * np.exp(-s))
            unperm = np.empty_like(v)
            unperm[c.perm] = v
            v = unperm
        return v

    def forward(self, z):
        return _clip_open(expit(self.squash_gain * self.latent_to_pre_squash(z)))

    def inverse(self, x):
        x = _clip_open(_check_dim(x, self.dimension))
        return self.pre_squash_to_latent(logit(x) / self.squash_gain)


@dataclass(frozen=True)
class QuantizedImage:
    width: int
    height: int
    channels: int
    samples: np.ndarray  # uint8, shape (height, width, channels)

    def __post_init__(self):
        shape = (self.height, self.width, self.channels)
        if self.samples.shape != shape or self.samples.dtype != np.uint8:
            raise ValueError(f"samples must be uint8 of shape {shape}")

    @property
    def size(self) -> int:
        return self.width * self.height * self.channels

    def flat(self) -> np.ndarray:
        return self.samples.reshape(-1)

    @classmethod
    def from_flat(cls, flat: np.ndarray, width: int, height: int, channels: int) -> "QuantizedImage":
        flat = np.asarray(flat)
        return cls(width, height, channels, flat.astype(np.uint8).reshape(height, width, channels))


def image_shape_for(dimension: int) -> tuple[int, int, int]:
    """Default (width, height, channels) for a latent dimension: square RGB if possible."""
    if dimension % 3 == 0:
        side = int(round((dimension // 3) ** 0.5))
        if side * side * 3 == dimension:
            return side, side, 3
        return dimension // 3, 1, 3
    return dimension, 1, 1


def quantize(x: np.ndarray, width: int, height: int, channels: int) -> QuantizedImage:
    x = np.asarray(x, dtype=np.float64)
    if x.size != width * height * channels:
        raise MapperContractError(
            f"image of {x.size} values does not fit {width}x{height}x{channels}"
        )
    samples = np.clip(np.floor(255.0 * x + 0.5), 0, 255).astype(np.uint8)
    return QuantizedImage.from_flat(samples, width, height, channels)


def dequantize(img: QuantizedImage) -> np.ndarray:
    return (img.flat().astype(np.float64) + 0.5) / 256.0


def discrete_round_trip(mapper: InvertibleMapper, z: np.ndarray) -> np.ndarray:
    """inverse(dequantize(quantize(forward(z)))): the 8-bit channel in latent space."""
    w, h, c = image_shape_for(mapper.dimension)
    return mapper.inverse(dequantize(quantize(mapper.forward(z), w, h, c)))


@dataclass(frozen=True)
class CalibrationReport:
    eps_star: float  # max latent error over all elements and trials
    eps_chosen: float  # same, restricted to group-bearing elements
    min_prob_margin: float
    min_value_margin: float
    survival: float  # fraction of chosen elements keeping their group
    trials: int

    @property
    def safe(self) -> bool:
        return self.eps_star < self.min_value_margin

    def to_text(self) -> str:
        rows = {
            "eps_star": self.eps_star,
            "eps_chosen": self.eps_chosen,
            "min_prob_margin": self.min_prob_margin,
            "min_value_margin": self.min_value_margin,
            "survival": self.survival,
            "trials": self.trials,
            "status": "SAFE" if self.safe else "UNSAFE",
        }
        return "".join(f"{k}={v}\n" for k, v in rows.items())


def value_margin(values: np.ndarray, groups: np.ndarray, spec: GroupingSpec) -> np.ndarray:
    b = spec.boundaries
    lower = np.where(groups > 0, values - b[groups], np.inf)
    upper = np.where(groups < spec.K - 1, b[groups + 1] - values, np.inf)
    return np.minimum(lower, upper)


def calibrate(mapper: InvertibleMapper, spec: GroupingSpec, pools, seed: int = 0, quantized: bool = True) -> CalibrationReport:
    """Push each pool, randomly permuted, through the mapper channel and measure.

    With ``quantized`` the channel is forward -> 8-bit -> inverse; otherwise
    it is the continuous inverse(forward(z)).
    """
    rng = np.random.default_rng(seed)
    eps = eps_chosen = 0.0
    prob_margin = val_margin = np.inf
    kept = total = trials = 0
    for pool in pools:
        perm = rng.permutation(pool.size)
        z = pool.values[perm]
        out = discrete_round_trip(mapper, z) if quantized else mapper.inverse(mapper.forward(z))
        err = np.abs(out - z)
        where = np.empty(pool.size, dtype=np.int64)
        where[perm] = np.arange(pool.size)
        chosen = where[pool.chosen.ravel()]
        values = z[chosen]
        groups = assign_group(values, spec)
        eps = max(eps, float(err.max()))
        eps_chosen = max(eps_chosen, float(err[chosen].max()))
        prob_margin = min(prob_margin, float(boundary_margin(values, groups, spec).min()))
        val_margin = min(val_margin, float(value_margin(values, groups, spec).min()))
        kept += int(np.sum(assign_group(out[chosen], spec) == groups))
        total += len(chosen)
        trials += 1
    return CalibrationReport(
        eps_star=eps,
        eps_chosen=eps_chosen,
        min_prob_margin=prob_margin,
        min_value_margin=val_margin,
        survival=kept / total if total else 1.0,
        trials=trials,
    )
