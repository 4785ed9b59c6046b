"""Generative steganography by secret-guided arrangement of Gaussian latent elements."""

__version__ = "0.1.0"

from .codec import (
    ExtractResult,
    Scheme,
    StegParams,
    capacity_bits,
    embed,
    extract,
    hide,
    recover,
)
from .mapper import LogisticMapper, NoiseChannelMapper, QuantizedImage, ToyCouplingFlow

__all__ = [
    "ExtractResult",
    "LogisticMapper",
    "NoiseChannelMapper",
    "QuantizedImage",
    "Scheme",
    "StegParams",
    "ToyCouplingFlow",
    "capacity_bits",
    "embed",
    "extract",
    "hide",
    "recover",
]
