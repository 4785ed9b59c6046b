"""RTF1 latent dumps and RTI1 images.

RTF1: b"RTF1", u32 LE dimension, then dimension float64 LE values.
RTI1: b"RTI1", u32 LE width, height, channels, then W*H*C bytes, row-major,
channels interleaved.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .mapper import QuantizedImage

LATENT_MAGIC = b"RTF1"
IMAGE_MAGIC = b"RTI1"


class FormatError(ValueError):
    pass


def encode_latent(z: np.ndarray) -> bytes:
    z = np.asarray(z, dtype="<f8")
    return LATENT_MAGIC + struct.pack("<I", len(z)) + z.tobytes()


def decode_latent(data: bytes) -> np.ndarray:
    if len(data) < 8 or data[:4] != LATENT_MAGIC:
        raise FormatError("not an RTF1 latent file")
    (dim,) = struct.unpack_from("<I", data, 4)
    if len(data) != 8 + 8 * dim:
        raise FormatError(f"RTF1 body holds {len(data) - 8} bytes, expected {8 * dim}")
    return np.frombuffer(data, dtype="<f8", offset=8).astype(np.float64)


def encode_image(img: QuantizedImage) -> bytes:
    header = IMAGE_MAGIC + struct.pack("<III", img.width, img.height, img.channels)
    return header + np.ascontiguousarray(img.samples, dtype=np.uint8).tobytes()


def decode_image(data: bytes) -> QuantizedImage:
    if len(data) < 16 or data[:4] != IMAGE_MAGIC:
        raise FormatError("not an RTI1 image file")
    width, height, channels = struct.unpack_from("<III", data, 4)
    size = width * height * channels
    if len(data) != 16 + size:
        raise FormatError(f"RTI1 body holds {len(data) - 16} bytes, expected {size}")
    samples = np.frombuffer(data, dtype=np.uint8, offset=16).reshape(height, width, channels)
    return QuantizedImage(width, height, channels, samples.copy())


def write_image(path: str | Path, img: QuantizedImage) -> None:
    Path(path).write_bytes(encode_image(img))


def read_image(path: str | Path) -> QuantizedImage:
    return decode_image(Path(path).read_bytes())


def write_latent(path: str | Path, z: np.ndarray) -> None:
    Path(path).write_bytes(encode_latent(z))


def read_latent(path: str | Path) -> np.ndarray:
    return decode_latent(Path(path).read_bytes())
