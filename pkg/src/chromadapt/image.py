"""Raster images and their CVD simulation.

PPM (P6, maxval 255) is the guaranteed, bit-exact format; PNG is supported
as a convenience through Pillow.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .color import (
    CVDProfile,
    linear_to_srgb_array,
    simulate_array,
    srgb_to_linear_array,
)
from .errors import DomainError


@dataclass
class Image:
    """Row-major 8-bit RGB image; pixels has shape (height, width, 3)."""
    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.width <= 0 or self.height <= 0:
            raise DomainError("image dimensions must be positive")
        if self.pixels.shape != (self.height, self.width, 3):
            raise DomainError(
                f"pixel grid shape {self.pixels.shape} != ({self.height}, {self.width}, 3)"
            )


def simulate_image(img: Image, profile: CVDProfile) -> Image:
    """Per-pixel decode -> simulate -> re-encode; dimensions preserved."""
    if profile.is_identity:
        return Image(img.width, img.height, img.pixels.copy())
    unit = img.pixels.astype(np.float64) / 255.0
    linear = srgb_to_linear_array(unit)
    sim = simulate_array(linear, profile, clamp=True)
    encoded = np.clip(np.rint(linear_to_srgb_array(sim) * 255.0), 0, 255).astype(np.uint8)
    return Image(img.width, img.height, encoded)


# --------------------------------------------------------------------------
# PPM (P6)

def _next_token(buf: io.BufferedIOBase) -> bytes:
    """Whitespace-separated header token, skipping # comments."""
    tok = b""
    while True:
        ch = buf.read(1)
        if ch == b"":
            raise DomainError("truncated PPM header")
        if ch == b"#":
            while ch not in (b"\n", b""):
                ch = buf.read(1)
            continue
        if ch.isspace():
            if tok:
                return tok
            continue
        tok += ch


def read_ppm(data: bytes) -> Image:
    buf = io.BytesIO(data)
    magic = _next_token(buf)
    if magic != b"P6":
        raise DomainError(f"not a P6 PPM (magic {magic!r})")
    width = int(_next_token(buf))
    height = int(_next_token(buf))
    maxval = int(_next_token(buf))
    if maxval != 255:
        raise DomainError(f"unsupported PPM maxval {maxval} (expected 255)")
    raw = buf.read(width * height * 3)
    if len(raw) != width * height * 3:
        raise DomainError("truncated PPM pixel payload")
    pixels = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3)
    return Image(width, height, pixels.copy())


def write_ppm(img: Image) -> bytes:
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


# --------------------------------------------------------------------------
# File dispatch (.ppm native, .png optional via Pillow)

def read_image(path: str | Path) -> Image:
    path = Path(path)
    if path.suffix.lower() == ".png":
        from PIL import Image as PILImage

        with PILImage.open(path) as im:
            rgb = im.convert("RGB")
            pixels = np.asarray(rgb, dtype=np.uint8)
        return Image(pixels.shape[1], pixels.shape[0], pixels)
    return read_ppm(path.read_bytes())


def write_image(img: Image, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".png":
        from PIL import Image as PILImage

        PILImage.fromarray(img.pixels, mode="RGB").save(path, format="PNG")
        return
    path.write_bytes(write_ppm(img))
