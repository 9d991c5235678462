"""Embedded 5x7 bitmap digit font and glyph membership tests.

Plates classify each packed circle as figure or ground by testing its center
against these masks, so the font needs no anti-aliasing or outline math.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

FONT_COLS = 5
FONT_ROWS = 7

_DIGIT_BITMAPS = {
    "0": ("01110", "10001", "10011", "10101", "11001", "10001", "01110"),
    "1": ("00100", "01100", "00100", "00100", "00100", "00100", "01110"),
    "2": ("01110", "10001", "00001", "00010", "00100", "01000", "11111"),
    "3": ("11111", "00010", "00100", "00010", "00001", "10001", "01110"),
    "4": ("00010", "00110", "01010", "10010", "11111", "00010", "00010"),
    "5": ("11111", "10000", "11110", "00001", "00001", "10001", "01110"),
    "6": ("00110", "01000", "10000", "11110", "10001", "10001", "01110"),
    "7": ("11111", "00001", "00010", "00100", "01000", "01000", "01000"),
    "8": ("01110", "10001", "10001", "01110", "10001", "10001", "01110"),
    "9": ("01110", "10001", "10001", "01111", "00001", "00010", "01100"),
}


@dataclass(frozen=True)
class GlyphPlacement:
    """Scale/translate transform placing a digit inside the unit disk.

    height is the glyph's full height in unit-disk units; width follows the
    5:7 cell aspect.
    """
    cx: float
    cy: float
    height: float

    @property
    def width(self) -> float:
        return self.height * FONT_COLS / FONT_ROWS


def _check_digit(digit: str) -> None:
    if digit not in _DIGIT_BITMAPS:
        raise ParameterError(f"glyph {digit!r} is not a digit 0-9")


def _check_inside_disk(placement: GlyphPlacement) -> None:
    hw, hh = placement.width / 2.0, placement.height / 2.0
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            if math.hypot(placement.cx + sx * hw, placement.cy + sy * hh) > 1.0 + 1e-9:
                raise ParameterError("glyph placement leaves the unit disk")


def glyph_mask(digit: str, placement: GlyphPlacement):
    """Point-membership predicate over unit-disk coordinates.

    y grows upward in disk coordinates; bitmap row 0 is the glyph top.
    """
    _check_digit(digit)
    _check_inside_disk(placement)
    rows = _DIGIT_BITMAPS[digit]
    x0 = placement.cx - placement.width / 2.0
    y1 = placement.cy + placement.height / 2.0
    cell_w = placement.width / FONT_COLS
    cell_h = placement.height / FONT_ROWS

    def contains(x: float, y: float) -> bool:
        col = (x - x0) / cell_w
        row = (y1 - y) / cell_h
        if not (0.0 <= col < FONT_COLS and 0.0 <= row < FONT_ROWS):
            return False
        return rows[int(row)][int(col)] == "1"

    return contains


def cell_center(placement: GlyphPlacement, row: int, col: int) -> tuple[float, float]:
    """Disk coordinates of a bitmap cell's center."""
    x0 = placement.cx - placement.width / 2.0
    y1 = placement.cy + placement.height / 2.0
    cell_w = placement.width / FONT_COLS
    cell_h = placement.height / FONT_ROWS
    return (x0 + (col + 0.5) * cell_w, y1 - (row + 0.5) * cell_h)


def lit_fraction(digit: str) -> float:
    """Fraction of lit cells within the glyph's 5x7 bounding box."""
    _check_digit(digit)
    lit = sum(row.count("1") for row in _DIGIT_BITMAPS[digit])
    return lit / (FONT_COLS * FONT_ROWS)


def single_glyph_placement() -> GlyphPlacement:
    return GlyphPlacement(0.0, 0.0, 1.30)


def dual_glyph_placements() -> tuple[GlyphPlacement, GlyphPlacement]:
    return (GlyphPlacement(-0.40, 0.0, 1.00), GlyphPlacement(0.40, 0.0, 1.00))
