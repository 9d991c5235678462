"""chromadapt: color-vision screening and CVD-aware palette adaptation."""

from .color import (
    CVDKind,
    CVDProfile,
    Lab,
    LinearRGB,
    LMS,
    SRGB8,
    UnitSRGB,
    build_projection,
    delta_e,
    lab_to_linear,
    linear_to_lab,
    linear_to_srgb,
    simulate,
    srgb_to_linear,
)
from .errors import ChromadaptError

__version__ = "0.1.0"

__all__ = [
    "CVDKind", "CVDProfile", "Lab", "LinearRGB", "LMS", "SRGB8", "UnitSRGB",
    "build_projection", "delta_e", "lab_to_linear", "linear_to_lab",
    "linear_to_srgb", "simulate", "srgb_to_linear", "ChromadaptError",
    "__version__",
]
