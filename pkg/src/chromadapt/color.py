"""Color spaces, perceptual difference, and color-vision-deficiency simulation.

Pipeline: SRGB8 -> UnitSRGB -> LinearRGB -> {LMS for dichromat projection,
XYZ/Lab for the CIE76 metric}. Scalar operations take and return small frozen
dataclasses; the *_array variants operate on numpy arrays of shape (..., 3)
and back the image pipeline. Everything is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError

__all__ = [
    "SRGB8", "UnitSRGB", "LinearRGB", "LMS", "Lab", "CVDKind", "CVDProfile",
    "srgb_to_linear", "linear_to_srgb", "linear_to_lab", "lab_to_linear",
    "delta_e", "build_projection", "simulate", "simulate_lms",
    "srgb8_to_linear", "linear_to_srgb8", "srgb8_to_lab", "lab_to_srgb8",
    "parse_hex", "format_hex", "in_gamut",
    "srgb_to_linear_array", "linear_to_srgb_array",
    "linear_to_lab_array", "lab_to_linear_array", "simulate_array",
]


# --------------------------------------------------------------------------
# Value types

@dataclass(frozen=True)
class SRGB8:
    """Gamma-encoded 8-bit color, channels in [0, 255]."""
    r: int
    g: int
    b: int

    def __post_init__(self):
        for name in ("r", "g", "b"):
            v = getattr(self, name)
            if not isinstance(v, int) or not 0 <= v <= 255:
                raise DomainError(f"SRGB8 channel {name}={v!r} outside [0, 255]")


@dataclass(frozen=True)
class UnitSRGB:
    """Gamma-encoded color, channels in [0, 1]."""
    r: float
    g: float
    b: float

    def __post_init__(self):
        for name in ("r", "g", "b"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"UnitSRGB channel {name}={v} outside [0, 1]")


@dataclass(frozen=True)
class LinearRGB:
    """Linear-light color; nominally [0, 1] but may leave it transiently."""
    r: float
    g: float
    b: float

    def __post_init__(self):
        for name in ("r", "g", "b"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"LinearRGB channel {name} is not finite")


@dataclass(frozen=True)
class LMS:
    """Cone-excitation coordinates."""
    l: float
    m: float
    s: float


@dataclass(frozen=True)
class Lab:
    """CIELAB coordinates (D65 white, L in [0, 100] nominal)."""
    L: float
    a: float
    b: float


class CVDKind(Enum):
    NORMAL = "normal"
    PROTAN = "protan"
    DEUTAN = "deutan"
    TRITAN = "tritan"
    ACHROMAT = "achromat"


DICHROMAT_KINDS = (CVDKind.PROTAN, CVDKind.DEUTAN, CVDKind.TRITAN)


@dataclass(frozen=True)
class CVDProfile:
    """Deficiency kind plus severity in [0, 1]; Normal forces severity 0."""
    kind: CVDKind
    severity: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.severity <= 1.0:
            raise DomainError(f"severity {self.severity} outside [0, 1]")
        if self.kind is CVDKind.NORMAL and self.severity != 0.0:
            object.__setattr__(self, "severity", 0.0)

    @property
    def is_identity(self) -> bool:
        return self.kind is CVDKind.NORMAL or self.severity == 0.0


NORMAL_VISION = CVDProfile(CVDKind.NORMAL, 0.0)


# --------------------------------------------------------------------------
# Constants: sRGB primaries / D65, Hunt-Pointer-Estevez cone fundamentals

_M_RGB2XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
_M_XYZ2RGB = np.linalg.inv(_M_RGB2XYZ)

# HPE cone fundamentals normalized to D65.
_M_XYZ2LMS = np.array([
    [0.40024, 0.70760, -0.08081],
    [-0.22630, 1.16532, 0.04570],
    [0.00000, 0.00000, 0.91822],
])

_M_RGB2LMS = _M_XYZ2LMS @ _M_RGB2XYZ
_M_LMS2RGB = np.linalg.inv(_M_RGB2LMS)

# White normalization so linear (1,1,1) maps exactly to Lab (100, 0, 0).
_WHITE_XYZ = _M_RGB2XYZ @ np.ones(3)

# Plain-float copies for the scalar paths (python-float math is much faster
# than elementwise numpy indexing in the per-circle loops).
_T_RGB2XYZ = tuple(tuple(float(x) for x in row) for row in _M_RGB2XYZ)
_T_XYZ2RGB = tuple(tuple(float(x) for x in row) for row in _M_XYZ2RGB)
_T_RGB2LMS = tuple(tuple(float(x) for x in row) for row in _M_RGB2LMS)
_T_LMS2RGB = tuple(tuple(float(x) for x in row) for row in _M_LMS2RGB)
_T_WHITE_XYZ = tuple(float(x) for x in _WHITE_XYZ)

# Rec.709 luminance coefficients on linear channels (achromat model).
_LUMA = (0.2126, 0.7152, 0.0722)

_SRGB_LO = 0.04045          # gamma-encoded threshold of the linear segment
_SRGB_LO_LIN = 0.0031308    # its image on the linear side
_LAB_DELTA = 6.0 / 29.0


# --------------------------------------------------------------------------
# Transfer functions

def srgb_to_linear(c: UnitSRGB) -> LinearRGB:
    """Decode the sRGB transfer function (piecewise linear/2.4-power)."""
    return LinearRGB(*( _channel_to_linear(v) for v in (c.r, c.g, c.b) ))


def _channel_to_linear(v: float) -> float:
    if v <= _SRGB_LO:
        return v / 12.92
    return ((v + 0.055) / 1.055) ** 2.4


def linear_to_srgb(c: LinearRGB) -> UnitSRGB:
    """Encode linear light back to gamma; channels must be in [0, 1]."""
    for name in ("r", "g", "b"):
        v = getattr(c, name)
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"linear channel {name}={v} outside [0, 1]; clamp first")
    return UnitSRGB(*( _channel_to_srgb(v) for v in (c.r, c.g, c.b) ))


def _channel_to_srgb(v: float) -> float:
    if v <= _SRGB_LO_LIN:
        return v * 12.92
    return 1.055 * v ** (1.0 / 2.4) - 0.055


# --------------------------------------------------------------------------
# Lab

def _lab_f(t: float) -> float:
    if t > _LAB_DELTA ** 3:
        return t ** (1.0 / 3.0)
    return t / (3.0 * _LAB_DELTA ** 2) + 4.0 / 29.0


def _lab_f_inv(t: float) -> float:
    if t > _LAB_DELTA:
        return t ** 3
    return 3.0 * _LAB_DELTA ** 2 * (t - 4.0 / 29.0)


def linear_to_lab(c: LinearRGB) -> Lab:
    """LinearRGB -> XYZ (sRGB/D65 matrix) -> CIELAB with D65 white."""
    r, g, b = c.r, c.g, c.b
    m, w = _T_RGB2XYZ, _T_WHITE_XYZ
    fx = _lab_f((m[0][0] * r + m[0][1] * g + m[0][2] * b) / w[0])
    fy = _lab_f((m[1][0] * r + m[1][1] * g + m[1][2] * b) / w[1])
    fz = _lab_f((m[2][0] * r + m[2][1] * g + m[2][2] * b) / w[2])
    return Lab(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))


def lab_to_linear(c: Lab) -> LinearRGB:
    """Inverse of linear_to_lab; out-of-gamut Lab yields channels outside [0, 1]."""
    fy = (c.L + 16.0) / 116.0
    fx = fy + c.a / 500.0
    fz = fy - c.b / 200.0
    w = _T_WHITE_XYZ
    x, y, z = _lab_f_inv(fx) * w[0], _lab_f_inv(fy) * w[1], _lab_f_inv(fz) * w[2]
    m = _T_XYZ2RGB
    return LinearRGB(
        m[0][0] * x + m[0][1] * y + m[0][2] * z,
        m[1][0] * x + m[1][1] * y + m[1][2] * z,
        m[2][0] * x + m[2][1] * y + m[2][2] * z,
    )


def delta_e(a: Lab, b: Lab) -> float:
    """CIE76 color difference: Euclidean distance in Lab."""
    return math.sqrt((a.L - b.L) ** 2 + (a.a - b.a) ** 2 + (a.b - b.b) ** 2)


# --------------------------------------------------------------------------
# Dichromat projections

# The missing cone's response is rewritten as a combination of the two
# remaining cones, solved so that white and an anchor primary are fixed:
# blue primary for protan/deutan, red primary for tritan.
_MISSING_ROW = {CVDKind.PROTAN: 0, CVDKind.DEUTAN: 1, CVDKind.TRITAN: 2}
_ANCHOR_RGB = {
    CVDKind.PROTAN: (0.0, 0.0, 1.0),
    CVDKind.DEUTAN: (0.0, 0.0, 1.0),
    CVDKind.TRITAN: (1.0, 0.0, 0.0),
}


def build_projection(kind: CVDKind) -> np.ndarray:
    """3x3 idempotent matrix over LMS replacing the missing cone's row."""
    if kind not in _MISSING_ROW:
        raise DomainError(f"no projection for kind {kind}")
    i = _MISSING_ROW[kind]
    j, k = (x for x in range(3) if x != i)
    white = _M_RGB2LMS @ np.ones(3)
    anchor = _M_RGB2LMS @ np.array(_ANCHOR_RGB[kind])
    system = np.array([[white[j], white[k]], [anchor[j], anchor[k]]])
    det = system[0, 0] * system[1, 1] - system[0, 1] * system[1, 0]
    assert abs(det) > 1e-12, "anchor system is singular for the decided LMS matrix"
    a, b = np.linalg.solve(system, np.array([white[i], anchor[i]]))
    proj = np.eye(3)
    proj[i, :] = 0.0
    proj[i, j] = a
    proj[i, k] = b
    return proj


_PROJECTION = {kind: build_projection(kind) for kind in DICHROMAT_KINDS}


_T_PROJECTION = {
    kind: tuple(tuple(float(x) for x in row) for row in mat)
    for kind, mat in _PROJECTION.items()
}


def simulate_lms(lms: LMS, kind: CVDKind, severity: float) -> LMS:
    """Severity blend in cone space: (1-s)*lms + s*P*lms."""
    p = _T_PROJECTION[kind]
    v = (lms.l, lms.m, lms.s)
    out = [
        (1.0 - severity) * v[i]
        + severity * (p[i][0] * v[0] + p[i][1] * v[1] + p[i][2] * v[2])
        for i in range(3)
    ]
    return LMS(*out)


def simulate(c: LinearRGB, profile: CVDProfile, clamp: bool = True) -> LinearRGB:
    """Simulate how a linear-light color appears under a CVD profile.

    Dichromat kinds go through the LMS projection blend; achromat blends
    toward Rec.709 luminance in linear space. With clamp=True (the default,
    for display colors) the result is clipped to [0, 1]; clamp=False keeps
    the mapping smooth for optimization.
    """
    if profile.is_identity:
        return c
    s = profile.severity
    if profile.kind is CVDKind.ACHROMAT:
        y = _LUMA[0] * c.r + _LUMA[1] * c.g + _LUMA[2] * c.b
        out = [(1.0 - s) * v + s * y for v in (c.r, c.g, c.b)]
    else:
        r, g, b = c.r, c.g, c.b
        m = _T_RGB2LMS
        lms = LMS(
            m[0][0] * r + m[0][1] * g + m[0][2] * b,
            m[1][0] * r + m[1][1] * g + m[1][2] * b,
            m[2][0] * r + m[2][1] * g + m[2][2] * b,
        )
        sim = simulate_lms(lms, profile.kind, s)
        n = _T_LMS2RGB
        out = [
            n[0][0] * sim.l + n[0][1] * sim.m + n[0][2] * sim.s,
            n[1][0] * sim.l + n[1][1] * sim.m + n[1][2] * sim.s,
            n[2][0] * sim.l + n[2][1] * sim.m + n[2][2] * sim.s,
        ]
    if clamp:
        out = [min(1.0, max(0.0, x)) for x in out]
    return LinearRGB(*out)


def in_gamut(c: LinearRGB, tol: float = 0.0) -> bool:
    return all(-tol <= v <= 1.0 + tol for v in (c.r, c.g, c.b))


# --------------------------------------------------------------------------
# SRGB8 conveniences

def srgb8_to_linear(c: SRGB8) -> LinearRGB:
    return srgb_to_linear(UnitSRGB(c.r / 255.0, c.g / 255.0, c.b / 255.0))


def linear_to_srgb8(c: LinearRGB) -> SRGB8:
    clamped = LinearRGB(*(min(1.0, max(0.0, v)) for v in (c.r, c.g, c.b)))
    u = linear_to_srgb(clamped)
    return SRGB8(*(int(round(v * 255.0)) for v in (u.r, u.g, u.b)))


def srgb8_to_lab(c: SRGB8) -> Lab:
    return linear_to_lab(srgb8_to_linear(c))


def lab_to_srgb8(c: Lab) -> SRGB8:
    return linear_to_srgb8(lab_to_linear(c))


def parse_hex(text: str) -> SRGB8:
    t = text.strip().lstrip("#")
    if len(t) != 6 or any(ch not in "0123456789abcdefABCDEF" for ch in t):
        raise DomainError(f"not a RRGGBB hex color: {text!r}")
    return SRGB8(int(t[0:2], 16), int(t[2:4], 16), int(t[4:6], 16))


def format_hex(c: SRGB8, prefix: bool = True) -> str:
    body = f"{c.r:02X}{c.g:02X}{c.b:02X}"
    return "#" + body if prefix else body


# --------------------------------------------------------------------------
# Array variants (shape (..., 3), float64) for the image pipeline

def srgb_to_linear_array(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    return np.where(u <= _SRGB_LO, u / 12.92, ((u + 0.055) / 1.055) ** 2.4)


def linear_to_srgb_array(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    return np.where(v <= _SRGB_LO_LIN, v * 12.92, 1.055 * np.power(np.maximum(v, 0.0), 1.0 / 2.4) - 0.055)


def linear_to_lab_array(v: np.ndarray) -> np.ndarray:
    xyz = np.asarray(v, dtype=np.float64) @ _M_RGB2XYZ.T / _WHITE_XYZ
    f = np.where(xyz > _LAB_DELTA ** 3, np.cbrt(np.maximum(xyz, 0.0)),
                 xyz / (3.0 * _LAB_DELTA ** 2) + 4.0 / 29.0)
    out = np.empty_like(f)
    out[..., 0] = 116.0 * f[..., 1] - 16.0
    out[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    out[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return out


def lab_to_linear_array(lab: np.ndarray) -> np.ndarray:
    lab = np.asarray(lab, dtype=np.float64)
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    f = np.stack([fx, fy, fz], axis=-1)
    xyz = np.where(f > _LAB_DELTA, f ** 3, 3.0 * _LAB_DELTA ** 2 * (f - 4.0 / 29.0))
    xyz = xyz * _WHITE_XYZ
    return xyz @ _M_XYZ2RGB.T


def simulate_array(v: np.ndarray, profile: CVDProfile, clamp: bool = True) -> np.ndarray:
    """Vectorized simulate over linear-light arrays of shape (..., 3)."""
    v = np.asarray(v, dtype=np.float64)
    if profile.is_identity:
        return v.copy()
    s = profile.severity
    if profile.kind is CVDKind.ACHROMAT:
        y = v @ np.array(_LUMA)
        out = (1.0 - s) * v + s * y[..., None]
    else:
        lms = v @ _M_RGB2LMS.T
        blended = (1.0 - s) * lms + s * (lms @ _PROJECTION[profile.kind].T)
        out = blended @ _M_LMS2RGB.T
    if clamp:
        out = np.clip(out, 0.0, 1.0)
    return out
