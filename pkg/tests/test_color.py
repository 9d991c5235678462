import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from chromadapt.color import (
    CVDKind,
    CVDProfile,
    DICHROMAT_KINDS,
    Lab,
    LinearRGB,
    LMS,
    SRGB8,
    UnitSRGB,
    build_projection,
    delta_e,
    format_hex,
    in_gamut,
    lab_to_linear,
    lab_to_linear_array,
    lab_to_srgb8,
    linear_to_lab,
    linear_to_lab_array,
    linear_to_srgb,
    linear_to_srgb8,
    linear_to_srgb_array,
    parse_hex,
    simulate,
    simulate_array,
    simulate_lms,
    srgb8_to_lab,
    srgb8_to_linear,
    srgb_to_linear,
    srgb_to_linear_array,
)
from chromadapt.errors import DomainError


# Independent oracle: the sRGB decode formula evaluated directly, written
# out here rather than shared with the implementation.
def _oracle_decode(v: float) -> float:
    return v / 12.92 if v <= 0.04045 else ((v + 0.055) / 1.055) ** 2.4


# --------------------------------------------------------------------------
# Transfer functions

def test_srgb_to_linear_fixed_points():
    assert srgb_to_linear(UnitSRGB(0, 0, 0)) == LinearRGB(0, 0, 0)
    assert srgb_to_linear(UnitSRGB(1, 1, 1)) == LinearRGB(1, 1, 1)


def test_srgb_to_linear_midgray_matches_oracle():
    got = srgb_to_linear(UnitSRGB(0.5, 0.5, 0.5))
    expected = _oracle_decode(0.5)
    assert expected == pytest.approx(0.21404114048223255, abs=1e-12)
    for ch in (got.r, got.g, got.b):
        assert ch == pytest.approx(expected, abs=1e-12)
        assert ch == pytest.approx(0.2140, abs=5e-4)


def test_srgb_to_linear_monotone_per_channel():
    vals = [i / 200.0 for i in range(201)]
    lin = [srgb_to_linear(UnitSRGB(v, v, v)).r for v in vals]
    assert all(a < b for a, b in zip(lin, lin[1:]))


def test_linear_to_srgb_inverse_and_midpoint():
    assert linear_to_srgb(LinearRGB(0, 0, 0)) == UnitSRGB(0, 0, 0)
    back = linear_to_srgb(LinearRGB(0.2140, 0.2140, 0.2140))
    assert back.r == pytest.approx(0.5, abs=1e-4)
    for v in (0.25, 0.5, 0.75):
        rt = linear_to_srgb(srgb_to_linear(UnitSRGB(v, v, v)))
        assert rt.r == pytest.approx(v, abs=1e-6)


def test_linear_to_srgb_rejects_out_of_range_naming_channel():
    with pytest.raises(DomainError, match="g"):
        linear_to_srgb(LinearRGB(0.5, 1.5, 0.5))


# --------------------------------------------------------------------------
# Lab

def test_lab_white_and_black():
    white = linear_to_lab(LinearRGB(1, 1, 1))
    assert white.L == pytest.approx(100.0, abs=1e-9)
    assert abs(white.a) <= 1e-3 and abs(white.b) <= 1e-3
    black = linear_to_lab(LinearRGB(0, 0, 0))
    assert (black.L, black.a, black.b) == (0.0, 0.0, 0.0)


def test_lab_midgray_lightness():
    # oracle: f(0.5) = 0.5^(1/3); L = 116 f - 16
    lab = linear_to_lab(LinearRGB(0.5, 0.5, 0.5))
    assert 70 < lab.L < 80
    assert lab.L == pytest.approx(116.0 * 0.5 ** (1 / 3) - 16.0, abs=1e-9)
    assert abs(lab.a) < 1e-6 and abs(lab.b) < 1e-6


def test_lab_to_linear_white_and_roundtrip():
    lin = lab_to_linear(Lab(100, 0, 0))
    for ch in (lin.r, lin.g, lin.b):
        assert ch == pytest.approx(1.0, abs=1e-6)
    v = LinearRGB(0.2, 0.6, 0.9)
    rt = lab_to_linear(linear_to_lab(v))
    assert rt.r == pytest.approx(v.r, abs=1e-4)
    assert rt.g == pytest.approx(v.g, abs=1e-4)
    assert rt.b == pytest.approx(v.b, abs=1e-4)


def test_extreme_chroma_is_out_of_gamut():
    lin = lab_to_linear(Lab(50, 200, 0))
    assert not in_gamut(lin)


def test_srgb8_lab_round_trip_exact_for_1000_colors():
    rnd = random.Random(12345)
    for _ in range(1000):
        c = SRGB8(rnd.randrange(256), rnd.randrange(256), rnd.randrange(256))
        assert lab_to_srgb8(srgb8_to_lab(c)) == c


def test_unit_round_trip_error_small():
    rnd = random.Random(99)
    for _ in range(200):
        v = UnitSRGB(rnd.random(), rnd.random(), rnd.random())
        lin = srgb_to_linear(v)
        lab = linear_to_lab(lin)
        back = lab_to_linear(lab)
        assert back.r == pytest.approx(lin.r, abs=1e-4)
        assert back.g == pytest.approx(lin.g, abs=1e-4)
        assert back.b == pytest.approx(lin.b, abs=1e-4)


# --------------------------------------------------------------------------
# delta_e metric properties

def test_delta_e_axis_distance():
    assert delta_e(Lab(0, 0, 0), Lab(100, 0, 0)) == 100.0


finite_lab = st.builds(
    Lab,
    st.floats(0, 100, allow_nan=False),
    st.floats(-120, 120, allow_nan=False),
    st.floats(-120, 120, allow_nan=False),
)


@given(finite_lab, finite_lab, finite_lab)
def test_delta_e_is_a_metric(a, b, c):
    assert delta_e(a, a) == 0.0
    assert delta_e(a, b) == delta_e(b, a)
    assert delta_e(a, b) >= 0.0
    assert delta_e(a, c) <= delta_e(a, b) + delta_e(b, c) + 1e-9


# quantized so component differences cannot underflow when squared
quantized_lab = st.builds(
    Lab,
    st.floats(0, 100, allow_nan=False).map(lambda v: round(v, 6)),
    st.floats(-120, 120, allow_nan=False).map(lambda v: round(v, 6)),
    st.floats(-120, 120, allow_nan=False).map(lambda v: round(v, 6)),
)


@given(quantized_lab, quantized_lab)
def test_delta_e_zero_iff_equal(a, b):
    if (a.L, a.a, a.b) != (b.L, b.a, b.b):
        assert delta_e(a, b) > 0.0


# --------------------------------------------------------------------------
# Projections

def _lms_of(linear: LinearRGB) -> np.ndarray:
    from chromadapt.color import _M_RGB2LMS  # construction constant

    return _M_RGB2LMS @ np.array([linear.r, linear.g, linear.b])


@pytest.mark.parametrize("kind", DICHROMAT_KINDS)
def test_projection_idempotent(kind):
    p = build_projection(kind)
    assert np.max(np.abs(p @ p - p)) <= 1e-9


@pytest.mark.parametrize("kind", DICHROMAT_KINDS)
def test_projection_fixes_white_and_anchor(kind):
    p = build_projection(kind)
    white = _lms_of(LinearRGB(1, 1, 1))
    assert np.max(np.abs(p @ white - white)) <= 1e-9
    anchor_rgb = LinearRGB(1, 0, 0) if kind is CVDKind.TRITAN else LinearRGB(0, 0, 1)
    anchor = _lms_of(anchor_rgb)
    assert np.max(np.abs(p @ anchor - anchor)) <= 1e-9


def test_projection_only_rewrites_missing_row():
    p = build_projection(CVDKind.DEUTAN)
    ident = np.eye(3)
    assert np.array_equal(p[0], ident[0])
    assert np.array_equal(p[2], ident[2])
    assert not np.array_equal(p[1], ident[1])


def test_projection_rejects_non_dichromat():
    with pytest.raises(DomainError):
        build_projection(CVDKind.NORMAL)


# --------------------------------------------------------------------------
# simulate

def test_profile_normal_forces_zero_severity():
    p = CVDProfile(CVDKind.NORMAL, 0.9)
    assert p.severity == 0.0


def test_simulate_identity_for_normal_and_zero_severity():
    c = LinearRGB(0.3, 0.7, 0.2)
    assert simulate(c, CVDProfile(CVDKind.NORMAL, 0.0)) is c
    assert simulate(c, CVDProfile(CVDKind.DEUTAN, 0.0)) is c


@pytest.mark.parametrize("g", [0.0, 0.25, 0.5, 0.9, 1.0])
def test_simulate_fixes_grays(g):
    out = simulate(LinearRGB(g, g, g), CVDProfile(CVDKind.PROTAN, 1.0))
    for ch in (out.r, out.g, out.b):
        assert ch == pytest.approx(g, abs=1e-9)


def test_simulate_dichromat_idempotent():
    prof = CVDProfile(CVDKind.DEUTAN, 1.0)
    c = LinearRGB(0.8, 0.2, 0.4)
    once = simulate(c, prof)
    twice = simulate(once, prof)
    assert twice.r == pytest.approx(once.r, abs=1e-6)
    assert twice.g == pytest.approx(once.g, abs=1e-6)
    assert twice.b == pytest.approx(once.b, abs=1e-6)


def test_simulate_achromat_green_luminance():
    out = simulate(LinearRGB(0, 1, 0), CVDProfile(CVDKind.ACHROMAT, 1.0))
    assert out == LinearRGB(0.7152, 0.7152, 0.7152)


def test_achromat_always_gray_at_full_severity():
    rnd = random.Random(4)
    prof = CVDProfile(CVDKind.ACHROMAT, 1.0)
    for _ in range(100):
        out = simulate(LinearRGB(rnd.random(), rnd.random(), rnd.random()), prof)
        assert out.r == out.g == out.b


def test_severity_linearity_in_lms():
    base = LMS(0.45, 0.31, 0.22)
    full = simulate_lms(base, CVDKind.DEUTAN, 1.0)
    for s in (0.0, 0.25, 0.5, 1.0):
        got = simulate_lms(base, CVDKind.DEUTAN, s)
        assert got.l == (1 - s) * base.l + s * full.l
        assert got.m == (1 - s) * base.m + s * full.m
        assert got.s == (1 - s) * base.s + s * full.s


def test_gamut_safety():
    rnd = random.Random(11)
    for kind in (*DICHROMAT_KINDS, CVDKind.ACHROMAT):
        for _ in range(50):
            prof = CVDProfile(kind, rnd.random())
            out = simulate(LinearRGB(rnd.random(), rnd.random(), rnd.random()), prof)
            assert in_gamut(out)


# --------------------------------------------------------------------------
# scalar vs array agreement

def test_array_variants_match_scalar():
    rnd = random.Random(3)
    unit = np.array([[rnd.random(), rnd.random(), rnd.random()] for _ in range(64)])
    lin = srgb_to_linear_array(unit)
    lab = linear_to_lab_array(lin)
    back = lab_to_linear_array(lab)
    enc = linear_to_srgb_array(lin)
    prof = CVDProfile(CVDKind.PROTAN, 0.8)
    sim = simulate_array(lin, prof)
    for i in range(64):
        u = UnitSRGB(*unit[i])
        s_lin = srgb_to_linear(u)
        assert np.allclose(lin[i], [s_lin.r, s_lin.g, s_lin.b], atol=1e-12)
        s_lab = linear_to_lab(s_lin)
        assert np.allclose(lab[i], [s_lab.L, s_lab.a, s_lab.b], atol=1e-9)
        assert np.allclose(back[i], lin[i], atol=1e-9)
        s_enc = linear_to_srgb(s_lin)
        assert np.allclose(enc[i], [s_enc.r, s_enc.g, s_enc.b], atol=1e-12)
        s_sim = simulate(s_lin, prof)
        assert np.allclose(sim[i], [s_sim.r, s_sim.g, s_sim.b], atol=1e-12)


# --------------------------------------------------------------------------
# hex / SRGB8 plumbing

def test_hex_round_trip():
    assert format_hex(parse_hex("#3FA0c1")) == "#3FA0C1"
    assert format_hex(parse_hex("3FA0C1"), prefix=False) == "3FA0C1"
    with pytest.raises(DomainError):
        parse_hex("#12345")


def test_srgb8_validation():
    with pytest.raises(DomainError):
        SRGB8(-1, 0, 0)
    with pytest.raises(DomainError):
        SRGB8(0, 256, 0)


def test_linear_to_srgb8_clamps():
    assert linear_to_srgb8(LinearRGB(1.2, -0.1, 0.5)).r == 255
    assert linear_to_srgb8(LinearRGB(1.2, -0.1, 0.5)).g == 0


def test_srgb8_linear_helpers():
    c = SRGB8(128, 64, 200)
    lin = srgb8_to_linear(c)
    assert linear_to_srgb8(lin) == c
