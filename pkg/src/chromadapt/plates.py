"""Procedural Ishihara-style plate generation.

Every figure/ground color pair is certified against the simulator in
color.py: a vanishing pair must be far apart to normal vision (ΔE >= D_HIGH)
and collapse under the target deficiency's full simulation (ΔE <= D_LOW for
its difficulty). Certificates store values recomputed from the quantized
SRGB8 colors, so re-deriving them from serialized plates is bit-exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .color import (
    CVDKind,
    CVDProfile,
    DICHROMAT_KINDS,
    Lab,
    SRGB8,
    delta_e,
    format_hex,
    in_gamut,
    lab_to_linear,
    lab_to_srgb8,
    linear_to_lab,
    parse_hex,
    simulate,
    srgb8_to_lab,
)
from .errors import DomainError, GenerationError, ParameterError
from .font import GlyphPlacement, dual_glyph_placements, glyph_mask, single_glyph_placement
from .rng import Xoshiro256StarStar

# ---------------------------------------------------------------------------
# Design thresholds (ΔE unless noted). D_HIGH/D_LOW are the certificate
# bounds; the *search* aims inside narrower bands so that plate-level means
# (which drift ~0.5 ΔE from the base pair under jitter) stay within bounds,
# and so that no vanishing pair strays near the V_THRESH response cutoff.

D_HIGH = 30.0
L_LEAK = 2.0            # max |mean figure L* - mean ground L*|
JITTER_L = 6.0          # per-circle lightness jitter, uniform in +-JITTER_L
V_THRESH = 10.0         # a glyph is "seen" iff simulated pair ΔE >= this
CROSS_MIN = 14.0        # non-target dichromats must still see vanishing pairs
SD_FLOOR = 2.2          # min population L* spread; catches unjittered plates

DEMO_MIN_BUILD = 15.0   # demo pair: min residual across dichromats at build
DEMO_MIN_VALID = 12.0   # ...and the looser bound validate_plate re-checks

DIAG_TARGET_MAX = {CVDKind.PROTAN: 3.2, CVDKind.DEUTAN: 4.0}
DIAG_OTHER_MIN = {CVDKind.PROTAN: 13.0, CVDKind.DEUTAN: 10.8}
DIAG_LOW = 5.0          # validation bound for diagnostic target residual

_HEADROOM = JITTER_L + 0.5


def d_low(difficulty: float) -> float:
    """Vanishing threshold: harder plates are allowed a larger residual."""
    return 4.0 + 8.0 * difficulty


def _residual_band(difficulty: float) -> tuple[float, float]:
    hi = min(d_low(difficulty) - 1.0, 8.5)
    lo = min(max(0.8, d_low(difficulty) - 3.5), hi - 1.2)
    return lo, hi


# ---------------------------------------------------------------------------
# Types

class DesignKind:
    DEMO = "demo"
    VANISHING = "vanishing"
    DIAGNOSTIC = "diagnostic"


@dataclass(frozen=True)
class PlateDesign:
    kind: str
    target: CVDKind | None = None
    difficulty: float = 0.0

    def __post_init__(self):
        if self.kind not in (DesignKind.DEMO, DesignKind.VANISHING, DesignKind.DIAGNOSTIC):
            raise DomainError(f"unknown plate design kind {self.kind!r}")
        if not 0.0 <= self.difficulty <= 1.0:
            raise DomainError(f"difficulty {self.difficulty} outside [0, 1]")
        if self.kind == DesignKind.VANISHING:
            if self.target not in DICHROMAT_KINDS:
                raise DomainError("vanishing design requires a dichromat target")
        elif self.target is not None:
            raise DomainError(f"{self.kind} design takes no target")


@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    radius: float
    color: SRGB8 | None = None

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("circle radius must be positive")
        if math.hypot(self.cx, self.cy) > 1.0 - self.radius + 1e-9:
            raise DomainError("circle leaves the unit disk")


@dataclass(frozen=True)
class ColorPairCertificate:
    figure: SRGB8
    ground: SRGB8
    de_normal: float
    de_simulated: float
    profile: CVDProfile


@dataclass(frozen=True)
class PackParams:
    r_min: float = 0.012
    r_max: float = 0.035
    g_min: float = 0.004
    n_max: int = 3000
    max_failures: int = 4000


# Lighter packing for battery plates: same look, much faster tail.
BATTERY_PACK = PackParams(n_max=1200, max_failures=260)


@dataclass
class PackResult:
    circles: list[Circle]
    fill_fraction: float
    attempts: int


@dataclass
class IshiharaPlate:
    id: str
    design: PlateDesign
    glyphs: list[tuple[str, GlyphPlacement]]
    circles: list[Circle]
    answer_key: dict[str, str]
    certificates: list[ColorPairCertificate]
    seed: int
    _pop_cache: tuple | None = field(default=None, repr=False, compare=False)


VIEWER_CLASSES = ("normal", "protan", "deutan", "tritan")


# ---------------------------------------------------------------------------
# Packing

def pack_disk(seed: int, params: PackParams = PackParams()) -> PackResult:
    """Greedy dart throwing in the unit disk; deterministic per seed.

    Each dart takes the largest feasible radius in [r_min, r_max] at its
    center; packing stops after max_failures consecutive rejections or
    n_max circles.
    """
    if not (0.0 < params.r_min <= params.r_max <= 0.1):
        raise ParameterError("need 0 < r_min <= r_max <= 0.1")
    if params.max_failures < 1 or params.n_max < 1:
        raise ParameterError("n_max and max_failures must be >= 1")
    rng = Xoshiro256StarStar(seed)
    r_min, r_max, g_min = params.r_min, params.r_max, params.g_min
    n_max, max_failures = params.n_max, params.max_failures
    cell = 2.0 * r_max + g_min
    cxs: list[float] = []
    cys: list[float] = []
    rads: list[float] = []
    grid: dict[tuple[int, int], list[int]] = {}
    failures = 0
    attempts = 0
    placed = 0
    next_u64 = rng.next_u64
    sqrt, cos, sin, floor = math.sqrt, math.cos, math.sin, math.floor
    grid_get = grid.get
    two_pi = 2.0 * math.pi
    rho_scale = (1.0 - r_min) * 2.0 ** -13  # sqrt of a 26-bit uniform
    theta_scale = two_pi * 2.0 ** -26
    while placed < n_max and failures < max_failures:
        attempts += 1
        # one 64-bit draw yields both polar coordinates (26 bits each)
        word = next_u64()
        rho = rho_scale * sqrt(float(word >> 38))
        theta = theta_scale * float((word >> 12) & 0x3FFFFFF)
        x = rho * cos(theta)
        y = rho * sin(theta)
        allow = 1.0 - rho
        ix = int(floor(x / cell))
        iy = int(floor(y / cell))
        ok = True
        for dxy in _NEIGHBOR_OFFSETS:
            bucket = grid_get((ix + dxy[0], iy + dxy[1]))
            if not bucket:
                continue
            for idx in bucket:
                dx = x - cxs[idx]
                dy = y - cys[idx]
                d2 = dx * dx + dy * dy
                lim = allow + rads[idx] + g_min
                if d2 < lim * lim:
                    allow = sqrt(d2) - rads[idx] - g_min
                    if allow < r_min:
                        ok = False
                        break
            if not ok:
                break
        if not ok:
            failures += 1
            continue
        r = r_max if allow > r_max else allow
        idx = placed
        cxs.append(x)
        cys.append(y)
        rads.append(r)
        grid.setdefault((ix, iy), []).append(idx)
        placed += 1
        failures = 0
    circles = [Circle(cx, cy, r) for cx, cy, r in zip(cxs, cys, rads)]
    fill = sum(r * r for r in rads)  # disk area is pi, circle area sum pi*r^2
    return PackResult(circles, fill, attempts)


_NEIGHBOR_OFFSETS = tuple((dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1))


# ---------------------------------------------------------------------------
# Confusion-pair search

def _has_headroom(lab: Lab) -> bool:
    """In gamut with room for the full lightness jitter range."""
    return (
        in_gamut(lab_to_linear(lab))
        and in_gamut(lab_to_linear(Lab(lab.L - _HEADROOM, lab.a, lab.b)))
        and in_gamut(lab_to_linear(Lab(lab.L + _HEADROOM, lab.a, lab.b)))
    )


def _sim_lab(lab: Lab, kind: CVDKind) -> Lab:
    profile = CVDProfile(kind, 1.0)
    return linear_to_lab(simulate(lab_to_linear(lab), profile, clamp=True))


def _confusion_angle(ground: Lab, kind: CVDKind) -> float:
    """Angle in the a-b plane (at fixed L) along which the simulated image
    of a small displacement from `ground` changes least."""
    eps = 0.5
    g0 = _sim_lab(ground, kind)
    ra = _sim_lab(Lab(ground.L, ground.a + eps, ground.b), kind)
    rb = _sim_lab(Lab(ground.L, ground.a, ground.b + eps), kind)
    va = ((ra.L - g0.L), (ra.a - g0.a), (ra.b - g0.b))
    vb = ((rb.L - g0.L), (rb.a - g0.a), (rb.b - g0.b))
    aa = sum(x * x for x in va)
    bb = sum(x * x for x in vb)
    ab = sum(x * y for x, y in zip(va, vb))
    theta = 0.5 * math.atan2(2.0 * ab, aa - bb) + math.pi / 2.0
    # atan2 form yields an extremum; pick the one minimizing the quadratic
    def q(t: float) -> float:
        c, s = math.cos(t), math.sin(t)
        return aa * c * c + 2.0 * ab * c * s + bb * s * s

    alt = theta + math.pi / 2.0
    return theta if q(theta) <= q(alt) else alt


def _certify(figure8: SRGB8, ground8: SRGB8, kind: CVDKind) -> ColorPairCertificate:
    fig_lab = srgb8_to_lab(figure8)
    gnd_lab = srgb8_to_lab(ground8)
    de_n = delta_e(fig_lab, gnd_lab)
    de_s = delta_e(
        _sim_lab(fig_lab, kind),
        _sim_lab(gnd_lab, kind),
    )
    return ColorPairCertificate(figure8, ground8, de_n, de_s, CVDProfile(kind, 1.0))


def _sample_ground(rng: Xoshiro256StarStar, box: tuple) -> Lab | None:
    (l_lo, l_hi), (a_lo, a_hi), (b_lo, b_hi) = box
    lab = Lab(rng.uniform(l_lo, l_hi), rng.uniform(a_lo, a_hi), rng.uniform(b_lo, b_hi))
    return lab if _has_headroom(lab) else None


_VANISH_GROUND_BOX = ((48.0, 66.0), (-22.0, 22.0), (-24.0, 24.0))
_DIAG_GROUND_BOX = ((50.0, 60.0), (-14.0, 18.0), (-40.0, -18.0))
_DEMO_GROUND_BOX = ((50.0, 64.0), (-16.0, 16.0), (-16.0, 16.0))


def _search_figure(
    rng: Xoshiro256StarStar,
    ground: Lab,
    kind: CVDKind,
    residual_band: tuple[float, float],
    cross_min: dict[CVDKind, float],
    dn_range: tuple[float, float] = (32.0, 44.0),
    samples: int = 400,
) -> tuple[tuple[SRGB8, SRGB8, dict] | None, tuple | None]:
    """Sample iso-L directions around the confusion axis; verify on the
    quantized colors. Returns (accepted, best_rejected)."""
    axis = _confusion_angle(ground, kind)
    ground8 = lab_to_srgb8(ground)
    gnd_lab = srgb8_to_lab(ground8)
    gnd_sims = {k: _sim_lab(gnd_lab, k) for k in DICHROMAT_KINDS}
    lo, hi = residual_band
    best = None
    for _ in range(samples):
        theta = axis + rng.uniform(-0.55, 0.55)
        if rng.random() < 0.5:
            theta += math.pi
        dist = rng.uniform(*dn_range)
        fig = Lab(ground.L, ground.a + dist * math.cos(theta), ground.b + dist * math.sin(theta))
        if not _has_headroom(fig):
            continue
        fig8 = lab_to_srgb8(fig)
        fig_lab = srgb8_to_lab(fig8)
        de_n = delta_e(fig_lab, gnd_lab)
        if de_n < 31.0:
            continue
        de_t = delta_e(_sim_lab(fig_lab, kind), gnd_sims[kind])
        if best is None or de_t < best[2]["de_simulated"]:
            best = (fig8, ground8, {"de_normal": de_n, "de_simulated": de_t})
        if not lo <= de_t <= hi:
            continue
        crosses = {}
        ok = True
        for other, floor_de in cross_min.items():
            de_o = delta_e(_sim_lab(fig_lab, other), gnd_sims[other])
            crosses[other] = de_o
            if de_o < floor_de:
                ok = False
                break
        if not ok:
            continue
        return (fig8, ground8, {"de_normal": de_n, "de_simulated": de_t, "cross": crosses}), best
    return None, best


def pick_vanishing_pair(target: CVDProfile, difficulty: float, seed: int) -> ColorPairCertificate:
    """Find a certified vanishing pair for a full dichromat target."""
    if target.kind not in DICHROMAT_KINDS or target.severity != 1.0:
        raise DomainError("target must be a dichromat kind at severity 1.0")
    if not 0.0 <= difficulty <= 1.0:
        raise DomainError("difficulty must be in [0, 1]")
    rng = Xoshiro256StarStar(seed)
    pair = _search_vanishing(rng, target.kind, difficulty)
    return _certify(pair[0], pair[1], target.kind)


def _search_vanishing(
    rng: Xoshiro256StarStar, kind: CVDKind, difficulty: float, ground_tries: int = 24
) -> tuple[SRGB8, SRGB8]:
    band = _residual_band(difficulty)
    if kind is CVDKind.TRITAN:
        others = [k for k in DICHROMAT_KINDS if k is not kind]
        cross = {k: CROSS_MIN for k in others}
    else:
        # protan/deutan pairs cannot stay visible to the *other* red-green
        # kind (measured frontier ~11.9 max); only tritan visibility is held.
        cross = {CVDKind.TRITAN: CROSS_MIN}
    overall_best = None
    for _ in range(ground_tries):
        ground = _sample_ground(rng, _VANISH_GROUND_BOX)
        if ground is None:
            continue
        found, best = _search_figure(rng, ground, kind, band, cross)
        if found is not None:
            return found[0], found[1]
        if best is not None and (
            overall_best is None
            or best[2]["de_simulated"] < overall_best[2]["de_simulated"]
        ):
            overall_best = best
    raise GenerationError(
        f"no {kind.value} vanishing pair found at difficulty {difficulty}",
        best=overall_best,
    )


def _search_diagnostic(rng: Xoshiro256StarStar, ground_tries: int = 40):
    """One shared ground, a protan-vanishing and a deutan-vanishing figure."""
    for _ in range(ground_tries):
        ground = _sample_ground(rng, _DIAG_GROUND_BOX)
        if ground is None:
            continue
        protan_pair, _ = _search_figure(
            rng, ground, CVDKind.PROTAN,
            (0.8, DIAG_TARGET_MAX[CVDKind.PROTAN]),
            {CVDKind.DEUTAN: DIAG_OTHER_MIN[CVDKind.PROTAN]},
            dn_range=(32.0, 56.0), samples=500,
        )
        if protan_pair is None:
            continue
        deutan_pair, _ = _search_figure(
            rng, ground, CVDKind.DEUTAN,
            (0.8, DIAG_TARGET_MAX[CVDKind.DEUTAN]),
            {CVDKind.PROTAN: DIAG_OTHER_MIN[CVDKind.DEUTAN]},
            dn_range=(32.0, 56.0), samples=900,
        )
        if deutan_pair is None:
            continue
        return protan_pair, deutan_pair
    raise GenerationError("no diagnostic pair set found")


def _search_demo(rng: Xoshiro256StarStar, budget: int = 250):
    """Maximize the minimum residual across all dichromat simulations."""
    best = None
    for _ in range(budget):
        ground = _sample_ground(rng, _DEMO_GROUND_BOX)
        if ground is None:
            continue
        theta = rng.uniform(math.radians(25.0), math.radians(65.0))
        if rng.random() < 0.5:
            theta += math.pi
        dist = rng.uniform(34.0, 46.0)
        fig = Lab(ground.L, ground.a + dist * math.cos(theta), ground.b + dist * math.sin(theta))
        if not _has_headroom(fig):
            continue
        fig8 = lab_to_srgb8(fig)
        gnd8 = lab_to_srgb8(ground)
        fig_lab = srgb8_to_lab(fig8)
        gnd_lab = srgb8_to_lab(gnd8)
        if delta_e(fig_lab, gnd_lab) < 31.0:
            continue
        min_resid = min(
            delta_e(_sim_lab(fig_lab, k), _sim_lab(gnd_lab, k)) for k in DICHROMAT_KINDS
        )
        if best is None or min_resid > best[0]:
            best = (min_resid, fig8, gnd8)
    if best is None or best[0] < DEMO_MIN_BUILD:
        raise GenerationError("no demo pair with enough all-kind visibility", best=best)
    return best[1], best[2]


# ---------------------------------------------------------------------------
# Composition

def compose_plate(
    design: PlateDesign,
    digits: str,
    seed: int,
    pack_params: PackParams = BATTERY_PACK,
) -> IshiharaPlate:
    """Pack a disk, split circles into figure/ground per glyph mask, color
    them from certified pairs, jitter lightness, and fill the answer key."""
    if design.kind == DesignKind.DIAGNOSTIC:
        if len(digits) != 2 or digits[0] == digits[1]:
            raise ParameterError("diagnostic plates need exactly two distinct digits")
    elif not digits:
        raise ParameterError("demo/vanishing plates need at least one digit")
    if len(digits) > 2:
        raise ParameterError("at most two glyphs per plate")

    rng = Xoshiro256StarStar(seed)

    # Certified color pairs, one per glyph (shared pair except diagnostics).
    if design.kind == DesignKind.VANISHING:
        fig8, gnd8 = _search_vanishing(rng, design.target, design.difficulty)
        pairs = [(fig8, gnd8, design.target)] * len(digits)
    elif design.kind == DesignKind.DEMO:
        fig8, gnd8 = _search_demo(rng)
        worst = min(
            DICHROMAT_KINDS,
            key=lambda k: delta_e(_sim_lab(srgb8_to_lab(fig8), k), _sim_lab(srgb8_to_lab(gnd8), k)),
        )
        pairs = [(fig8, gnd8, worst)] * len(digits)
    else:
        protan_pair, deutan_pair = _search_diagnostic(rng)
        pairs = [
            (protan_pair[0], protan_pair[1], CVDKind.PROTAN),
            (deutan_pair[0], deutan_pair[1], CVDKind.DEUTAN),
        ]

    if len(digits) == 1:
        placements = [single_glyph_placement()]
    else:
        placements = list(dual_glyph_placements())
    glyphs = list(zip(digits, placements))
    masks = [glyph_mask(d, p) for d, p in glyphs]

    packed = pack_disk(rng.next_u64(), pack_params)

    ground8 = pairs[0][1]
    ground_lab = srgb8_to_lab(ground8)
    fig_labs = [srgb8_to_lab(p[0]) for p in pairs]

    circles: list[Circle] = []
    for c in packed.circles:
        base = ground_lab
        for gi, mask in enumerate(masks):
            if mask(c.cx, c.cy):
                base = fig_labs[gi]
                break
        jitter = rng.uniform(-JITTER_L, JITTER_L)
        color = lab_to_srgb8(Lab(base.L + jitter, base.a, base.b))
        circles.append(replace(c, color=color))

    certificates = [_certify(fig, gnd, kind) for fig, gnd, kind in pairs]
    plate = IshiharaPlate(
        id=f"p{seed & ((1 << 64) - 1):016x}",
        design=design,
        glyphs=glyphs,
        circles=circles,
        answer_key={},
        certificates=certificates,
        seed=seed,
    )
    for gi, labs in enumerate(_populations(plate)[0]):
        if not labs:
            raise GenerationError(f"glyph {gi} captured no circles")
    plate.answer_key = {
        cls: _expected_answer(plate, CVDProfile(CVDKind(cls), 0.0 if cls == "normal" else 1.0))
        for cls in VIEWER_CLASSES
    }
    return plate


def _populations(plate: IshiharaPlate) -> tuple[list[list[Lab]], list[Lab]]:
    """Per-glyph figure Lab lists and the ground Lab list, from the colored
    circles alone (re-classified by glyph mask at each circle center)."""
    if plate._pop_cache is not None:
        return plate._pop_cache
    masks = [glyph_mask(d, p) for d, p in plate.glyphs]
    figures: list[list[Lab]] = [[] for _ in masks]
    ground: list[Lab] = []
    for c in plate.circles:
        lab = srgb8_to_lab(c.color)
        for gi, mask in enumerate(masks):
            if mask(c.cx, c.cy):
                figures[gi].append(lab)
                break
        else:
            ground.append(lab)
    plate._pop_cache = (figures, ground)
    return plate._pop_cache


def _mean_lab(labs: list[Lab]) -> Lab:
    n = len(labs)
    return Lab(
        sum(v.L for v in labs) / n,
        sum(v.a for v in labs) / n,
        sum(v.b for v in labs) / n,
    )


def population_means(plate: IshiharaPlate) -> tuple[list[Lab], Lab]:
    figures, ground = _populations(plate)
    return [_mean_lab(f) for f in figures], _mean_lab(ground)


def glyph_visibility(plate: IshiharaPlate, profile: CVDProfile) -> list[bool]:
    """Whether each glyph's figure/ground mean pair stays >= V_THRESH apart
    under the profile's simulation. Answer keys and the simulated respondent
    share this rule, so they can never disagree."""
    fig_means, gnd_mean = population_means(plate)
    gnd_sim = linear_to_lab(simulate(lab_to_linear(gnd_mean), profile, clamp=True))
    out = []
    for fig in fig_means:
        fig_sim = linear_to_lab(simulate(lab_to_linear(fig), profile, clamp=True))
        out.append(delta_e(fig_sim, gnd_sim) >= V_THRESH)
    return out


def _expected_answer(plate: IshiharaPlate, profile: CVDProfile) -> str:
    seen = glyph_visibility(plate, profile)
    return "".join(d for (d, _), s in zip(plate.glyphs, seen) if s)


# ---------------------------------------------------------------------------
# Validation

@dataclass
class PlateValidation:
    ok: bool
    checks: dict[str, tuple[bool, float]]

    def failed(self) -> list[str]:
        return [name for name, (ok, _) in self.checks.items() if not ok]


def _population_sd(labs: list[Lab]) -> float:
    n = len(labs)
    mean = sum(v.L for v in labs) / n
    return math.sqrt(sum((v.L - mean) ** 2 for v in labs) / n)


def validate_plate(plate: IshiharaPlate) -> PlateValidation:
    """Recompute plate-level metrics from the colored circles alone."""
    figures, ground = _populations(plate)
    fig_means, gnd_mean = population_means(plate)
    checks: dict[str, tuple[bool, float]] = {}

    all_fig = [lab for labs in figures for lab in labs]
    leak = abs(_mean_lab(all_fig).L - gnd_mean.L)
    checks["luminance_leak"] = (leak <= L_LEAK, leak)
    sd_fig = _population_sd(all_fig)
    sd_gnd = _population_sd(ground)
    checks["figure_jitter_sd"] = (sd_fig >= SD_FLOOR, sd_fig)
    checks["ground_jitter_sd"] = (sd_gnd >= SD_FLOOR, sd_gnd)

    def mean_de(profile: CVDProfile, fig: Lab) -> float:
        a = linear_to_lab(simulate(lab_to_linear(fig), profile, clamp=True))
        b = linear_to_lab(simulate(lab_to_linear(gnd_mean), profile, clamp=True))
        return delta_e(a, b)

    normal = CVDProfile(CVDKind.NORMAL, 0.0)
    for gi, fig in enumerate(fig_means):
        de_n = mean_de(normal, fig)
        checks[f"glyph{gi}_de_normal"] = (de_n >= D_HIGH, de_n)

    if plate.design.kind == DesignKind.VANISHING:
        bound = d_low(plate.design.difficulty)
        target = CVDProfile(plate.design.target, 1.0)
        for gi, fig in enumerate(fig_means):
            de_t = mean_de(target, fig)
            checks[f"glyph{gi}_de_target"] = (de_t <= bound, de_t)
    elif plate.design.kind == DesignKind.DEMO:
        for gi, fig in enumerate(fig_means):
            worst = min(mean_de(CVDProfile(k, 1.0), fig) for k in DICHROMAT_KINDS)
            checks[f"glyph{gi}_min_sim"] = (worst >= DEMO_MIN_VALID, worst)
    else:
        for gi, (fig, cert) in enumerate(zip(fig_means, plate.certificates)):
            kind = cert.profile.kind
            other = CVDKind.DEUTAN if kind is CVDKind.PROTAN else CVDKind.PROTAN
            de_t = mean_de(CVDProfile(kind, 1.0), fig)
            de_o = mean_de(CVDProfile(other, 1.0), fig)
            checks[f"glyph{gi}_de_target"] = (de_t <= DIAG_LOW, de_t)
            checks[f"glyph{gi}_de_other"] = (de_o >= V_THRESH, de_o)

    ok = all(flag for flag, _ in checks.values())
    return PlateValidation(ok, checks)


# ---------------------------------------------------------------------------
# Rendering and serialization

SVG_SIZE = 640
_BACKGROUND = "#ECE9E2"


def render_svg(plate: IshiharaPlate) -> str:
    """Standalone SVG; circles only, no text nodes, byte-deterministic."""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
        f'viewBox="-1.02 -1.02 2.04 2.04">',
        f'<rect x="-1.02" y="-1.02" width="2.04" height="2.04" fill="{_BACKGROUND}"/>',
    ]
    for c in plate.circles:
        parts.append(
            f'<circle cx="{c.cx:.5f}" cy="{-c.cy:.5f}" r="{c.radius:.5f}" '
            f'fill="{format_hex(c.color)}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plate_to_dict(plate: IshiharaPlate) -> dict:
    return {
        "id": plate.id,
        "seed": plate.seed,
        "design": {
            "kind": plate.design.kind,
            "target": plate.design.target.value if plate.design.target else None,
            "difficulty": plate.design.difficulty,
        },
        "glyphs": [
            {"digit": d, "cx": p.cx, "cy": p.cy, "height": p.height}
            for d, p in plate.glyphs
        ],
        "circles": [
            {"cx": c.cx, "cy": c.cy, "radius": c.radius, "color": format_hex(c.color)}
            for c in plate.circles
        ],
        "answer_key": dict(plate.answer_key),
        "certificates": [
            {
                "figure": format_hex(c.figure),
                "ground": format_hex(c.ground),
                "de_normal": c.de_normal,
                "de_simulated": c.de_simulated,
                "profile": {"kind": c.profile.kind.value, "severity": c.profile.severity},
            }
            for c in plate.certificates
        ],
    }


def plate_from_dict(data: dict) -> IshiharaPlate:
    try:
        design = PlateDesign(
            kind=data["design"]["kind"],
            target=CVDKind(data["design"]["target"]) if data["design"]["target"] else None,
            difficulty=data["design"]["difficulty"],
        )
        glyphs = [
            (g["digit"], GlyphPlacement(g["cx"], g["cy"], g["height"]))
            for g in data["glyphs"]
        ]
        circles = [
            Circle(c["cx"], c["cy"], c["radius"], parse_hex(c["color"]))
            for c in data["circles"]
        ]
        certificates = [
            ColorPairCertificate(
                parse_hex(c["figure"]),
                parse_hex(c["ground"]),
                c["de_normal"],
                c["de_simulated"],
                CVDProfile(CVDKind(c["profile"]["kind"]), c["profile"]["severity"]),
            )
            for c in data["certificates"]
        ]
        return IshiharaPlate(
            id=data["id"],
            design=design,
            glyphs=glyphs,
            circles=circles,
            answer_key=dict(data["answer_key"]),
            certificates=certificates,
            seed=data["seed"],
        )
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed plate document: {exc}") from exc


def plate_to_json(plate: IshiharaPlate) -> str:
    return json.dumps(plate_to_dict(plate), indent=2, sort_keys=True)
