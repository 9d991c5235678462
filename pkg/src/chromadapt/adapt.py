"""Stage 2: select or numerically re-optimize an interface palette.

The optimizer works on the Lab coordinates of unpinned entries, descending a
pairwise-distance-matching objective by central finite differences with a
backtracking line search. Objective terms are accumulated with math.fsum so
results are independent of palette entry order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .color import (
    CVDKind,
    CVDProfile,
    Lab,
    SRGB8,
    delta_e,
    format_hex,
    lab_to_linear,
    lab_to_srgb8,
    linear_to_lab,
    parse_hex,
    simulate,
    srgb8_to_lab,
)
from .errors import DomainError, ValidationError

DEFAULT_LAMBDA = 0.05
DEFAULT_BETA = 10.0
DEFAULT_MAX_ITERS = 500
DEFAULT_TOL = 1e-6
DEFAULT_STEP = 1.0
FD_STEP = 1e-3


@dataclass(frozen=True)
class PaletteEntry:
    role: str
    color: SRGB8
    pinned: bool = False


@dataclass
class Palette:
    name: str
    entries: list[PaletteEntry]

    def __post_init__(self):
        roles = [e.role for e in self.entries]
        if len(set(roles)) != len(roles):
            raise ValidationError("palette roles must be unique")
        if len(self.entries) < 2:
            raise ValidationError("palette needs at least 2 entries")


@dataclass
class AdaptationResult:
    adapted: Palette
    objective_trace: list[float]
    iterations: int
    initial_score: float
    final_score: float


@dataclass(frozen=True)
class OptimizeOptions:
    lam: float = DEFAULT_LAMBDA
    beta: float = DEFAULT_BETA
    max_iters: int = DEFAULT_MAX_ITERS
    tol: float = DEFAULT_TOL
    step: float = DEFAULT_STEP


@dataclass(frozen=True)
class GradientCheckReport:
    max_rel_error: float
    richardson_factor: float
    grad_norm: float


# ---------------------------------------------------------------------------
# Scoring and selection

def _sim_lab(lab: Lab, profile: CVDProfile, clamp: bool = True) -> Lab:
    if profile.is_identity:
        return lab  # exact identity; skips Lab round-trip noise
    return linear_to_lab(simulate(lab_to_linear(lab), profile, clamp=clamp))


def score_palette(palette: Palette, profile: CVDProfile) -> float:
    """Minimum pairwise ΔE among the palette's simulated colors."""
    if len(palette.entries) < 2:
        raise ValidationError("palette needs at least 2 entries")
    labs = [_sim_lab(srgb8_to_lab(e.color), profile) for e in palette.entries]
    return min(
        delta_e(labs[i], labs[j])
        for i in range(len(labs))
        for j in range(i + 1, len(labs))
    )


def select_scheme(schemes: list[Palette], profile: CVDProfile) -> tuple[int, float]:
    """Index of the scheme with the best worst-pair separation; first wins ties."""
    if not schemes:
        raise ValidationError("no schemes to select from")
    best_idx = 0
    best_score = score_palette(schemes[0], profile)
    for idx in range(1, len(schemes)):
        score = score_palette(schemes[idx], profile)
        if score > best_score:
            best_idx, best_score = idx, score
    return best_idx, best_score


# ---------------------------------------------------------------------------
# Objective

def _gamut_violation(linear) -> float:
    # 1e-9 dead zone absorbs Lab round-trip noise on exactly-boundary colors
    total = 0.0
    for v in (linear.r, linear.g, linear.b):
        if v < -1e-9:
            total += v * v
        elif v > 1.0 + 1e-9:
            total += (v - 1.0) * (v - 1.0)
    return total


def _objective_terms(
    labs: list[Lab],
    original_labs: list[Lab],
    target_d: list[float],
    profile: CVDProfile,
    lam: float,
    beta: float,
) -> float:
    """E = sum (d̂_ij - d_ij)^2 + λ sum ΔE(c'_i, c_i)^2 + β G(candidate).

    Simulation runs unclamped so the objective stays C^1; the gamut penalty
    does the policing instead.
    """
    n = len(labs)
    sims = [_sim_lab(lab, profile, clamp=False) for lab in labs]
    terms: list[float] = []
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            diff = delta_e(sims[i], sims[j]) - target_d[k]
            terms.append(diff * diff)
            k += 1
    if lam != 0.0:
        for lab, orig in zip(labs, original_labs):
            disp = delta_e(lab, orig)
            terms.append(lam * disp * disp)
    if beta != 0.0:
        for lab in labs:
            terms.append(beta * _gamut_violation(lab_to_linear(lab)))
    return math.fsum(terms)


def _pairwise_targets(labs: list[Lab]) -> list[float]:
    n = len(labs)
    return [
        delta_e(labs[i], labs[j])
        for i in range(n)
        for j in range(i + 1, n)
    ]


def _check_roles(candidate: Palette, original: Palette) -> None:
    cand = [(e.role, e.pinned) for e in candidate.entries]
    orig = [(e.role, e.pinned) for e in original.entries]
    if cand != orig:
        raise ValidationError("candidate and original palettes must share roles and order")


def objective(
    candidate: Palette,
    original: Palette,
    profile: CVDProfile,
    lam: float = DEFAULT_LAMBDA,
    beta: float = DEFAULT_BETA,
) -> float:
    """Distance-mismatch + fidelity + gamut objective between two palettes."""
    _check_roles(candidate, original)
    original_labs = [srgb8_to_lab(e.color) for e in original.entries]
    candidate_labs = [srgb8_to_lab(e.color) for e in candidate.entries]
    return _objective_terms(
        candidate_labs, original_labs, _pairwise_targets(original_labs), profile, lam, beta
    )


# ---------------------------------------------------------------------------
# Optimizer

class _LabVector:
    """Maps the flat decision vector onto the palette's unpinned Lab coords."""

    def __init__(self, original: Palette):
        self.original_labs = [srgb8_to_lab(e.color) for e in original.entries]
        self.free = [i for i, e in enumerate(original.entries) if not e.pinned]
        self.target_d = _pairwise_targets(self.original_labs)

    def x0(self) -> list[float]:
        out = []
        for i in self.free:
            lab = self.original_labs[i]
            out.extend((lab.L, lab.a, lab.b))
        return out

    def labs(self, x: list[float]) -> list[Lab]:
        labs = list(self.original_labs)
        for slot, i in enumerate(self.free):
            base = 3 * slot
            labs[i] = Lab(x[base], x[base + 1], x[base + 2])
        return labs


def _fd_gradient(f, x: list[float], h: float) -> list[float]:
    grad = []
    probe = list(x)
    for i in range(len(x)):
        orig = probe[i]
        probe[i] = orig + h
        hi = f(probe)
        probe[i] = orig - h
        lo = f(probe)
        probe[i] = orig
        grad.append((hi - lo) / (2.0 * h))
    return grad


def optimize_palette(
    original: Palette,
    profile: CVDProfile,
    opts: OptimizeOptions | None = None,
) -> AdaptationResult:
    """Steepest descent on unpinned Lab coordinates; deterministic."""
    opts = opts or OptimizeOptions()
    initial_score = score_palette(original, profile)

    if profile.kind is CVDKind.NORMAL:
        adapted = Palette(original.name, list(original.entries))
        return AdaptationResult(adapted, [0.0], 0, initial_score, initial_score)

    vec = _LabVector(original)
    if not vec.free:
        raise ValidationError("all palette entries are pinned; nothing to optimize")

    def f(x: list[float]) -> float:
        return _objective_terms(
            vec.labs(x), vec.original_labs, vec.target_d, profile, opts.lam, opts.beta
        )

    x = vec.x0()
    fx = f(x)
    trace = [fx]
    iterations = 0
    for _ in range(opts.max_iters):
        grad = _fd_gradient(f, x, FD_STEP)
        norm = math.sqrt(math.fsum(g * g for g in grad))
        if norm < 1e-12:
            break
        direction = [-g / norm for g in grad]
        step = opts.step
        accepted = False
        while step >= 1e-8:
            cand = [xi + step * di for xi, di in zip(x, direction)]
            fc = f(cand)
            if fc < fx:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        rel_drop = (fx - fc) / fx if fx > 0 else 0.0
        x, fx = cand, fc
        trace.append(fx)
        iterations += 1
        if rel_drop < opts.tol:
            break

    adapted_entries = []
    labs = vec.labs(x)
    for i, entry in enumerate(original.entries):
        if entry.pinned:
            adapted_entries.append(entry)
        else:
            adapted_entries.append(
                PaletteEntry(entry.role, lab_to_srgb8(labs[i]), entry.pinned)
            )
    adapted = Palette(original.name, adapted_entries)
    final_score = score_palette(adapted, profile)
    return AdaptationResult(adapted, trace, iterations, initial_score, final_score)


def gradient_check(
    candidate: Palette,
    original: Palette,
    profile: CVDProfile,
    lam: float = DEFAULT_LAMBDA,
    beta: float = DEFAULT_BETA,
    h: float = FD_STEP,
) -> GradientCheckReport:
    """Compare central differences at h and h/2; Richardson-extrapolate the
    reference gradient and report worst-case agreement."""
    _check_roles(candidate, original)
    for entry in candidate.entries:
        if not entry.pinned:
            lin = lab_to_linear(srgb8_to_lab(entry.color))
            if not all(1e-4 < v < 1.0 - 1e-4 for v in (lin.r, lin.g, lin.b)):
                raise DomainError(
                    f"entry {entry.role!r} sits on the gamut boundary; "
                    "gradient check needs a strictly interior candidate"
                )

    vec = _LabVector(original)
    if not vec.free:
        raise ValidationError("all palette entries are pinned; nothing to check")
    cand_labs = [srgb8_to_lab(e.color) for e in candidate.entries]
    x = []
    for i in vec.free:
        lab = cand_labs[i]
        x.extend((lab.L, lab.a, lab.b))

    def f(xv: list[float]) -> float:
        return _objective_terms(
            vec.labs(xv), vec.original_labs, vec.target_d, profile, lam, beta
        )

    g_h = _fd_gradient(f, x, h)
    g_h2 = _fd_gradient(f, x, h / 2.0)
    # O(h^2) truncation: g_star = (4 g_{h/2} - g_h) / 3 cancels the leading term
    g_star = [(4.0 * b - a) / 3.0 for a, b in zip(g_h, g_h2)]
    norm_star = math.sqrt(math.fsum(g * g for g in g_star))
    scale = max(norm_star, 1e-12)

    max_rel = max(
        abs(a - b) / max(abs(s), 1e-3 * scale)
        for a, b, s in zip(g_h, g_h2, g_star)
    )
    err_h = math.sqrt(math.fsum((a - s) ** 2 for a, s in zip(g_h, g_star)))
    err_h2 = math.sqrt(math.fsum((b - s) ** 2 for b, s in zip(g_h2, g_star)))
    factor = err_h / err_h2 if err_h2 > 0 else float("inf")
    return GradientCheckReport(max_rel, factor, norm_star)


# ---------------------------------------------------------------------------
# Profiles from classifications, serialization

def adaptation_profile(kind_value: str, severity: float) -> CVDProfile:
    """Map a classification outcome onto a simulator profile. Red-green
    unspecified adapts as deutan; unclassified falls back to normal."""
    if kind_value == "red_green_unspecified":
        return CVDProfile(CVDKind.DEUTAN, severity)
    if kind_value == "unclassified":
        return CVDProfile(CVDKind.NORMAL, 0.0)
    return CVDProfile(CVDKind(kind_value), severity)


def palette_to_dict(palette: Palette) -> dict:
    return {
        "name": palette.name,
        "colors": [
            {"role": e.role, "srgb": format_hex(e.color), "pinned": e.pinned}
            for e in palette.entries
        ],
    }


def palette_from_dict(data: dict) -> Palette:
    try:
        entries = [
            PaletteEntry(c["role"], parse_hex(c["srgb"]), bool(c.get("pinned", False)))
            for c in data["colors"]
        ]
        return Palette(data["name"], entries)
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed palette document: {exc}") from exc


def palette_to_json(palette: Palette) -> str:
    return json.dumps(palette_to_dict(palette), indent=2, sort_keys=True)


def adaptation_to_dict(result: AdaptationResult) -> dict:
    return {
        "adapted": palette_to_dict(result.adapted),
        "initial_score": result.initial_score,
        "final_score": result.final_score,
        "iterations": result.iterations,
        "objective_trace": list(result.objective_trace),
    }
