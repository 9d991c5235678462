"""Stage 1: administer a plate battery, collect responses, classify.

A battery is one demo plate, graded red-green and tritan vanishing plates,
and diagnostic plates separating protan from deutan. Classification follows
fixed counting rules; the simulated respondent replaces human subjects for
closed-loop testing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .color import CVDKind, CVDProfile
from .errors import DomainError, SequencingError, StateError, ValidationError
from .plates import (
    DesignKind,
    IshiharaPlate,
    PackParams,
    BATTERY_PACK,
    PlateDesign,
    compose_plate,
    glyph_visibility,
    plate_from_dict,
    plate_to_dict,
)
from .rng import Xoshiro256StarStar

RED_GREEN_ERROR_MIN = 3   # of 8 red-green vanishing plates
TRITAN_ERROR_MIN = 2      # of 4 tritan vanishing plates

_DIFFICULTY_LADDER = (0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0)


@dataclass(frozen=True)
class BatteryComposition:
    protan_vanishing: int = 4
    deutan_vanishing: int = 4
    tritan_vanishing: int = 4
    diagnostic: int = 4

    def __post_init__(self):
        if self.protan_vanishing + self.deutan_vanishing < 6:
            raise ValidationError("battery needs >= 6 red-green vanishing plates")
        if self.tritan_vanishing < 3:
            raise ValidationError("battery needs >= 3 tritan vanishing plates")
        if self.diagnostic < 3:
            raise ValidationError("battery needs >= 3 diagnostic plates")

    @property
    def total(self) -> int:
        return 1 + self.protan_vanishing + self.deutan_vanishing \
            + self.tritan_vanishing + self.diagnostic


@dataclass
class Battery:
    id: str
    seed: int
    composition: BatteryComposition
    plates: list[IshiharaPlate]


def _ladder(count: int) -> list[float]:
    return [_DIFFICULTY_LADDER[i % 4] for i in range(count)]


def create_battery(
    seed: int,
    composition: BatteryComposition | None = None,
    pack_params: PackParams = BATTERY_PACK,
) -> Battery:
    """Deterministic battery: demo first, then graded vanishing plates and
    diagnostics. Plate seeds and digits come from one seeded stream."""
    comp = composition or BatteryComposition()
    rng = Xoshiro256StarStar(seed)

    def draw_digits(n: int) -> str:
        digits = []
        while len(digits) < n:
            d = str(rng.below(10))
            if d not in digits:
                digits.append(d)
        return "".join(digits)

    specs: list[tuple[PlateDesign, str]] = [(PlateDesign(DesignKind.DEMO), draw_digits(2))]
    for kind, count in (
        (CVDKind.PROTAN, comp.protan_vanishing),
        (CVDKind.DEUTAN, comp.deutan_vanishing),
        (CVDKind.TRITAN, comp.tritan_vanishing),
    ):
        for difficulty in _ladder(count):
            specs.append((PlateDesign(DesignKind.VANISHING, kind, difficulty), draw_digits(1)))
    for _ in range(comp.diagnostic):
        specs.append((PlateDesign(DesignKind.DIAGNOSTIC), draw_digits(2)))

    plates = [
        compose_plate(design, digits, rng.next_u64(), pack_params)
        for design, digits in specs
    ]
    return Battery(id=f"b{seed & ((1 << 64) - 1):016x}", seed=seed, composition=comp, plates=plates)


# ---------------------------------------------------------------------------
# Sessions

class SessionState(Enum):
    IN_PROGRESS = "in_progress"
    COMPLETE = "complete"
    ABORTED = "aborted"


@dataclass(frozen=True)
class Response:
    plate_id: str
    answer: str

    def __post_init__(self):
        if len(self.answer) > 8 or any(ch not in "0123456789" for ch in self.answer):
            raise ValidationError(f"answer {self.answer!r} must be a short digit string")


@dataclass
class TestSession:
    id: str
    battery: Battery
    cursor: int = 0
    responses: list[Response] = field(default_factory=list)
    state: SessionState = SessionState.IN_PROGRESS

    @property
    def current_plate(self) -> IshiharaPlate:
        return self.battery.plates[self.cursor]


def start_session(battery: Battery, session_id: str = "") -> TestSession:
    return TestSession(id=session_id or f"s-{battery.id}", battery=battery)


def submit_response(session: TestSession, response: Response) -> TestSession:
    """Append a response for the current plate and advance the cursor."""
    if session.state is not SessionState.IN_PROGRESS:
        raise StateError(f"session is {session.state.value}, not accepting responses")
    expected_id = session.current_plate.id
    if response.plate_id != expected_id:
        raise SequencingError(
            f"response for plate {response.plate_id!r} but current plate is {expected_id!r}"
        )
    session.responses.append(response)
    session.cursor += 1
    if session.cursor == len(session.battery.plates):
        session.state = SessionState.COMPLETE
    return session


# ---------------------------------------------------------------------------
# Classification

class ResultKind(Enum):
    NORMAL = "normal"
    PROTAN = "protan"
    DEUTAN = "deutan"
    TRITAN = "tritan"
    RED_GREEN_UNSPECIFIED = "red_green_unspecified"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class PlateOutcome:
    plate_id: str
    expected: str
    given: str
    correct: bool


@dataclass(frozen=True)
class Classification:
    kind: ResultKind
    severity: float
    confidence: float
    per_plate: list[PlateOutcome]


def _diag_digit_for(plate: IshiharaPlate, kind: CVDKind) -> str:
    for (digit, _), cert in zip(plate.glyphs, plate.certificates):
        if cert.profile.kind is kind:
            return digit
    raise ValidationError(f"diagnostic plate {plate.id} lacks a {kind.value} glyph")


def classify(battery: Battery, responses: list[Response]) -> Classification:
    """Apply the fixed rule ladder to a complete response set."""
    by_plate = {r.plate_id: r for r in responses}
    if len(responses) != len(battery.plates) or any(
        p.id not in by_plate for p in battery.plates
    ):
        raise ValidationError("need exactly one response per plate")

    per_plate: list[PlateOutcome] = []
    for plate in battery.plates:
        expected = plate.answer_key["normal"]
        given = by_plate[plate.id].answer
        per_plate.append(PlateOutcome(plate.id, expected, given, given == expected))
    outcome = {o.plate_id: o for o in per_plate}

    def errors(plates: list[IshiharaPlate]) -> int:
        return sum(0 if outcome[p.id].correct else 1 for p in plates)

    demo = [p for p in battery.plates if p.design.kind == DesignKind.DEMO]
    rg = [
        p for p in battery.plates
        if p.design.kind == DesignKind.VANISHING
        and p.design.target in (CVDKind.PROTAN, CVDKind.DEUTAN)
    ]
    protan_group = [p for p in rg if p.design.target is CVDKind.PROTAN]
    deutan_group = [p for p in rg if p.design.target is CVDKind.DEUTAN]
    tritan_group = [
        p for p in battery.plates
        if p.design.kind == DesignKind.VANISHING and p.design.target is CVDKind.TRITAN
    ]
    diagnostics = [p for p in battery.plates if p.design.kind == DesignKind.DIAGNOSTIC]

    # (1) demo gate
    if errors(demo) > 0:
        return Classification(ResultKind.UNCLASSIFIED, 0.0, 0.0, per_plate)

    rg_errors = errors(rg)
    tritan_errors = errors(tritan_group)

    # (3) red-green branch decided by diagnostic votes
    if rg_errors >= RED_GREEN_ERROR_MIN:
        protan_votes = 0
        deutan_votes = 0
        for plate in diagnostics:
            answer_digits = set(by_plate[plate.id].answer)
            protan_pair_digit = _diag_digit_for(plate, CVDKind.PROTAN)
            deutan_pair_digit = _diag_digit_for(plate, CVDKind.DEUTAN)
            # seeing only the deutan-target digit means the protan-vanishing
            # glyph disappeared for this viewer: a protan vote (and mirrored)
            if answer_digits == {deutan_pair_digit}:
                protan_votes += 1
            elif answer_digits == {protan_pair_digit}:
                deutan_votes += 1
        cast = protan_votes + deutan_votes
        if cast == 0 or protan_votes == deutan_votes:
            severity = rg_errors / len(rg)
            return Classification(ResultKind.RED_GREEN_UNSPECIFIED, severity, 0.0, per_plate)
        confidence = abs(protan_votes - deutan_votes) / cast
        if protan_votes > deutan_votes:
            severity = errors(protan_group) / len(protan_group)
            return Classification(ResultKind.PROTAN, severity, confidence, per_plate)
        severity = errors(deutan_group) / len(deutan_group)
        return Classification(ResultKind.DEUTAN, severity, confidence, per_plate)

    # (4) tritan branch
    if tritan_errors >= TRITAN_ERROR_MIN:
        severity = tritan_errors / len(tritan_group)
        confidence = 1.0 if tritan_errors == len(tritan_group) else tritan_errors / len(tritan_group)
        return Classification(ResultKind.TRITAN, severity, confidence, per_plate)

    # (5) normal
    return Classification(ResultKind.NORMAL, 0.0, 1.0, per_plate)


def simulated_respondent(profile: CVDProfile, plate: IshiharaPlate) -> Response:
    """Answer a plate the way the simulator says this profile perceives it."""
    seen = glyph_visibility(plate, profile)
    answer = "".join(d for (d, _), s in zip(plate.glyphs, seen) if s)
    return Response(plate.id, answer)


def respond_battery(profile: CVDProfile, battery: Battery) -> list[Response]:
    return [simulated_respondent(profile, p) for p in battery.plates]


# ---------------------------------------------------------------------------
# Serialization

def battery_to_dict(battery: Battery) -> dict:
    return {
        "id": battery.id,
        "seed": battery.seed,
        "composition": {
            "protan_vanishing": battery.composition.protan_vanishing,
            "deutan_vanishing": battery.composition.deutan_vanishing,
            "tritan_vanishing": battery.composition.tritan_vanishing,
            "diagnostic": battery.composition.diagnostic,
        },
        "plates": [plate_to_dict(p) for p in battery.plates],
    }


def battery_from_dict(data: dict) -> Battery:
    try:
        comp = BatteryComposition(**data["composition"])
        plates = [plate_from_dict(p) for p in data["plates"]]
        return Battery(id=data["id"], seed=data["seed"], composition=comp, plates=plates)
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed battery document: {exc}") from exc


def battery_to_json(battery: Battery) -> str:
    return json.dumps(battery_to_dict(battery), indent=2, sort_keys=True)


def responses_to_dict(battery_id: str, responses: list[Response]) -> dict:
    return {
        "battery_id": battery_id,
        "responses": [{"plate_id": r.plate_id, "answer": r.answer} for r in responses],
    }


def responses_from_dict(data: dict) -> tuple[str, list[Response]]:
    try:
        responses = [Response(r["plate_id"], r["answer"]) for r in data["responses"]]
        return data["battery_id"], responses
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed responses document: {exc}") from exc


def classification_to_dict(c: Classification) -> dict:
    return {
        "kind": c.kind.value,
        "severity": c.severity,
        "confidence": c.confidence,
        "per_plate": [
            {
                "plate_id": o.plate_id,
                "expected": o.expected,
                "given": o.given,
                "correct": o.correct,
            }
            for o in c.per_plate
        ],
    }
