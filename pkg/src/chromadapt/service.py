"""HTTP facade: session lifecycle, plate delivery, classification, adaptation.

State is an append-only JSON-lines event log replayed fully at startup;
batteries are rebuilt from their recorded seeds, so the log stays small and
replay is exact. Per-session mutation is serialized under one store lock.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response as HTTPResponse
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .adapt import (
    OptimizeOptions,
    Palette,
    PaletteEntry,
    adaptation_profile,
    adaptation_to_dict,
    optimize_palette,
    palette_from_dict,
    palette_to_dict,
    select_scheme,
)
from .color import (
    CVDKind,
    CVDProfile,
    SRGB8,
    format_hex,
    linear_to_srgb8,
    parse_hex,
    simulate,
    srgb8_to_linear,
)
from .errors import ChromadaptError, DomainError, ReplayError, StateError, ValidationError
from .rng import splitmix64
from .screening import (
    Classification,
    Response as PlateResponse,
    SessionState,
    TestSession,
    classification_to_dict,
    classify,
    create_battery,
    start_session,
    submit_response,
)
from .plates import render_svg

# batteries are pure functions of their seed; fixed-seed mode reuses them
_battery_for_seed = lru_cache(maxsize=8)(create_battery)

DEFAULT_PALETTE = Palette("default", [
    PaletteEntry("background", SRGB8(248, 247, 243), pinned=True),
    PaletteEntry("surface", SRGB8(255, 255, 255), pinned=True),
    PaletteEntry("text", SRGB8(34, 34, 38), pinned=True),
    PaletteEntry("primary", SRGB8(0, 112, 86)),
    PaletteEntry("accent", SRGB8(196, 64, 48)),
    PaletteEntry("warning", SRGB8(222, 155, 0)),
])


@dataclass
class ServerConfig:
    port: int = 8077
    state_path: Path | None = None
    seed: int | None = None  # None -> per-session-random battery seeds
    catalog_dir: Path | None = None
    default_palette_path: Path | None = None
    cors_origins: tuple[str, ...] = ("*",)
    ui_dir: Path | None = None

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise DomainError(f"port {self.port} outside [1, 65535]")


@dataclass
class SessionRecord:
    session: TestSession
    battery_seed: int
    created: str
    classification: Classification | None = None
    result_body: dict | None = None


@dataclass
class SessionStore:
    config: ServerConfig
    sessions: dict[str, SessionRecord] = field(default_factory=dict)
    lock: threading.RLock = field(default_factory=threading.RLock)
    _id_state: int = 0
    _log: object = None

    def __post_init__(self):
        if self.config.seed is not None:
            self._id_state = self.config.seed

    # -- identifiers ----------------------------------------------------
    def new_session_id(self) -> str:
        if self.config.seed is None:
            return secrets.token_hex(16)
        # fixed-seed mode keeps ids deterministic for replayable tests
        self._id_state, hi = splitmix64(self._id_state)
        self._id_state, lo = splitmix64(self._id_state)
        return f"{hi:016x}{lo:016x}"

    def new_battery_seed(self) -> int:
        if self.config.seed is not None:
            return self.config.seed
        return int.from_bytes(secrets.token_bytes(8), "big")

    # -- event log -------------------------------------------------------
    def append_event(self, event: dict) -> None:
        if self.config.state_path is None:
            return
        if self._log is None:
            self._log = open(self.config.state_path, "a", encoding="utf-8")
        self._log.write(json.dumps(event, sort_keys=True) + "\n")
        self._log.flush()

    def close(self) -> None:
        if self._log is not None:
            self._log.close()
            self._log = None


def replay_state(store: SessionStore) -> None:
    """Rebuild every session from the event log; strict about bad lines."""
    path = store.config.state_path
    if path is None or not Path(path).exists():
        return
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                event = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ReplayError(f"invalid JSON: {exc}", lineno) from exc
            try:
                _apply_event(store, event)
            except ReplayError as exc:
                if exc.line_number is None:
                    raise ReplayError(str(exc), lineno) from exc
                raise
            except (KeyError, TypeError, ValueError, ChromadaptError) as exc:
                raise ReplayError(f"cannot apply event: {exc}", lineno) from exc


def _apply_event(store: SessionStore, event: dict) -> None:
    kind = event["event"]
    if kind == "session_created":
        battery = _battery_for_seed(int(event["battery_seed"]))
        session = start_session(battery, session_id=event["session_id"])
        store.sessions[event["session_id"]] = SessionRecord(
            session=session,
            battery_seed=int(event["battery_seed"]),
            created=event["created"],
        )
    elif kind == "response":
        record = store.sessions[event["session_id"]]
        submit_response(record.session, PlateResponse(event["plate_id"], event["answer"]))
    elif kind == "classified":
        record = store.sessions[event["session_id"]]
        recomputed = classify(record.session.battery, record.session.responses)
        stored = event["classification"]
        if stored["kind"] != recomputed.kind.value:
            raise ReplayError(
                f"stored classification {stored['kind']} disagrees with replay "
                f"{recomputed.kind.value}"
            )
        record.classification = recomputed
    elif kind == "adapted":
        record = store.sessions[event["session_id"]]
        record.result_body = event["body"]
    else:
        raise ReplayError(f"unknown event type {kind!r}")


# ---------------------------------------------------------------------------
# Palette catalog

def load_catalog(config: ServerConfig) -> tuple[Palette, list[Palette]]:
    """Default palette plus candidate schemes, in sorted-filename order."""
    default = DEFAULT_PALETTE
    if config.default_palette_path is not None:
        default = palette_from_dict(
            json.loads(Path(config.default_palette_path).read_text(encoding="utf-8"))
        )
    schemes: list[Palette] = []
    if config.catalog_dir is not None and Path(config.catalog_dir).is_dir():
        for path in sorted(Path(config.catalog_dir).glob("*.json")):
            schemes.append(palette_from_dict(json.loads(path.read_text(encoding="utf-8"))))
    if not schemes:
        schemes = [default]
    return default, schemes


# ---------------------------------------------------------------------------
# Request models

class ResponseBody(BaseModel):
    answer: str


class AdaptBody(BaseModel):
    palette: dict
    profile: dict


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def create_app(config: ServerConfig | None = None) -> FastAPI:
    config = config or ServerConfig()
    store = SessionStore(config)
    replay_state(store)
    default_palette, schemes = load_catalog(config)

    app = FastAPI(title="chromadapt", version="0.1.0")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def get_record(session_id: str) -> SessionRecord:
        record = store.sessions.get(session_id)
        if record is None:
            raise HTTPException(404, f"unknown session {session_id}")
        return record

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/palette")
    def default_palette_endpoint():
        # the UI's original-vs-adapted preview needs the baseline palette
        return palette_to_dict(default_palette)

    @app.post("/api/sessions")
    def create_session():
        with store.lock:
            seed = store.new_battery_seed()
            try:
                battery = _battery_for_seed(seed)
            except ChromadaptError as exc:
                raise HTTPException(500, f"battery generation failed: {exc}") from exc
            session_id = store.new_session_id()
            session = start_session(battery, session_id=session_id)
            record = SessionRecord(session=session, battery_seed=seed, created=_now())
            store.sessions[session_id] = record
            store.append_event({
                "event": "session_created",
                "session_id": session_id,
                "battery_seed": seed,
                "created": record.created,
            })
            return {
                "session_id": session_id,
                "plate_count": len(battery.plates),
                "first_plate_id": battery.plates[0].id,
            }

    @app.get("/api/sessions/{session_id}/plate")
    def current_plate(session_id: str):
        with store.lock:
            record = get_record(session_id)
            session = record.session
            if session.state is not SessionState.IN_PROGRESS:
                raise HTTPException(409, f"session is {session.state.value}")
            plate = session.current_plate
            svg = render_svg(plate)
            return HTTPResponse(
                content=svg,
                media_type="image/svg+xml",
                headers={
                    "X-Plate-Id": plate.id,
                    "X-Plate-Index": str(session.cursor),
                    "X-Plate-Total": str(len(session.battery.plates)),
                },
            )

    @app.post("/api/sessions/{session_id}/response")
    def post_response(session_id: str, body: ResponseBody):
        with store.lock:
            record = get_record(session_id)
            session = record.session
            if session.state is not SessionState.IN_PROGRESS:
                raise HTTPException(409, f"session is {session.state.value}")
            plate_id = session.current_plate.id
            try:
                response = PlateResponse(plate_id, body.answer)
            except ValidationError as exc:
                raise HTTPException(400, str(exc)) from exc
            try:
                submit_response(session, response)
            except (StateError, ChromadaptError) as exc:
                raise HTTPException(409, str(exc)) from exc
            store.append_event({
                "event": "response",
                "session_id": session_id,
                "plate_id": plate_id,
                "answer": body.answer,
            })
            if session.state is SessionState.COMPLETE:
                record.classification = classify(session.battery, session.responses)
                store.append_event({
                    "event": "classified",
                    "session_id": session_id,
                    "classification": classification_to_dict(record.classification),
                })
                return {"done": True, "result_ready": True}
            return {"done": False, "next_plate_id": session.current_plate.id}

    @app.get("/api/sessions/{session_id}/result")
    def get_result(session_id: str):
        with store.lock:
            record = get_record(session_id)
            if record.session.state is not SessionState.COMPLETE:
                raise HTTPException(409, "session is not complete")
            if record.result_body is None:
                record.result_body = _build_result(record, default_palette, schemes)
                store.append_event({
                    "event": "adapted",
                    "session_id": session_id,
                    "body": record.result_body,
                })
            return JSONResponse(record.result_body)

    @app.post("/api/adapt")
    def adapt_endpoint(body: AdaptBody):
        try:
            palette = palette_from_dict(body.palette)
            profile = _parse_profile(body.profile)
        except (ChromadaptError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from exc
        try:
            result = optimize_palette(palette, profile)
        except ValidationError as exc:
            raise HTTPException(400, str(exc)) from exc
        return adaptation_to_dict(result)

    @app.get("/api/simulate")
    def simulate_endpoint(hex: str, kind: str, severity: float):
        try:
            color = parse_hex(hex)
            profile = _parse_profile({"kind": kind, "severity": severity})
        except (ChromadaptError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from exc
        out = linear_to_srgb8(simulate(srgb8_to_linear(color), profile))
        return {"hex": format_hex(out, prefix=False)}

    if config.ui_dir is not None and Path(config.ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(config.ui_dir), html=True), name="ui")

    return app


def _parse_profile(data: dict) -> CVDProfile:
    try:
        kind = CVDKind(str(data["kind"]).lower())
        severity = float(data["severity"])
    except (KeyError, ValueError) as exc:
        raise DomainError(f"bad profile: {exc}") from exc
    return CVDProfile(kind, severity)


def _build_result(
    record: SessionRecord, default_palette: Palette, schemes: list[Palette]
) -> dict:
    classification = record.classification
    body = {
        "classification": classification_to_dict(classification),
        "adaptation": None,
    }
    kind = classification.kind.value
    if kind == "unclassified":
        body["adaptation"] = {
            "adapted": palette_to_dict(default_palette),
            "retest_recommended": True,
            "scheme_index": None,
            "scheme_name": default_palette.name,
            "initial_score": None,
            "final_score": None,
            "iterations": 0,
            "objective_trace": [],
        }
        return body
    profile = adaptation_profile(kind, classification.severity)
    if profile.is_identity:
        # normal vision: serve the default palette untouched
        body["adaptation"] = {
            "adapted": palette_to_dict(default_palette),
            "retest_recommended": False,
            "scheme_index": None,
            "scheme_name": default_palette.name,
            "initial_score": None,
            "final_score": None,
            "iterations": 0,
            "objective_trace": [],
        }
        return body
    index, _score = select_scheme(schemes, profile)
    winner = schemes[index]
    result = optimize_palette(winner, profile, OptimizeOptions())
    adaptation = adaptation_to_dict(result)
    adaptation["retest_recommended"] = False
    adaptation["scheme_index"] = index
    adaptation["scheme_name"] = winner.name
    body["adaptation"] = adaptation
    return body
