"""Command-line access to simulation, battery generation, classification,
adaptation, and the HTTP service.

Exit codes: 0 success, 2 usage/schema, 3 I/O, 4 data mismatch, 5 environment.
JSON goes to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from pathlib import Path

from .adapt import (
    adaptation_to_dict,
    optimize_palette,
    palette_from_dict,
    select_scheme,
)
from .color import CVDKind, CVDProfile
from .errors import (
    ChromadaptError,
    DomainError,
    GenerationError,
    ReplayError,
    SequencingError,
    ValidationError,
)
from .image import read_image, simulate_image, write_image
from .plates import render_svg
from .screening import (
    battery_from_dict,
    battery_to_json,
    classification_to_dict,
    classify,
    create_battery,
    respond_battery,
    responses_from_dict,
    responses_to_dict,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_MISMATCH = 4
EXIT_ENV = 5


def _parse_profile(kind: str, severity: float) -> CVDProfile:
    try:
        return CVDProfile(CVDKind(kind.lower()), severity)
    except (ValueError, DomainError) as exc:
        raise DomainError(f"bad profile kind={kind!r} severity={severity}: {exc}") from exc


def _read_json(path: str) -> dict:
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _print_json(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def cmd_simulate(args) -> int:
    profile = _parse_profile(args.kind, args.severity)
    img = read_image(args.infile)
    write_image(simulate_image(img, profile), args.outfile)
    return EXIT_OK


def cmd_battery(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    battery = create_battery(args.seed)
    for plate in battery.plates:
        (out / f"{plate.id}.svg").write_text(render_svg(plate), encoding="utf-8")
    (out / "key.json").write_text(battery_to_json(battery) + "\n", encoding="utf-8")
    print(f"wrote {len(battery.plates)} plates + key.json to {out}", file=sys.stderr)
    return EXIT_OK


def _load_battery(path: str):
    return battery_from_dict(_read_json(path))


def cmd_classify(args) -> int:
    battery = _load_battery(args.key)
    battery_id, responses = responses_from_dict(_read_json(args.responses))
    if battery_id != battery.id:
        raise SequencingError(
            f"responses are for battery {battery_id!r}, key is {battery.id!r}"
        )
    try:
        result = classify(battery, responses)
    except ValidationError as exc:
        raise SequencingError(str(exc)) from exc
    _print_json(classification_to_dict(result))
    return EXIT_OK


def cmd_respond(args) -> int:
    battery = _load_battery(args.key)
    profile = _parse_profile(args.kind, args.severity)
    responses = respond_battery(profile, battery)
    _print_json(responses_to_dict(battery.id, responses))
    return EXIT_OK


def cmd_adapt(args) -> int:
    palette = palette_from_dict(_read_json(args.palette))
    profile = _parse_profile(args.kind, args.severity)
    out: dict = {}
    if args.catalog:
        schemes = []
        for path in sorted(Path(args.catalog).glob("*.json")):
            schemes.append(palette_from_dict(_read_json(str(path))))
        if schemes:
            index, score = select_scheme(schemes, profile)
            palette = schemes[index]
            out["scheme_index"] = index
            out["scheme_name"] = palette.name
            out["scheme_score"] = score
    result = optimize_palette(palette, profile)
    out.update(adaptation_to_dict(result))
    _print_json(out)
    return EXIT_OK


def cmd_serve(args) -> int:
    # fail fast with the documented exit code if the port is taken
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((args.host, args.port))
    except OSError:
        print(f"port {args.port} is busy", file=sys.stderr)
        return EXIT_ENV
    finally:
        probe.close()

    from .service import ServerConfig, create_app

    config = ServerConfig(
        port=args.port,
        state_path=Path(args.state) if args.state else None,
        seed=args.seed,
        catalog_dir=Path(args.catalog) if args.catalog else None,
        default_palette_path=Path(args.default_palette) if args.default_palette else None,
        ui_dir=Path(args.ui_dir) if args.ui_dir else None,
    )
    try:
        app = create_app(config)
    except ReplayError as exc:
        print(f"cannot replay state file: {exc}", file=sys.stderr)
        return EXIT_IO

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chromadapt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate CVD appearance of an image")
    p.add_argument("--kind", required=True)
    p.add_argument("--severity", type=float, required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("battery", help="generate a plate battery (SVGs + key.json)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_battery)

    p = sub.add_parser("classify", help="classify responses against a battery key")
    p.add_argument("--key", required=True)
    p.add_argument("--responses", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("respond", help="emit simulated-respondent answers for a key")
    p.add_argument("--key", required=True)
    p.add_argument("--kind", required=True)
    p.add_argument("--severity", type=float, required=True)
    p.set_defaults(func=cmd_respond)

    p = sub.add_parser("adapt", help="adapt a palette for a CVD profile")
    p.add_argument("--palette", required=True)
    p.add_argument("--kind", required=True)
    p.add_argument("--severity", type=float, required=True)
    p.add_argument("--catalog")
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--state")
    p.add_argument("--catalog")
    p.add_argument("--seed", type=int)
    p.add_argument("--default-palette")
    p.add_argument("--ui-dir")
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SequencingError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (DomainError, ValidationError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GenerationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ChromadaptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
