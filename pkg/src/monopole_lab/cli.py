"""Scenario runner: ``monopole-lab <subcommand> [--config FILE] [flags]``.

A YAML or JSON config file supplies nested parameter blocks; flags
override it. Results go to stdout, or to ``--output DIR`` as
``<subcommand>.csv`` / ``.json``. Every document starts with the package
version and the fully resolved config, and contains no timestamps, so
equal inputs give byte-identical files.

Exit codes: 0 ok, 1 invalid input, 2 tolerance not met, 3 singular geometry.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np
import yaml

from . import __version__
from ._accel import backend_name
from .acceptance import run_all
from .coriolis import RotatingFrameSpec, latitude_solid_angle, simulate_pendulum
from .core import NORTH_STRING, SOUTH_STRING, ParticleState, StringConfig, make_setup, wrap_angle
from .dynamics import TRAJECTORY_COLUMNS, IntegratorSpec, integrate
from .errors import MonopoleLabError, NumericalError, SingularityError, ValidationError
from .exchange import (CompositeSpec, exchange_phase, exchange_statistics, great_circle_exchange,
                       random_exchange_path, type1_statistics, type2_statistics)
from .fields import gauge_mismatch
from .loops import Circle, ClosedPath, cap_loop, random_loop, winding_number
from .phases import PHASE_COLUMNS, duality_report, random_duality_reports, type1_phase, type2_phase

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_SINGULAR = 0, 1, 2, 3

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_VEC = {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3}
_STRING = {
    "oneOf": [
        {"enum": ["south", "north"]},
        {"type": "object", "additionalProperties": False, "required": ["direction"],
         "properties": {"direction": _VEC, "side": {"enum": ["magnetic", "electric", "both"]}}},
    ]
}


def _block(**props) -> dict:
    return {"type": "object", "additionalProperties": False, "properties": props}


CONFIG_SCHEMA = _block(
    setup=_block(n={"type": "integer"}, e=_POS, hbar=_POS, c=_POS, m=_POS),
    string=_STRING,
    string_b=_STRING,
    trajectory=_block(
        position=_VEC, velocity=_VEC, t_end=_POS, max_steps={"type": "integer", "minimum": 1},
        integrator=_block(max_rotation=_POS, max_rel_displacement=_POS, r_min=_POS),
    ),
    loop=_block(
        kind={"enum": ["cap", "circle", "equator", "csv", "random"]}, theta=_POS,
        vertices={"type": "integer", "minimum": 3}, turns={"type": "integer"}, axis=_VEC,
        path={"type": "string"}, count={"type": "integer", "minimum": 1},
    ),
    exchange=_block(path={"enum": ["great-circle", "random"]}, count={"type": "integer", "minimum": 1},
                    spin={"type": "number", "minimum": 0}),
    coriolis=_block(latitude_deg={"type": "number", "minimum": -90, "maximum": 90}, ratio=_POS, omega0=_POS,
                    mass=_POS, steps_per_period={"type": "integer", "minimum": 8}, revolutions=_POS),
    tolerance=_POS,
    seed={"type": "integer"},
    format={"enum": ["csv", "json"]},
    output={"type": "string"},
)

BASE_DEFAULTS = {"setup": {"n": 1}, "seed": 0, "format": "csv"}
DEFAULTS = {
    "simulate": {"trajectory": {"position": [1.0, 0.0, 0.0], "velocity": [0.0, 0.5, 0.0], "t_end": 100.0,
                                "integrator": {"max_rotation": 0.05, "max_rel_displacement": 0.01}},
                 "tolerance": 1e-6},
    "phase": {"string": "south", "loop": {"kind": "cap", "theta": math.pi / 3, "vertices": 360, "turns": 1},
              "tolerance": 1e-6},
    "duality": {"string": "south", "loop": {"kind": "random", "count": 100}, "tolerance": 1e-6},
    "gauge": {"string": "south", "string_b": "north", "loop": {"kind": "equator", "vertices": 360, "turns": 1},
              "tolerance": 1e-8},
    "exchange": {"string": "south", "exchange": {"path": "great-circle", "count": 1, "spin": 0.0},
                 "tolerance": 1e-6},
    "foucault": {"setup": {"n": 2}, "coriolis": {"latitude_deg": 30.0, "ratio": 200.0, "omega0": 1.0, "mass": 1.0,
                                                 "steps_per_period": 4000, "revolutions": 1.0},
                 "tolerance": 1e-3},
    "verify": {},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2, which is reserved for tolerance failures
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class Report:
    columns: tuple
    rows: list
    summary: dict = field(default_factory=dict)
    ok: bool = True


# ----------------------------------------------------------------------------
# config handling
# ----------------------------------------------------------------------------


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)  # JSON is valid YAML
    except yaml.YAMLError as exc:
        raise ValidationError(f"config {path} is not valid YAML/JSON: {exc}") from exc
    data = {} if data is None else data
    validate_config(data)
    return data


def validate_config(cfg: dict) -> None:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"config error at {where}: {exc.message}") from exc


def _flag_overrides(command: str, args: argparse.Namespace) -> dict:
    """Nested dict of every flag the user actually gave."""
    table = {
        "n": ("setup", "n"), "string": ("string",), "string_b": ("string_b",),
        "position": ("trajectory", "position"), "velocity": ("trajectory", "velocity"),
        "t_end": ("trajectory", "t_end"), "max_steps": ("trajectory", "max_steps"),
        "max_rotation": ("trajectory", "integrator", "max_rotation"),
        "max_rel_displacement": ("trajectory", "integrator", "max_rel_displacement"),
        "r_min": ("trajectory", "integrator", "r_min"),
        "loop": ("loop", "kind"), "loops": ("loop", "kind"), "theta": ("loop", "theta"),
        "vertices": ("loop", "vertices"), "turns": ("loop", "turns"), "axis": ("loop", "axis"),
        "path_file": ("loop", "path"), "count": ("loop", "count"),
        "exchange_path": ("exchange", "path"), "spin": ("exchange", "spin"),
        "latitude": ("coriolis", "latitude_deg"), "ratio": ("coriolis", "ratio"), "omega0": ("coriolis", "omega0"),
        "mass": ("coriolis", "mass"), "steps_per_period": ("coriolis", "steps_per_period"),
        "revolutions": ("coriolis", "revolutions"),
        "tolerance": ("tolerance",), "seed": ("seed",), "format": ("format",), "output": ("output",),
    }
    if command == "exchange":
        table["count"] = ("exchange", "count")
    out: dict = {}
    for name, keys in table.items():
        value = getattr(args, name, None)
        if value is None:
            continue
        if name in ("string", "string_b"):
            value = _parse_string_flag(value)
        node = out
        for key in keys[:-1]:
            node = node.setdefault(key, {})
        node[keys[-1]] = value
    return out


def _parse_string_flag(text: str):
    if text in ("south", "north"):
        return text
    try:
        vec = [float(x) for x in text.split(",")]
    except ValueError:
        raise ValidationError(f"string must be south, north or x,y,z; got {text!r}") from None
    if len(vec) != 3:
        raise ValidationError(f"string direction needs three components, got {text!r}")
    return {"direction": vec}


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    cfg = _merge(BASE_DEFAULTS, DEFAULTS[command])
    cfg = _merge(cfg, load_config(args.config))
    cfg = _merge(cfg, _flag_overrides(command, args))
    validate_config(cfg)
    return cfg


def _setup(cfg: dict):
    block = dict(cfg["setup"])
    return make_setup(block.pop("n"), **block)


def _string(spec) -> StringConfig:
    if spec == "south":
        return SOUTH_STRING
    if spec == "north":
        return NORTH_STRING
    return StringConfig.along(spec["direction"], spec.get("side", "magnetic"))


def _loop(block: dict, rng: np.random.Generator, string: StringConfig):
    kind = block.get("kind", "cap")
    axis = block.get("axis", [0.0, 0.0, 1.0])
    turns = block.get("turns", 1)
    if kind == "cap":
        return cap_loop(block.get("theta", math.pi / 3), block.get("vertices", 360), axis, turns=turns)
    if kind == "circle":
        return Circle(block.get("theta", math.pi / 3), np.asarray(axis, dtype=float), turns=turns)
    if kind == "equator":
        return Circle(math.pi / 2, np.asarray(axis, dtype=float), turns=turns)
    if kind == "csv":
        if "path" not in block:
            raise ValidationError("loop kind csv needs a path")
        return ClosedPath.from_csv(block["path"])
    return random_loop(rng, avoid=(tuple(string.direction), tuple(-string.direction)))


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------


def cmd_simulate(cfg: dict) -> Report:
    setup = _setup(cfg)
    tr = cfg["trajectory"]
    spec = IntegratorSpec(**tr.get("integrator", {}))
    state = ParticleState(tr["position"], tr["velocity"])
    rec = integrate(state, setup, spec, t_end=tr.get("t_end", math.inf), max_steps=tr.get("max_steps"))
    J = rec.total_angular_momentum
    norms = np.linalg.norm(J, axis=1)
    summary = {
        "steps": len(rec) - 1,
        "cone_error": float(np.max(np.abs(rec.cone_projection + setup.coupling))),
        "J_drift": float(np.max(np.abs(norms - norms[0])) / norms[0]) if norms[0] > 0 else 0.0,
        "speed_drift": float(np.max(np.abs(rec.speed - rec.speed[0]))),
        "energy_drift": float(np.max(np.abs(rec.energy / rec.energy[0] - 1.0))),
    }
    tol = cfg["tolerance"]
    ok = summary["cone_error"] <= tol and summary["J_drift"] <= tol and summary["energy_drift"] <= tol
    return Report(TRAJECTORY_COLUMNS, rec.rows().tolist(), summary, ok)


def cmd_phase(cfg: dict) -> Report:
    setup = _setup(cfg)
    string = _string(cfg["string"])
    loop = _loop(cfg["loop"], np.random.default_rng(cfg["seed"]), string)
    report = duality_report(loop, setup, string, cfg["tolerance"])
    return Report(PHASE_COLUMNS, [report.row()], {"phi2": report.phi_type2, "omega": report.omega})


def cmd_duality(cfg: dict) -> Report:
    setup = _setup(cfg)
    string = _string(cfg["string"])
    block = cfg["loop"]
    tol = cfg["tolerance"]
    if block.get("kind", "random") == "random":
        reports = random_duality_reports(setup, block.get("count", 100), cfg["seed"], string, tol)
    else:
        reports = [duality_report(_loop(block, np.random.default_rng(cfg["seed"]), string), setup, string, tol)]
    worst = max(abs(wrap_angle(r.delta_mod_2pi - setup.n * math.pi)) for r in reports)
    return Report(PHASE_COLUMNS, [r.row() for r in reports], {"loops": len(reports), "max_residual": worst})


def cmd_gauge(cfg: dict) -> Report:
    setup = _setup(cfg)
    a, b = _string(cfg["string"]), _string(cfg["string_b"])
    loop = _loop(cfg["loop"], np.random.default_rng(cfg["seed"]), a)
    mismatch = gauge_mismatch(loop, setup, a, b)
    phi_a = type2_phase(loop, setup, a, check=False)
    phi_b = type2_phase(loop, setup, b, check=False)
    shift = float(wrap_angle(phi_a - phi_b))
    winding = winding_number(loop, b.direction).number
    ok = abs(shift) <= cfg["tolerance"]
    if np.allclose(a.direction, -b.direction):
        ok &= abs(mismatch - 2 * math.pi * setup.n * setup.hbar * winding) <= cfg["tolerance"]
    cols = ("winding", "mismatch", "phi_a", "phi_b", "phase_shift_mod_2pi")
    return Report(cols, [[winding, mismatch, phi_a, phi_b, shift]], {"mismatch": mismatch}, ok)


def cmd_exchange(cfg: dict) -> Report:
    setup = _setup(cfg)
    string = _string(cfg["string"])
    block = cfg["exchange"]
    spec = CompositeSpec(block.get("spin", 0.0), setup.n)
    rng = np.random.default_rng(cfg["seed"])
    if block.get("path", "great-circle") == "great-circle":
        paths = [great_circle_exchange()]
    else:
        paths = [random_exchange_path(rng, string=string) for _ in range(block.get("count", 1))]
    tol = cfg["tolerance"]
    rows = []
    for i, path in enumerate(paths):
        alpha = exchange_phase(path, setup, string, tol)
        rows.append([i, setup.n, float(spec.s), alpha, float(wrap_angle(alpha)), exchange_statistics(spec),
                     type1_statistics(spec), type2_statistics(spec, path, string, tol)])
    ok = all(r[5] == r[6] == r[7] for r in rows)
    cols = ("path", "n", "spin", "alpha", "alpha_mod_2pi", "sign", "sign_type1", "sign_type2")
    return Report(cols, rows, {"sign": exchange_statistics(spec)}, ok)


def cmd_foucault(cfg: dict) -> Report:
    block = cfg["coriolis"]
    lam = math.radians(block["latitude_deg"])
    spec = RotatingFrameSpec.from_ratio(block["ratio"], latitude=lam, omega0=block["omega0"], mass=block["mass"],
                                        steps_per_period=block["steps_per_period"])
    res = simulate_pendulum(spec, block["revolutions"])
    target = latitude_solid_angle(lam) - 2 * math.pi
    row = [block["latitude_deg"], block["ratio"], res.per_revolution, res.precession, target,
           res.per_revolution - target, res.energy_drift]
    summary = {"precession": res.per_revolution}
    ok = abs(res.per_revolution - target) <= cfg["tolerance"] * max(abs(target), 1.0)
    setup = _setup(cfg)
    if setup.n == 2:
        phi = type1_phase(latitude_solid_angle(lam), setup)
        summary["type1_phase"] = phi
        ok &= abs(res.per_revolution - phi) <= cfg["tolerance"] * max(abs(phi), 1.0)
    cols = ("latitude_deg", "ratio", "per_revolution", "total", "omega_minus_2pi", "residual", "energy_drift")
    return Report(cols, [row], summary, ok)


def cmd_verify(cfg: dict) -> Report:
    results = run_all()
    for r in results:
        print(r.line(), file=sys.stderr)
    rows = [[r.number, r.name, r.passed, r.detail] for r in results]
    passed = sum(r.passed for r in results)
    return Report(("criterion", "name", "passed", "detail"), rows, {"passed": passed, "total": len(results)},
                  passed == len(results))


COMMANDS = {
    "simulate": cmd_simulate, "phase": cmd_phase, "duality": cmd_duality, "gauge": cmd_gauge,
    "exchange": cmd_exchange, "foucault": cmd_foucault, "verify": cmd_verify,
}


# ----------------------------------------------------------------------------
# output
# ----------------------------------------------------------------------------


def _plain(value):
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def _metadata(command: str, cfg: dict) -> dict:
    # the output directory is where the file lives, not part of the scenario
    scenario = {k: v for k, v in cfg.items() if k != "output"}
    return {"tool": "monopole-lab", "version": __version__, "command": command, "backend": backend_name(),
            "config": scenario}


def render(command: str, cfg: dict, report: Report) -> str:
    rows = [[_plain(v) for v in row] for row in report.rows]
    summary = {k: _plain(v) for k, v in report.summary.items()}
    meta = _metadata(command, cfg)
    if cfg["format"] == "json":
        doc = {"metadata": meta, "columns": list(report.columns), "rows": rows, "summary": summary,
               "ok": report.ok}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# metadata: {json.dumps(meta, sort_keys=True)}\n")
    buf.write(f"# summary: {json.dumps(summary, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    writer.writerows([repr(v) if isinstance(v, float) else v for v in row] for row in rows)
    return buf.getvalue()


def emit(command: str, cfg: dict, report: Report) -> None:
    text = render(command, cfg, report)
    out = cfg.get("output")
    if out is None:
        sys.stdout.write(text)
        return
    directory = Path(out)
    directory.mkdir(parents=True, exist_ok=True)
    target = directory / f"{command}.{cfg['format']}"
    target.write_text(text)
    print(f"wrote {target}", file=sys.stderr)


# ----------------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------------


def _vec(text: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="YAML or JSON config file")
    common.add_argument("--output", help="directory for result files (default: stdout)")
    common.add_argument("--tolerance", type=float, help="pass/fail tolerance for the cross-checks")
    common.add_argument("--seed", type=int, help="seed for random loops and paths")
    common.add_argument("--format", choices=["csv", "json"])

    physics = _Parser(add_help=False)
    physics.add_argument("--n", type=int, help="Dirac integer (eg/c = n hbar/2)")
    physics.add_argument("--string", help="string direction: south, north or x,y,z")

    loops = _Parser(add_help=False)
    loops.add_argument("--theta", type=float, help="cap colatitude in radians")
    loops.add_argument("--vertices", type=int)
    loops.add_argument("--turns", type=int)
    loops.add_argument("--axis", type=_vec)
    loops.add_argument("--path-file", help="CSV loop file (columns x,y,z)")

    parser = _Parser(prog="monopole-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common, physics], help="integrate a charge trajectory")
    p.add_argument("--position", type=_vec)
    p.add_argument("--velocity", type=_vec)
    p.add_argument("--t-end", type=float)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--max-rotation", type=float)
    p.add_argument("--max-rel-displacement", type=float)
    p.add_argument("--r-min", type=float)

    p = sub.add_parser("phase", parents=[common, physics, loops], help="both loop phases for one loop")
    p.add_argument("--loop", choices=["cap", "circle", "equator", "csv", "random"])

    p = sub.add_parser("duality", parents=[common, physics, loops], help="duality check over many loops")
    p.add_argument("--loops", choices=["cap", "circle", "equator", "csv", "random"])
    p.add_argument("--count", type=int)

    p = sub.add_parser("gauge", parents=[common, physics, loops], help="string-flip mismatch on a loop")
    p.add_argument("--loop", choices=["cap", "circle", "equator", "csv"])
    p.add_argument("--string-b", help="second string: south, north or x,y,z")

    p = sub.add_parser("exchange", parents=[common, physics], help="exchange phase and statistics")
    p.add_argument("--exchange-path", choices=["great-circle", "random"])
    p.add_argument("--count", type=int)
    p.add_argument("--spin", type=float)

    p = sub.add_parser("foucault", parents=[common, physics], help="Foucault pendulum precession")
    p.add_argument("--latitude", type=float, help="degrees")
    p.add_argument("--ratio", type=float, help="pendulum frequency / frame rotation rate")
    p.add_argument("--omega0", type=float)
    p.add_argument("--mass", type=float)
    p.add_argument("--steps-per-period", type=int)
    p.add_argument("--revolutions", type=float)

    sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args.command, args)
        report = COMMANDS[args.command](cfg)
        emit(args.command, cfg, report)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SingularityError as exc:
        print(f"singular geometry: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except MonopoleLabError as exc:  # pragma: no cover - every subclass is mapped above
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if not report.ok:
        print("tolerance not met", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK
