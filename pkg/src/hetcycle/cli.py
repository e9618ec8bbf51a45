"""Command-line front end: ``hetcycle <subcommand> ...``; reports go to stdout as JSON."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .core import CycleSpec, InvalidCycleError, basic_matrix, transition_product, validate_cycle
from .stability import DEFAULT_TOL, verdict

EXIT_OK, EXIT_INVALID = 0, 2


class InputError(Exception):
    def __init__(self, message: str, violations: Sequence[str] = ()):
        super().__init__(message)
        self.violations = list(violations)


# -- deterministic JSON -------------------------------------------------------


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, float):
        if math.isnan(obj):
            return "null"
        if math.isinf(obj):
            return json.dumps("inf" if obj > 0 else "-inf")
        return "%.17g" % obj
    return json.dumps(obj)


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON with insertion-ordered keys and floats at 17 significant digits."""
    return _encode(_plain(obj), indent, 0)


def _emit(report: dict[str, Any]) -> None:
    sys.stdout.write(dumps(report) + "\n")


def _envelope(command: str, tolerances: dict[str, Any], body: dict[str, Any]) -> dict[str, Any]:
    return {"tool": "hetcycle", "version": __version__, "command": command, "tolerances": tolerances, **body}


# -- input helpers --------------------------------------------------------------


def _read_json(path: str) -> Any:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _load_cycle(path: str) -> CycleSpec:
    try:
        spec = CycleSpec.from_dict(_read_json(path))
    except InvalidCycleError as exc:
        raise InputError("invalid cycle specification", exc.violations) from exc
    result = validate_cycle(spec)
    if not result.ok:
        raise InputError("invalid cycle specification", result.violations)
    return spec


def _load_system(path: str):
    from .glv.system import GlvSystem

    data = _read_json(path)
    try:
        return GlvSystem.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid GLV system: {exc}") from exc


def _floats(text: str, name: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise InputError(f"{name}: expected comma-separated numbers, got {text!r}") from exc


def _positive(value: float, name: str) -> float:
    if not value > 0:
        raise InputError(f"{name} must be positive, got {value}")
    return value


# -- subcommands --------------------------------------------------------------------


def _analysis(spec: CycleSpec, tol: float) -> dict[str, Any]:
    rep = verdict(spec, tol)
    return {
        "cycle": spec.to_dict(),
        "basic_matrices": [basic_matrix(spec, j) for j in range(spec.m)],
        "transition_matrix": transition_product(spec, 0),
        "report": rep.to_dict(),
    }


def cmd_analyze(args: argparse.Namespace) -> int:
    tol = _positive(args.tol, "--tol")
    spec = _load_cycle(args.cycle)
    _emit(_envelope("analyze", {"tol": tol}, _analysis(spec, tol)))
    return EXIT_OK


def cmd_rank_cert(args: argparse.Namespace) -> int:
    from .rankcert import CertificationError, certificate, randomized_rank

    if args.trials < 1:
        raise InputError("--trials must be >= 1")
    spec = _load_cycle(args.cycle)
    try:
        cert = certificate(spec).to_dict()
    except CertificationError as exc:
        cert = {"error": str(exc)}
    rnd = randomized_rank(spec, args.trials, args.seed).to_dict()
    body = {"certificate": cert, "randomized": {"seed": args.seed, **rnd}}
    _emit(_envelope("rank-cert", {"rank_tol": 1e-12}, body))
    return EXIT_OK if "error" not in cert else 1


def _triple(text: str, n: int) -> tuple[int, int, int]:
    vals = _floats(text, "--triple")
    if len(vals) != 3 or any(v != int(v) for v in vals):
        raise InputError("--triple needs three integers i,j,k")
    idx = tuple(int(v) - 1 for v in vals)
    if len(set(idx)) != 3 or any(not 0 <= i < n for i in idx):
        raise InputError(f"--triple indices must be distinct and within 1..{n}")
    return idx  # type: ignore[return-value]


def cmd_glv_check(args: argparse.Namespace) -> int:
    from .glv.connections import (
        NoBoxError,
        check_connection_2d,
        check_tlv3,
        check_tlv30,
        interior_equilibrium_3d,
        invariant_box,
        verify_box,
    )

    system = _load_system(args.system)
    i, j, k = _triple(args.triple, system.n)
    if np.any(system.r <= 0) or np.any(np.diag(system.a) >= 0):
        raise InputError("growth rates must be positive and self-interactions negative")
    interior = interior_equilibrium_3d(system, (i, j, k))
    body: dict[str, Any] = {
        "triple": [i + 1, j + 1, k + 1],
        "pairs": [check_connection_2d(system, p, q).to_dict() for p, q in ((i, j), (j, k), (k, i))],
        "tlv30": check_tlv30(system, (i, j, k)).to_dict(),
        "tlv3": check_tlv3(system, (i, j, k)).to_dict(),
        "interior_equilibrium": {
            "numerators": list(interior.numerators),
            "determinant": interior.determinant,
            "degenerate": interior.degenerate,
            "point": None if interior.point is None else interior.point,
        },
    }
    try:
        box = invariant_box(system, (i, j, k))
        body["invariant_box"] = {"case": box.case, "bounds": list(box.bounds), **verify_box(system, box)}
    except NoBoxError as exc:
        body["invariant_box"] = {"error": str(exc)}
    _emit(_envelope("glv-check", {"degenerate": 1e-12}, body))
    return EXIT_OK


def _sim_summary(traj, events) -> dict[str, Any]:
    return {
        "samples": len(traj),
        "t_final": float(traj.t[-1]),
        "final_state": traj.final,
        "status": traj.status,
        "steps": traj.steps,
        "rejected_steps": traj.rejected,
        "max_error_estimate": traj.max_error,
        "visit_order": [e.label for e in events],
        "events": [e.to_dict() for e in events],
    }


def cmd_simulate(args: argparse.Namespace) -> int:
    from .glv.system import boundary_equilibria
    from .sim import detect_visits, export_csv, integrate, write_event_log

    system = _load_system(args.system)
    x0 = _floats(args.x0, "--x0")
    if len(x0) != system.n or any(v < 0 for v in x0):
        raise InputError(f"--x0 needs {system.n} nonnegative values")
    tols = {"rtol": _positive(args.rtol, "--rtol"), "atol": _positive(args.atol, "--atol"), "h": _positive(args.h, "--h")}
    _positive(args.t_end, "--t-end")
    traj = integrate(system, x0, args.t_end, args.rtol, args.atol, log_coordinates=args.log_coordinates)
    eqs = boundary_equilibria(system)
    events = detect_visits(traj, eqs, args.h) if eqs else []
    if args.csv:
        export_csv(traj, args.csv)
    if args.events:
        write_event_log(events, args.events)
    body = {"system": system.to_dict(), "x0": x0, "t_end": args.t_end, "trajectory": _sim_summary(traj, events)}
    _emit(_envelope("simulate", {**tols, "log_coordinates": args.log_coordinates}, body))
    return EXIT_OK


def cmd_example(args: argparse.Namespace) -> int:
    from .glv.cycles import example1, example1_conditions, example2, example2_conditions

    tol = _positive(args.tol, "--tol")
    cycle = example1() if args.which == 1 else example2()
    cond = example1_conditions(cycle) if args.which == 1 else example2_conditions(cycle)
    conditions = {k: (v if k == "conflicts" else v.to_dict()) for k, v in cond.items()}
    body: dict[str, Any] = {
        "example": args.which,
        "system": cycle.system.to_dict(),
        "equilibria": [
            {"label": e.label, "coordinates": e.coordinates, "classes": {f"x{k + 1}": c for k, c in sorted(e.classes.items())},
             "axis_eigenvalues": {f"x{k + 1}": v for k, v in sorted(e.axis_eigenvalues.items())},
             "radial_abscissa": e.radial_abscissa}
            for e in cycle.equilibria
        ],
        "conditions": conditions,
        **_analysis(cycle.spec, tol),
    }
    tols: dict[str, Any] = {"tol": tol}
    if args.simulate:
        from .sim import box_start, connection_point, detect_visits, export_csv, integrate, write_event_log

        tols.update(rtol=_positive(args.rtol, "--rtol"), atol=_positive(args.atol, "--atol"), h=_positive(args.h, "--h"),
                    delta=_positive(args.delta, "--delta"))
        t_end = args.t_end if args.t_end is not None else (1500.0 if args.which == 1 else 3000.0)
        point = connection_point(cycle, 0)
        x0 = box_start(point, args.delta, np.random.default_rng(args.seed))
        traj = integrate(cycle.system, x0, t_end, args.rtol, args.atol, log_coordinates=True)
        events = detect_visits(traj, cycle.equilibria, args.h)
        csv_path = Path(args.csv or f"example{args.which}_trajectory.csv")
        export_csv(traj, csv_path)
        if args.events:
            write_event_log(events, args.events)
        body["simulation"] = {"seed": args.seed, "x0": x0, "t_end": t_end, "csv": str(csv_path),
                              "cycle_order": cycle.labels, **_sim_summary(traj, events)}
    _emit(_envelope("example", tols, body))
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hetcycle", description=__doc__)
    p.add_argument("--version", action="version", version=f"hetcycle {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="stability verdict for a cycle specification (JSON)")
    a.add_argument("cycle")
    a.add_argument("--tol", type=float, default=DEFAULT_TOL)
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("glv-check", help="connection conditions on a triple of a GLV system")
    g.add_argument("system")
    g.add_argument("--triple", required=True, help="1-based indices i,j,k in role order")
    g.set_defaults(func=cmd_glv_check)

    s = sub.add_parser("simulate", help="integrate a GLV system and report neighbourhood visits")
    s.add_argument("system")
    s.add_argument("--x0", required=True, help="comma-separated initial state")
    s.add_argument("--t-end", type=float, required=True)
    s.add_argument("--rtol", type=float, default=1e-10)
    s.add_argument("--atol", type=float, default=1e-12)
    s.add_argument("--h", type=float, default=0.1, help="neighbourhood radius (max-norm)")
    s.add_argument("--log-coordinates", action="store_true", help="integrate ln x (no underflow on long runs)")
    s.add_argument("--csv", help="write the trajectory here")
    s.add_argument("--events", help="write the visit log (JSON) here")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("example", help="built-in five-species examples")
    e.add_argument("which", type=int, choices=(1, 2))
    e.add_argument("--tol", type=float, default=DEFAULT_TOL)
    e.add_argument("--simulate", action="store_true")
    e.add_argument("--t-end", type=float, default=None)
    e.add_argument("--rtol", type=float, default=1e-10)
    e.add_argument("--atol", type=float, default=1e-12)
    e.add_argument("--h", type=float, default=0.1)
    e.add_argument("--delta", type=float, default=1e-3, help="size of the random start box")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--csv")
    e.add_argument("--events")
    e.set_defaults(func=cmd_example)

    r = sub.add_parser("rank-cert", help="structural rank certificate and randomized rank check")
    r.add_argument("cycle")
    r.add_argument("--trials", type=int, default=100)
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_rank_cert)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help / --version exit 0; usage errors are invalid input
        return 0 if exc.code == 0 else EXIT_INVALID
    try:
        return args.func(args)
    except InputError as exc:
        _emit(_envelope(args.command, {}, {"error": str(exc), "violations": exc.violations}))
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
