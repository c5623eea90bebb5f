"""Single-binary command line front end.

Subcommands: analyze-word, build-fiber, check-exactness, check-extension,
analyze-poly, verify-fiber, periods.  Reports are emitted as canonical
JSON (byte-identical across runs) on stdout and optionally to --json.
Exit codes: 0 success, 2 validation failure, 3 numerical failure,
64 unknown subcommand, 65 malformed input file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import serialize
from .errors import FiberAtlasError, NumericalError, ParseError, ValidationError
from .fibers import (
    GeometricSample,
    GridSpec,
    action_integrals,
    build_fiber,
    check_exactness,
    cone_angle_defect,
)
from .monodromy import monodromy, perm_cycles, topological_invariants, critical_values
from .newton import fiber_prediction, parse_poly, poly_report, newton_polygon
from .overlap import OrientedPolygon, extension_report
from .periods import cauchy_riemann_check, periods
from .words import glue, parse_word, word_report

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64
EXIT_BAD_FILE = 65

SUBCOMMANDS = (
    "analyze-word",
    "build-fiber",
    "check-exactness",
    "check-extension",
    "analyze-poly",
    "verify-fiber",
    "periods",
)


class MalformedFileError(FiberAtlasError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    args: argparse.Namespace
    threads: int = 1
    tol_curl: float = 1e-6
    tol_roots: float = 1e-8
    tol_angles: float = 1e-9
    max_degree: int = 6
    max_corners: int = 16
    outputs: list = field(default_factory=list)

    def __post_init__(self):
        if min(self.tol_curl, self.tol_roots, self.tol_angles) <= 0:
            raise ValidationError("tolerances must be positive")
        if self.threads < 1:
            raise ValidationError("FIBERATLAS_THREADS must be >= 1")


def _threads_from_env() -> int:
    raw = os.environ.get("FIBERATLAS_THREADS", "1")
    try:
        return int(raw)
    except ValueError as exc:
        raise ValidationError(f"FIBERATLAS_THREADS must be an integer, got {raw!r}") from exc


def _parse_complex_pair(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValidationError(f"expected RE,IM, got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ValidationError(f"bad complex literal {text!r}") from exc


def _parse_grid(text: str) -> GridSpec:
    parts = text.split(",")
    if len(parts) != 6:
        raise ValidationError(f"--grid needs x0,x1,y0,y1,nx,ny, got {text!r}")
    try:
        return GridSpec(
            x0=float(parts[0]),
            x1=float(parts[1]),
            y0=float(parts[2]),
            y1=float(parts[3]),
            nx=int(parts[4]),
            ny=int(parts[5]),
        )
    except ValueError as exc:
        raise ValidationError(f"bad grid {text!r}") from exc


def _load_json_file(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise MalformedFileError(f"cannot open {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedFileError(f"{path} is not valid JSON: {exc}") from exc


def _load_text_file(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except FileNotFoundError as exc:
        raise MalformedFileError(f"cannot open {path}: {exc}") from exc


def _emit(report: dict, args) -> None:
    text = serialize.dumps(report)
    sys.stdout.write(text)
    if getattr(args, "json", None):
        with open(args.json, "w") as fh:
            fh.write(text)


# -- subcommand implementations --------------------------------------------------

def _cmd_analyze_word(cfg: RunConfig) -> dict:
    word = parse_word(cfg.args.word)
    return word_report(word)


def _parse_sides(text: str):
    out = []
    for chunk in text.split(";"):
        out.append(_parse_complex_pair(chunk))
    return out


def _cmd_build_fiber(cfg: RunConfig) -> dict:
    args = cfg.args
    word = parse_word(args.word)
    z = _parse_sides(args.sides)
    j0 = _parse_complex_pair(args.offset) if args.offset else 0j
    certificate = None
    if not args.no_auto_extension:
        from .fibers import build_chain
        from .errors import NeedsExtensionError

        try:
            fiber = build_fiber(word, z, j0)
        except NeedsExtensionError:
            chain = build_chain(word, z, j0)
            poly = OrientedPolygon.from_points([complex(v) for v in chain.vertices])
            from .overlap import enumerate_extensions

            certs = enumerate_extensions(poly, limit=1)
            if not certs:
                raise ValidationError("chain is not embedded and admits no disk extension")
            certificate = certs[0]
            fiber = build_fiber(word, z, j0, certificate=certificate)
    else:
        fiber = build_fiber(word, z, j0)
    surf = glue(word)
    report = {
        "word": word.text(),
        "g": surf.g,
        "s": surf.s,
        "embedded": fiber.embedded,
        "orientation": fiber.orientation,
        "vertices": [[v.real, v.imag] for v in fiber.chain.vertices],
        "pairing": [
            {"k": k, "side": a, "paired_side": b, "translation": [t.real, t.imag]}
            for k, (a, b, t) in sorted(fiber.pairing.items())
        ],
        "cone_angles_over_pi": [a / math.pi for a in fiber.cone_angles],
        "multiplicities": list(fiber.multiplicities),
        "cone_angle_defect": cone_angle_defect(fiber),
        "extension_used": None if certificate is None else list(certificate.corner_multiplicities),
    }
    if args.svg:
        cfg.outputs.append(("svg-fiber", fiber, args.svg))
    return report


def _cmd_check_exactness(cfg: RunConfig) -> dict:
    args = cfg.args
    word = parse_word(args.word)
    sample = serialize.load_sample(_load_json_file(args.sample))
    rep = check_exactness(word, sample, tol=cfg.tol_curl)
    report = {
        "word": word.text(),
        "tol": cfg.tol_curl,
        "passed": rep.passed,
        "residual": rep.residual,
        "per_k_residual": list(rep.per_k_residual),
        "order": rep.order,
    }
    if rep.passed and args.actions:
        act = action_integrals(word, sample, basepoint=(0, 0), tol=cfg.tol_curl)
        report["path_independence_residual"] = act.path_residual
        report["I"] = act.I
    return report


def _cmd_check_extension(cfg: RunConfig) -> dict:
    args = cfg.args
    if args.polygon:
        pts = serialize.load_polygon(_load_json_file(args.polygon))
    elif args.points:
        pts = [(_parse_complex_pair(c).real, _parse_complex_pair(c).imag) for c in args.points.split(";")]
    else:
        raise ValidationError("check-extension needs --polygon FILE or --points LIST")
    poly = OrientedPolygon.from_points(pts)
    return extension_report(poly, limit=args.limit)


def _cmd_analyze_poly(cfg: RunConfig) -> dict:
    args = cfg.args
    if args.expr:
        f = parse_poly(args.expr)
    elif args.poly:
        f = parse_poly(_load_text_file(args.poly))
    else:
        raise ValidationError("analyze-poly needs --expr STR or --poly FILE")
    report = poly_report(f)
    if args.svg:
        cfg.outputs.append(("svg-polygon", newton_polygon(f), args.svg))
    return report


def _cmd_verify_fiber(cfg: RunConfig) -> dict:
    args = cfg.args
    f = parse_poly(args.expr)
    pred = fiber_prediction(f)
    xi = _parse_complex_pair(args.xi)
    cv = critical_values(f, rel_tol=cfg.tol_roots)
    if cv:
        dmin = min(abs(xi - c) for c in cv)
        if dmin <= 1e-6:
            raise ValidationError(f"xi = {xi} is within 1e-06 of a critical value")
    mon = monodromy(f, xi, max_degree=cfg.max_degree)
    inv = topological_invariants(f, xi, mon)
    return {
        "expr": args.expr,
        "xi": [xi.real, xi.imag],
        "critical_values": [[c.real, c.imag] for c in cv],
        "branch_points": [
            {"z": [sp.z.real, sp.z.imag], "kind": sp.kind, "permutation": list(sp.permutation)}
            for sp in mon.special_points
        ],
        "infinity_permutation": list(mon.infinity_perm),
        "product_ok": mon.product_ok,
        "transitive": inv.transitive,
        "g_obs": inv.g_obs,
        "s_obs": inv.s_obs,
        "prediction": {"g": pred.g, "s": pred.s},
        "match": inv.g_obs == pred.g and inv.s_obs == pred.s,
        "euler_consistent": inv.euler_consistent,
    }


def _cmd_periods(cfg: RunConfig) -> dict:
    args = cfg.args
    f = parse_poly(args.expr)
    grid = _parse_grid(args.grid)
    if args.cycles != "auto":
        data = _load_json_file(args.cycles)
        from .periods import Cycle

        try:
            cycles = [
                Cycle(
                    center=complex(c["center"][0], c["center"][1]),
                    half_span=complex(c["half_span"][0], c["half_span"][1]),
                    rho=float(c["rho"]),
                )
                for c in data
            ]
        except (KeyError, TypeError, IndexError) as exc:
            raise MalformedFileError(f"bad cycles file: {exc}") from exc
    else:
        cycles = "auto"
    sample = periods(f, grid, cycles=cycles)
    rep = cauchy_riemann_check(sample)
    return {
        "expr": args.expr,
        "grid": [grid.x0, grid.x1, grid.y0, grid.y1, grid.nx, grid.ny],
        "ncycles": sample.ncycles,
        "periods": sample.values,
        "cr_residual": rep.cr_residual,
        "closedness_residual": rep.closedness_residual,
        "cr_order": rep.cr_order,
        "closedness_order": rep.closedness_order,
    }


_HANDLERS = {
    "analyze-word": _cmd_analyze_word,
    "build-fiber": _cmd_build_fiber,
    "check-exactness": _cmd_check_exactness,
    "check-extension": _cmd_check_extension,
    "analyze-poly": _cmd_analyze_poly,
    "verify-fiber": _cmd_verify_fiber,
    "periods": _cmd_periods,
}


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fiberatlas", description=__doc__)
    sub = ap.add_subparsers(dest="subcommand")

    def common(p):
        p.add_argument("--json", help="write the report to this path as well")
        p.add_argument("--tol-curl", type=float, default=1e-6)
        p.add_argument("--tol-roots", type=float, default=1e-8)
        p.add_argument("--tol-angles", type=float, default=1e-9)

    p = sub.add_parser("analyze-word")
    p.add_argument("--word", required=True)
    common(p)

    p = sub.add_parser("build-fiber")
    p.add_argument("--word", required=True)
    p.add_argument("--sides", required=True, help="semicolon-separated RE,IM side vectors")
    p.add_argument("--offset", help="RE,IM offset of the first vertex")
    p.add_argument("--svg", help="export the fiber polygon as SVG")
    p.add_argument("--no-auto-extension", action="store_true")
    common(p)

    p = sub.add_parser("check-exactness")
    p.add_argument("--word", required=True)
    p.add_argument("--sample", required=True, help="sample JSON file")
    p.add_argument("--actions", action="store_true", help="also tabulate action integrals")
    common(p)

    p = sub.add_parser("check-extension")
    p.add_argument("--polygon", help="polygon JSON file")
    p.add_argument("--points", help="inline RE,IM;RE,IM;... vertices")
    p.add_argument("--limit", type=int, default=64)
    common(p)

    p = sub.add_parser("analyze-poly")
    p.add_argument("--expr")
    p.add_argument("--poly", help="file containing the polynomial expression")
    p.add_argument("--svg", help="export the Newton polygon as SVG")
    common(p)

    p = sub.add_parser("verify-fiber")
    p.add_argument("--expr", required=True)
    p.add_argument("--xi", required=True, help="RE,IM of the fiber value")
    p.add_argument("--max-degree", type=int, default=6)
    common(p)

    p = sub.add_parser("periods")
    p.add_argument("--expr", required=True)
    p.add_argument("--grid", required=True, help="x0,x1,y0,y1,nx,ny")
    p.add_argument("--cycles", default="auto", help="'auto' or a cycles JSON file")
    common(p)

    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        sys.stderr.write("usage: fiberatlas SUBCOMMAND [options]\n")
        sys.stderr.write("subcommands: " + ", ".join(SUBCOMMANDS) + "\n")
        return EXIT_USAGE
    if argv[0] in ("-h", "--help"):
        _build_parser().print_help()
        return EXIT_OK
    if argv[0] not in SUBCOMMANDS:
        sys.stderr.write(f"fiberatlas: unknown subcommand {argv[0]!r}\n")
        sys.stderr.write("subcommands: " + ", ".join(SUBCOMMANDS) + "\n")
        return EXIT_USAGE

    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK

    try:
        cfg = RunConfig(
            subcommand=args.subcommand,
            args=args,
            threads=_threads_from_env(),
            tol_curl=getattr(args, "tol_curl", 1e-6),
            tol_roots=getattr(args, "tol_roots", 1e-8),
            tol_angles=getattr(args, "tol_angles", 1e-9),
            max_degree=getattr(args, "max_degree", 6),
        )
        report = _HANDLERS[args.subcommand](cfg)
        _emit(report, args)
        for kind, payload, path in cfg.outputs:
            if kind == "svg-fiber":
                serialize.svg_fiber(payload, path)
            elif kind == "svg-polygon":
                serialize.svg_lattice_polygon(payload, path)
        return EXIT_OK
    except MalformedFileError as exc:
        sys.stderr.write(f"fiberatlas: {exc}\n")
        return EXIT_BAD_FILE
    except ValidationError as exc:
        sys.stderr.write(f"fiberatlas: {exc}\n")
        return EXIT_VALIDATION
    except NumericalError as exc:
        sys.stderr.write(f"fiberatlas: numerical failure: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
