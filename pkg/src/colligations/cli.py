"""Command-line front end.

Subcommands: ``validate`` | ``product`` | ``eval`` | ``surface`` | ``verify``
| ``random``.  Documents are canonical UTF-8 JSON; grid evaluations stream
NDJSON with one record per line in a deterministic row-major order, so the
output bytes do not depend on the worker-thread count.

Exit codes: 0 success; 1 parse error; 2 invariant violation; 3 mismatched
kind, dimension, or unknown suite; 4 every grid point singular; 5 property
failure in a verification suite.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass

import numpy as np

from .errors import (
    ColligationError,
    DocumentError,
    NearPole,
    NearSingular,
    OnEigensurface,
)
from .linalg import (
    DEFAULT_TOLERANCES,
    Tolerances,
    sample_ball,
    sample_disc,
    sigma_extremes,
    tolerances_from_profile,
)
from .colligation import charfun_z
from .multi import elimination_matrix, multi_charfun
from .conjugacy import tri_charfun, tri_elimination_matrix
from .doublecoset import dc_charfun, dc_elimination_matrix
from .documents import (
    KINDS,
    Document,
    document_for,
    emit_document,
    load_document,
    matrix_from_json,
    matrix_to_json,
    random_document,
)
from .verify import Dims, list_suites, run_suite

__all__ = ["main"]

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INVARIANT = 2
EXIT_MISMATCH = 3
EXIT_ALL_SINGULAR = 4
EXIT_PROPERTY = 5

_SINGULAR = (NearPole, NearSingular, OnEigensurface)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# --- input parsing ------------------------------------------------------------


def _load(path: str, tol: Tolerances) -> Document:
    try:
        return load_document(path, tol)
    except DocumentError as exc:
        code = EXIT_PARSE if exc.stage == "parse" else EXIT_INVARIANT
        raise CliError(code, f"{path}: {exc}") from None


def _parse_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_PARSE, f"{what}: invalid JSON ({exc})") from None


def _parse_scalar(obj, what: str) -> complex:
    """A complex scalar given as a number or a ``[re, im]`` pair."""
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        value = complex(float(obj), 0.0)
    elif (
        isinstance(obj, list)
        and len(obj) == 2
        and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj)
    ):
        value = complex(float(obj[0]), float(obj[1]))
    else:
        raise CliError(EXIT_PARSE, f"{what}: expected a number or an [re, im] pair")
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise CliError(EXIT_PARSE, f"{what}: entries must be finite")
    return value


def _parse_matrix(obj, what: str) -> np.ndarray:
    try:
        return matrix_from_json(obj, what)
    except DocumentError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from None


def _parse_argument(obj, scalar: bool, what: str):
    return _parse_scalar(obj, what) if scalar else _parse_matrix(obj, what)


@dataclass(frozen=True)
class GridSpec:
    """One evaluation grid: a disc lattice, a line segment, or a random ball."""

    kind: str
    resolution: int = 1
    radius: float = 1.0
    base: object = None
    direction: object = None
    t_min: complex = 0j
    t_max: complex = 0j
    count: int = 1
    seed: int = 0


def _parse_grid(obj) -> GridSpec:
    if not isinstance(obj, dict):
        raise CliError(EXIT_PARSE, "grid: expected a JSON object")
    kind = obj.get("type")
    known = {
        "disc": {"resolution"} | {"radius"},
        "segment": {"base", "direction", "t_min", "t_max", "resolution"},
        "ball": {"count"} | {"seed", "radius"},
    }
    if kind not in known:
        raise CliError(EXIT_PARSE, "grid: type must be one of disc, segment, ball")
    extra = set(obj) - known[kind] - {"type"}
    if extra:
        raise CliError(EXIT_PARSE, f"grid: unknown keys {sorted(extra)} for type {kind!r}")

    def natural(key, default=None):
        value = obj.get(key, default)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise CliError(EXIT_PARSE, f"grid: {key} must be a positive integer")
        return value

    def positive(key, default):
        value = obj.get(key, default)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise CliError(EXIT_PARSE, f"grid: {key} must be a number")
        value = float(value)
        if not (math.isfinite(value) and value > 0.0):
            raise CliError(EXIT_PARSE, f"grid: {key} must be positive and finite")
        return value

    if kind == "disc":
        return GridSpec("disc", resolution=natural("resolution"), radius=positive("radius", 1.0))
    if kind == "segment":
        for key in ("base", "direction", "t_min", "t_max"):
            if key not in obj:
                raise CliError(EXIT_PARSE, f"grid: segment needs {key}")
        return GridSpec(
            "segment",
            resolution=natural("resolution"),
            base=obj["base"],
            direction=obj["direction"],
            t_min=_parse_scalar(obj["t_min"], "grid t_min"),
            t_max=_parse_scalar(obj["t_max"], "grid t_max"),
        )
    seed = obj.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise CliError(EXIT_PARSE, "grid: seed must be an integer")
    return GridSpec("ball", count=natural("count"), seed=seed, radius=positive("radius", 1.0))


# --- evaluation plumbing ------------------------------------------------------


def _variable_for(doc: Document, requested: str | None) -> str:
    allowed = {"colligation": ("z",), "multi": ("S",), "tri": ("S",), "doublecoset": ("S", "R")}[
        doc.kind
    ]
    if requested is None:
        return allowed[0]
    if requested not in allowed:
        raise CliError(
            EXIT_MISMATCH,
            f"variable {requested!r} does not apply to a {doc.kind} document "
            f"(expected {' or '.join(allowed)})",
        )
    return requested


def _argument_dim(doc: Document) -> int:
    payload = doc.payload
    return {"multi": lambda: payload.arity, "tri": lambda: payload.slots, "doublecoset": lambda: payload.arity}[
        doc.kind
    ]()


def _check_shape(doc: Document, argument, what: str) -> None:
    if doc.kind == "colligation":
        return
    n = _argument_dim(doc)
    if argument.shape != (n, n):
        raise CliError(EXIT_MISMATCH, f"{what}: expected a {n}x{n} matrix, got {argument.shape}")


def _charfun_runner(doc: Document, variable: str, fixed, tol: Tolerances):
    """Point evaluator returning a CharValue for the varied argument."""
    payload = doc.payload
    if doc.kind == "colligation":
        return lambda z: charfun_z(payload, z, tol)
    if doc.kind == "multi":
        return lambda s: multi_charfun(payload, s, tol)
    if doc.kind == "tri":
        return lambda s: tri_charfun(payload, s, tol)
    if fixed is None:
        other = "R" if variable == "S" else "S"
        raise CliError(
            EXIT_MISMATCH,
            f"a doublecoset document takes two arguments; give --fixed with the {other} matrix",
        )
    if variable == "S":
        return lambda s: dc_charfun(payload, s, fixed, tol)
    return lambda r: dc_charfun(payload, fixed, r, tol)


def _surface_system(doc: Document, variable: str, fixed, tol: Tolerances):
    """Point-to-elimination-matrix map for the surface subcommand."""
    payload = doc.payload
    if doc.kind == "colligation":
        raise CliError(EXIT_MISMATCH, "a colligation document has no eigensurface to sample")
    if doc.kind == "multi":
        return lambda s: elimination_matrix(payload, s)
    if doc.kind == "tri":
        return lambda s: tri_elimination_matrix(payload, s)
    if fixed is None:
        other = "R" if variable == "S" else "S"
        raise CliError(
            EXIT_MISMATCH,
            f"a doublecoset document takes two arguments; give --fixed with the {other} matrix",
        )
    if variable == "S":
        return lambda s: dc_elimination_matrix(payload, s, fixed, tol)
    return lambda r: dc_elimination_matrix(payload, fixed, r, tol)


def _scalar_json(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _grid_arguments(spec: GridSpec, doc: Document) -> list[tuple[object, object]]:
    """The (point label, argument) list in the deterministic output order."""
    scalar = doc.kind == "colligation"
    if spec.kind == "disc":
        if not scalar:
            raise CliError(EXIT_MISMATCH, "disc grids apply to one-variable documents only")
        res, radius = spec.resolution, spec.radius
        points = []
        for i in range(res):  # row-major: imaginary part per row, real part per column
            im = -radius + 2.0 * radius * i / (res - 1) if res > 1 else 0.0
            for j in range(res):
                re = -radius + 2.0 * radius * j / (res - 1) if res > 1 else 0.0
                z = complex(re, im)
                if abs(z) <= radius * (1.0 + 1e-12):
                    points.append((_scalar_json(z), z))
        return points
    if spec.kind == "segment":
        base = _parse_argument(spec.base, scalar, "grid base")
        direction = _parse_argument(spec.direction, scalar, "grid direction")
        if not scalar:
            _check_shape(doc, base, "grid base")
            _check_shape(doc, direction, "grid direction")
        steps = spec.resolution
        ts = [
            spec.t_min + (spec.t_max - spec.t_min) * (k / (steps - 1) if steps > 1 else 0.0)
            for k in range(steps)
        ]
        return [(_scalar_json(t), base + t * direction) for t in ts]
    rng = np.random.default_rng(spec.seed)
    points = []
    for index in range(spec.count):
        if scalar:
            argument: object = sample_disc(rng, spec.radius)
        else:
            argument = sample_ball(rng, _argument_dim(doc), spec.radius)
        points.append((index, argument))
    return points


def _emit_records(records, out) -> None:
    for record in records:
        out.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")


def _open_out(path: str | None):
    if path in (None, "-"):
        return nullcontext(sys.stdout)
    return open(path, "w", encoding="utf-8")


def _map_ordered(fn, items, threads: int):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# --- subcommands --------------------------------------------------------------


def _cmd_validate(args, tol: Tolerances) -> int:
    _load(args.path, tol)
    return EXIT_OK


def _cmd_product(args, tol: Tolerances) -> int:
    from .colligation import product
    from .multi import multi_product
    from .conjugacy import tri_product
    from .doublecoset import dc_product

    first = _load(args.first, tol)
    second = _load(args.second, tol)
    if first.kind != second.kind:
        raise CliError(EXIT_MISMATCH, f"kind mismatch: {first.kind} vs {second.kind}")
    combine = {
        "colligation": product,
        "multi": multi_product,
        "tri": tri_product,
        "doublecoset": dc_product,
    }[first.kind]
    try:
        combined = combine(first.payload, second.payload, tol)
    except ColligationError as exc:
        raise CliError(EXIT_MISMATCH, str(exc)) from None
    with _open_out(args.out) as out:
        out.write(emit_document(document_for(combined)))
    return EXIT_OK


def _eval_points(args, doc: Document, variable: str, scalar: bool):
    if (args.point is None) == (args.grid is None):
        raise CliError(EXIT_PARSE, "give exactly one of --point or --grid")
    if args.point is not None:
        obj = _parse_json(args.point, "--point")
        argument = _parse_argument(obj, scalar, "--point")
        if not scalar:
            _check_shape(doc, argument, "--point")
        label = _scalar_json(argument) if scalar else matrix_to_json(argument)
        return [(label, argument)]
    spec = _parse_grid(_parse_json(args.grid, "--grid"))
    points = _grid_arguments(spec, doc)
    if points and not scalar:
        _check_shape(doc, points[0][1], "grid argument")
    return points


def _fixed_argument(args, doc: Document, variable: str):
    if args.fixed is None:
        return None
    fixed = _parse_matrix(_parse_json(args.fixed, "--fixed"), "--fixed")
    _check_shape(doc, fixed, "--fixed")
    return fixed


def _cmd_eval(args, tol: Tolerances) -> int:
    doc = _load(args.path, tol)
    variable = _variable_for(doc, args.variable)
    scalar = doc.kind == "colligation"
    points = _eval_points(args, doc, variable, scalar)
    run = _charfun_runner(doc, variable, _fixed_argument(args, doc, variable), tol)

    def evaluate(labelled):
        label, argument = labelled
        try:
            value = run(argument)
        except _SINGULAR as exc:
            return {"point": label, "value": None, "sigma_min": exc.sigma_min, "regular": False}
        return {
            "point": label,
            "value": matrix_to_json(value.value),
            "sigma_min": value.sigma_min,
            "regular": True,
        }

    if points:
        try:  # surface dimension mismatches abort before the parallel sweep
            evaluate(points[0])
        except ColligationError as exc:
            raise CliError(EXIT_MISMATCH, str(exc)) from None
    records = _map_ordered(evaluate, points, args.threads)
    with _open_out(args.out) as out:
        _emit_records(records, out)
    if records and not any(record["regular"] for record in records):
        return EXIT_ALL_SINGULAR
    return EXIT_OK


def _cmd_surface(args, tol: Tolerances) -> int:
    doc = _load(args.path, tol)
    variable = _variable_for(doc, args.variable) if doc.kind != "colligation" else "S"
    system = _surface_system(doc, variable, _fixed_argument(args, doc, variable), tol)
    points = _eval_points(args, doc, variable, scalar=False)

    def sample(labelled):
        label, argument = labelled
        matrix = system(argument)
        smin, _ = sigma_extremes(matrix)
        return {
            "point": label,
            "abs_det": abs(complex(np.linalg.det(matrix))),
            "sigma_min": smin,
        }

    if points:
        try:
            sample(points[0])
        except ColligationError as exc:
            raise CliError(EXIT_MISMATCH, str(exc)) from None
    records = _map_ordered(sample, points, args.threads)
    with _open_out(args.out) as out:
        _emit_records(records, out)
    return EXIT_OK


def _cmd_verify(args, tol: Tolerances) -> int:
    if args.list:
        for suite in list_suites():
            print(f"{suite.name}: {suite.describe}")
        return EXIT_OK
    if args.suite is None:
        raise CliError(EXIT_MISMATCH, "give a suite name (or --list to see them)")
    dims = Dims(max_alpha=args.max_alpha, max_inner=args.max_inner, max_arity=args.max_arity)
    try:
        report = run_suite(
            args.suite,
            trials=args.trials,
            seed=args.seed,
            dims=dims,
            tol=tol,
            threads=args.threads,
        )
    except ValueError as exc:
        raise CliError(EXIT_MISMATCH, str(exc)) from None
    with _open_out(args.out) as out:
        out.write(json.dumps(report.to_object(), sort_keys=True, separators=(",", ":")) + "\n")
    return EXIT_OK if report.passed else EXIT_PROPERTY


def _cmd_random(args, tol: Tolerances) -> int:
    doc = random_document(args.kind, args.seed, alpha=args.alpha, inner=args.inner, arity=args.arity)
    with _open_out(args.out) as out:
        out.write(emit_document(doc))
    return EXIT_OK


# --- argument parser ----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    tol_flags = argparse.ArgumentParser(add_help=False)
    for name in ("unitarity", "residual", "rank", "surface-guard"):
        tol_flags.add_argument(
            f"--tol-{name}",
            type=float,
            default=None,
            metavar="X",
            help=f"override the {name.replace('-', ' ')} tolerance",
        )

    threaded = argparse.ArgumentParser(add_help=False)
    threaded.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        help="worker threads (default: machine cores); output bytes are identical regardless",
    )
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--out", default=None, help="output file (default: stdout)")

    parser = argparse.ArgumentParser(
        prog="colligations",
        description="Operator colligation documents: validate, combine, evaluate, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[tol_flags], help="check a document file")
    p.add_argument("path")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("product", parents=[tol_flags, output], help="combine two documents")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(handler=_cmd_product)

    p = sub.add_parser(
        "eval", parents=[tol_flags, output, threaded], help="evaluate the transfer function"
    )
    p.add_argument("path")
    p.add_argument("--point", default=None, help="single argument as JSON")
    p.add_argument("--grid", default=None, help="grid specification as JSON")
    p.add_argument("--variable", choices=("z", "S", "R"), default=None, help="which argument varies")
    p.add_argument("--fixed", default=None, help="the held-fixed matrix for two-argument documents")
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser(
        "surface", parents=[tol_flags, output, threaded], help="sample the eigensurface indicator"
    )
    p.add_argument("path")
    p.add_argument("--point", default=None, help="single argument as JSON")
    p.add_argument("--grid", default=None, help="grid specification as JSON")
    p.add_argument("--variable", choices=("S", "R"), default=None, help="which argument varies")
    p.add_argument("--fixed", default=None, help="the held-fixed matrix for two-argument documents")
    p.set_defaults(handler=_cmd_surface)

    p = sub.add_parser(
        "verify", parents=[tol_flags, output, threaded], help="run a randomized property suite"
    )
    p.add_argument("suite", nargs="?", default=None)
    p.add_argument("--list", action="store_true", help="list the registered suites")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-alpha", type=int, default=3, help="largest exposed dimension drawn")
    p.add_argument("--max-inner", type=int, default=4, help="largest inner dimension drawn")
    p.add_argument("--max-arity", type=int, default=3, help="largest family arity drawn")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("random", parents=[tol_flags, output], help="emit a seeded random document")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--inner", type=int, default=2, help="inner dimension (slot dimension for tri)")
    p.add_argument("--arity", type=int, default=2, help="member count (slot count for tri)")
    p.set_defaults(handler=_cmd_random)

    return parser


def _resolve_tolerances(args) -> Tolerances:
    profile = os.environ.get("COLLIGATION_TOL_PROFILE", "default")
    try:
        tol = tolerances_from_profile(profile)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, f"COLLIGATION_TOL_PROFILE: {exc}") from None
    overrides = {
        "unitarity_tol": args.tol_unitarity,
        "residual_tol": args.tol_residual,
        "rank_tol": args.tol_rank,
        "surface_guard": args.tol_surface_guard,
    }
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if not overrides:
        return tol
    try:
        return dataclasses.replace(tol, **overrides)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from None


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse reserves status 2 for usage errors; this tool reports
        # invariant violations there, so usage problems map to the parse code.
        code = exc.code if isinstance(exc.code, int) else 0
        return EXIT_PARSE if code == 2 else code
    try:
        tol = _resolve_tolerances(args)
        return args.handler(args, tol)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
