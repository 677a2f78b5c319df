"""Command-line front end: classification, volume, invariance and oracle reports.

Subcommands
    classify         per-facet metric class, center/radius, orientation, verdict
    volume           complex volume of a good polytope (slicing engine)
    boundary-volume  conformal volume of a boundary polygon (formula and/or lift)
    invariance       volume deviations under isometry words
    oracle           epsilon-regularized Monte Carlo estimate and extrapolation

Exit codes
    0  success
    1  unexpected failure
    2  parse / configuration error
    3  degenerate facet
    4  bounded-region certificate failed (decomposition required)
    5  light-like tangent or side direction
    6  epsilon sequence did not converge

Every flag can also be set through an ADSVOL_-prefixed environment variable
(e.g. ADSVOL_TOL, ADSVOL_SEED); explicit flags win over the environment.
Reports are printed to stdout with sorted keys; complex values are always
serialized as {"re": ..., "im": ...}.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from typing import Any

from .boundary import (
    boundary_volume_via_3d,
    polygon_from_json,
    polygon_volume,
)
from .epsoracle import (
    EpsilonSchedule,
    default_schedule,
    epsilon_extrapolate,
)
from .errors import (
    AdsvolError,
    DecompositionRequiredError,
    DegenerateFacetError,
    NonConvergenceError,
    NullTangentError,
    NullVectorError,
)
from .isometry import (
    random_isometry,
    transport_with_box,
    word_from_json,
    word_to_json,
)
from .model import (
    center_radius,
    discriminant,
    face_orientation,
    metric_class,
    polytope_from_json,
    validate_good_polytope,
)
from .slicing import REL_TOL_DEFAULT, VolumeDetail, volume

SCHEMA_VERSION = "1"

_ENV_PREFIX = "ADSVOL_"


class ConfigError(ValueError):
    """Bad flag/environment value or inconsistent option combination."""


# ---------------------------------------------------------------------------
# config plumbing


def _env_default(name: str, cast, fallback):
    raw = os.environ.get(_ENV_PREFIX + name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(
            f"environment variable {_ENV_PREFIX}{name} is not a valid "
            f"{cast.__name__}: {raw!r}"
        ) from exc


def _resolve(args: argparse.Namespace, attr: str, env: str, cast, fallback):
    val = getattr(args, attr, None)
    if val is not None:
        return val
    return _env_default(env, cast, fallback)


def _cjson(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _config_block(
    tol: float,
    seed: int,
    budget: int,
    sched: EpsilonSchedule | None,
    fmt: str,
) -> dict:
    eps = None
    if sched is not None:
        eps = {
            "eps0": sched.eps0,
            "ratio": sched.ratio,
            "count": sched.count,
            "samples": sched.samples,
        }
    return {
        "tolerance": tol,
        "seed": seed,
        "quadrature_budget": budget,
        "eps_schedule": eps,
        "output_format": fmt,
    }


def _load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _load_polytope(path: str):
    obj = _load_json(path)
    try:
        return polytope_from_json(obj)
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _flatten(obj: Any, prefix: str, out: list[tuple[str, Any]]) -> None:
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k), out)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(v, f"{prefix}[{i}]", out)
    else:
        out.append((prefix, obj))


def _emit(report: dict, fmt: str) -> None:
    if fmt == "csv":
        rows: list[tuple[str, Any]] = []
        _flatten(report, "", rows)
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, val in rows:
            writer.writerow([key, json.dumps(val) if val is None else val])
    else:
        print(json.dumps(report, sort_keys=True, indent=2))


# ---------------------------------------------------------------------------
# subcommands


def cmd_classify(args: argparse.Namespace) -> tuple[dict, int]:
    fmt = _resolve(args, "format", "FORMAT", str, "json")
    P = _load_polytope(args.polytope)
    facets = []
    degenerate: list[int] = []
    for i, H in enumerate(P.facets):
        cls = metric_class(H)
        row: dict[str, Any] = {
            "index": i,
            "a": H.a,
            "b": list(H.b.coords),
            "c": H.c,
            "discriminant": discriminant(H),
            "class": cls.name.lower(),
            "orientation": face_orientation(H).name.lower(),
        }
        if H.a != 0.0:
            cr = center_radius(H)
            row["center"] = list(cr.v.coords)
            row["radius"] = cr.r
        else:
            row["center"] = None
            row["radius"] = None
        if cls.name == "DEGENERATE":
            degenerate.append(i)
        facets.append(row)
    good = not degenerate
    detail = ""
    if good:
        try:
            validate_good_polytope(P)
        except DegenerateFacetError as exc:  # pragma: no cover - caught above
            good, detail = False, str(exc)
        except AdsvolError as exc:
            good, detail = False, str(exc)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "classify",
        "config": _config_block(0.0, 0, 0, None, fmt),
        "facets": facets,
        "degenerate_facets": degenerate,
        "verdict": "good" if good else "not-good",
    }
    if detail:
        report["verdict_detail"] = detail
    return report, (3 if degenerate else 0)


def cmd_volume(args: argparse.Namespace) -> tuple[dict, int]:
    tol = _resolve(args, "tol", "TOL", float, REL_TOL_DEFAULT)
    seed = _resolve(args, "seed", "SEED", int, 0)
    fmt = _resolve(args, "format", "FORMAT", str, "json")
    if tol <= 0.0:
        raise ConfigError("--tol must be positive")
    P = _load_polytope(args.polytope)
    detail = VolumeDetail()
    diag = None
    csv_fh = None
    csv_writer = None
    if args.csv:
        csv_fh = open(args.csv, "w", encoding="utf-8", newline="")
        csv_writer = csv.writer(csv_fh, lineterminator="\n")
        csv_writer.writerow(["sheet", "t", "integrand_re", "integrand_im"])

        def diag(sheet: str, t: float, b: complex, _radii) -> None:
            csv_writer.writerow(
                [sheet, repr(float(t)), repr(float(b.real)), repr(float(b.imag))]
            )

    t0 = time.perf_counter()
    try:
        v = volume(P, rel_tol=tol, diag=diag, detail=detail)
    finally:
        if csv_fh is not None:
            csv_fh.close()
    runtime_ms = (time.perf_counter() - t0) * 1000.0

    sheets = ["upper", "lower"]
    plans = []
    for label, plan in zip(sheets, detail.plans):
        plans.append(
            {
                "sheet": label,
                "points": [{"t": bp.t, "kind": bp.kind} for bp in plan.breakpoints],
            }
        )
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "volume",
        "config": _config_block(tol, seed, 0, None, fmt),
        "value": _cjson(v.value),
        "abs_err": v.abs_err,
        "breakpoints": plans,
        "integrand_evals": detail.evals,
        "runtime_ms": runtime_ms,
    }
    return report, 0


def cmd_boundary_volume(args: argparse.Namespace) -> tuple[dict, int]:
    tol = _resolve(args, "tol", "TOL", float, 1e-4)
    fmt = _resolve(args, "format", "FORMAT", str, "json")
    obj = _load_json(args.polygon)
    try:
        G = polygon_from_json(obj)
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"{args.polygon}: {exc}") from exc
    methods: dict[str, dict] = {}
    if args.method in ("polygon", "both"):
        r = polygon_volume(G)
        methods["polygon"] = {"value": r.value, "abs_err": r.abs_err}
    if args.method in ("lift", "both"):
        r = boundary_volume_via_3d(G)
        methods["lift"] = {"value": r.value, "abs_err": r.abs_err}
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "boundary-volume",
        "config": _config_block(tol, 0, 0, None, fmt),
        "method": args.method,
        "methods": methods,
    }
    if args.method == "both":
        disc = abs(methods["polygon"]["value"] - methods["lift"]["value"])
        report["discrepancy"] = disc
        report["within_tolerance"] = bool(
            disc
            <= max(
                tol,
                10.0
                * (methods["polygon"]["abs_err"] + methods["lift"]["abs_err"]),
            )
        )
    return report, 0


def cmd_invariance(args: argparse.Namespace) -> tuple[dict, int]:
    tol = _resolve(args, "tol", "TOL", float, 1e-5)
    seed = _resolve(args, "seed", "SEED", int, 0)
    fmt = _resolve(args, "format", "FORMAT", str, "json")
    if (args.word is None) == (args.random is None):
        raise ConfigError("exactly one of --word FILE or --random K is required")
    P = _load_polytope(args.polytope)
    if args.word is not None:
        obj = _load_json(args.word)
        try:
            words = [word_from_json(obj)]
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"{args.word}: {exc}") from exc
    else:
        if args.random <= 0:
            raise ConfigError("--random needs a positive count")
        words = [
            random_isometry(seed + i, ambient_dim=P.ambient_dim)
            for i in range(args.random)
        ]
    base = volume(P)
    rows = []
    checked = skipped = failed = 0
    for i, w in enumerate(words):
        row: dict[str, Any] = {"index": i, "word": word_to_json(w)}
        try:
            Q = transport_with_box(P, w, seed=seed + 7919 * (i + 1))
            v = volume(Q)
        except DecompositionRequiredError as exc:
            row["skipped"] = str(exc)
            skipped += 1
            rows.append(row)
            continue
        dev = abs(v.value - base.value)
        gate = max(tol, 10.0 * (base.abs_err + v.abs_err))
        ok = dev <= gate
        row.update(
            {
                "image_volume": _cjson(v.value),
                "deviation": dev,
                "tolerance": gate,
                "pass": bool(ok),
            }
        )
        checked += 1
        failed += (not ok)
        rows.append(row)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "invariance",
        "config": _config_block(tol, seed, 0, None, fmt),
        "base_volume": _cjson(base.value),
        "base_abs_err": base.abs_err,
        "rows": rows,
        "checked": checked,
        "skipped": skipped,
        "all_pass": bool(checked and not failed) or (not checked),
    }
    return report, 0


def cmd_oracle(args: argparse.Namespace) -> tuple[dict, int]:
    tol = _resolve(args, "tol", "TOL", float, 1e-2)
    seed = _resolve(args, "seed", "SEED", int, 0)
    budget = _resolve(args, "budget", "BUDGET", int, 16384)
    eps0 = _resolve(args, "eps0", "EPS0", float, None)
    ratio = _resolve(args, "eps_ratio", "EPS_RATIO", float, 0.5)
    steps = _resolve(args, "eps_steps", "EPS_STEPS", int, 6)
    fmt = _resolve(args, "format", "FORMAT", str, "json")
    P = _load_polytope(args.polytope)
    try:
        if eps0 is not None:
            sched = EpsilonSchedule(eps0, ratio, steps, budget)
        else:
            sched = default_schedule(P, samples=budget, count=steps, ratio=ratio)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    res = epsilon_extrapolate(
        P, sched, seed=seed, allow_degenerate=args.allow_degenerate
    )
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "oracle",
        "config": _config_block(tol, seed, budget, sched, fmt),
        "eps": list(res.eps),
        "estimates": [_cjson(z) for z in res.estimates],
        "stat_errs": list(res.stat_errs),
        "value": _cjson(res.value),
        "abs_err": res.abs_err,
        "converged": bool(res.converged),
    }
    code = 0
    if args.compare:
        v = volume(P)
        diff = abs(res.value - v.value)
        comb = res.abs_err + v.abs_err
        report["engine_value"] = _cjson(v.value)
        report["engine_abs_err"] = v.abs_err
        report["difference"] = diff
        report["agree"] = bool(diff <= max(comb, tol * max(1.0, abs(v.value))))
    if not res.converged:
        code = 6
    return report, code


# ---------------------------------------------------------------------------
# parser / dispatch


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="adsvol",
        description="Volumes of good quadric polytopes in the doubled model "
        "space, their isometry transports, and conformal boundary volumes.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, tol_help: str) -> None:
        p.add_argument("--tol", type=float, default=None, help=tol_help)
        p.add_argument("--seed", type=int, default=None, help="deterministic seed")
        p.add_argument(
            "--format",
            choices=("json", "csv"),
            default=None,
            help="report rendering (default json)",
        )

    p = sub.add_parser("classify", help="per-facet classification report")
    p.add_argument("polytope", help="polytope JSON file")
    p.add_argument(
        "--format", choices=("json", "csv"), default=None, help="report rendering"
    )
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("volume", help="complex volume by the slicing engine")
    p.add_argument("polytope", help="polytope JSON file")
    common(p, tol_help="relative integration tolerance (default 1e-8)")
    p.add_argument(
        "--csv", default=None, help="write integrand samples to this CSV path"
    )
    p.set_defaults(func=cmd_volume)

    p = sub.add_parser(
        "boundary-volume", help="conformal volume of a boundary polygon"
    )
    p.add_argument("polygon", help="polygon JSON file")
    common(p, tol_help="cross-method agreement tolerance (default 1e-4)")
    p.add_argument(
        "--method",
        choices=("polygon", "lift", "both"),
        default="polygon",
        help="closed angle formula, 3d lift, or both with discrepancy",
    )
    p.set_defaults(func=cmd_boundary_volume)

    p = sub.add_parser("invariance", help="volume deviation under isometry words")
    p.add_argument("polytope", help="polytope JSON file")
    common(p, tol_help="deviation gate (default 1e-5)")
    p.add_argument("--word", default=None, help="JSON file with one isometry word")
    p.add_argument(
        "--random", type=int, default=None, help="number of random words to draw"
    )
    p.set_defaults(func=cmd_invariance)

    p = sub.add_parser("oracle", help="epsilon-regularized estimate and limit")
    p.add_argument("polytope", help="polytope JSON file")
    common(p, tol_help="comparison tolerance for --compare (default 1e-2)")
    p.add_argument("--budget", type=int, default=None, help="samples per epsilon")
    p.add_argument("--eps0", type=float, default=None, help="first epsilon")
    p.add_argument(
        "--eps-ratio", dest="eps_ratio", type=float, default=None,
        help="geometric ratio of the schedule (default 0.5)",
    )
    p.add_argument(
        "--eps-steps", dest="eps_steps", type=int, default=None,
        help="number of epsilons (default 6, minimum 2)",
    )
    p.add_argument(
        "--compare", action="store_true", help="also run the slicing engine"
    )
    p.add_argument(
        "--allow-degenerate",
        action="store_true",
        help="skip the degenerate-facet rejection (diagnostic runs)",
    )
    p.set_defaults(func=cmd_oracle)
    return ap


_ERROR_EXITS: tuple[tuple[type, int], ...] = (
    (ConfigError, 2),
    (DegenerateFacetError, 3),
    (DecompositionRequiredError, 4),
    (NullTangentError, 5),
    (NullVectorError, 5),
    (NonConvergenceError, 6),
)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.func(args)
    except Exception as exc:  # noqa: BLE001 - single funnel to exit codes
        code = 1
        for etype, ecode in _ERROR_EXITS:
            if isinstance(exc, etype):
                code = ecode
                break
        if code == 1 and not isinstance(exc, AdsvolError):
            raise
        print(f"adsvol: error: {exc}", file=sys.stderr)
        return code
    fmt = report.get("config", {}).get("output_format", "json")
    _emit(report, fmt)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
