"""Command-line front end: ``verify``, ``suite``, ``table`` and ``list``.

Exit codes: 0 every checked identity passed, 1 at least one statistical
failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import platform
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__, exact
from .errors import DegenerateInputError, DomainError, ValidationError
from .geometry import ellipsoid_from_semiaxes
from .montecarlo import (
    CATALOG,
    DEFAULT_KS_SAMPLES,
    DEFAULT_MOMENT_SAMPLES,
    IdentityParams,
    Policy,
    canonical_identity,
    default_workers,
    estimate_projection_moment,
    estimate_simplex_moment,
    verify_identity,
)
from .sampling import RandomStream

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
_INPUT_ERRORS = (DomainError, ValidationError, DegenerateInputError)


class UsageError(Exception):
    """Bad flags or config; reported on one line with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- small parsers -----------------------------------------------------------


def _float_list(text: str, flag: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise UsageError(f"{flag}: empty list")
    return vals


def _int_range(text: str, flag: str) -> list[int]:
    """'2:4' -> [2, 3, 4]; '3' -> [3]."""
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"{flag}: expected N or LO:HI, got {text!r}") from None
    if lo > hi:
        raise UsageError(f"{flag}: empty range {text!r}")
    return list(range(lo, hi + 1))


def _load_rotation(args) -> Any:
    if args.rotation_file:
        try:
            return json.loads(Path(args.rotation_file).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--rotation-file: {exc}") from None
    if args.rotation_seed is not None:
        return f"random({args.rotation_seed})"
    return args.rotation


# --- output ------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def _metadata(argv: Sequence[str] | None) -> dict:
    return {
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "host": platform.node(),
        "python": platform.python_version(),
        "version": __version__,
        "argv": list(argv) if argv is not None else sys.argv[1:],
    }


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_cell(x) for x in v)
    if isinstance(v, dict):
        return json.dumps(_jsonable(v), sort_keys=True)
    return str(v)


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(row.get(h)) for h in header])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump_json(doc: dict) -> str:
    return json.dumps(_jsonable(doc), indent=2) + "\n"


# --- verify ------------------------------------------------------------------


def _make_params(identity, d, k, p, semi_axes, rotation, family, where: str, axes_field="semiaxes") -> IdentityParams:
    if d < 1:
        raise UsageError(f"{where}d: must be >= 1, got {d}")
    if not 0 <= k <= d:
        raise UsageError(f"{where}k: need 0 <= k <= d, got k={k}, d={d}")
    if semi_axes is not None and len(semi_axes) != d:
        raise UsageError(f"{where}{axes_field}: expected {d} values for d={d}, got {len(semi_axes)}")
    if semi_axes is not None and any(a <= 0 for a in semi_axes):
        raise UsageError(f"{where}{axes_field}: all semi-axes must be positive")
    try:
        canonical_identity(identity)
        prm = IdentityParams(d, k, p, tuple(semi_axes) if semi_axes else None, rotation, family)
        prm.ellipsoid()
    except _INPUT_ERRORS as exc:
        raise UsageError(f"{where}{_field_hint(exc)}{exc}") from None
    return prm


def _field_hint(exc) -> str:
    msg = str(exc)
    if "identity" in msg:
        return "identity: "
    if "rotation" in msg or "frame" in msg:
        return "rotation: "
    if "family" in msg or "Family" in msg:
        return "family: "
    return ""


def _run_checked(identity, prm, n, seed, policy, workers, rhs_scale=1.0, where=""):
    try:
        return verify_identity(identity, prm, n, seed, policy, workers, rhs_scale)
    except _INPUT_ERRORS as exc:
        raise UsageError(f"{where}parameters (d, k, p): {exc}") from None


def run_verify(args, argv=None) -> int:
    if args.n < 2:
        raise UsageError(f"--n: must be >= 2, got {args.n}")
    if args.workers < 1:
        raise UsageError(f"--workers: must be >= 1, got {args.workers}")
    if not 0 <= args.seed < 2**64:
        raise UsageError(f"--seed: must be an unsigned 64-bit integer, got {args.seed}")
    axes = _float_list(args.semiaxes, "--semiaxes")
    try:
        policy = Policy(args.z_threshold, args.alpha)
    except ValidationError as exc:
        raise UsageError(f"--z-threshold/--alpha: {exc}") from None
    prm = _make_params(args.identity, args.d, args.k, args.p, axes, _load_rotation(args), args.family, "--")
    rep = _run_checked(args.identity, prm, args.n, args.seed, policy, args.workers)
    rec = rep.to_record()
    if args.format == "csv":
        _emit(rows_to_csv([rec]), args.out)
    else:
        _emit(_dump_json({**rec, "metadata": _metadata(argv)}), args.out)
    return EXIT_PASS if rep.passed else EXIT_FAIL


# --- suite -------------------------------------------------------------------

_ENTRY_FIELDS = {
    "identity", "d", "k", "p", "semi_axes", "rotation", "family", "samples", "seed",
    "workers", "policy", "perturbation",
}


def _need(entry: dict, key: str, kind, where: str):
    if key not in entry:
        raise UsageError(f"{where}.{key}: required field missing")
    val = entry[key]
    if kind is float and isinstance(val, int) and not isinstance(val, bool):
        val = float(val)
    if not isinstance(val, kind) or isinstance(val, bool):
        raise UsageError(f"{where}.{key}: expected {kind.__name__}, got {val!r}")
    return val


def _opt(entry: dict, key: str, kind, default, where: str):
    return _need(entry, key, kind, where) if key in entry else default


def parse_suite(doc: Any) -> list[dict]:
    """Validate a suite document; returns normalised experiment dicts."""
    if not isinstance(doc, dict):
        raise UsageError("suite: top level must be an object with an 'experiments' list")
    unknown = set(doc) - {"experiments", "defaults", "description"}
    if unknown:
        raise UsageError(f"suite: unknown top-level field(s) {sorted(unknown)}")
    defaults = doc.get("defaults", {})
    if not isinstance(defaults, dict):
        raise UsageError("defaults: expected an object")
    exps = doc.get("experiments", [])
    if not isinstance(exps, list):
        raise UsageError("experiments: expected a list")
    out = []
    for i, raw in enumerate(exps):
        where = f"experiments[{i}]"
        if not isinstance(raw, dict):
            raise UsageError(f"{where}: expected an object")
        entry = {**defaults, **raw}
        unknown = set(entry) - _ENTRY_FIELDS
        if unknown:
            raise UsageError(f"{where}.{sorted(unknown)[0]}: unknown field")
        identity = _need(entry, "identity", str, where)
        d = _need(entry, "d", int, where)
        k = _need(entry, "k", int, where)
        p = _opt(entry, "p", float, 1.0, where)
        axes = entry.get("semi_axes")
        if axes is not None:
            if not isinstance(axes, list) or not all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in axes):
                raise UsageError(f"{where}.semi_axes: expected a list of numbers")
            axes = [float(a) for a in axes]
        rotation = entry.get("rotation")
        if rotation is not None and not isinstance(rotation, (str, list)):
            raise UsageError(f"{where}.rotation: expected a preset string or a matrix")
        family = _opt(entry, "family", str, "uniform", where)
        samples = _opt(entry, "samples", int, None, where)
        if samples is not None and samples < 2:
            raise UsageError(f"{where}.samples: must be >= 2, got {samples}")
        seed = _need(entry, "seed", int, where)
        if not 0 <= seed < 2**64:
            raise UsageError(f"{where}.seed: must be an unsigned 64-bit integer")
        workers = _opt(entry, "workers", int, None, where)
        if workers is not None and workers < 1:
            raise UsageError(f"{where}.workers: must be >= 1")
        pol = _opt(entry, "policy", dict, {}, where)
        bad = set(pol) - {"z_threshold", "alpha"}
        if bad:
            raise UsageError(f"{where}.policy.{sorted(bad)[0]}: unknown field")
        try:
            policy = Policy(**{key: float(v) for key, v in pol.items()})
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{where}.policy: {exc}") from None
        perturb = _opt(entry, "perturbation", float, 1.0, where)
        prm = _make_params(identity, d, k, p, axes, rotation, family, f"{where}.", "semi_axes")
        out.append(
            {"identity": identity, "params": prm, "samples": samples, "seed": seed,
             "workers": workers, "policy": policy, "perturbation": perturb, "where": where}
        )
    return out


def default_suite_text() -> str:
    return resources.files("simplexgeom").joinpath("data/default_suite.json").read_text(encoding="utf-8")


def run_suite_doc(doc: Any, workers: int | None = None, max_samples: int | None = None) -> tuple[dict, int]:
    """Run a parsed suite document; returns (aggregate report without metadata, exit code)."""
    entries = parse_suite(doc)
    records = []
    for ent in entries:
        n = ent["samples"]
        if n is None:
            moment = CATALOG[canonical_identity(ent["identity"])].kind == "moment"
            n = DEFAULT_MOMENT_SAMPLES if moment else DEFAULT_KS_SAMPLES
        if max_samples is not None:
            n = min(n, max_samples)
        w = workers or ent["workers"] or default_workers()
        rep = _run_checked(ent["identity"], ent["params"], n, ent["seed"], ent["policy"], w,
                           ent["perturbation"], where=f"{ent['where']}.")
        records.append(rep.to_record())
    passed = sum(1 for r in records if r["pass"])
    summary = {"total": len(records), "passed": passed, "failed": len(records) - passed}
    code = EXIT_PASS if passed == len(records) else EXIT_FAIL
    return {"summary": summary, "entries": records}, code


def run_suite(args, argv=None) -> int:
    if args.default:
        text, origin = default_suite_text(), "default suite"
    elif args.config:
        try:
            text, origin = Path(args.config).read_text(encoding="utf-8"), args.config
        except OSError as exc:
            raise UsageError(f"config: {exc}") from None
    else:
        raise UsageError("suite: give a config path or --default")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config: {origin} is not valid JSON ({exc})") from None
    if args.workers is not None and args.workers < 1:
        raise UsageError("--workers: must be >= 1")
    if args.max_samples is not None and args.max_samples < 2:
        raise UsageError("--max-samples: must be >= 2")
    report, code = run_suite_doc(doc, args.workers, args.max_samples)
    if args.format == "csv":
        _emit(rows_to_csv(report["entries"]), args.out)
    else:
        _emit(_dump_json({**report, "metadata": _metadata(argv)}), args.out)
    return code


# --- table -------------------------------------------------------------------


def build_table(ds, ks, ps, semi_axes, n, seed, workers=1) -> list[dict]:
    """Rows of estimated simplex moments with the factorised prediction.

    ``semi_axes`` (if given) must have at least max(ds) entries; dimension d
    uses the first d of them.
    """
    root = RandomStream(seed)
    rows = []
    idx = 0
    for d in ds:
        axes = semi_axes[:d] if semi_axes else [1.0] * d
        e = ellipsoid_from_semiaxes(axes)
        for k in ks:
            if k > d:
                continue
            for p in ps:
                s = root.split(idx)
                idx += 1
                est = estimate_simplex_moment(s.split(0), e, k, p, n, workers)
                proj = estimate_projection_moment(s.split(1), e, k, p, n, workers)
                ball = exact.ball_simplex_moment(d, k, p)
                pred = proj.scaled(ball / exact.kappa(k) ** p)
                exact_val = ball * axes[0] ** (k * p) if e.isotropic else None
                rows.append({
                    "d": d, "k": k, "p": float(p), "n": n, "seed": seed,
                    "semi_axes": [float(a) for a in axes],
                    "estimate": est.value, "stderr": est.stderr,
                    "projection_moment": proj.value, "projection_stderr": proj.stderr,
                    "predicted": pred.value, "predicted_stderr": pred.stderr,
                    "ball_moment": ball, "exact": exact_val,
                })
    return rows


def run_table(args, argv=None) -> int:
    ds = _int_range(args.d_range, "--d-range")
    ks = _int_range(args.k_range, "--k-range")
    ps = _float_list(args.p_list, "--p-list")
    if ds[0] < 1:
        raise UsageError("--d-range: dimensions must be >= 1")
    if ks[0] < 1:
        raise UsageError("--k-range: k must be >= 1")
    if ks[0] > ds[-1]:
        raise UsageError("--k-range: no k in range fits any d")
    if any(p <= -1 for p in ps):
        raise UsageError("--p-list: every p must exceed -1")
    if args.n < 2:
        raise UsageError("--n: must be >= 2")
    axes = None
    if args.semiaxes:
        axes = _float_list(args.semiaxes, "--semiaxes")
        if len(axes) < ds[-1]:
            raise UsageError(f"--semiaxes: need at least {ds[-1]} values for --d-range {args.d_range}")
        if any(a <= 0 for a in axes):
            raise UsageError("--semiaxes: all semi-axes must be positive")
    rows = build_table(ds, ks, ps, axes, args.n, args.seed, args.workers)
    if args.format == "csv":
        _emit(rows_to_csv(rows), args.out)
    else:
        _emit(_dump_json({"rows": rows, "metadata": _metadata(argv)}), args.out)
    return EXIT_PASS


def run_list(args, argv=None) -> int:
    for name in sorted(CATALOG):
        entry = CATALOG[name]
        print(f"{name:10s} {entry.kind:12s} {entry.title}")
    return EXIT_PASS


# --- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="simplexgeom", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    v = sub.add_parser("verify", help="check one identity")
    v.add_argument("--identity", required=True)
    v.add_argument("--d", type=int, required=True)
    v.add_argument("--k", type=int, required=True)
    v.add_argument("--p", type=float, default=1.0)
    v.add_argument("--semiaxes", required=True, help="comma-separated semi-axes, length d")
    rot = v.add_mutually_exclusive_group()
    rot.add_argument("--rotation-seed", type=int, help="rotate by a Haar rotation drawn from this seed")
    rot.add_argument("--rotation", default=None, help='preset: "identity" or "random(SEED)"')
    rot.add_argument("--rotation-file", help="JSON file holding a d x d orthogonal matrix")
    v.add_argument("--family", choices=["uniform", "gaussian"], default="uniform")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--workers", type=int, help="default: $SIMPLEXGEOM_WORKERS or 1")
    v.add_argument("--z-threshold", type=float, default=4.0)
    v.add_argument("--alpha", type=float, default=0.01)
    v.add_argument("--format", choices=["json", "csv"], default="json")
    v.add_argument("--out")
    v.set_defaults(func=run_verify)

    s = sub.add_parser("suite", help="run a JSON list of experiments")
    s.add_argument("config", nargs="?")
    s.add_argument("--default", action="store_true", help="run the packaged default grid")
    s.add_argument("--workers", type=int)
    s.add_argument("--max-samples", type=int, help="cap every entry's sample count")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.add_argument("--out")
    s.set_defaults(func=run_suite)

    t = sub.add_parser("table", help="tabulate simplex moments over a (d, k, p) grid")
    t.add_argument("--d-range", required=True)
    t.add_argument("--k-range", required=True)
    t.add_argument("--p-list", required=True)
    t.add_argument("--semiaxes")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--seed", type=int, required=True)
    t.add_argument("--workers", type=int, default=1)
    t.add_argument("--format", choices=["json", "csv"], default="csv")
    t.add_argument("--out")
    t.set_defaults(func=run_table)

    ls = sub.add_parser("list", help="list the identity catalog")
    ls.set_defaults(func=run_list)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing command (verify, suite, table, list)")
        if args.command == "verify" and args.workers is None:
            args.workers = default_workers()
        return args.func(args, argv)
    except UsageError as exc:
        print(f"simplexgeom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:  # e.g. a malformed SIMPLEXGEOM_WORKERS
        print(f"simplexgeom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
