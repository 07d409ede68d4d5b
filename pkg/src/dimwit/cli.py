"""Command-line surface.

Subcommands: eval, local-bound, seesaw, curve, witness, catalog, grothendieck.
Machine-readable output is JSON with a top-level ``schema: 1`` and an embedded
run manifest (CSV outputs get a ``<file>.manifest.json`` sidecar); identical
command lines with the same seed produce byte-identical output apart from the
manifest's ``duration_s``.

Exit codes: 0 success (witness: Witnessed), 1 witness NotWitnessed, 2 parse or
input error, 3 scenario/signaling mismatch, 4 enumeration space too large,
5 invalid dimensions or configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, bellfmt, catalog, grothendieck, localbound
from .errors import (
    ConfigError,
    DimwitError,
    InvalidModelError,
    InvalidTableError,
    MatrixTooLargeError,
    ParseError,
    ScenarioMismatchError,
    SignalingError,
    StrategySpaceTooLargeError,
    ZeroMatrixError,
)
from .scenario import AVERAGE, PARTNER_SETTING_ZERO, evaluate
from .seesaw import SeesawConfig, seesaw

DEFAULT_SEED = 0


class _Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fail_code(exc: Exception) -> int:
    if isinstance(exc, (ParseError, InvalidTableError, ZeroMatrixError, FileNotFoundError, OSError)):
        return 2
    if isinstance(exc, (ScenarioMismatchError, SignalingError)):
        return 3
    if isinstance(exc, (StrategySpaceTooLargeError, MatrixTooLargeError)):
        return 4
    if isinstance(exc, (ConfigError, InvalidModelError)):
        return 5
    return 2


@dataclass
class _Manifest:
    argv: list[str]
    seed: int | None
    config: dict
    started: float

    def to_dict(self) -> dict:
        return {
            "command": self.argv,
            "seed": self.seed,
            "config": self.config,
            "version": __version__,
            "duration_s": round(time.monotonic() - self.started, 6),
        }


def _emit_json(payload: dict, manifest: _Manifest) -> None:
    payload = dict(payload)
    payload["schema"] = 1
    payload["manifest"] = manifest.to_dict()
    print(json.dumps(payload, sort_keys=True, indent=2))


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("DIMWIT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise _Failure(5, f"DIMWIT_SEED must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _default_restarts(d_a: int, d_b: int) -> int:
    # Qutrit-and-up landscapes carry more local optima, so restarts scale with
    # the larger local dimension: 50*max(d_a, d_b) when that exceeds 2, else 50.
    top = max(d_a, d_b)
    return 50 * top if top >= 3 else 50


def _load_functional(arg: str):
    """A functional argument is a file path if one exists, else a catalog name."""
    path = Path(arg)
    if path.exists():
        return bellfmt.parse_functional(path.read_text(encoding="utf-8")), str(path)
    try:
        return catalog.by_name(arg), arg
    except ConfigError:
        raise _Failure(
            2, f"{arg!r} is neither an existing file nor a catalog name"
        ) from None


def _jobs_default() -> int:
    return os.cpu_count() or 1


def _format_value(v: float) -> str:
    # Fixed 12 decimals gives >= 12 significant digits for the O(1) values
    # this tool reports; JSON output carries full precision.
    return f"{v:.12f}"


def cmd_eval(args) -> int:
    manifest = _Manifest(sys.argv[1:], None, {"policy": args.policy}, time.monotonic())
    functional, _ = _load_functional(args.functional)
    table = bellfmt.parse_table_csv(
        Path(args.table).read_text(encoding="utf-8"), renormalize=args.renormalize
    )
    policy = AVERAGE if args.policy == "average" else PARTNER_SETTING_ZERO
    value = evaluate(functional, table, policy)
    if args.json:
        payload = {"value": value, "renormalized": table.was_renormalized}
        _emit_json(payload, manifest)
    else:
        print(_format_value(value))
    return 0


def cmd_local_bound(args) -> int:
    manifest = _Manifest(sys.argv[1:], None, {"cap": args.cap, "min": args.min}, time.monotonic())
    functional, name = _load_functional(args.functional)
    if args.min:
        value, strategy = localbound.local_bound_min_strategy(functional, args.cap)
    else:
        value, strategy = localbound.local_bound(functional, args.cap)
    if args.json:
        _emit_json(
            {
                "functional": name,
                "kind": "min" if args.min else "max",
                "value": value,
                "strategy": {
                    "assignment_a": list(strategy.assignment_a),
                    "assignment_b": list(strategy.assignment_b),
                },
            },
            manifest,
        )
    else:
        print(_format_value(value))
        print(f"strategy A={list(strategy.assignment_a)} B={list(strategy.assignment_b)}")
    return 0


def _seesaw_config(args, d_a: int, d_b: int) -> tuple[SeesawConfig, int, dict]:
    seed = _resolve_seed(args)
    restarts = args.restarts if args.restarts is not None else _default_restarts(d_a, d_b)
    fixed_state = None
    if getattr(args, "fixed_theta", None) is not None and getattr(args, "fixed_gamma", None) is not None:
        raise _Failure(5, "--fixed-theta and --fixed-gamma are mutually exclusive")
    if getattr(args, "fixed_theta", None) is not None:
        if (d_a, d_b) != (2, 2):
            raise _Failure(5, "--fixed-theta requires --da 2 --db 2")
        fixed_state = catalog.theta_state(args.fixed_theta)
    if getattr(args, "fixed_gamma", None) is not None:
        if (d_a, d_b) != (3, 3):
            raise _Failure(5, "--fixed-gamma requires --da 3 --db 3")
        fixed_state = catalog.gamma_state(args.fixed_gamma)
    cfg = SeesawConfig(
        restarts=restarts,
        max_iterations=args.max_iterations,
        convergence_tol=args.tol,
        seed=seed,
        fixed_state=fixed_state,
    )
    echo = {
        "restarts": restarts,
        "max_iterations": args.max_iterations,
        "convergence_tol": args.tol,
        "d_a": d_a,
        "d_b": d_b,
        "jobs": args.jobs,
        "fixed_theta": getattr(args, "fixed_theta", None),
        "fixed_gamma": getattr(args, "fixed_gamma", None),
    }
    return cfg, seed, echo


def cmd_seesaw(args) -> int:
    if args.da < 2 or args.db < 2:
        raise _Failure(5, f"local dimensions must be >= 2, got ({args.da},{args.db})")
    cfg, seed, echo = _seesaw_config(args, args.da, args.db)
    manifest = _Manifest(sys.argv[1:], seed, echo, time.monotonic())
    functional, name = _load_functional(args.functional)
    result = seesaw(functional, args.da, args.db, cfg, jobs=args.jobs)
    values = np.array(result.per_restart_values)
    converged = sum(result.converged_flags)
    if args.json:
        _emit_json(
            {
                "functional": name,
                "best_value": result.best_value,
                "value_label": catalog.HEURISTIC_LABEL,
                "per_restart_values": [float(v) for v in values],
                "iterations_used": list(result.iterations_used),
                "converged_flags": list(result.converged_flags),
            },
            manifest,
        )
    else:
        print(f"best value ({catalog.HEURISTIC_LABEL}): {_format_value(result.best_value)}")
        print(
            f"restarts {len(values)}  converged {converged}  "
            f"median {_format_value(float(np.median(values)))}  "
            f"min {_format_value(float(values.min()))}"
        )
        print(
            f"iterations: mean {float(np.mean(result.iterations_used)):.1f}  "
            f"max {max(result.iterations_used)}"
        )
    return 0


def cmd_curve(args) -> int:
    if args.family != "iphi":
        raise _Failure(5, f"unknown curve family {args.family!r}")
    dims = []
    for token in args.dims.split(","):
        token = token.strip()
        if token:
            d = int(token)
            if d < 2:
                raise _Failure(5, f"curve dimensions must be >= 2, got {d}")
            dims.append(d)
    if not dims:
        raise _Failure(5, "no dimensions given")
    seed = _resolve_seed(args)
    restarts = args.restarts if args.restarts is not None else _default_restarts(max(dims), max(dims))
    cfg = SeesawConfig(
        restarts=restarts,
        max_iterations=args.max_iterations,
        convergence_tol=args.tol,
        seed=seed,
    )
    echo = {
        "family": args.family,
        "steps": args.steps,
        "dims": dims,
        "restarts": restarts,
        "phi_min": args.phi_min,
        "phi_max": args.phi_max,
        "jobs": args.jobs,
    }
    manifest = _Manifest(sys.argv[1:], seed, echo, time.monotonic())
    phis = np.linspace(args.phi_min, args.phi_max, args.steps)
    rows = catalog.iphi_sweep(phis, dims, cfg, jobs=args.jobs)
    header = ["phi", "local_bound"] + [f"value_d{d}" for d in dims]
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{row[col]:.12g}" for col in header))
    text = "\n".join(lines) + "\n"
    out = Path(args.out)
    out.write_text(text, encoding="utf-8")
    out.with_suffix(out.suffix + ".manifest.json").write_text(
        json.dumps(manifest.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def cmd_witness(args) -> int:
    if args.d < 2:
        raise _Failure(5, f"witness dimension must be >= 2, got {args.d}")
    cfg, seed, echo = _seesaw_config(args, args.d, args.d)
    echo["threshold"] = args.threshold
    manifest = _Manifest(sys.argv[1:], seed, echo, time.monotonic())
    functional, name = _load_functional(args.functional)
    report = catalog.witness_report(
        functional, args.d, cfg, gap_threshold=args.threshold, functional_id=name, jobs=args.jobs
    )
    payload = {
        "functional": report.functional_id,
        "dimension": report.dimension,
        "local_bound": report.local_bound,
        "value_d": report.value_d,
        "value_d_plus": report.value_d_plus,
        "gap": report.gap,
        "threshold": report.threshold,
        "verdict": report.verdict,
        "value_label": report.value_label,
    }
    _emit_json(payload, manifest)
    return 0 if report.witnessed() else 1


def cmd_catalog(args) -> int:
    if args.action != "emit":
        raise _Failure(5, f"unknown catalog action {args.action!r}")
    functional = catalog.by_name(args.name)
    text = bellfmt.serialize_functional(functional)
    if args.out is not None:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_grothendieck(args) -> int:
    seed = _resolve_seed(args)
    echo = {"n": args.n, "restarts": args.restarts, "max_iterations": args.max_iterations}
    manifest = _Manifest(sys.argv[1:], seed, echo, time.monotonic())
    raw = bellfmt.parse_correlation_matrix(Path(args.matrix).read_text(encoding="utf-8"))
    norm = grothendieck.local_norm(raw.matrix)
    normalized = grothendieck.normalize(raw.matrix)
    cfg = SeesawConfig(
        restarts=args.restarts,
        max_iterations=args.max_iterations,
        convergence_tol=args.tol,
        seed=seed,
    )
    value, strategy = grothendieck.vector_seesaw(normalized, args.n, cfg)
    if args.json:
        _emit_json(
            {
                "matrix": args.matrix,
                "m": normalized.m,
                "local_norm": norm,
                "n": args.n,
                "value": value,
                "value_label": catalog.HEURISTIC_LABEL,
                "x_vectors": [[float(v) for v in row] for row in strategy.x_vectors],
                "y_vectors": [[float(v) for v in row] for row in strategy.y_vectors],
            },
            manifest,
        )
    else:
        print(f"local_norm: {_format_value(norm)}")
        print(f"value at N={args.n} ({catalog.HEURISTIC_LABEL}): {_format_value(value)}")
        for label, vectors in (("x", strategy.x_vectors), ("y", strategy.y_vectors)):
            for i, row in enumerate(vectors):
                print(f"{label}[{i}] = [" + ", ".join(f"{v:+.9f}" for v in row) + "]")
    return 0


def _add_seesaw_knobs(p: argparse.ArgumentParser, fixed_state: bool = False) -> None:
    p.add_argument("--restarts", type=int, default=None, help="random restarts (default scales with dimension)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (fallback: DIMWIT_SEED, then 0)")
    p.add_argument("--max-iterations", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-10, help="per-iteration improvement threshold")
    p.add_argument("--jobs", type=int, default=_jobs_default(), help="parallel restart workers")
    if fixed_state:
        p.add_argument("--fixed-theta", type=float, default=None, help="pin state cos(t)|00>+sin(t)|11> (2x2 only)")
        p.add_argument("--fixed-gamma", type=float, default=None, help="pin state (|00>+g|11>+|22>)/sqrt(2+g^2) (3x3 only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dimwit", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"dimwit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a functional on a probability-table CSV")
    p.add_argument("functional", help=".bell file or catalog name")
    p.add_argument("table", help="CSV with header x,y,a,b,p")
    p.add_argument("--policy", choices=["setting-zero", "average"], default="setting-zero")
    p.add_argument("--renormalize", action="store_true", help="repair <1e-7 normalization misses")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("local-bound", help="exact classical bound by enumeration")
    p.add_argument("functional")
    p.add_argument("--min", action="store_true", help="minimum instead of maximum")
    p.add_argument("--cap", type=int, default=localbound.DEFAULT_STRATEGY_CAP)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_local_bound)

    p = sub.add_parser("seesaw", help="fixed-dimension lower bound by alternating optimization")
    p.add_argument("functional")
    p.add_argument("--da", type=int, required=True)
    p.add_argument("--db", type=int, required=True)
    _add_seesaw_knobs(p, fixed_state=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_seesaw)

    p = sub.add_parser("curve", help="sweep the iphi family and write a CSV")
    p.add_argument("--family", default="iphi")
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--dims", default="2,3")
    p.add_argument("--phi-min", type=float, default=0.0)
    p.add_argument("--phi-max", type=float, default=math.pi)
    p.add_argument("--out", required=True)
    _add_seesaw_knobs(p)
    p.set_defaults(fn=cmd_curve)

    p = sub.add_parser("witness", help="dimension-witness gap report (JSON)")
    p.add_argument("functional")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--threshold", type=float, default=1e-3)
    _add_seesaw_knobs(p)
    p.set_defaults(fn=cmd_witness)

    p = sub.add_parser("catalog", help="emit a bundled functional as .bell text")
    p.add_argument("action", choices=["emit"])
    p.add_argument("name", help="cglmp-c | cglmp-d | iphi:<phi> | E | chsh")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_catalog)

    p = sub.add_parser("grothendieck", help="normalize a correlation matrix and search unit vectors")
    p.add_argument("-m", "--matrix", required=True, help="CSV of m rows of m reals")
    p.add_argument("--n", type=int, required=True, help="vector dimension N")
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-iterations", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_grothendieck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _Failure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DimwitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _fail_code(exc)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
