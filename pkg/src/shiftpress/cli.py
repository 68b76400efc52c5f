"""Command-line front end: config loading, subcommands, JSON/CSV reports.

Exit codes: 0 success, 2 config/parse problem, 3 computation or
infeasibility. Every artifact embeds the tool version, a hash of the
resolved configuration, the seed, and the wall-clock time; rerunning with
an identical configuration reproduces the output byte for byte except for
the wall-clock field.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import __version__
from .core import Resolution, load_system
from .potentials import Potential, load_potential
from .segments import all_segments, trivial_decomposition, load_decomposition
from .thermo import (
    pressure_enumerate,
    pressure_oracle,
    pressure_floor,
    birkhoff_sup_sequence,
)
from .measures import spectrum_sample
from .construct import (
    ConstructConfig,
    check_structure_conditions,
    construct_intermediate,
    density_experiment,
    verify_counting_bound,
)
from .errors import ConfigError, ShiftPressError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTE = 3


def _config_hash(ns: argparse.Namespace) -> str:
    payload = {k: v for k, v in sorted(vars(ns).items()) if k not in ("out", "func")}
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _header(args) -> dict:
    return {
        "version": __version__,
        "config_hash": _config_hash(args),
        "seed": args.seed,
        "wallclock": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, out: str | None):
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", out)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _emit_csv(header: dict, columns, rows, out: str | None, stats: dict | None = None):
    lines = [f"# {k}: {v}" for k, v in header.items()]
    for k, v in (stats or {}).items():
        lines.append(f"# {k}: {_fmt(v)}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _emit("\n".join(lines) + "\n", out)


def _load_inputs(args, need_potential=True):
    sys_ = load_system(args.system)
    if need_potential:
        phi = load_potential(sys_, args.potential)
    else:
        phi = Potential.zero(sys_)
    return sys_, phi


def _construct_config(args) -> ConstructConfig:
    cfg = ConstructConfig(
        level_eps=args.res_eps,
        level_gamma=args.res_gamma,
        level_delta=args.res_delta,
        seed=args.seed,
        budget=args.budget_words,
    )
    if getattr(args, "n_cap", None):
        cfg.n_cap = args.n_cap
    return cfg


def _load_decomposition(args):
    if getattr(args, "decomposition", None):
        return load_decomposition(args.decomposition)
    return trivial_decomposition()


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_pressure(args) -> int:
    sys_, phi = _load_inputs(args, need_potential=args.command == "pressure")
    enum = pressure_enumerate(
        sys_, phi, all_segments(), Resolution(args.res_delta_enum), None,
        (args.n_min, args.n_max), args.budget_words,
    )
    oracle = pressure_oracle(sys_, phi)
    payload = {
        "header": _header(args),
        "enumeration": enum.to_dict(),
        "oracle": oracle.to_dict(),
        "gap": abs(enum.value - oracle.value),
    }
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_pstar(args) -> int:
    sys_, phi = _load_inputs(args)
    value = pressure_floor(sys_, phi)
    payload = {
        "header": _header(args),
        "value": value,
        "finite_means": birkhoff_sup_sequence(sys_, phi, 20),
    }
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    sys_, phi = _load_inputs(args)
    result = spectrum_sample(
        sys_, phi, cycle_cap=args.cycle_cap, grid=args.grid,
        budget=args.budget_words,
    )
    rows = [
        (e.kind, e.parameter, e.entropy, e.integral, e.pressure)
        for e in result.entries
    ]
    stats = {
        "floor": result.floor,
        "ceiling": result.ceiling,
        "max_gap": result.max_gap,
        "partial": result.partial,
    }
    _emit_csv(_header(args), ["kind", "parameter", "entropy", "integral", "pressure"], rows, args.out, stats)
    return EXIT_OK


def cmd_check(args) -> int:
    sys_, phi = _load_inputs(args)
    dec = _load_decomposition(args)
    check = check_structure_conditions(sys_, phi, dec, _construct_config(args), n_cap=args.n_cap_check)
    payload = {"header": _header(args), **check.to_dict()}
    _emit_json(payload, args.out)
    return EXIT_OK if check.all_pass else EXIT_COMPUTE


def cmd_construct(args) -> int:
    sys_, phi = _load_inputs(args)
    dec = _load_decomposition(args)
    if args.alpha is None or args.eta0 is None:
        raise ConfigError("construct requires --alpha and --eta0")
    result = construct_intermediate(sys_, phi, dec, args.alpha, args.eta0, _construct_config(args))
    payload = {"header": _header(args), **result.to_dict()}
    _emit_json(payload, args.out)
    return EXIT_OK


def cmd_density(args) -> int:
    sys_, phi = _load_inputs(args)
    dec = _load_decomposition(args)
    if args.eta0 is None:
        raise ConfigError("density requires --eta0")
    result = density_experiment(
        sys_, phi, dec, args.grid, args.eta0, _construct_config(args), margin=args.margin
    )
    rows = [
        (r.alpha, r.certified, r.pressure, r.gap, r.N, r.tau, r.e_size)
        for r in result.rows
    ]
    stats = {
        "floor": result.floor,
        "ceiling": result.ceiling,
        "tail_correction": result.tail_correction,
    }
    _emit_csv(
        _header(args),
        ["alpha", "certified", "pressure", "gap", "N", "tau", "E_size"],
        rows, args.out, stats,
    )
    return EXIT_OK


def cmd_verify_bounds(args) -> int:
    sys_, phi = _load_inputs(args)
    dec = _load_decomposition(args)
    if args.alpha is None or args.eta0 is None:
        raise ConfigError("verify-bounds requires --alpha and --eta0")
    result = construct_intermediate(sys_, phi, dec, args.alpha, args.eta0, _construct_config(args))
    ns = [int(s) for s in args.n_list.split(",") if s]
    checks = {}
    all_ok = True
    for n in ns:
        res = verify_counting_bound(
            result.subsystem, n, Resolution(args.res_delta),
            eta=result.params["eta"],
        )
        checks[str(n)] = {
            "ok": res.ok,
            "classes": res.classes_checked,
            "worst_count": res.worst_count,
            "bound": res.bound,
        }
        all_ok = all_ok and res.ok
    payload = {
        "header": _header(args),
        "certified": result.certified,
        "counting_bounds": checks,
    }
    _emit_json(payload, args.out)
    return EXIT_OK if all_ok else EXIT_COMPUTE


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftpress",
        description="Pressure computations and intermediate-pressure subsystem construction on subshifts of finite type.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, potential=True):
        p.add_argument("--system", required=True, help="system definition JSON")
        if potential:
            p.add_argument("--potential", required=True, help="potential JSON")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget-words", type=int, default=20_000_000, dest="budget_words")
        p.add_argument("--workers", type=int, default=1,
                       help="accepted for interface compatibility; results are worker-count independent")

    def construct_flags(p):
        p.add_argument("--decomposition", default=None, help="decomposition JSON (default: trivial)")
        p.add_argument("--res-eps", type=int, default=1, dest="res_eps")
        p.add_argument("--res-gamma", type=int, default=5, dest="res_gamma")
        p.add_argument("--res-delta", type=int, default=7, dest="res_delta")
        p.add_argument("--n-cap", type=int, default=None, dest="n_cap")

    p = sub.add_parser("pressure", help="finite-range estimate and eigenvalue oracle")
    common(p)
    p.add_argument("--n-min", type=int, default=2, dest="n_min")
    p.add_argument("--n-max", type=int, default=20, dest="n_max")
    p.add_argument("--res-delta", type=int, default=1, dest="res_delta_enum")
    p.set_defaults(func=cmd_pressure)

    p = sub.add_parser("entropy", help="pressure of the zero potential")
    common(p, potential=False)
    p.add_argument("--n-min", type=int, default=2, dest="n_min")
    p.add_argument("--n-max", type=int, default=20, dest="n_max")
    p.add_argument("--res-delta", type=int, default=1, dest="res_delta_enum")
    p.set_defaults(func=cmd_pressure)

    p = sub.add_parser("pstar", help="pressure floor: max mean cycle of the potential")
    common(p)
    p.set_defaults(func=cmd_pstar)

    p = sub.add_parser("spectrum", help="sample the ergodic pressure spectrum")
    common(p)
    p.add_argument("--cycle-cap", type=int, default=8, dest="cycle_cap")
    p.add_argument("--grid", type=int, default=20)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("check", help="evaluate the five structure conditions")
    common(p)
    construct_flags(p)
    p.add_argument("--n-cap-check", type=int, default=10, dest="n_cap_check")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("construct", help="build a subsystem with pressure near alpha")
    common(p)
    construct_flags(p)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--eta0", type=float, default=None)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("density", help="alpha sweep of the construction")
    common(p)
    construct_flags(p)
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--eta0", type=float, default=None)
    p.add_argument("--margin", type=float, default=None)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("verify-bounds", help="exhaustive counting-bound verification of a construction")
    common(p)
    construct_flags(p)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--eta0", type=float, default=None)
    p.add_argument("--n-list", default="3,4,5", dest="n_list")
    p.set_defaults(func=cmd_verify_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ShiftPressError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
