"""Command-line front end.

Subcommands: list, verify, trajectory, specfun, report-merge.
Configuration can come from a TOML file ([entry], [grid], [trajectory],
[output] sections); command-line flags override file values.  Reports
are deterministic for a fixed configuration and seed.

Exit codes follow one convention across subcommands: 0 success, 1
verification failure (the report is still written), 2 unknown entry,
3 invalid parameters or mode, 4 singularity/pole event with partial
outputs written.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import catalog, detsolve, dynamics, specfun
from .errors import (
    CubintError,
    PoleCollisionError,
    SchemaViolationError,
    SingularPointError,
    UnknownEntryError,
    ZeroCrossingError,
)
from .phasecore import PhaseState, poisson_bracket_residual

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_UNKNOWN_ENTRY = 2
EXIT_BAD_PARAMS = 3
EXIT_SINGULAR = 4

REPORT_SCHEMA = 1


@dataclass
class RunConfig:
    """Resolved configuration of one command invocation."""

    entries: list[str] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    trajectory: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    mode: str | None = None
    seed: int = 0

    def validate_mode(self, quantum_entry: bool):
        if self.mode is None:
            return "quantum" if quantum_entry else "classical"
        if self.mode == "quantum" and not quantum_entry:
            raise SchemaViolationError("classical entry cannot run in quantum mode")
        if self.mode == "classical" and quantum_entry:
            raise SchemaViolationError("quantum entry cannot run in classical mode")
        return self.mode


def _load_config(path: str | None) -> RunConfig:
    cfg = RunConfig()
    if not path:
        return cfg
    try:
        import tomllib
    except ModuleNotFoundError:  # python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    entry = data.get("entry", {})
    ids = entry.get("id", entry.get("ids", []))
    cfg.entries = [ids] if isinstance(ids, str) else list(ids)
    cfg.params = dict(entry.get("params", {}))
    cfg.grid = dict(data.get("grid", {}))
    cfg.trajectory = dict(data.get("trajectory", {}))
    cfg.output = dict(data.get("output", {}))
    cfg.mode = entry.get("mode")
    cfg.seed = int(data.get("seed", entry.get("seed", 0)))
    return cfg


def _parse_params(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise SchemaViolationError(f"--param expects name=value, got {item!r}")
        name, value = item.split("=", 1)
        out[name.strip()] = float(value)
    return out


def _fmt(x) -> float:
    # round-trip-exact decimal serialization
    return float(f"{float(x):.17g}")


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return _fmt(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _write_json(path: str, payload: dict):
    with open(path, "w") as fh:
        json.dump(_json_ready(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# list


def cmd_list(args) -> int:
    entries = catalog.list_entries(args.filter)
    if not entries:
        return EXIT_OK
    widths = (6, 6, 10)
    print(f"{'id':<{widths[0]}} {'label':<{widths[1]}} {'#X':<3} "
          f"{'parameters (defaults)':<40} leading terms")
    for info in entries:
        spec = catalog.get_entry(info.id)
        schema = ", ".join(f"{k}={v:g}" for k, v in info.schema.items())
        print(f"{info.id:<{widths[0]}} {(info.table1_label or '-'):<{widths[1]}} "
              f"{info.integral_count:<3} {schema:<40} "
              f"{'; '.join(spec.integral_labels)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _verify_entry(entry_id: str, cfg: RunConfig) -> dict:
    spec = catalog.get_entry(entry_id)
    mode = cfg.validate_mode(spec.quantum)
    pot, ints = catalog.instantiate(entry_id, cfg.params or None)
    gs = cfg.grid
    grid = detsolve.GridSpec(
        x_range=tuple(gs.get("x_range", spec.x_range)),
        y_range=tuple(gs.get("y_range", spec.y_range)),
        nx=int(gs.get("nx", 41)), ny=int(gs.get("ny", 41)),
        margin=float(gs.get("margin", 0.3)),
    )
    tol = float(gs.get("tolerance", catalog.residual_tolerance(entry_id)))
    residuals = {"eq6": 0.0, "eq7": 0.0, "eq8": 0.0, "eq9": 0.0, "eq10": 0.0}
    ok = True
    for X in ints:
        rep = detsolve.residual_determining(pot, X, grid, tolerance=tol)
        ok &= rep.status == "pass"
        for key, stat in rep.residuals.items():
            residuals[key] = max(residuals[key], stat.max_abs)
        rep6 = detsolve.residual_linear_compat(pot, X.coeffs, grid,
                                               tolerance=tol)
        ok &= rep6.status == "pass"
        residuals["eq6"] = max(residuals["eq6"], rep6.worst())

    report = {
        "schema": REPORT_SCHEMA,
        "entry_id": entry_id,
        "mode": mode,
        "params": {k: _fmt(v) for k, v in
                   catalog._validated_params(spec, cfg.params or None).items()},
        "grid": {"x_range": list(grid.x_range), "y_range": list(grid.y_range),
                 "nx": grid.nx, "ny": grid.ny, "margin": grid.margin},
        "residuals": residuals,
        "tolerances": {"residual": tol},
        "status": "pass" if ok else "fail",
    }
    if mode == "classical":
        rng = np.random.default_rng(cfg.seed)
        spec_box = spec.state_box or ((0.5, 1.5), (0.5, 1.5), (-1.0, 1.0))
        (xlo, xhi), (ylo, yhi), (plo, phi) = spec_box
        samples = []
        while len(samples) < 100:
            st = PhaseState(rng.uniform(xlo, xhi), rng.uniform(ylo, yhi),
                            rng.uniform(plo, phi), rng.uniform(plo, phi))
            try:
                vals = [poisson_bracket_residual(X, pot, st) for X in ints]
            except SingularPointError:
                continue
            samples.append(max(abs(v) for v in vals))
        pb_max = float(max(samples))
        pb_tol = float(gs.get("bracket_tolerance", 1e-8))
        report["pointwise_pb"] = {"samples": len(samples), "max_abs": pb_max}
        report["tolerances"]["bracket"] = pb_tol
        if pb_max > pb_tol:
            report["status"] = "fail"
    return report


def cmd_verify(args) -> int:
    cfg = _load_config(args.config)
    if args.entries:
        cfg.entries = list(args.entries)
    cfg.params.update(_parse_params(args.param))
    if args.mode:
        cfg.mode = args.mode
    if args.seed is not None:
        cfg.seed = args.seed
    if not cfg.entries:
        print("verify: no entry given", file=sys.stderr)
        return EXIT_BAD_PARAMS
    try:
        for eid in cfg.entries:
            catalog.get_entry(eid)
    except UnknownEntryError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_ENTRY
    try:
        if len(cfg.entries) == 1:
            reports = [_verify_entry(cfg.entries[0], cfg)]
        else:
            with ThreadPoolExecutor(max_workers=min(4, len(cfg.entries))) as ex:
                reports = list(ex.map(lambda e: _verify_entry(e, cfg),
                                      cfg.entries))
    except (SchemaViolationError, ValueError) as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    except (PoleCollisionError, ZeroCrossingError) as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return EXIT_SINGULAR

    out = args.output or cfg.output.get("report", "verify_report.json")
    payload = reports[0] if len(reports) == 1 else {
        "schema": REPORT_SCHEMA, "reports": reports}
    _write_json(out, payload)
    all_pass = all(r["status"] == "pass" for r in reports)
    for r in reports:
        print(f"{r['entry_id']}: {r['status']} "
              f"(worst residual {max(r['residuals'].values()):.3e})")
    print(f"report written to {out}")
    return EXIT_OK if all_pass else EXIT_VERIFY_FAIL


# ---------------------------------------------------------------------------
# trajectory


def cmd_trajectory(args) -> int:
    cfg = _load_config(args.config)
    if args.entry:
        cfg.entries = [args.entry]
    cfg.params.update(_parse_params(args.param))
    if not cfg.entries:
        print("trajectory: no entry given", file=sys.stderr)
        return EXIT_BAD_PARAMS
    eid = cfg.entries[0]
    try:
        spec = catalog.get_entry(eid)
    except UnknownEntryError as exc:
        print(f"trajectory: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_ENTRY
    if spec.quantum:
        print(f"trajectory: {eid} is a quantum entry; trajectories are "
              "classical", file=sys.stderr)
        return EXIT_BAD_PARAMS

    tr = cfg.trajectory
    state = args.state or tr.get("state0")
    if isinstance(state, str):
        state = [float(v) for v in state.split(",")]
    if not state and spec.state_box:
        # deterministic default: center of the entry's sampling box with
        # small momenta
        (xlo, xhi), (ylo, yhi), _ = spec.state_box
        state = [(xlo + xhi) / 2, (ylo + yhi) / 2, 0.15, 0.12]
    if not state or len(state) != 4:
        print("trajectory: --state x,y,px,py required", file=sys.stderr)
        return EXIT_BAD_PARAMS
    t_end = args.t if args.t is not None else float(tr.get("t_end", 10.0))
    tol = args.tol if args.tol is not None else float(tr.get("tol", 1e-12))

    try:
        pot, ints = catalog.instantiate(eid, cfg.params or None)
        traj = dynamics.integrate(pot, PhaseState(*state), t_end, tol=tol)
        report = dynamics.conservation_report(traj, pot, ints)
    except (SchemaViolationError, ValueError) as exc:
        print(f"trajectory: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    except SingularPointError as exc:
        print(f"trajectory: {exc}", file=sys.stderr)
        return EXIT_SINGULAR

    csv_path = args.output or cfg.output.get("csv", f"trajectory_{eid}.csv")
    drift_path = cfg.output.get("summary", csv_path.rsplit(".", 1)[0] + "_drift.json")
    names = [f"X{k}" for k in range(1, len(ints) + 1)]
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "y", "px", "py", "H", *names])
        H = dynamics.hamiltonian(pot, traj.states)
        xvals = np.column_stack(
            [_integral_series(traj, X) for X in ints]) if ints else np.empty((len(traj.t), 0))
        for i, t in enumerate(traj.t):
            writer.writerow([f"{v:.17g}" for v in
                             (t, *traj.states[i], H[i], *xvals[i])])
    branch_meta = dict(pot.v1.meta) if pot.v1.meta else None
    if args.seed_scan and branch_meta and "relation" in branch_meta:
        from . import implicit as imp

        x0 = branch_meta["seed"][0]
        roots = imp.root_scan(branch_meta["relation"], branch_meta["params"],
                              x0, v_window=(-10.0, 10.0), resolution=2e-3)
        branch_meta["seed_scan"] = {"x0": x0, "roots": roots}
    summary = {
        "schema": REPORT_SCHEMA,
        "entry_id": eid,
        "t_end": _fmt(traj.t[-1]),
        "tol": _fmt(tol),
        "events": list(traj.events),
        "drift": report.to_json_dict(),
        "branch": branch_meta,
    }
    _write_json(drift_path, summary)
    print(f"trajectory written to {csv_path}; drift summary {drift_path}")
    print(f"max relative drift {report.max_relative_drift():.3e}")
    if traj.events:
        print(f"halted early: {traj.events}")
        return EXIT_SINGULAR
    thresh = float(tr.get("drift_threshold",
                          1e-6 if eid in ("C.5", "C.6", "C.7", "C.8") else 1e-8))
    # a quantity whose initial value is essentially zero (e.g. an invariant
    # vanishing on the chosen orbit) is judged by its absolute deviation
    # against the trajectory's dynamic range, not the floor-normalized ratio
    scale = max(abs(q["initial"]) for q in report.quantities.values())
    ok = all(q["rel_drift"] <= thresh or q["max_dev"] <= thresh * max(scale, 1.0)
             for q in report.quantities.values())
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


def _integral_series(traj, X):
    x, y, px, py = traj.states.T
    L = x * py - y * px
    total = np.zeros(len(x))
    for i, j, k, coeff in X.coeffs.monomials():
        total += coeff * L**i * px**j * py**k
    total += np.asarray(X.corrections.g1(x, y), dtype=float) * px
    total += np.asarray(X.corrections.g2(x, y), dtype=float) * py
    return 2.0 * total


# ---------------------------------------------------------------------------
# specfun


def cmd_specfun(args) -> int:
    try:
        interval = tuple(float(v) for v in args.interval.split(","))
        if len(interval) != 2:
            raise ValueError("interval must be lo,hi")
        ic = None
        if args.ic:
            vals = [float(v) for v in args.ic.split(",")]
            if len(vals) != 3:
                raise ValueError("ic must be x0,y0,yp0")
            ic = specfun.PainleveIC(*vals)
        kind = args.kind
        if kind == "wp":
            sol = specfun.weierstrass_p(interval, args.g2, args.g3)
        elif kind == "p1":
            if ic is None:
                raise ValueError("p1 requires --ic")
            sol = specfun.painleve1(interval, ic)
        elif kind == "p2":
            if ic is None:
                raise ValueError("p2 requires --ic")
            sol = specfun.painleve2(interval, args.alpha, ic)
        elif kind == "p4":
            sol = specfun.painleve4(interval, args.alpha, args.K1, args.K2, ic)
        else:
            raise ValueError(f"unknown kind {kind!r}")
    except PoleCollisionError as exc:
        print(f"specfun: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (ValueError, CubintError) as exc:
        print(f"specfun: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS

    lo, hi = sol.interval
    lo = max(lo, interval[0])
    hi = min(hi, interval[1])
    xs = np.linspace(lo, hi, args.n)
    vals = sol.eval(xs)
    out = args.output or f"specfun_{args.kind}.csv"
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "value", "d1"])
        for i, x in enumerate(xs):
            writer.writerow([f"{x:.17g}", f"{vals[0][i]:.17g}",
                             f"{vals[1][i]:.17g}"])
        if sol.pole_markers:
            fh.write("# pole markers: "
                     + ", ".join(f"{p:.12g}" for p in sol.pole_markers) + "\n")
    truncated = (sol.interval[1] < interval[1] - 1e-12
                 or sol.interval[0] > interval[0] + 1e-12)
    print(f"samples written to {out}"
          + (f"; poles at {sol.pole_markers}" if sol.pole_markers else ""))
    return EXIT_SINGULAR if truncated else EXIT_OK


# ---------------------------------------------------------------------------
# report-merge


def cmd_report_merge(args) -> int:
    merged = {"schema": REPORT_SCHEMA, "reports": []}
    for path in args.reports:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            print(f"report-merge: {exc}", file=sys.stderr)
            return EXIT_UNKNOWN_ENTRY
        if "reports" in data:
            merged["reports"].extend(data["reports"])
        else:
            merged["reports"].append(data)
    _write_json(args.output, merged)
    print(f"merged {len(merged['reports'])} reports into {args.output}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubint",
        description="Catalog and verification tools for separable planar "
                    "Hamiltonians with cubic invariants.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list catalog entries")
    p.add_argument("--filter", default=None)
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("verify", help="run the residual verification suite")
    p.add_argument("entries", nargs="*", help="entry ids (e.g. Q.14)")
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--mode", choices=["classical", "quantum"])
    p.add_argument("--config", default=None, help="TOML configuration file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", default=None, help="JSON report path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trajectory", help="integrate a classical trajectory")
    p.add_argument("entry", nargs="?", default=None)
    p.add_argument("--state", default=None, metavar="x,y,px,py",
                   help="initial phase point (defaults to the entry's "
                        "sampling-box center)")
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--seed-scan", action="store_true",
                   help="include the dense root scan used to seed "
                        "branch-built potentials in the summary")
    p.add_argument("--config", default=None)
    p.add_argument("--output", default=None, help="trajectory CSV path")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("specfun", help="evaluate a defining special function")
    p.add_argument("kind", choices=["wp", "p1", "p2", "p4"])
    p.add_argument("--interval", required=True, metavar="LO,HI")
    p.add_argument("--ic", default=None, metavar="x0,y0,yp0")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--K1", type=float, default=0.0)
    p.add_argument("--K2", type=float, default=0.0)
    p.add_argument("--g2", type=float, default=0.0)
    p.add_argument("--g3", type=float, default=0.0)
    p.add_argument("--n", type=int, default=101)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_specfun)

    p = sub.add_parser("report-merge", help="merge JSON reports")
    p.add_argument("reports", nargs="+")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_report_merge)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CubintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS


if __name__ == "__main__":
    sys.exit(main())
