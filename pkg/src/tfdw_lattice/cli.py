"""Command-line front end.

Subcommands orchestrate the verification suites and the numerical
experiments, writing CSV tables (the source of truth), static plots
derived from them, serialized fields/drops, and a JSON manifest with the
resolved configuration next to every run.

Exit codes: 0 all checks passed, 1 check violation, 2 usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .drops import (
    AnnealSchedule,
    GreedySchedule,
    SCALING_HEADER,
    SUBADD_HEADER,
    exact_enumeration_oracle,
    minimize_drop,
    save_drop,
    scaling_study,
    write_scaling_csv,
)
from .grids import save_field
from .inequalities import (
    SUITE_HEADER,
    SuiteSummary,
    hls_suite,
    lp_suite,
    summary_row,
    truncation_suite,
)
from .lattice import DistanceKind, ball, ball_volume_formula, sphere
from .minimize import (
    MinimizeConfig,
    NumericalFailure,
    SUBADDITIVITY_HEADER,
    _InfimumCache,
    minimize,
    splitting_advantage,
    subadditivity_scan,
    write_trajectory_csv,
)
from .spreading import monotone_decay_holds, psi_energy_report, write_report_csv

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        _apply_config_file(args, argv)
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        handler = _HANDLERS[args.command]
        code = handler(args, out_dir)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return code


class UsageError(ValueError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tfdw-lattice",
        description="lattice TFDW / liquid-drop experiments and checks")
    sub = parser.add_subparsers(dest="command")

    def common(p, default_out):
        p.add_argument("--out-dir", default=default_out)
        p.add_argument("--kind", choices=["euclidean", "graph"], default="euclidean")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", default=None,
                       help="JSON file with defaults; explicit flags override it")

    p = sub.add_parser("verify-lemmas", help="ball combinatorics and inequality suites")
    common(p, "runs/verify-lemmas")
    p.add_argument("--radius-max", type=int, default=30)
    p.add_argument("--lp-instances", type=int, default=10000)
    p.add_argument("--hls-instances", type=int, default=10000)
    p.add_argument("--trunc-instances", type=int, default=1000)
    p.add_argument("--inject-fault", choices=["ball-volume-formula"], default=None,
                   help=argparse.SUPPRESS)

    p = sub.add_parser("psi-decay", help="energy decay of the spreading cone family")
    common(p, "runs/psi-decay")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--mass", type=float, required=True)

    p = sub.add_parser("tfdw", help="one constrained minimization run")
    common(p, "runs/tfdw")
    p.add_argument("--mass", type=float, required=True)
    p.add_argument("--box", type=int, required=True, help="box half-width L")
    p.add_argument("--init", choices=["ball_cone", "gaussian_like", "random", "file"],
                   default="ball_cone")
    p.add_argument("--init-path", default=None)
    p.add_argument("--max-iters", type=int, default=20000)
    p.add_argument("--step0", type=float, default=0.1)
    p.add_argument("--tol-residual", type=float, default=1e-6)

    p = sub.add_parser("tfdw-scan", help="subadditivity and splitting scans over masses")
    common(p, "runs/tfdw-scan")
    p.add_argument("--masses", required=True,
                   help="comma list, or lo:hi:count for a log grid")
    p.add_argument("--splits", default=None,
                   help="comma list of m1 values for the subadditivity scan")
    p.add_argument("--box", type=int, default=12)
    p.add_argument("--separation", type=int, default=12)
    p.add_argument("--max-iters", type=int, default=4000)
    p.add_argument("--tol-residual", type=float, default=1e-5)

    p = sub.add_parser("drop", help="one volume-constrained drop search")
    common(p, "runs/drop")
    p.add_argument("--volume", type=int, required=True)
    p.add_argument("--schedule", choices=["anneal", "greedy"], default="anneal")
    p.add_argument("--sweeps", type=int, default=200)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--cooling", type=float, default=0.999)
    p.add_argument("--restarts", type=int, default=3)

    p = sub.add_parser("drop-scaling", help="drop search across a volume list")
    common(p, "runs/drop-scaling")
    p.add_argument("--volumes", required=True, help="comma list of volumes")
    p.add_argument("--sweeps", type=int, default=200)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--cooling", type=float, default=0.999)

    return parser


def _apply_config_file(args, argv) -> None:
    if getattr(args, "config", None) is None:
        return
    with open(args.config) as fh:
        overrides = json.load(fh)
    if "params" in overrides and "command" in overrides:
        overrides = overrides["params"]  # a manifest reproduces its run
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise UsageError(f"unknown config key {key!r}")
        # explicit command-line flags win over the file
        flag = "--" + key.replace("_", "-")
        if flag not in argv and f"--{key}" not in argv:
            setattr(args, attr, value)


def _write_manifest(out_dir: Path, command: str, params: dict) -> None:
    manifest = {"command": command, "version": __version__,
                "params": {k: _jsonable(v) for k, v in params.items()}}
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonable(v):
    if isinstance(v, DistanceKind):
        return v.value
    if isinstance(v, Path):
        return str(v)
    return v


def _params(args, keys) -> dict:
    return {k: getattr(args, k) for k in keys}


# ---------------------------------------------------------------------------
# verify-lemmas
# ---------------------------------------------------------------------------

def cmd_verify_lemmas(args, out_dir: Path) -> int:
    kind = DistanceKind(args.kind)
    violations_detail = []

    ball_violations = 0
    for radius in range(1, args.radius_max + 1):
        enum_sphere = len(sphere((0, 0, 0), radius))
        enum_ball = len(ball((0, 0, 0), radius))
        expected_ball = ball_volume_formula(radius)
        if args.inject_fault == "ball-volume-formula":
            expected_ball += 1
        if enum_sphere != 4 * radius**2 + 2:
            ball_violations += 1
            violations_detail.append(
                f"ball-volume-formula: sphere R={radius}: enumerated {enum_sphere} != {4 * radius ** 2 + 2}")
        if enum_ball != expected_ball:
            ball_violations += 1
            violations_detail.append(
                f"ball-volume-formula: ball R={radius}: enumerated {enum_ball} != {expected_ball}")

    summaries = [
        SuiteSummary("ball-volume-formula", args.radius_max, ball_violations, 0.0, 0),
        lp_suite(args.lp_instances, args.seed),
        hls_suite(args.hls_instances, args.seed, kind=kind),
        truncation_suite(args.trunc_instances, args.seed, kind=kind),
    ]
    with open(out_dir / "lemmas.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUITE_HEADER)
        writer.writeheader()
        for s in summaries:
            writer.writerow(summary_row(s))
    _write_manifest(out_dir, "verify-lemmas", _params(
        args, ["kind", "seed", "radius_max", "lp_instances", "hls_instances",
               "trunc_instances"]))
    total_violations = sum(s.violations for s in summaries)
    for line in violations_detail:
        print(line, file=sys.stderr)
    for s in summaries:
        print(f"{s.check}: {s.instances} instances, {s.violations} violations, "
              f"max ratio {s.max_ratio:.6g}")
    return EXIT_OK if total_violations == 0 else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# psi-decay
# ---------------------------------------------------------------------------

def cmd_psi_decay(args, out_dir: Path) -> int:
    if args.n_max < 2:
        raise UsageError("--n-max must be >= 2")
    if not args.mass > 0:
        raise UsageError("--mass must be positive")
    kind = DistanceKind(args.kind)
    rows = psi_energy_report(args.n_max, args.mass, kind)
    write_report_csv(out_dir / "psi_decay.csv", rows)
    _plot_psi_decay(rows, out_dir / "psi_decay.png")
    _write_manifest(out_dir, "psi-decay", _params(args, ["n_max", "mass", "kind", "seed"]))
    if args.n_max <= 2:
        return EXIT_OK  # too short to assert a trend
    ok = monotone_decay_holds(rows, start_n=3)
    print(f"psi decay: n up to {args.n_max}, monotone decay {'holds' if ok else 'violated'}; "
          f"total at n={args.n_max}: {rows[-1]['total']:.6g}")
    return EXIT_OK if ok else EXIT_VIOLATION


def _plot_psi_decay(rows, path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    n = [r["n"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for col in ("kinetic", "tf", "dirac", "coulomb"):
        ax.loglog(n, [r[col] for r in rows], label=col)
    ax.set_xlabel("spreading index n")
    ax.set_ylabel("energy term")
    ax.legend()
    ax.set_title("cone family: every energy term decays")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


# ---------------------------------------------------------------------------
# tfdw single run / scan
# ---------------------------------------------------------------------------

def cmd_tfdw(args, out_dir: Path) -> int:
    if not args.mass > 0:
        raise UsageError("--mass must be positive")
    if args.box < 2:
        raise UsageError("--box must be >= 2")
    cfg = MinimizeConfig(
        half_width=args.box, mass=args.mass, kind=DistanceKind(args.kind),
        init=args.init, seed=args.seed, init_path=args.init_path,
        max_iters=args.max_iters, step0=args.step0, tol_residual=args.tol_residual)
    report = minimize(cfg)
    write_trajectory_csv(out_dir / "trajectory.csv", report)
    save_field(out_dir / "final_field.txt", report.field, cfg.kind)
    with open(out_dir / "diagnostics.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["key", "value"])
        writer.writerow(["termination", report.termination.value])
        writer.writerow(["iterations", report.iterations])
        writer.writerow(["total", repr(report.breakdown.total)])
        writer.writerow(["residual", repr(report.residual)])
        writer.writerow(["boundary_mass_fraction", repr(report.boundary_mass_fraction)])
        writer.writerow(["r0", "" if report.r0 is None else report.r0])
        writer.writerow(["doubling_holds", "" if report.doubling_holds is None
                         else str(report.doubling_holds).lower()])
        for r, s in report.s_profile:
            writer.writerow([f"S({r})", repr(s)])
    _write_manifest(out_dir, "tfdw", _params(
        args, ["mass", "box", "init", "seed", "kind", "max_iters", "step0",
               "tol_residual"]))
    print(f"tfdw m={args.mass} L={args.box}: {report.termination.value} "
          f"after {report.iterations} iterations, total {report.breakdown.total:.8g}, "
          f"residual {report.residual:.3g}")
    return EXIT_OK


def _parse_masses(text: str) -> list[float]:
    if ":" in text:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
        if not (lo > 0 and hi > lo and count >= 2):
            raise UsageError(f"bad mass grid {text!r}")
        return list(np.geomspace(lo, hi, count))
    masses = [float(t) for t in text.split(",") if t]
    if not masses or any(m <= 0 for m in masses):
        raise UsageError(f"bad mass list {text!r}")
    return masses


def cmd_tfdw_scan(args, out_dir: Path) -> int:
    masses = _parse_masses(args.masses)
    kind = DistanceKind(args.kind)
    template = MinimizeConfig(
        half_width=args.box, mass=1.0, kind=kind, max_iters=args.max_iters,
        tol_residual=args.tol_residual)
    cache = _InfimumCache(template)

    base_mass = masses[0] if len(masses) == 1 else None
    sub_rows = []
    if args.splits:
        base_mass = base_mass or masses[-1]
        splits = [float(t) for t in args.splits.split(",") if t]
        if any(not 0 < s < base_mass for s in splits):
            raise UsageError("--splits values must lie strictly between 0 and the mass")
        sub_rows = subadditivity_scan(base_mass, splits, template, cache=cache)
        with open(out_dir / "subadditivity.csv", "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=SUBADDITIVITY_HEADER)
            writer.writeheader()
            for row in sub_rows:
                writer.writerow({k: repr(float(row[k])) for k in SUBADDITIVITY_HEADER})

    split_rows = []
    for m in masses:
        rec = splitting_advantage(m, args.separation, template, cache=cache)
        split_rows.append(rec)
    with open(out_dir / "splitting.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mass", "separation", "E_single", "E_split_best",
                         "best_m1", "advantage_indicator"])
        for rec in split_rows:
            writer.writerow([repr(rec.mass), rec.separation, repr(rec.e_single),
                             repr(rec.e_split_best), repr(rec.best_m1),
                             repr(rec.advantage_indicator)])
    _plot_advantage(split_rows, out_dir / "splitting_advantage.png")

    signs = [rec.advantage_indicator > 0 for rec in split_rows]
    changes = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
    crossover = None
    for a, b in zip(split_rows, split_rows[1:]):
        if (a.advantage_indicator > 0) != (b.advantage_indicator > 0):
            crossover = math.sqrt(a.mass * b.mass)
            break
    _write_manifest(out_dir, "tfdw-scan", _params(
        args, ["masses", "splits", "box", "separation", "kind", "seed",
               "max_iters", "tol_residual"]))
    if crossover is not None:
        print(f"splitting advantage changes sign {changes} time(s); "
              f"crossover near m ~ {crossover:.3g}")
    else:
        print(f"splitting advantage changes sign {changes} time(s)")
    for row in sub_rows:
        print(f"subadditivity m1={row['m1']:g}: gap {row['gap_indicator']:.6g}")
    return EXIT_OK


def _plot_advantage(records, path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.axhline(0.0, color="gray", lw=0.8)
    ax.semilogx([r.mass for r in records], [r.advantage_indicator for r in records],
                marker="o")
    ax.set_xlabel("mass m")
    ax.set_ylabel("splitting advantage (single - best split)")
    ax.set_title("two-cluster splitting vs the single minimizer")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


# ---------------------------------------------------------------------------
# drops
# ---------------------------------------------------------------------------

def _schedule_from_args(args):
    if args.schedule == "greedy":
        return GreedySchedule(restarts=args.restarts, seed=args.seed)
    return AnnealSchedule(t0=args.t0, cooling=args.cooling, sweeps=args.sweeps,
                          seed=args.seed)


def cmd_drop(args, out_dir: Path) -> int:
    if args.volume < 1:
        raise UsageError("--volume must be >= 1")
    kind = DistanceKind(args.kind)
    report = minimize_drop(args.volume, kind, _schedule_from_args(args))
    save_drop(out_dir / "best_drop.txt", report.best.cells, kind)
    with open(out_dir / "energy.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["V", "perimeter", "coulomb", "total"])
        writer.writerow([args.volume, report.energy.perimeter,
                         repr(report.energy.coulomb), repr(report.energy.total)])
    _write_manifest(out_dir, "drop", _params(
        args, ["volume", "schedule", "sweeps", "t0", "cooling", "restarts",
               "seed", "kind"]))
    line = (f"drop V={args.volume}: total {report.energy.total:.9g} "
            f"(perimeter {report.energy.perimeter}, coulomb {report.energy.coulomb:.9g})")
    if args.volume <= 6:
        oracle = exact_enumeration_oracle(args.volume, kind)
        gap = report.energy.total - oracle.best_energy.total
        line += f"; exact connected optimum {oracle.best_energy.total:.9g} (gap {gap:.2e})"
        if gap > 1e-9:
            print(line)
            return EXIT_VIOLATION
    print(line)
    return EXIT_OK


def cmd_drop_scaling(args, out_dir: Path) -> int:
    volumes = [int(t) for t in args.volumes.split(",") if t]
    if not volumes or any(v < 1 for v in volumes):
        raise UsageError(f"bad volume list {args.volumes!r}")
    kind = DistanceKind(args.kind)
    schedule = AnnealSchedule(t0=args.t0, cooling=args.cooling, sweeps=args.sweeps,
                              seed=args.seed)
    study = scaling_study(volumes, kind, schedule)
    write_scaling_csv(out_dir / "drop_scaling.csv", study["rows"])
    with open(out_dir / "subadditivity.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUBADD_HEADER)
        writer.writeheader()
        for row in study["subadditivity"]:
            writer.writerow({k: (row[k] if isinstance(row[k], int) else repr(float(row[k])))
                             for k in SUBADD_HEADER})
    _plot_scaling(study["rows"], out_dir / "drop_scaling.png")
    _write_manifest(out_dir, "drop-scaling", _params(
        args, ["volumes", "sweeps", "t0", "cooling", "seed", "kind"]))
    ok = all(r["connected"] and r["chain_bound_holds"] for r in study["rows"])
    for r in study["rows"]:
        print(f"V={r['V']:5d} total/V={r['total_over_V']:.4f} "
              f"coulomb/(VlogV)={r['coulomb_over_VlogV']:.4f} "
              f"connected={r['connected']} chain_bound={r['chain_bound_holds']}")
    return EXIT_OK if ok else EXIT_VIOLATION


def _plot_scaling(rows, path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4.5))
    v = [r["V"] for r in rows]
    ax.semilogx(v, [r["total_over_V"] for r in rows], marker="o", label="total / V")
    ax.semilogx(v, [r["coulomb_over_VlogV"] for r in rows], marker="s",
                label="coulomb / (V log V)")
    ax.set_xlabel("volume V")
    ax.set_ylabel("scaled energy")
    ax.set_title("drop energies: linear-in-V ceiling vs V log V Coulomb floor")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


_HANDLERS = {
    "verify-lemmas": cmd_verify_lemmas,
    "psi-decay": cmd_psi_decay,
    "tfdw": cmd_tfdw,
    "tfdw-scan": cmd_tfdw_scan,
    "drop": cmd_drop,
    "drop-scaling": cmd_drop_scaling,
}


if __name__ == "__main__":
    sys.exit(main())
