"""Command-line driver: every verification as a subcommand with JSON/CSV output.

Exit codes: 0 pass/success, 1 usage or parameter error, 2 verification failure.
Identical configurations (including seeds) produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import errors
from .competitors import compose, make_twist, probe_minimality
from .energy import min_energy_report, stationarity_residual
from .fourier import (
    buckling_check,
    decompose,
    dump_modes_csv,
    identity_v_check,
    identity_vi_check,
    parseval_gradient,
    zero_mode_det,
)
from .geometry import make_grid
from .integrand import QuadraticIntegrand
from .maps import bump_test_fields, field_from_map, iter_bump_fields, ncover
from .pressure import (
    ClosedFormPressure,
    admissible_a_range,
    certify,
    closed_form_st_ncover,
    pressure_gradient_ncover,
    reconstruct_lambda,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        raise SystemExit(self._print_and_code(message))

    def _print_and_code(self, message):
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        return 1


def _parse_grid(text: str):
    try:
        nr, nt = text.lower().split("x")
        return int(nr), int(nt)
    except ValueError as exc:
        raise errors.ParameterError(f"grid must look like 128x256, got {text!r}") from exc


def _write_json(out_dir: Path, name: str, payload: dict) -> Path:
    path = out_dir / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(out_dir: Path, name: str, header, rows) -> Path:
    path = out_dir / name
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _common_flags(p: argparse.ArgumentParser, grid_default: str = "128x256", required: bool = True):
    p.add_argument("--N", type=int, required=required, default=None if required else 2,
                   help="winding number (>= 2)")
    p.add_argument("--a", type=float, required=required, default=None if required else 3.0,
                   help="radial stiffness coefficient")
    p.add_argument("--nu", type=float, default=1.0, help="coercivity constant")
    p.add_argument("--grid", default=grid_default, help="radial x angular node counts, e.g. 128x256")
    p.add_argument("--seed", type=int, default=7, help="battery/probe seed")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="stdout summary format")
    p.add_argument("--threads", type=int, default=1, help="worker cap for batched operations")


def _emit(args, payload: dict) -> None:
    if args.format == "csv":
        writer = csv.writer(sys.stdout)
        writer.writerow(["key", "value"])
        for key in sorted(payload):
            writer.writerow([key, json.dumps(payload[key], sort_keys=True)])
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))


def _build_parser() -> _Parser:
    parser = _Parser(prog="diskmin", description=__doc__)
    parser.add_argument("--config", default=None, help="flat key=value file; explicit flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="pressure smallness certificate")
    _common_flags(p)
    p.add_argument("--mode", choices=("auto", "general", "single_variable"), default="auto")

    p = sub.add_parser("energy", help="quadrature energy against both closed forms")
    _common_flags(p)

    p = sub.add_parser("pressure", help="pressure-gradient samples and closed form")
    _common_flags(p)
    p.add_argument("--coeffs", default=None, help="theta,alpha,beta,gamma,delta CSV table")

    p = sub.add_parser("stationarity", help="weak-form residual over a test battery")
    _common_flags(p, grid_default="256x512")
    p.add_argument("--tests", type=int, default=50, help="battery size")
    p.add_argument("--tol", type=float, default=1e-6, help="pass threshold for the max residual")

    p = sub.add_parser("probe", help="minimality probes with twist competitors")
    _common_flags(p)
    p.add_argument("--samples", type=int, default=200, help="number of competitors")
    p.add_argument("--amplitude", type=float, default=0.5, help="max twist amplitude")

    p = sub.add_parser("fourier", help="mode identities and the angular lower bound")
    _common_flags(p, grid_default="256x256", required=False)
    p.add_argument("--tests", type=int, default=20, help="battery size")

    p = sub.add_parser("convergence", help="stationarity residual across a grid ladder")
    _common_flags(p, required=False)
    p.add_argument("--ladder", default="16x64,32x128,64x256,128x512",
                   help="comma-separated grid sizes")
    p.add_argument("--rule", choices=("gauss", "midpoint"), default="midpoint",
                   help="midpoint shows the rule's order; gauss bottoms out at rounding")
    p.add_argument("--tests", type=int, default=10, help="battery size per rung")
    return parser


def _apply_config(argv):
    """Fold --config key=value pairs in as defaults (explicit flags win)."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError:
        return argv
    extra = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        flag = f"--{key.strip()}"
        if flag not in argv:
            extra.extend([flag, value.strip()])
    return argv[:idx] + argv[idx + 2 :] + extra


def _cmd_certify(args, out_dir: Path) -> int:
    m = QuadraticIntegrand.constant(args.a, args.nu)
    nr, nt = _parse_grid(args.grid)
    grid = make_grid(nr, nt)
    pg = pressure_gradient_ncover(m, args.N, grid)
    if args.mode == "auto":
        try:
            cert = certify(pg, args.nu, mode="single_variable")
        except errors.ModeError:
            cert = certify(pg, args.nu, mode="general")
    else:
        cert = certify(pg, args.nu, mode=args.mode)
    lo, hi = admissible_a_range(args.N)
    payload = {
        "N": args.N,
        "a": args.a,
        "nu": args.nu,
        "mode": cert.mode,
        "bound": cert.bound,
        "measured": cert.measured,
        "verdict": cert.verdict,
        "admissible_range": [lo, hi],
    }
    _write_json(out_dir, "certificate.json", payload)
    _emit(args, payload)
    return 0 if cert.passed else 2


def _cmd_energy(args, out_dir: Path) -> int:
    nr, nt = _parse_grid(args.grid)
    report = min_energy_report(args.N, args.a, args.nu, make_grid(nr, nt))
    payload = report.to_dict()
    _write_json(out_dir, "energy.json", payload)
    _emit(args, payload)
    return 0 if report.rel_err_direct <= 1e-6 else 2


def _cmd_pressure(args, out_dir: Path) -> int:
    nr, nt = _parse_grid(args.grid)
    grid = make_grid(nr, nt)
    if args.coeffs:
        m = QuadraticIntegrand.from_csv(args.coeffs, args.nu)
    else:
        m = QuadraticIntegrand.constant(args.a, args.nu)
    pg = pressure_gradient_ncover(m, args.N, grid)
    R, T = grid.node_mesh()
    rows = zip(
        (_fmt(x) for x in T.ravel()),
        (_fmt(x) for x in R.ravel()),
        (_fmt(x) for x in pg.s.ravel()),
        (_fmt(x) for x in pg.t.ravel()),
    )
    _write_csv(out_dir, "pressure_gradient.csv", ["theta", "R", "s", "t"], rows)
    s_ref, t_ref = closed_form_st_ncover(m, args.N, grid.angular_nodes)
    solver_dev = max(
        float(np.max(np.abs(pg.s - s_ref[None, :]))),
        float(np.max(np.abs(pg.t - t_ref[None, :]))),
    )
    payload = {
        "N": args.N,
        "nu": args.nu,
        "coefficients": args.coeffs or f"constant a={args.a}",
        "solver_vs_closed_form": solver_dev,
    }
    try:
        lam = reconstruct_lambda(pg)
        if isinstance(lam, ClosedFormPressure):
            payload.update({"c": lam.c, "k": lam.k, "closed_form": True})
        else:
            payload["closed_form"] = False
    except errors.CompatibilityError as exc:
        payload.update({"closed_form": False, "compatibility": str(exc)})
    _write_json(out_dir, "pressure.json", payload)
    _emit(args, payload)
    return 0 if solver_dev <= 1e-10 else 2


def _cmd_stationarity(args, out_dir: Path) -> int:
    nr, nt = _parse_grid(args.grid)
    grid = make_grid(nr, nt)
    m = QuadraticIntegrand.constant(args.a, args.nu)
    u = ncover(args.N)
    lam = ClosedFormPressure(0.0, args.nu * (args.N - args.a / args.N))
    if args.threads > 1:
        from .maps import bump_field

        def one(i):
            return stationarity_residual(m, u, lam, [bump_field(grid, [args.seed, i])], grid)

        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            worst = max(pool.map(one, range(args.tests)))
    else:
        worst = stationarity_residual(m, u, lam, iter_bump_fields(grid, args.tests, args.seed), grid)
    payload = {
        "N": args.N,
        "a": args.a,
        "nu": args.nu,
        "grid": args.grid,
        "tests": args.tests,
        "seed": args.seed,
        "max_residual": worst,
        "tolerance": args.tol,
    }
    _write_json(out_dir, "stationarity.json", payload)
    _emit(args, payload)
    return 0 if worst <= args.tol else 2


def _cmd_probe(args, out_dir: Path) -> int:
    nr, nt = _parse_grid(args.grid)
    grid = make_grid(nr, nt)
    m = QuadraticIntegrand.constant(args.a, args.nu)
    report = probe_minimality(m, args.N, args.a, args.nu, args.samples, args.amplitude, args.seed, grid)
    rows = [
        (p.probe_id, _fmt(p.amplitude), _fmt(p.gap), _fmt(p.predicted_gap), _fmt(p.residual), _fmt(p.det_err))
        for p in report.samples
    ]
    _write_csv(
        out_dir,
        "probe_samples.csv",
        ["probe_id", "amplitude", "gap", "predicted_gap", "residual", "det_err"],
        rows,
    )
    _write_deformation_csv(args, out_dir, report)
    payload = report.to_dict()
    payload.update({"N": args.N, "a": args.a, "nu": args.nu, "grid": args.grid})
    _write_json(out_dir, "probe.json", payload)
    _emit(args, payload)
    if report.certified and not report.passed:
        return 2
    return 0


def _write_deformation_csv(args, out_dir: Path, report) -> None:
    """Node images of the base map and the worst competitor, for portraits."""
    u = ncover(args.N)
    grid = make_grid(24, 64)
    base = field_from_map(u, grid)
    worst = max(report.samples, key=lambda p: p.gap)
    rng = np.random.default_rng([args.seed, worst.probe_id])
    from .competitors import _draw_twist

    twist = _draw_twist(rng, args.amplitude)
    comp = compose(u, twist, grid)
    R, T = grid.node_mesh()
    rows = []
    for kind, f in (("base", base), ("competitor", comp)):
        for r, t, xy in zip(R.ravel(), T.ravel(), f.values.reshape(-1, 2)):
            rows.append((kind, _fmt(r), _fmt(t), _fmt(xy[0]), _fmt(xy[1])))
    _write_csv(out_dir, "deformation.csv", ["kind", "R", "theta", "x1", "x2"], rows)


def _cmd_fourier(args, out_dir: Path) -> int:
    nr, nt = _parse_grid(args.grid)
    grid = make_grid(nr, nt)
    lam = ClosedFormPressure(0.0, args.nu * (args.N - args.a / args.N))
    battery = bump_test_fields(grid, args.tests, args.seed)
    parseval_gap = 0.0
    for f in battery:
        lhs, rhs = parseval_gradient(f, 10)
        parseval_gap = max(parseval_gap, abs(lhs - rhs) / (1.0 + abs(lhs)))
    det0 = max(zero_mode_det(f) for f in battery)
    res_v = max(identity_v_check(f, lam, grid) for f in battery)
    res_vi = max(identity_vi_check(f, lam, grid) for f in battery)
    buckling_ok = True
    min_margin = np.inf
    for f in battery:
        lhs, rhs = buckling_check(f)
        buckling_ok = buckling_ok and (lhs >= rhs - 1e-10 * (1.0 + abs(rhs)))
        min_margin = min(min_margin, lhs - rhs)
    dump_modes_csv(out_dir / "modes.csv", decompose(battery[0], 10))
    payload = {
        "grid": args.grid,
        "seed": args.seed,
        "tests": args.tests,
        "parseval_gap": parseval_gap,
        "zero_mode_det_max": det0,
        "identity_v_residual": res_v,
        "identity_vi_residual": res_vi,
        "buckling_holds": bool(buckling_ok),
        "buckling_min_margin": float(min_margin),
        "lambda": {"c": lam.c, "k": lam.k},
    }
    _write_json(out_dir, "fourier.json", payload)
    _emit(args, payload)
    ok = parseval_gap <= 1e-8 and det0 <= 1e-12 and res_v <= 1e-6 and res_vi <= 1e-6 and buckling_ok
    return 0 if ok else 2


def _cmd_convergence(args, out_dir: Path) -> int:
    m = QuadraticIntegrand.constant(args.a, args.nu)
    u = ncover(args.N)
    lam = ClosedFormPressure(0.0, args.nu * (args.N - args.a / args.N))
    rows = []
    for spec in args.ladder.split(","):
        nr, nt = _parse_grid(spec.strip())
        grid = make_grid(nr, nt, rule=args.rule)
        worst = stationarity_residual(m, u, lam, iter_bump_fields(grid, args.tests, args.seed), grid)
        rows.append((nr, nt, _fmt(worst)))
    _write_csv(out_dir, "convergence.csv", ["grid_nr", "grid_nth", "max_residual"], rows)
    for nr, nt, res in rows:
        print(f"{nr}x{nt}: {res}")
    return 0


_DISPATCH = {
    "certify": _cmd_certify,
    "energy": _cmd_energy,
    "pressure": _cmd_pressure,
    "stationarity": _cmd_stationarity,
    "probe": _cmd_probe,
    "fourier": _cmd_fourier,
    "convergence": _cmd_convergence,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
    except OSError as exc:
        print(f"diskmin: cannot read config: {exc}", file=sys.stderr)
        return 1
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        return _DISPATCH[args.command](args, out_dir)
    except (errors.ParameterError, OSError, ValueError) as exc:
        print(f"diskmin {args.command}: {exc}", file=sys.stderr)
        return 1
    except (errors.SingularSystemError, errors.CompatibilityError, errors.InternalConsistencyError) as exc:
        print(f"diskmin {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
