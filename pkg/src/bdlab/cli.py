"""Batch command-line front end.

Subcommands mirror the library surface: density checks, energy evaluation,
field verification, falsification, relaxation estimates, the two violation
reproductions, rendering, and scenario files.  Exit codes: 0 success, 1 input
error, 2 expected violation not found (repro modes).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np


def _vec(text: str) -> np.ndarray:
    return np.asarray([float(t) for t in text.split(",")], dtype=float)


def _write_report(report: dict, path: str | None):
    payload = json.dumps(report, indent=2, default=_json_default)
    if path:
        with open(path, "w") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj)}")


def _report_shell(args, mode: str) -> dict:
    return {
        "mode": mode,
        "inputs": {k: v for k, v in vars(args).items() if k not in ("func", "out")},
        "versions": {"bdlab": _version()},
    }


def _version() -> str:
    from . import __version__

    return __version__


def cmd_density_check(args) -> int:
    from .densities import catalog_density, symmetry_violation
    from .ellipticity import bv_necessary_report

    f = catalog_density(args.density)
    t0 = time.time()
    rep = bv_necessary_report(f, samples=args.samples, seed=args.seed)
    out = _report_shell(args, "density-check")
    out["results"] = {
        "density": f.name,
        "claimed_class": f.claimed_class,
        "symmetry_violation": symmetry_violation(f, samples=args.samples, seed=args.seed),
        "subadditivity_violation": rep.subadditivity_violation,
        "convexity_violation": rep.convexity_violation,
        "passes_necessary": rep.passes_necessary,
        "tolerance": 1e-10,
    }
    out["wall_time_s"] = time.time() - t0
    _write_report(out, args.out)
    return 0


def cmd_energy_eval(args) -> int:
    from .densities import catalog_density
    from .energy import surface_energy
    from .functions import PiecewiseAffine, PiecewiseRigid

    with open(args.function) as fh:
        data = json.load(fh)
    try:
        u = PiecewiseRigid.from_json(data)
    except Exception:
        u = PiecewiseAffine.from_json(data)
    f = catalog_density(args.density)
    t0 = time.time()
    res = surface_energy(u, f, tol=args.tol)
    out = _report_shell(args, "energy-eval")
    out["results"] = res.to_json()
    out["results"]["tolerance"] = args.tol
    out["wall_time_s"] = time.time() - t0
    _write_report(out, args.out)
    return 0


def cmd_fields_verify(args) -> int:
    from .fields import catalog_fields, check_conservative

    fam = catalog_fields()
    t0 = time.time()
    rng = np.random.default_rng(args.seed)
    probe = rng.uniform(-8.0, 8.0, size=(512, 2))
    rows = []
    worst = 0.0
    bounds_ok = True
    for k, g in enumerate(fam.fields):
        asym, resid = check_conservative(g, samples=args.samples, seed=args.seed + k)
        mag = float(np.max(np.linalg.norm(g(probe), axis=-1)))
        within = (not g.bounded) or mag <= g.bound + 1e-9
        bounds_ok &= within
        rows.append(
            {
                "field": g.name,
                "bounded": g.bounded,
                "jacobian_asymmetry": asym,
                "potential_residual": resid,
                "max_magnitude": mag,
                "declared_bound": g.bound if np.isfinite(g.bound) else None,
                "within_bound": within,
                "tolerance": 1e-6,
            }
        )
        worst = max(worst, asym, resid)
    out = _report_shell(args, "fields-verify")
    out["results"] = {
        "fields": rows,
        "max_residual": worst,
        "passed": worst < 1e-6 and bounds_ok,
    }
    out["wall_time_s"] = time.time() - t0
    _write_report(out, args.out)
    return 0


def cmd_falsify(args) -> int:
    from .densities import catalog_density
    from .ellipticity import falsify

    f = catalog_density(args.density)
    t0 = time.time()
    verdict = falsify(
        f, _vec(args.i), _vec(args.j), _vec(args.nu), budget=args.budget, seed=args.seed
    )
    out = _report_shell(args, "falsify")
    out["results"] = verdict.to_json()
    out["wall_time_s"] = time.time() - t0
    _write_report(out, args.out)
    return 0


def cmd_relax(args) -> int:
    from .densities import catalog_density
    from .ellipticity import relaxation_estimate

    f = catalog_density(args.density)
    t0 = time.time()
    est = relaxation_estimate(
        f, _vec(args.i), _vec(args.j), _vec(args.nu), budget=args.budget, seed=args.seed
    )
    out = _report_shell(args, "relax-estimate")
    out["results"] = est.to_json()
    out["wall_time_s"] = time.time() - t0
    _write_report(out, args.out)
    return 0


def _sweep_csv(path: str, rows: list[dict]):
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def _run_eps_sweep(args, breakdown_fn, density_fn) -> list[dict]:
    from .ellipticity import falsify

    rows = []
    for eps in (float(t) for t in args.sweep_eps.split(",")):
        b = breakdown_fn(args.lam, eps)
        v = falsify(
            density_fn(eps),
            (0.0, 0.0),
            (2.0 * args.lam, 2.0 * args.lam),
            (0.0, 1.0),
            budget=args.budget,
            seed=args.seed,
            keep_competitor=False,
        )
        rows.append(
            {
                "eps": eps,
                "competitor_energy": b["total"],
                "straight_energy": b["straight"],
                "best_found_energy": v.best_energy,
                "margin": v.margin,
                "status": v.status,
            }
        )
    return rows


def cmd_repro_ce1(args) -> int:
    from .densities import anisotropic_normal_density
    from .ellipticity import ce1_energy_breakdown, falsify

    t0 = time.time()
    breakdown = ce1_energy_breakdown(args.lam, args.eps)
    f = anisotropic_normal_density(args.eps)
    verdict = falsify(
        f,
        (0.0, 0.0),
        (2.0 * args.lam, 2.0 * args.lam),
        (0.0, 1.0),
        budget=args.budget,
        seed=args.seed,
    )
    if args.sweep_eps:
        rows = _run_eps_sweep(args, ce1_energy_breakdown, anisotropic_normal_density)
        _sweep_csv(args.csv or "ce1_sweep.csv", rows)
    out = _report_shell(args, "repro-ce1")
    out["results"] = {
        "breakdown": breakdown,
        "parallel_expected": 8.0 * np.sqrt(2.0) * args.lam + 4.0 * args.lam,
        "straight_expected": 12.0 * np.sqrt(2.0) * args.lam,
        "tolerance": 1e-8,
        "verdict": verdict.to_json(),
    }
    out["wall_time_s"] = time.time() - t0
    _write_report(out, args.out)
    return 0 if verdict.status == "VIOLATION" else 2


def cmd_repro_ce2(args) -> int:
    from .densities import anisotropic_trace_density
    from .ellipticity import ce2_energy_breakdown, falsify

    t0 = time.time()
    breakdown = ce2_energy_breakdown(args.lam, args.eps)
    delta = args.eps**0.25
    f = anisotropic_trace_density(args.eps)
    verdict = falsify(
        f,
        (0.0, 0.0),
        (2.0 * args.lam, 2.0 * args.lam),
        (0.0, 1.0),
        budget=args.budget,
        seed=args.seed,
    )
    if args.sweep_eps:
        rows = _run_eps_sweep(args, ce2_energy_breakdown, anisotropic_trace_density)
        _sweep_csv(args.csv or "ce2_sweep.csv", rows)
    out = _report_shell(args, "repro-ce2")
    out["results"] = {
        "breakdown": breakdown,
        "lower_edge_expected": np.sqrt(args.eps) * 2.0 * args.lam / delta,
        "upper_edge_expected": np.sqrt(args.eps)
        * (args.lam / delta)
        * (2.0 * delta**2 + 2.0 * (1.0 - delta) ** 2),
        "chord_expected": 8.0 * np.sqrt(1.0 + args.eps) * args.lam,
        "straight_expected": 12.0 * np.sqrt(1.0 + args.eps) * args.lam,
        "tolerance": 1e-10,
        "verdict": verdict.to_json(),
    }
    out["wall_time_s"] = time.time() - t0
    _write_report(out, args.out)
    return 0 if verdict.status == "VIOLATION" else 2


def cmd_ibp_check(args) -> int:
    from .energy import bump_from_polygon, integration_by_parts_residual
    from .fields import prototype_field
    from .functions import AffinePiece, PiecewiseAffine
    from .geometry import Polygon, PolygonalPartition, make_oriented_square
    from .profiles import sin_profile

    t0 = time.time()
    rng = np.random.default_rng(args.seed)
    dom = make_oriented_square((0.0, 1.0), 2.0)
    bottom = Polygon([(-1, -1), (1, -1), (1, 0), (-1, 0)])
    top = Polygon([(-1, 0), (1, 0), (1, 1), (-1, 1)])
    part = PolygonalPartition([bottom, top], dom)
    G = prototype_field(np.eye(2), (sin_profile(0.8, 2.0), sin_profile(0.6, 3.0)))
    phi = bump_from_polygon(dom, power=2)
    rows = []
    for k in range(args.cases):
        u = PiecewiseAffine(
            part,
            [
                AffinePiece(rng.normal(scale=0.5, size=(2, 2)), rng.normal(size=2)),
                AffinePiece(rng.normal(scale=0.5, size=(2, 2)), rng.normal(size=2)),
            ],
        )
        res = integration_by_parts_residual(u, G, phi, tol=1e-10)
        rows.append({"case": k, "residual": res})
    worst = max(r["residual"] for r in rows)
    out = _report_shell(args, "ibp-check")
    out["results"] = {
        "cases": rows,
        "max_residual": worst,
        "tolerance": 1e-7,
        "passed": worst < 1e-7,
        "unbounded_fields_admitted": "linear fields on bounded domains are "
        "outside the literal hypotheses and flagged by bounded=False",
    }
    out["wall_time_s"] = time.time() - t0
    _write_report(out, args.out)
    return 0


def cmd_render(args) -> int:
    from .functions import PiecewiseAffine, PiecewiseRigid
    from .render import render_svg

    with open(args.function) as fh:
        data = json.load(fh)
    try:
        u = PiecewiseRigid.from_json(data)
    except Exception:
        u = PiecewiseAffine.from_json(data)
    svg = render_svg(u, width=args.width, style=args.style)
    with open(args.out, "w") as fh:
        fh.write(svg)
    return 0


_SCENARIO_MODES = {
    "eval": "energy-eval",
    "falsify": "falsify",
    "relax": "relax",
    "fields-verify": "fields-verify",
    "repro-ce1": "repro-ce1",
    "repro-ce2": "repro-ce2",
    "ibp-check": "ibp-check",
}


def cmd_run(args) -> int:
    with open(args.scenario) as fh:
        sc = json.load(fh)
    mode = sc.get("mode")
    if mode not in _SCENARIO_MODES:
        print(f"unknown scenario mode {mode!r}", file=sys.stderr)
        return 1
    argv = [_SCENARIO_MODES[mode]]
    if mode == "eval":
        argv += ["--function", sc["function"], "--density", sc["density"]]
        if "tol" in sc:
            argv += ["--tol", str(sc["tol"])]
    elif mode in ("falsify", "relax"):
        argv += [
            "--density", sc["density"],
            "--i", ",".join(map(str, sc["i"])),
            "--j", ",".join(map(str, sc["j"])),
            "--nu", ",".join(map(str, sc["nu"])),
            "--budget", str(sc.get("budget", 2000)),
            "--seed", str(sc["seed"]),
        ]
    elif mode in ("repro-ce1", "repro-ce2"):
        argv += [
            "--lam", str(sc.get("lam", 1.0)),
            "--eps", str(sc.get("eps", 0.01 if mode == "repro-ce1" else 1e-4)),
            "--budget", str(sc.get("budget", 600)),
            "--seed", str(sc.get("seed", 0)),
        ]
    elif mode == "fields-verify":
        argv += ["--samples", str(sc.get("samples", 120)), "--seed", str(sc.get("seed", 0))]
    elif mode == "ibp-check":
        argv += ["--cases", str(sc.get("cases", 5)), "--seed", str(sc.get("seed", 0))]
    if sc.get("out"):
        argv += ["--out", sc["out"]]
    return main(argv)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bdlab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density-check", help="sampled necessary-condition checks")
    p.add_argument("--density", required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_density_check)

    p = sub.add_parser("energy-eval", help="surface energy of a function JSON")
    p.add_argument("--function", required=True)
    p.add_argument("--density", required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_energy_eval)

    p = sub.add_parser("fields-verify", help="conservativity checks for catalog fields")
    p.add_argument("--samples", type=int, default=150)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fields_verify)

    p = sub.add_parser("falsify", help="competitor search against a density")
    p.add_argument("--density", required=True)
    p.add_argument("--i", required=True)
    p.add_argument("--j", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_falsify)

    p = sub.add_parser("relax", help="upper bound for the relaxed density")
    p.add_argument("--density", required=True)
    p.add_argument("--i", required=True)
    p.add_argument("--j", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("repro-ce1", help="square-insert violation reproduction")
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--budget", type=int, default=600)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweep-eps", help="comma-separated eps values for a CSV sweep")
    p.add_argument("--csv", help="CSV path for the sweep table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_repro_ce1)

    p = sub.add_parser("repro-ce2", help="thin-rectangle violation reproduction")
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--budget", type=int, default=600)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweep-eps", help="comma-separated eps values for a CSV sweep")
    p.add_argument("--csv", help="CSV path for the sweep table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_repro_ce2)

    p = sub.add_parser("ibp-check", help="integration-by-parts residual suite")
    p.add_argument("--cases", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ibp_check)

    p = sub.add_parser("render", help="SVG drawing of a function JSON")
    p.add_argument("--function", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=640)
    p.add_argument("--style", choices=("default", "plain"), default="default")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("run", help="execute a scenario JSON")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_run)

    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"input file not found: {exc.filename}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
