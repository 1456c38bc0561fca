"""Command-line front end.

Exit codes: 0 success, 1 numeric failure, 2 precondition or usage error.
JSON is the canonical machine format; floats are serialized at 17 significant
digits so identical inputs give byte-identical outputs.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import acceptance, braids, heteroclinic, knots, plmodel, templates
from .dynamics import (IntegrationError, ParamSet, integrate,
                       sigma_image, write_trajectory_csv)
from .heteroclinic import (GapTooLarge, NoConvergence, SectionTimeout,
                           find_tpoint, trace_heteroclinic_knot)

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_PRECONDITION = 2


# ---------------------------------------------------------------------------
# deterministic JSON
# ---------------------------------------------------------------------------

def _json_render(obj, out):
    """JSON writer with floats at 17 significant digits, keys sorted."""
    if isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _json_render(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(", ")
            _json_render(item, out)
        out.append("]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(f"{float(obj):.17g}")
    else:
        out.append(json.dumps(str(obj)))


def dumps_json(obj):
    out = []
    _json_render(obj, out)
    return "".join(out) + "\n"


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def _params_from_args(args):
    if getattr(args, "config", None):
        with open(args.config, encoding="ascii") as fh:
            cfg = json.load(fh)
        return ParamSet(sigma=cfg["sigma"], r=cfg["r"], beta=cfg["beta"])
    return ParamSet(sigma=args.sigma, r=args.r, beta=args.beta)


def _svg_xy_projection(states, path):
    """Projection of a trajectory onto the plane x = y, as a plain polyline."""
    uv = np.column_stack([(states[:, 0] + states[:, 1]) / np.sqrt(2.0),
                          states[:, 2]])
    lo, hi = uv.min(axis=0), uv.max(axis=0)
    span = max(float((hi - lo).max()), 1e-12)
    size = 640
    q = (uv - lo) / span * (size * 0.9) + size * 0.05
    pts = " ".join(f"{x:.2f},{size - y:.2f}" for x, y in q)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
                 f'height="{size}" viewBox="0 0 {size} {size}">\n'
                 f'<rect width="{size}" height="{size}" fill="white"/>\n'
                 f'<polyline points="{pts}" fill="none" stroke="black" '
                 f'stroke-width="0.8"/>\n</svg>\n')


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(args):
    p = _params_from_args(args)
    traj = integrate(np.array(args.state, dtype=float), p, args.t_end,
                     rtol=args.rtol, atol=args.atol)
    write_trajectory_csv(traj, args.out)
    if args.svg:
        _svg_xy_projection(traj.states, args.svg)
    print(f"wrote {len(traj)} samples to {args.out}")
    return EXIT_OK


def cmd_tpoint(args):
    try:
        res = find_tpoint((args.seed_r, args.seed_sigma), beta=args.beta,
                          tol=args.gap_tol)
    except NoConvergence as exc:
        _emit(dumps_json({"error": "no-convergence", "message": str(exc),
                          "seed_r": args.seed_r, "seed_sigma": args.seed_sigma,
                          "beta": args.beta}), args.json)
        return EXIT_PRECONDITION
    payload = {"r": res.r, "sigma": res.sigma, "beta": res.beta,
               "gap_norm": res.gap_norm, "iterations": res.iterations}
    _emit(dumps_json(payload), args.json)
    return EXIT_OK


def cmd_classify(args):
    if args.r is not None and args.sigma is not None:
        p = ParamSet(sigma=args.sigma, r=args.r, beta=args.beta)
    else:
        res = find_tpoint((args.seed_r, args.seed_sigma), beta=args.beta)
        p = res.params()
    curve = trace_heteroclinic_knot(p)
    poly, name, per_dir = knots.classify_curve(curve, directions=args.directions,
                                               seed=args.seed)
    low, coeffs = poly.coeff_list()
    payload = {
        "r": p.r, "sigma": p.sigma, "beta": p.beta,
        "alexander": {"text": str(poly), "low": low, "coeffs": coeffs},
        "identification": name,
        "verdict": f"consistent with {name}",
        "directions": len(per_dir),
        "crossings_per_direction": [c for _, _, c in per_dir],
    }
    _emit(dumps_json(payload), args.json)
    if args.svg:
        diagram = knots.project(curve, (1.0, -1.0, 0.0), seed=args.seed)
        knots.diagram_to_svg(diagram, args.svg)
    if args.curve_csv:
        curve.to_csv(args.curve_csv)
    return EXIT_OK


def _load_template(name):
    if name == "lorenz":
        return templates.lorenz_template()
    if name in ("fig8", "figure8", "figure-eight"):
        return templates.figure8_template()
    if os.path.exists(name):
        return templates.TemplateSpec.load(name)
    raise ValueError(f"unknown template {name!r} (use lorenz, fig8, or a JSON path)")


def cmd_template(args):
    t = _load_template(args.template)
    if args.action == "enumerate":
        words = templates.enumerate_words(t, args.max_len)
        _emit(dumps_json({"template": args.template, "max_len": args.max_len,
                          "count": len(words), "words": words}), args.json)
        return EXIT_OK
    if args.action == "report":
        words = templates.enumerate_words(t, args.max_len)
        reports = [templates.knot_report(t, w, with_alexander=not args.no_alexander)
                   for w in words]
        if args.csv:
            with open(args.csv, "w", encoding="ascii") as fh:
                fh.write(templates.REPORT_CSV_HEADER + "\n")
                for r in reports:
                    fh.write(r.csv_row() + "\n")
        _emit(dumps_json({"template": args.template,
                          "reports": [r.to_json_dict() for r in reports]}),
              args.json)
        return EXIT_OK
    if args.action == "verify":
        words = templates.enumerate_words(t, args.max_len)
        bad = []
        n_knots = 0
        for w in words:
            r = templates.knot_report(t, w, with_alexander=False)
            if r.mu != 1:
                continue
            n_knots += 1
            if not (r.positive and r.prime and r.fibered):
                bad.append(r.word)
        payload = {"template": args.template, "max_len": args.max_len,
                   "words": len(words), "knots": n_knots,
                   "all_positive_prime_fibered": not bad, "violations": bad}
        _emit(dumps_json(payload), args.json)
        print(("verified: all %d knots positive, prime, fibered" % n_knots)
              if not bad else "violations: %s" % bad[:10])
        return EXIT_OK if not bad else EXIT_NUMERIC
    raise ValueError(f"unknown template action {args.action!r}")


def cmd_model(args):
    m = plmodel.figure8_plmap()
    t = templates.figure8_template()
    if args.action == "orbits":
        words = templates.enumerate_words(t, args.max_len)
        orbits = []
        for w in words:
            x, y = plmodel.periodic_point(m, w)
            orbits.append({
                "word": w,
                "x": {"a": str(x.a), "b": str(x.b)},
                "y": {"a": str(y.a), "b": str(y.b)},
                "round_trip": plmodel.itinerary(m, (x, y), len(w)) == w,
            })
        counts = {}
        for w in words:
            counts[len(w)] = counts.get(len(w), 0) + 1
        trace_ok = all(
            sum(d * counts.get(d, 0) for d in range(1, n + 1) if n % d == 0)
            == templates.count_periodic_points(t, n)
            for n in range(1, args.max_len + 1))
        _emit(dumps_json({"max_len": args.max_len, "orbit_count": len(orbits),
                          "trace_identity": trace_ok, "layout": "reconstructed",
                          "orbits": orbits}), args.json)
        return EXIT_OK if trace_ok else EXIT_NUMERIC
    if args.action == "cone-check":
        ok, expansion = plmodel.cone_check(m)
        _emit(dumps_json({"pass": bool(ok), "expansion": str(expansion),
                          "expansion_float": float(expansion)}), args.json)
        print("cone check:", "pass" if ok else "FAIL",
              f"(expansion {float(expansion):.12f})")
        return EXIT_OK if ok else EXIT_NUMERIC
    if args.action == "correspond":
        ok = plmodel.model_template_correspondence(m, t, args.max_len)
        _emit(dumps_json({"pass": bool(ok), "max_len": args.max_len}), args.json)
        print("correspondence:", "pass" if ok else "FAIL")
        return EXIT_OK if ok else EXIT_NUMERIC
    raise ValueError(f"unknown model action {args.action!r}")


def cmd_braid(args):
    b = braids.parse_braid(args.word, strands=args.strands)
    mu = braids.closure_components(b)
    payload = {"word": str(b), "strands": b.n, "letters": b.crossing_count,
               "components": mu, "positive": b.is_positive()}
    if mu == 1:
        poly = braids.burau_alexander(b)
        low, coeffs = poly.coeff_list()
        payload["alexander"] = {"text": str(poly), "low": low, "coeffs": coeffs}
        payload["identification"] = knots.identify_polynomial(poly)
    _emit(dumps_json(payload), args.json)
    return EXIT_OK


def cmd_paper_suite(args):
    results = acceptance.run_suite(fast_only=args.skip_slow)
    for res in results:
        print(res.line())
    n_bad = sum(1 for r in results if not r.passed)
    print(f"{len(results) - n_bad}/{len(results)} criteria passed")
    return EXIT_OK if n_bad == 0 else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="tpoint-knots",
        description="Lorenz T-points, heteroclinic knots, and template knot "
                    "certification.")
    ap.add_argument("--seed", type=int, default=0, help="seed for projection jitter")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="integrate the flow and export CSV")
    sp.add_argument("--sigma", type=float, default=10.0)
    sp.add_argument("--r", type=float, default=28.0)
    sp.add_argument("--beta", type=float, default=8.0 / 3.0)
    sp.add_argument("--config", help="JSON file with sigma/r/beta (overrides flags)")
    sp.add_argument("--state", type=float, nargs=3, default=(1.0, 1.0, 1.0))
    sp.add_argument("--t-end", type=float, default=50.0)
    sp.add_argument("--rtol", type=float, default=1e-8)
    sp.add_argument("--atol", type=float, default=1e-10)
    sp.add_argument("--out", default="trajectory.csv")
    sp.add_argument("--svg", help="write an x=y-plane projection SVG")
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("tpoint", help="locate a T-point from a seed")
    sp.add_argument("--beta", type=float, default=8.0 / 3.0)
    sp.add_argument("--seed-r", type=float, required=True)
    sp.add_argument("--seed-sigma", type=float, required=True)
    sp.add_argument("--gap-tol", type=float, default=1e-6)
    sp.add_argument("--json", nargs="?", const="-", default="-")
    sp.set_defaults(fn=cmd_tpoint)

    sp = sub.add_parser("classify", help="classify the heteroclinic knot")
    sp.add_argument("--beta", type=float, default=8.0 / 3.0)
    sp.add_argument("--r", type=float, help="exact T-point r (skip the search)")
    sp.add_argument("--sigma", type=float, help="exact T-point sigma")
    sp.add_argument("--seed-r", type=float)
    sp.add_argument("--seed-sigma", type=float)
    sp.add_argument("--directions", type=int, default=10)
    sp.add_argument("--json", nargs="?", const="-", default="-")
    sp.add_argument("--svg", help="write the x=y-projection diagram SVG")
    sp.add_argument("--curve-csv", help="export the closed curve as CSV")
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("template", help="enumerate/report/verify template knots")
    sp.add_argument("action", choices=("enumerate", "report", "verify"))
    sp.add_argument("--template", default="fig8",
                    help="lorenz, fig8, or a TemplateSpec JSON path")
    sp.add_argument("--max-len", type=int, default=8)
    sp.add_argument("--json", nargs="?", const="-", default="-")
    sp.add_argument("--csv")
    sp.add_argument("--no-alexander", action="store_true",
                    help="skip Alexander polynomials in reports")
    sp.set_defaults(fn=cmd_template)

    sp = sub.add_parser("model", help="piecewise-linear model checks")
    sp.add_argument("action", choices=("orbits", "cone-check", "correspond"))
    sp.add_argument("--max-len", type=int, default=8)
    sp.add_argument("--json", nargs="?", const="-", default="-")
    sp.set_defaults(fn=cmd_model)

    sp = sub.add_parser("braid", help="closure invariants of a braid word")
    sp.add_argument("--word", required=True, help='e.g. "s1 s2 -s1"')
    sp.add_argument("--strands", type=int)
    sp.add_argument("--json", nargs="?", const="-", default="-")
    sp.set_defaults(fn=cmd_braid)

    sp = sub.add_parser("paper-suite", help="run the full acceptance suite")
    sp.add_argument("--skip-slow", action="store_true",
                    help="skip the T-point search criteria (1 and 2)")
    sp.set_defaults(fn=cmd_paper_suite)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    threads = os.environ.get("TPOINT_THREADS")
    if threads:
        os.environ.setdefault("OMP_NUM_THREADS", threads)
    try:
        return args.fn(args)
    except (GapTooLarge, ValueError) as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (NoConvergence, SectionTimeout, IntegrationError,
            knots.ProjectionError, knots.DiagramError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
