"""Command-line front end with JSON/CSV output and run manifests.

Every subcommand prints a JSON result on stdout (floats at 17 significant
digits, each numeric output next to its certified error bound where one
exists) and exits 0; domain errors print a JSON error object and exit 1;
usage errors exit 2.  `--manifest PATH` additionally records the command,
arguments, seed, versions and wall time.  Given the same `--seed`, CSV
outputs are bit-identical across runs.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from fractions import Fraction

from . import __version__
from .algebraic import (AlgebraicNumber, is_root_of_unity,
                        local_height_breakdown, mahler_measure)
from .dynamics import (RationalMap, canonical_height_global,
                       canonical_height_local, good_reduction_at,
                       preperiodic_points_rational)
from .errors import InvalidInputError
from .green import (EmpiricalMeasure, EscapeRateField, annulus_mass_bound,
                    baker_mean_pairing, bilu_moment_test, discrepancy,
                    discrete_energy, filled_julia_membership,
                    height_discrepancy_check, transfinite_diameter)
from .polyforms import IntPoly
from .projective import ProjPointQ, enumerate_points, height, schanuel_ratio
from .torus import TorusPoint, monomial_pushforward, subadditivity_check, torus_height


def load_schema(name):
    """Shipped JSON schema for a subcommand's stdout payload (or 'error',
    'manifest')."""
    from importlib import resources
    ref = resources.files("arithdyn") / "schemas" / f"{name}.json"
    return json.loads(ref.read_text(encoding="utf-8"))


def _fmt(x):
    """17-significant-digit float formatting for reproducible output."""
    if isinstance(x, float):
        return float(f"{x:.17g}")
    return x


def _jsonable(obj):
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def parse_point(s):
    """'a/b' -> [a:b], 'inf' -> [1:0], 'a:b:c' -> P^k point."""
    s = s.strip()
    if s == "inf":
        return ProjPointQ((1, 0))
    if ":" in s:
        return ProjPointQ(tuple(Fraction(t) for t in s.split(":")))
    if "/" in s:
        a, b = s.split("/")
        return ProjPointQ((int(a), int(b)))
    return ProjPointQ((int(s), 1))


def parse_poly(s):
    return IntPoly(tuple(int(t) for t in s.split(",")))


def parse_map(s):
    return RationalMap.from_json(json.loads(s))


def _write_manifest(path, command, args_ns, t0, outputs):
    manifest = {
        "command": command,
        "argv": sys.argv[1:],
        "arguments": {k: _jsonable(v) for k, v in vars(args_ns).items()
                      if k not in ("func",)},
        "seed": getattr(args_ns, "seed", None),
        "tolerances": {k: getattr(args_ns, k) for k in ("tol",)
                       if hasattr(args_ns, k)},
        "versions": {"arithdyn": __version__,
                     "python": sys.version.split()[0]},
        "wall_time_s": _fmt(time.time() - t0),
        "outputs": _jsonable(outputs),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(payload):
    print(json.dumps(_jsonable(payload), sort_keys=True))


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def cmd_height(args):
    x = parse_point(args.point)
    return {"point": str(x), "H": x.H(), "h": x.height(), "error_bound": 0.0}


def cmd_enumerate(args):
    pts = enumerate_points(args.k, args.B)
    rows = [[*(str(c) for c in p.coords), str(p.H()), f"{p.height():.17g}"]
            for p in pts]
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow([*(f"x{i}" for i in range(args.k + 1)), "H", "h"])
            w.writerows(rows)
    return {"k": args.k, "B": args.B, "count": len(pts),
            "csv": args.out, "error_bound": 0.0}


def cmd_schanuel(args):
    ratio = schanuel_ratio(args.k, args.B)
    return {"k": args.k, "B": args.B, "ratio": ratio,
            "error_bound": 1e-12}


def cmd_mahler(args):
    res = mahler_measure(parse_poly(args.poly), args.tol)
    return {"measure": res.measure, "log_measure": res.log_measure,
            "error_bound": res.error_bound,
            "archimedean_part": res.archimedean_part,
            "leading_coeff": res.leading_coeff}


def cmd_algheight(args):
    xi = AlgebraicNumber(parse_poly(args.poly))
    res = mahler_measure(xi.minpoly, args.tol)
    places = local_height_breakdown(xi, args.tol)
    return {"minpoly": [int(c) for c in xi.minpoly.coeffs],
            "height": res.log_measure / xi.degree,
            "mahler": res.measure,
            "places": {str(k): v for k, v in places.items()},
            "error_bound": res.error_bound / xi.degree}


def cmd_rou(args):
    verdict = is_root_of_unity(AlgebraicNumber(parse_poly(args.poly)))
    return {"is_root_of_unity": verdict.is_root_of_unity,
            "order": verdict.order, "reason": verdict.reason}


def cmd_canheight(args):
    f = parse_map(args.map)
    x = parse_point(args.point)
    out = {"map": f.to_json(), "point": str(x), "tol": args.tol}
    if args.method in ("global", "both"):
        g = canonical_height_global(f, x, args.tol)
        out["global"] = {"value": g.value, "error": g.error,
                         "n_used": g.n_used,
                         "budget_exhausted": g.budget_exhausted}
    if args.method in ("local", "both"):
        led = canonical_height_local(f, x, args.tol)
        out["local"] = led.to_json()
    if args.method == "both":
        out["gap"] = abs(out["global"]["value"] - out["local"]["total"])
    return out


def cmd_preperiodic(args):
    f = parse_map(args.map)
    pts = preperiodic_points_rational(f)
    return {"map": f.to_json(),
            "points": [str(p) for p in pts], "count": len(pts)}


def cmd_goodred(args):
    f = parse_map(args.map)
    table = [{"p": p, "good": good_reduction_at(f, p)} for p in f.bad_primes]
    extra = [p for p in (2, 3, 5, 7, 11, 13) if p not in f.bad_primes]
    table += [{"p": p, "good": True} for p in extra]
    table.sort(key=lambda r: r["p"])
    return {"map": f.to_json(), "resultant": str(f.res),
            "bad_primes": list(f.bad_primes), "table": table}


def cmd_julia_sample(args):
    f = parse_map(args.map)
    field = EscapeRateField(f, args.tol)
    rows = []
    for i in range(args.ny):
        im = args.im0 + (args.im1 - args.im0) * i / max(args.ny - 1, 1)
        for j in range(args.nx):
            re = args.re0 + (args.re1 - args.re0) * j / max(args.nx - 1, 1)
            rows.append([f"{re:.17g}", f"{im:.17g}",
                         filled_julia_membership(field, complex(re, im), 1.0)])
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["re", "im", "membership"])
            w.writerows(rows)
    counts = {}
    for r in rows:
        counts[r[2]] = counts.get(r[2], 0) + 1
    return {"grid": [args.nx, args.ny], "counts": counts, "csv": args.out,
            "margin": field.certified_error()}


def cmd_tdiam(args):
    f = parse_map(args.map)
    field = EscapeRateField(f, args.tol)
    res = transfinite_diameter(field, args.n, restarts=args.restarts,
                               seed=args.seed)
    return {"n": res.n, "delta_n": res.delta_n,
            "formula_value": res.formula_value,
            "converged": res.converged}


def cmd_discrepancy(args):
    xi = AlgebraicNumber(parse_poly(args.poly))
    if args.map is None and args.power_d is None:
        raise InvalidInputError("give either --map or --power-d")
    if args.power_d is not None:
        lhs, rhs, gap = height_discrepancy_check(xi, args.power_d, args.tol)
        d = args.power_d
        U = [1] + [0] * d
        V = [0] * d + [1]
        f = RationalMap.from_json({"d": d, "U": U, "V": V})
        field = EscapeRateField(f, args.tol)
        return {"D_inf": discrepancy(field, xi), "lhs_height": lhs,
                "rhs_half_sum": rhs, "gap": gap, "power_d": d}
    f = parse_map(args.map)
    field = EscapeRateField(f, args.tol)
    return {"D_inf": discrepancy(field, xi), "map": f.to_json()}


def _load_cloud(path):
    pts = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() in ("re", "x"):
                continue
            pts.append(complex(float(row[0]), float(row[1])))
    return pts


def cmd_baker(args):
    f = parse_map(args.map)
    field = EscapeRateField(f, args.tol)
    if args.roots_of_unity:
        nu = EmpiricalMeasure.roots_of_unity(args.roots_of_unity)
        points = list(nu.points)
    else:
        points = _load_cloud(args.points_file)
    mean = baker_mean_pairing(field, points)
    n = len(points)
    # comparison constant c = 5 in -c log n / n, as in the Fekete check
    bound = -5 * math.log(n) / n
    return {"test": "baker", "n": n, "statistic": mean,
            "mean_pairwise_G": mean, "bound": bound,
            "pass": (not math.isinf(mean)) and mean >= bound,
            "duplicates": math.isinf(mean)}


def cmd_bilu(args):
    kind, _, spec = args.family.partition(":")
    if kind == "primitive":
        nu = EmpiricalMeasure.primitive_roots_of_unity(int(spec))
    elif kind == "all":
        nu = EmpiricalMeasure.roots_of_unity(int(spec))
    elif kind == "poly":
        nu = EmpiricalMeasure.from_algebraic(AlgebraicNumber(parse_poly(spec)))
    else:
        raise InvalidInputError(f"unknown family {args.family!r}")
    exps = [int(t) for t in args.exponents.split(",")]
    rep = bilu_moment_test(nu, exps)
    rows = [[str(a), f"{rep.moments[a]:.17g}"] for a in exps]
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["exponent", "moment_magnitude"])
            w.writerows(rows)
    return {"family": args.family, "n": rep.n,
            "moments": {str(a): rep.moments[a] for a in exps},
            "excluded_points": rep.excluded, "csv": args.out}


def cmd_energy(args):
    f = parse_map(args.map)
    field = EscapeRateField(f, args.tol)
    pts = _load_cloud(args.cloud)
    nu = EmpiricalMeasure(pts)
    e = discrete_energy(field, nu)
    return {"test": "energy", "n": len(nu), "statistic": e, "energy": e}


def cmd_annulus(args):
    xi = AlgebraicNumber(parse_poly(args.poly))
    obs, bound = annulus_mass_bound(xi, args.r)
    return {"test": "annulus", "n": xi.degree, "r": args.r,
            "statistic": obs, "observed_outside_mass": obs, "bound": bound,
            "pass": obs <= bound + 1e-12,
            "satisfied": obs <= bound + 1e-12}


def _parse_torus_coords(s):
    out = []
    for item in json.loads(s):
        if "rational" in item:
            out.append(Fraction(item["rational"]))
        else:
            out.append(AlgebraicNumber(IntPoly([int(c) for c in item["minpoly"]])))
    return TorusPoint(out)


def cmd_torus(args):
    if args.torus_op == "height":
        x = _parse_torus_coords(args.coords)
        return {"height": torus_height(x)}
    if args.torus_op == "push":
        x = _parse_torus_coords(args.coords)
        exps = [int(t) for t in args.exp.split(",")]
        res = monomial_pushforward(x, exps)
        return {"rational": None if res.rational is None else str(res.rational),
                "minpoly": None if res.minpoly is None
                else [int(c) for c in res.minpoly.coeffs],
                "height": res.height, "bound": res.bound,
                "cloud_size": None if res.cloud is None else len(res.cloud)}
    if args.torus_op == "subadd":
        def coord(s):
            if "," in s:
                return AlgebraicNumber(parse_poly(s))
            return Fraction(s)
        rep = subadditivity_check(coord(args.alpha), coord(args.beta))
        return {"h_alpha": rep.h_alpha, "h_beta": rep.h_beta,
                "h_product": rep.h_product, "holds": rep.holds,
                "note": rep.note}
    raise InvalidInputError(f"unknown torus op {args.torus_op!r}")


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="arithdyn",
        description="heights and equidistribution statistics for arithmetic "
                    "dynamics on P^1")
    ap.add_argument("--manifest", help="write a run manifest JSON here")
    ap.add_argument("--seed", type=int, default=0,
                    help="seed for randomized subcommands")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(func=fn)
        return p

    p = add("height", cmd_height, help="naive height of a point")
    p.add_argument("--point", required=True)

    p = add("enumerate", cmd_enumerate, help="points of bounded height (CSV)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--B", type=float, required=True,
                   help="log-height bound (H <= e^B)")
    p.add_argument("--out")

    p = add("schanuel", cmd_schanuel, help="Schanuel count ratio")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--B", type=float, required=True,
                   help="exponential height bound")

    p = add("mahler", cmd_mahler, help="certified Mahler measure")
    p.add_argument("--poly", required=True,
                   help="integer coefficients, low degree first, comma "
                        "separated (use --poly=-1,2 for a leading minus)")
    p.add_argument("--tol", type=float, default=1e-12)

    p = add("algheight", cmd_algheight, help="height with place breakdown")
    p.add_argument("--poly", required=True)
    p.add_argument("--tol", type=float, default=1e-12)

    p = add("rou", cmd_rou, help="root-of-unity verdict with witness order")
    p.add_argument("--poly", required=True)

    p = add("canheight", cmd_canheight, help="canonical height of a point")
    p.add_argument("--map", required=True, help='{"d":2,"U":[...],"V":[...]}')
    p.add_argument("--point", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--method", choices=("global", "local", "both"),
                   default="both")

    p = add("preperiodic", cmd_preperiodic, help="rational preperiodic points")
    p.add_argument("--map", required=True)

    p = add("goodred", cmd_goodred, help="good-reduction prime table")
    p.add_argument("--map", required=True)

    p = add("julia-sample", cmd_julia_sample,
            help="filled-Julia membership on a grid (CSV)")
    p.add_argument("--map", required=True)
    p.add_argument("--re0", type=float, default=-2.0)
    p.add_argument("--re1", type=float, default=2.0)
    p.add_argument("--im0", type=float, default=-2.0)
    p.add_argument("--im1", type=float, default=2.0)
    p.add_argument("--nx", type=int, default=41)
    p.add_argument("--ny", type=int, default=41)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")

    p = add("tdiam", cmd_tdiam, help="transfinite diameter via Fekete points")
    p.add_argument("--map", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("discrepancy", cmd_discrepancy,
            help="archimedean discrepancy; full identity for power maps")
    p.add_argument("--poly", required=True)
    p.add_argument("--map")
    p.add_argument("--power-d", type=int, dest="power_d")
    p.add_argument("--tol", type=float, default=1e-12)

    p = add("baker", cmd_baker, help="mean pairwise G statistic")
    p.add_argument("--map", required=True)
    p.add_argument("--points-file", dest="points_file")
    p.add_argument("--roots-of-unity", dest="roots_of_unity", type=int)
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("bilu", cmd_bilu, help="monomial moments of an orbit family")
    p.add_argument("--family", required=True,
                   help='"primitive:101", "all:64" or "poly:<coeffs>"')
    p.add_argument("--exponents", default="1,2,3,4,5")
    p.add_argument("--out")

    p = add("energy", cmd_energy, help="discrete energy of a point cloud")
    p.add_argument("--map", required=True)
    p.add_argument("--cloud", required=True, help='CSV of "re,im" rows')
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("annulus", cmd_annulus, help="annulus mass lemma check")
    p.add_argument("--poly", required=True)
    p.add_argument("--r", type=float, required=True)

    p = add("torus", cmd_torus, help="torus height subsuite")
    p.add_argument("torus_op", choices=("height", "push", "subadd"))
    p.add_argument("--coords", help="JSON coordinate descriptors")
    p.add_argument("--exp", help="comma-separated exponents")
    p.add_argument("--alpha")
    p.add_argument("--beta")

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    t0 = time.time()
    try:
        payload = args.func(args)
    except (InvalidInputError, ValueError, OSError, RuntimeError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)})
        return 1
    _emit(payload)
    if args.manifest:
        _write_manifest(args.manifest, args.command, args, t0, payload)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
