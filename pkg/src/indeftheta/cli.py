"""Command-line front end.

Subcommands: eval (theta series at a Jacobi point), gerf (grid evaluation of
the face indicator and its smoothing), verify (transformation checks),
dump-weil (representation matrices).  Problem specs are JSON; complex
numbers are [re, im] pairs, rationals may be "p/q" strings.  Output floats
carry 17 significant digits so identical runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import exact
from .cone import WallSet, face_indicator, membership, validate
from .errors import IndefThetaError, OnSingularSet, ValidationFailed
from .gerf import QuadratureConfig, sgn_hat_cone
from .presets import PRESET_NAMES, preset, preset_point
from .quadspace import Lattice
from .theta import (JacobiPoint, TruncationPolicy, singular_set_distance,
                    theta_cone, theta_hat, theta_sign)
from .verify import (CheckReport, check_S, check_T, check_elliptic,
                     check_vigneras_theta, running_example_oracle)
from .weil import build_weil

EXIT_VALIDATION = 2
EXIT_SINGULAR = 3


def _fmt(x: float) -> float:
    return float(f"{x:.17g}")


def _complex_pair(z: complex):
    return [_fmt(z.real), _fmt(z.imag)]


def _parse_spec(args) -> dict:
    if args.example:
        lattice, wall_set, poly = preset(args.example)
        pt = preset_point(args.example)
        spec = {"lattice": lattice, "wall_set": wall_set, "poly": poly,
                "point": pt, "policy": TruncationPolicy(),
                "quadrature": QuadratureConfig()}
    else:
        try:
            with open(args.spec) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationFailed(f"cannot read spec: {exc}") from exc
        spec = _spec_from_json(raw)
    if args.radius:
        pol = spec["policy"]
        spec["policy"] = TruncationPolicy(term_tol=pol.term_tol,
                                          initial_radius=args.radius,
                                          max_radius=max(args.radius,
                                                         pol.max_radius),
                                          doubling=False)
    if args.tol:
        pol = spec["policy"]
        spec["policy"] = TruncationPolicy(term_tol=args.tol,
                                          initial_radius=pol.initial_radius,
                                          max_radius=pol.max_radius,
                                          doubling=pol.doubling)
    return spec


def _spec_from_json(raw: dict) -> dict:
    try:
        gram = raw["gram"]
        lattice = Lattice.from_gram(gram)
    except KeyError as exc:
        raise ValidationFailed("spec.gram missing") from exc
    cone_raw = raw.get("cone", {"kind": "cubical", "walls": []})
    try:
        walls = [[exact.fr(x) for x in w] for w in cone_raw.get("walls", [])]
        wall_set = WallSet.make(lattice.space, walls, cone_raw.get("kind"),
                                cone_raw.get("pairs"))
    except (KeyError, ValueError, TypeError) as exc:
        raise ValidationFailed(f"spec.cone invalid: {exc}") from exc
    poly = face_indicator(wall_set)
    pt = None
    if "point" in raw:
        try:
            tau = complex(*raw["point"]["tau"])
            z = [complex(*pair) for pair in raw["point"]["z"]]
            pt = JacobiPoint.make(tau, z)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationFailed(f"spec.point invalid: {exc}") from exc
    policy_raw = raw.get("policy", {})
    policy = TruncationPolicy(
        term_tol=policy_raw.get("term_tol", 1e-9),
        initial_radius=policy_raw.get("initial_radius", 8),
        max_radius=policy_raw.get("max_radius", 64),
        doubling=policy_raw.get("doubling", True),
    )
    quad_raw = raw.get("quadrature", {})
    cfg = QuadratureConfig(abs_tol=quad_raw.get("abs_tol", 1e-10))
    return {"lattice": lattice, "wall_set": wall_set, "poly": poly,
            "point": pt, "policy": policy, "quadrature": cfg}


def _emit(payload: dict, out_path: str | None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def cmd_eval(args) -> int:
    spec = _parse_spec(args)
    lattice, wall_set, poly = spec["lattice"], spec["wall_set"], spec["poly"]
    pt, policy = spec["point"], spec["policy"]
    if pt is None:
        raise ValidationFailed("spec.point required for eval")
    report = validate(wall_set, lattice)
    if not report.ok:
        raise ValidationFailed(", ".join(report.failures()))
    tv_sign = theta_sign(lattice, poly, pt, policy)
    tv_hat = theta_hat(lattice, poly, pt, policy)
    tv_cone = theta_cone(lattice, wall_set, pt, policy)
    diff_hs = np.abs(tv_hat.components - tv_sign.components)
    diff_cs = np.abs(tv_cone.components - tv_sign.components)
    payload = {
        "singular_set_distance": _dist_json(
            singular_set_distance(lattice, wall_set, pt)),
        "theta_sign": tv_sign.to_json_dict(),
        "theta_hat": tv_hat.to_json_dict(),
        "theta_cone": tv_cone.to_json_dict(),
        "differences": {
            "hat_minus_sign_max": _fmt(float(diff_hs.max())),
            "cone_minus_sign_max": _fmt(float(diff_cs.max())),
        },
    }
    _emit(payload, args.out)
    return 0


def _dist_json(d: float):
    return "unconstrained" if math.isinf(d) else _fmt(d)


def _parse_grid(grid: str, dim: int):
    """Grid spec 'v1=-3:3:61,v2=0.5,...' -> list of axis arrays."""
    axes = [None] * dim
    try:
        for part in grid.split(","):
            name, _, value = part.partition("=")
            idx = int(name.strip().lstrip("v")) - 1
            if not 0 <= idx < dim:
                raise ValueError(f"axis {name} out of range")
            if ":" in value:
                lo, hi, num = value.split(":")
                axes[idx] = np.linspace(float(lo), float(hi), int(num))
            else:
                axes[idx] = np.array([float(value)])
        if any(a is None for a in axes):
            raise ValueError("every coordinate needs a range or a value")
    except (ValueError, IndexError) as exc:
        raise ValidationFailed(f"invalid grid spec: {exc}") from exc
    return axes


def cmd_gerf(args) -> int:
    spec = _parse_spec(args)
    wall_set, poly, cfg = spec["wall_set"], spec["poly"], spec["quadrature"]
    report = validate(wall_set, spec["lattice"])
    if not report.ok:
        raise ValidationFailed(", ".join(report.failures()))
    dim = wall_set.space.dim
    axes = _parse_grid(args.grid, dim)
    lines = [",".join([f"v{i+1}" for i in range(dim)] + ["sgn", "sgn_hat", "diff"])]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.reshape(-1) for g in mesh], axis=1)
    for v in pts:
        s = poly.evaluate_f(v)
        sh = sgn_hat_cone(poly, v, cfg)
        row = [f"{c:.17g}" for c in v] + [f"{s:.17g}", f"{sh:.17g}",
                                          f"{sh - s:.17g}"]
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


CHECK_NAMES = ("T", "S", "elliptic", "vigneras", "example")


def cmd_verify(args) -> int:
    spec = _parse_spec(args)
    lattice, wall_set, poly = spec["lattice"], spec["wall_set"], spec["poly"]
    pt, policy = spec["point"], spec["policy"]
    report = validate(wall_set, lattice)
    if not report.ok:
        raise ValidationFailed(", ".join(report.failures()))
    names = [c.strip() for c in args.checks.split(",") if c.strip()]
    for name in names:
        if name not in CHECK_NAMES:
            raise ValidationFailed(f"unknown check {name!r}")
    rep = build_weil(lattice)
    reports: list[CheckReport] = []
    for name in names:
        if name == "T":
            reports.append(check_T(lattice, poly, pt, policy, rep))
        elif name == "S":
            reports.append(check_S(lattice, poly, pt, policy, rep))
        elif name == "elliptic":
            lam = [0] * lattice.dim
            mu = [0] * lattice.dim
            lam[-1] = 1
            mu[0] = 1
            reports.append(check_elliptic(lattice, poly, pt, lam, mu, policy))
        elif name == "vigneras":
            reports.append(check_vigneras_theta(lattice, poly, pt, policy))
        elif name == "example":
            rng = np.random.default_rng(20240817)
            worst = 0.0
            for _ in range(10):
                v = rng.uniform(-3, 3, 3)
                oracle, pipeline = running_example_oracle(v)
                worst = max(worst, abs(oracle - pipeline))
            reports.append(CheckReport("example", worst, 1e-7,
                                       ("10 random points, box radius 3",)))
    payload = {"checks": [r.to_json_dict() for r in reports],
               "all_passed": all(r.passed for r in reports)}
    _emit(payload, args.out)
    return 0 if payload["all_passed"] else 1


def cmd_dump_weil(args) -> int:
    spec = _parse_spec(args)
    rep = build_weil(spec["lattice"])
    payload = {
        "size": rep.size,
        "rho_T": [[_complex_pair(z) for z in row] for row in rep.rho_t],
        "rho_S": [[_complex_pair(z) for z in row] for row in rep.rho_s],
        "sigma": _complex_pair(rep.sigma),
        "sigma_signature": _complex_pair(rep.sigma_signature),
        "coset_reps": [[str(x) for x in rep_] for rep_ in rep.disc.coset_reps],
    }
    _emit(payload, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="indeftheta",
        description="Indefinite theta series on tetrahedral and cubical "
                    "cones, with modular completions and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--spec", help="JSON problem spec file")
        group.add_argument("--example", choices=PRESET_NAMES,
                           help="built-in named spec")
        p.add_argument("--radius", type=int, help="fixed truncation radius")
        p.add_argument("--tol", type=float, help="truncation term tolerance")
        p.add_argument("--out", help="write output to a file")

    p_eval = sub.add_parser("eval", help="evaluate the theta series")
    add_common(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_gerf = sub.add_parser("gerf", help="grid CSV of sgn and sgn_hat")
    add_common(p_gerf)
    p_gerf.add_argument("--grid", required=True,
                        help="e.g. 'v1=-3:3:61,v2=0.5,v3=0.25'")
    p_gerf.set_defaults(func=cmd_gerf)

    p_ver = sub.add_parser("verify", help="run transformation checks")
    add_common(p_ver)
    p_ver.add_argument("--checks", default="T,S,elliptic",
                       help=f"comma list from {','.join(CHECK_NAMES)}")
    p_ver.set_defaults(func=cmd_verify)

    p_dump = sub.add_parser("dump-weil", help="dump the Weil representation")
    add_common(p_dump)
    p_dump.set_defaults(func=cmd_dump_weil)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OnSingularSet as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (ValidationFailed, IndefThetaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
