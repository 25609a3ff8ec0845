"""``specset`` command line: scenarios, Bohr radii, dilation defects and Hilbertness probes."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import List, Optional

from .bohr import bohr_radius_estimate, extremal_mobius_series
from .dilation import make_T_lambda, make_T_r_block, norm_defect
from .errors import SpecsetError
from .hilbertness import mobius_contraction_probe, parallelogram_defect, rotation_test, symmetry_test
from .operators import backward_shift
from .scenarios import SCENARIOS, run_scenario
from .spaces import format_space, parse_space

EXIT_CODES = {"confirmed": 0, "inconclusive": 2, "violated": 3}
PROBES = ("parallelogram", "rotation", "symmetry", "mobius")


def _floats(text: str) -> List[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _cmd_scenario(args) -> int:
    if args.scenario_id == "list":
        for sid, spec in SCENARIOS.items():
            print(f"{sid:24s} {spec.description}")
        return 0
    report = run_scenario(args.scenario_id, seed=args.seed, grid=args.grid)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(report.to_json())
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(report.to_csv())
    print(report.to_json())
    return EXIT_CODES[report.verdict]


def _cmd_bohr(args) -> int:
    if args.family != "mobius":
        raise SpecsetError(f"unknown family {args.family!r}")
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["a", "r_star", "closed_form", "error"])
    for a in _floats(args.a_list):
        r = bohr_radius_estimate([extremal_mobius_series(a, args.R, args.terms)], args.R, args.tol)
        exact = args.R / (1 + 2 * a)
        w.writerow([a, repr(r), repr(exact), repr(abs(r - exact))])
    return 0


def _cmd_dilation(args) -> int:
    assume = False
    if args.op == "Tlambda":
        T = make_T_lambda(args.lam)
    elif args.op == "Tr":
        T = make_T_r_block(args.lam, args.hilbert_dim)
    else:
        T = backward_shift(parse_space(args.inner), args.blocks, args.lam)
        # ||lam * backward shift|| = lam on an l2 sum
        assume = True
    rep = norm_defect(T, samples=args.samples, seed=args.seed, assume_contraction=assume)
    out = {"op": args.op, "lambda": args.lam, "domain": format_space(T.domain), **rep.to_dict()}
    print(json.dumps(out, indent=2))
    return 0


def _cmd_hilbertness(args) -> int:
    space = parse_space(args.space)
    probes = PROBES if args.probe == "all" else tuple(args.probe.split(","))
    out = {"space": format_space(space)}
    for p in probes:
        if p == "parallelogram":
            out[p] = {"defect": parallelogram_defect(space, args.samples, args.seed)}
        elif p == "rotation":
            out[p] = rotation_test(space).to_dict()
        elif p == "symmetry":
            out[p] = {"max_violation": symmetry_test(space, args.samples, args.seed)}
        elif p == "mobius":
            T = backward_shift(space, args.blocks, args.lam)
            out[p] = {"lambda": args.lam, "blocks": args.blocks,
                      **mobius_contraction_probe(T, seed=args.seed, stop_on_violation=True).to_dict()}
        else:
            raise SpecsetError(f"unknown probe {p!r}; choose from {', '.join(PROBES)} or all")
    print(json.dumps(out, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="specset", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scenario", help="run a scenario, or 'list' them")
    sc.add_argument("scenario_id", choices=["list", *SCENARIOS])
    sc.add_argument("--json", metavar="PATH", help="also write the JSON report here")
    sc.add_argument("--csv", metavar="PATH", help="also write quantities as CSV here")
    sc.add_argument("--seed", type=int)
    sc.add_argument("--grid", type=int, help="override the scenario's resolution parameter")
    sc.set_defaults(func=_cmd_scenario)

    bo = sub.add_parser("bohr", help="Bohr radius of the extremal Möbius family (CSV)")
    bo.add_argument("--family", default="mobius")
    bo.add_argument("--a-list", default="0.9,0.99,0.999")
    bo.add_argument("--R", type=float, default=1.0)
    bo.add_argument("--tol", type=float, default=1e-8)
    bo.add_argument("--terms", type=int, default=200)
    bo.set_defaults(func=_cmd_bohr)

    di = sub.add_parser("dilation", help="norm-defect report (JSON)")
    di.add_argument("--op", choices=["Tlambda", "Tr", "Slambda"], required=True)
    di.add_argument("--lambda", dest="lam", type=float, required=True,
                    help="lambda for Tlambda/Slambda, r for Tr")
    di.add_argument("--samples", type=int, default=10_000)
    di.add_argument("--seed", type=int, default=0)
    di.add_argument("--hilbert-dim", type=int, default=1)
    di.add_argument("--inner", default="l1(2)", help="inner space for Slambda")
    di.add_argument("--blocks", type=int, default=4)
    di.set_defaults(func=_cmd_dilation)

    hi = sub.add_parser("hilbertness", help="non-Hilbertness probes (JSON)")
    hi.add_argument("--space", required=True)
    hi.add_argument("--probe", default="all", help="all, or a comma list of " + ",".join(PROBES))
    hi.add_argument("--samples", type=int, default=1000)
    hi.add_argument("--seed", type=int, default=0)
    hi.add_argument("--lam", type=float, default=0.95, help="shift scale for the mobius probe")
    hi.add_argument("--blocks", type=int, default=3)
    hi.set_defaults(func=_cmd_hilbertness)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecsetError as exc:
        print(f"specset: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
