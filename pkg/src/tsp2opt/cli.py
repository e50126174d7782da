"""Command line front end.

Exit codes: 0 success / all checks pass, 1 a check failed, 2 usage or I/O
error.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import bench
from .certificate import CertificateError, Diamond, certify, embed, estimate_diamond_area
from .exact import SolverLimitError, brute_force_opt, held_karp_opt
from .generators import (EUCLIDEAN, METRIC_CLOSURE, PAPER_LB, RandomFamilySpec, generate,
                         paper_lower_bound)
from .instance import (Instance, InstanceError, Tour, TourError, check_metric, make_tour,
                       parse_instance, parse_tour, write_instance, write_tour)
from .twoopt import ScanPolicy, is_two_optimal, run_two_opt

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

FAMILIES = (PAPER_LB, EUCLIDEAN, METRIC_CLOSURE)


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    return bench.fmt_number(x)


def _read_instance(path: str) -> Instance:
    return parse_instance(Path(path).read_text())


def _read_tour(path: str, instance: Instance) -> Tour:
    return parse_tour(Path(path).read_text(), instance)


def _write(path: Path, text: str) -> None:
    path.write_text(text)


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.family == PAPER_LB:
        if args.k is None:
            raise UsageError("--k is required for paper-lb")
        sec = paper_lower_bound(args.k)
        stem = sec.instance.name
        _write(out / f"{stem}.tsp", write_instance(sec.instance, sec.comments()))
        _write(out / f"{stem}.T.tour", write_tour(sec.tour_T, [f"T, length {sec.tour_T.length}"]))
        _write(out / f"{stem}.Tprime.tour",
               write_tour(sec.tour_Tprime, [f"T', length {sec.tour_Tprime.length}"]))
        print(f"{out / stem}.tsp n={sec.instance.n} "
              f"T={_fmt(sec.tour_T.length)} Tprime={_fmt(sec.tour_Tprime.length)}")
        return EXIT_OK
    if args.n is None:
        raise UsageError("--n is required for random families")
    spec = RandomFamilySpec(args.family, args.n, args.seed, args.count, exact=args.exact)
    for inst in generate(spec):
        path = out / f"{inst.name}.tsp"
        _write(path, write_instance(inst))
        print(f"{path} n={inst.n}")
    return EXIT_OK


def _initial_tour(args, instance: Instance) -> Tour:
    init = args.init
    if init == "identity":
        return make_tour(instance, range(instance.n))
    if init == "random":
        return make_tour(instance, np.random.default_rng(args.seed).permutation(instance.n).tolist())
    if init.startswith("file:"):
        return _read_tour(init[5:], instance)
    if init == "file":
        if not args.init_tour:
            raise UsageError("--init file needs --init-tour PATH")
        return _read_tour(args.init_tour, instance)
    raise UsageError(f"unknown --init {init!r}")


def cmd_solve(args) -> int:
    instance = _read_instance(args.instance)
    t0 = time.perf_counter()
    moves = 0
    if args.algo == "2opt":
        policy = ScanPolicy(args.scan, args.epsilon)
        result = run_two_opt(instance, _initial_tour(args, instance), policy)
        tour, moves = result.tour, result.moves
    elif args.algo == "heldkarp":
        tour = held_karp_opt(instance)
    else:
        tour = brute_force_opt(instance)
    elapsed = (time.perf_counter() - t0) * 1000.0
    out = Path(args.out) if args.out else Path(args.instance).with_suffix(f".{args.algo}.tour")
    _write(out, write_tour(tour, [f"{args.algo} on {instance.name}, length {_fmt(tour.length)}"]))
    print(f"algo={args.algo} length={_fmt(tour.length)} moves={moves} "
          f"time_ms={elapsed:.3f} tour={out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    instance = _read_instance(args.instance)
    tour = _read_tour(args.tour, instance)
    tol = 0.0 if instance.is_exact else args.metric_tol
    violations = check_metric(instance, tol=tol)
    verdict = is_two_optimal(instance, tour, args.epsilon)
    print("tour: valid")
    print(f"length: {_fmt(tour.length)}")
    if violations:
        i, j, k = violations[0]
        print(f"metric: no ({len(violations)} violating triples, first {i},{j},{k})")
    else:
        print("metric: yes")
    if verdict.optimal:
        print("two_optimal: yes")
    else:
        w = verdict.witness
        print("two_optimal: no")
        print(f"witness: positions {w.pos_i},{w.pos_j} gain {_fmt(w.gain)}")
    return EXIT_OK if verdict.optimal and not violations else EXIT_FAIL


def cmd_certify(args) -> int:
    instance = _read_instance(args.instance)
    opt = _read_tour(args.opt_tour, instance)
    cand = _read_tour(args.tour, instance)
    report = certify(instance, opt, cand, args.p, args.q)
    text = report.to_kv() if args.format == "kv" else report.to_text()
    sys.stdout.write(text)
    if args.grid_check:
        worst = 0.0
        for r, center in zip(report.radii, _centers(instance, opt, cand, report)):
            if r == 0:
                continue
            exact = 2 * float(r) ** 2
            est = estimate_diamond_area(Diamond(center, r, (0, 0)), args.grid_check)
            worst = max(worst, abs(est - exact) / exact)
        print(f"grid check (resolution {args.grid_check}): "
              f"max relative area deviation {worst:.3g}")
    if args.kv_out:
        _write(Path(args.kv_out), report.to_kv())
    return EXIT_OK if report.ok else EXIT_FAIL


def _centers(instance, opt, cand, report):
    emb_p = embed(instance, opt, report.p)
    emb_q = embed(instance, opt, report.q)
    return [(emb_p[u], emb_q[v]) for u, v in cand.edges()]


def cmd_bench(args) -> int:
    if args.family == PAPER_LB:
        ks = args.k_list or [2, 3, 4]
        records = bench.bench_paper_lb(ks, args.scan)
    else:
        if args.n is None:
            raise UsageError("--n is required for random families")
        spec = RandomFamilySpec(args.family, args.n, args.seed, args.count, exact=args.exact)
        records = bench.bench_random(spec, args.starts, args.scan, workers=args.workers)
    if args.csv and args.csv != "-":
        with open(args.csv, "w", newline="") as fh:
            bench.write_csv(records, fh)
    else:
        bench.write_csv(records, sys.stdout)
    bad = bench.bound_violations(records)
    for r in bad:
        print(f"bound violated: {r.instance_id} ratio {_fmt(r.ratio)} > {_fmt(r.bound)}",
              file=sys.stderr)
    return EXIT_FAIL if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tsp2opt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write instance (and tour) files")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--exact", action="store_true", help="rational weights (random-metric only)")
    g.add_argument("--out", default=".")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run 2-Opt or an exact solver")
    s.add_argument("--instance", required=True)
    s.add_argument("--algo", choices=("2opt", "heldkarp", "brute"), default="2opt")
    s.add_argument("--init", default="identity", help="identity | random | file:PATH | file")
    s.add_argument("--init-tour")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--scan", choices=("first", "best"), default="first")
    s.add_argument("--epsilon", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a tour: length, metricity, 2-optimality")
    v.add_argument("--instance", required=True)
    v.add_argument("--tour", required=True)
    v.add_argument("--epsilon", type=float)
    v.add_argument("--metric-tol", type=float, default=1e-12)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("certify", help="evaluate the packing certificate")
    c.add_argument("--instance", required=True)
    c.add_argument("--opt-tour", required=True)
    c.add_argument("--tour", required=True)
    c.add_argument("--p", type=int)
    c.add_argument("--q", type=int)
    c.add_argument("--grid-check", type=int, metavar="R")
    c.add_argument("--format", choices=("text", "kv"), default="text")
    c.add_argument("--kv-out")
    c.set_defaults(func=cmd_certify)

    b = sub.add_parser("bench", help="approximation-ratio benchmark to CSV")
    b.add_argument("--family", choices=FAMILIES, required=True)
    b.add_argument("--k", dest="k_list", type=int, nargs="+")
    b.add_argument("--n", type=int)
    b.add_argument("--count", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--exact", action="store_true")
    b.add_argument("--starts", type=int, default=2, help="random starts besides identity")
    b.add_argument("--scan", choices=("first", "best"), default="first")
    b.add_argument("--workers", type=int)
    b.add_argument("--csv")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InstanceError, TourError, SolverLimitError,
            CertificateError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
