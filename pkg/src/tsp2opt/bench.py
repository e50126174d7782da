"""Approximation-ratio benchmark harness.

One :class:`BenchRecord` per (instance, start tour).  Random instances are
regenerated inside the worker from ``(spec, index)``, so a worker pool
produces exactly the rows of a serial run; rows are sorted by
``instance_id`` before they are written.  The worker count comes from the
``TSP2OPT_WORKERS`` environment variable (default: all CPUs).
"""
from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np

from .certificate import sqrt_half_n
from .exact import DEFAULT_LIMITS, SolverLimitError, SolverLimits, held_karp_opt
from .generators import (EUCLIDEAN, PAPER_LB, RandomFamilySpec, euclidean_instance,
                         metric_closure_instance, paper_lower_bound)
from .instance import Instance, Tour, make_tour
from .twoopt import ScanPolicy, run_two_opt

CSV_HEADER = ("instance_id", "family", "n", "seed", "opt_len", "two_opt_len",
              "ratio", "bound", "moves", "scan_policy", "wall_time_ms")

WORKERS_ENV = "TSP2OPT_WORKERS"
RATIO_TOL = 1e-9


@dataclass(frozen=True)
class BenchRecord:
    instance_id: str
    family: str
    n: int
    seed: int | None
    opt_len: object
    two_opt_len: object
    ratio: object
    bound: object
    moves: int
    scan_policy: str
    wall_time_ms: float

    def within_bound(self, tol: float = RATIO_TOL) -> bool:
        return float(self.ratio) <= float(self.bound) * (1 + tol)

    def row(self) -> list[str]:
        return [
            self.instance_id, self.family, str(self.n),
            "" if self.seed is None else str(self.seed),
            fmt_number(self.opt_len), fmt_number(self.two_opt_len),
            fmt_number(self.ratio), fmt_number(self.bound),
            str(self.moves), self.scan_policy, f"{self.wall_time_ms:.3f}",
        ]


assert tuple(f.name for f in fields(BenchRecord)) == CSV_HEADER


def fmt_number(x) -> str:
    """Rationals as ``p/q`` (or ``p``), floats with 12 significant digits."""
    if isinstance(x, Fraction):
        return str(x)
    return format(float(x), ".12g")


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


def start_tours(instance: Instance, seed: int, index: int,
                random_starts: int) -> list[tuple[str, Tour]]:
    """Identity start plus ``random_starts`` permutations.

    Start ``r`` draws from ``default_rng([seed, index, r + 1])``, a stream
    distinct from the one that generated the instance.
    """
    out = [("identity", make_tour(instance, range(instance.n)))]
    for r in range(random_starts):
        perm = np.random.default_rng([seed, index, r + 1]).permutation(instance.n)
        out.append((f"random{r}", make_tour(instance, perm.tolist())))
    return out


def _ratio(num, den):
    if isinstance(num, Fraction) and isinstance(den, Fraction):
        return num / den
    return float(num) / float(den)


def _run(instance: Instance, family: str, seed, instance_id: str, opt_len,
         start: Tour, policy: ScanPolicy) -> BenchRecord:
    t0 = time.perf_counter()
    result = run_two_opt(instance, start, policy)
    elapsed = (time.perf_counter() - t0) * 1000.0
    return BenchRecord(instance_id, family, instance.n, seed, opt_len, result.final_length,
                       _ratio(result.final_length, opt_len), sqrt_half_n(instance.n),
                       result.moves, policy.strategy, elapsed)


def _random_task(args) -> list[BenchRecord]:
    spec, index, random_starts, strategy, limits = args
    instance = _instance_at(spec, index)
    opt = held_karp_opt(instance, limits)
    seed = spec.seed + index
    policy = ScanPolicy(strategy)
    return [_run(instance, spec.family, seed, f"{instance.name}#{label}", opt.length,
                 start, policy)
            for label, start in start_tours(instance, spec.seed, index, random_starts)]


def _instance_at(spec: RandomFamilySpec, index: int) -> Instance:
    if spec.family == EUCLIDEAN:
        return euclidean_instance(spec, index)
    return metric_closure_instance(spec, index)


def bench_random(spec: RandomFamilySpec, random_starts: int = 2, strategy: str = "first",
                 limits: SolverLimits = DEFAULT_LIMITS,
                 workers: int | None = None) -> list[BenchRecord]:
    if spec.n > limits.max_n_heldkarp:
        raise SolverLimitError(
            f"n={spec.n} exceeds the exact-solver limit {limits.max_n_heldkarp}; "
            "ratios need an exact optimum")
    tasks = [(spec, idx, random_starts, strategy, limits) for idx in range(spec.count)]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_random_task, tasks))
    else:
        chunks = [_random_task(t) for t in tasks]
    return sorted((r for chunk in chunks for r in chunk), key=lambda r: r.instance_id)


def bench_paper_lb(ks: Iterable[int], strategy: str = "first") -> list[BenchRecord]:
    """2-Opt from the 2-optimal tour of each lower-bound instance; the
    reference optimum is the construction's optimal tour."""
    policy = ScanPolicy(strategy)
    records = []
    for k in ks:
        sec = paper_lower_bound(k)
        records.append(_run(sec.instance, PAPER_LB, None, f"{sec.instance.name}#Tprime",
                            sec.tour_T.length, sec.tour_Tprime, policy))
    return sorted(records, key=lambda r: r.instance_id)


def write_csv(records: Sequence[BenchRecord], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(rec.row())


def read_csv(fh: TextIO) -> list[dict[str, str]]:
    reader = csv.DictReader(fh)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return list(reader)


def bound_violations(records: Iterable[BenchRecord]) -> list[BenchRecord]:
    return [r for r in records
            if not r.within_bound() or float(r.ratio) < 1 - RATIO_TOL or math.isnan(float(r.ratio))]
