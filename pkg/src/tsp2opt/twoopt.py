"""2-change evaluation and the 2-Opt local search.

A 2-change on a directed tour takes the edges at positions ``i < j``,
``(a, b) = (order[i], order[i+1])`` and ``(x, y) = (order[j], order[j+1])``,
and replaces them by ``(a, x)`` and ``(b, y)``.  To keep the cycle directed,
the segment ``b .. x`` (positions ``i+1 .. j``) is reversed.  The change is
improving when ``w(a,b) + w(x,y) - w(a,x) - w(b,y)`` is strictly positive.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .instance import Instance, Tour, Weight, make_tour, tour_length

FIRST = "first"
BEST = "best"

FLOAT_EPSILON = 1e-12


class MoveError(ValueError):
    """Positions that do not name two vertex-disjoint tour edges."""


@dataclass(frozen=True)
class TwoChange:
    pos_i: int
    pos_j: int
    gain: Weight


@dataclass(frozen=True)
class ScanPolicy:
    """Move selection rule.

    ``epsilon=None`` resolves to 0 for exact instances and ``FLOAT_EPSILON``
    for float ones.
    """

    strategy: str = FIRST
    epsilon: Weight | None = None

    def __post_init__(self):
        if self.strategy not in (FIRST, BEST):
            raise ValueError(f"unknown scan strategy {self.strategy!r}")
        if self.epsilon is not None and self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")

    def resolve_epsilon(self, instance: Instance) -> Weight:
        return default_epsilon(instance) if self.epsilon is None else self.epsilon


def default_epsilon(instance: Instance) -> Weight:
    return 0 if instance.is_exact else FLOAT_EPSILON


def canonical_positions(n: int, pos_i: int, pos_j: int) -> tuple[int, int]:
    if not (0 <= pos_i < n and 0 <= pos_j < n):
        raise MoveError(f"positions ({pos_i}, {pos_j}) out of range for n={n}")
    i, j = sorted((pos_i, pos_j))
    if i == j:
        raise MoveError(f"identical edge positions ({pos_i}, {pos_j})")
    if j == i + 1 or (i == 0 and j == n - 1):
        raise MoveError(f"adjacent edge positions ({pos_i}, {pos_j})")
    return i, j


def gain(instance: Instance, tour: Tour, pos_i: int, pos_j: int) -> Weight:
    """Length decrease from the 2-change at the two positions (may be <= 0)."""
    n = tour.n
    i, j = canonical_positions(n, pos_i, pos_j)
    o = tour.order
    a, b, x, y = o[i], o[i + 1], o[j], o[(j + 1) % n]
    w = instance.weight
    return w(a, b) + w(x, y) - w(a, x) - w(b, y)


def apply_two_change(instance: Instance, tour: Tour, pos_i: int, pos_j: int) -> Tour:
    """New tour with ``(a,b),(x,y)`` replaced by ``(a,x),(b,y)``."""
    i, j = canonical_positions(tour.n, pos_i, pos_j)
    o = tour.order
    order = o[:i + 1] + o[i + 1:j + 1][::-1] + o[j + 1:]
    if instance.is_exact:
        return Tour(order, tour.length - gain(instance, tour, i, j))
    return make_tour(instance, order)


def _order_array(tour: Tour) -> np.ndarray:
    return np.array(tour.order, dtype=np.int64)


def _scan(instance: Instance, order: np.ndarray, strategy: str, eps_raw):
    D = instance.matrix
    if strategy == FIRST:
        return _kernels.pick(D, _kernels.scan_first)(D, order, eps_raw, 0, 0, -1, 0)
    return _kernels.pick(D, _kernels.scan_best)(D, order, eps_raw)


def find_improving(instance: Instance, tour: Tour,
                   policy: ScanPolicy | None = None) -> TwoChange | None:
    policy = policy or ScanPolicy()
    eps_raw = instance.to_raw(policy.resolve_epsilon(instance))
    i, j, g = _scan(instance, _order_array(tour), policy.strategy, eps_raw)
    if i < 0:
        return None
    return TwoChange(int(i), int(j), instance.to_weight(g))


class Verdict(NamedTuple):
    optimal: bool
    witness: TwoChange | None


def is_two_optimal(instance: Instance, tour: Tour, epsilon: Weight | None = None) -> Verdict:
    """2-optimality test; the witness is the lexicographically least improving pair."""
    change = find_improving(instance, tour, ScanPolicy(FIRST, epsilon))
    return Verdict(change is None, change)


@dataclass
class TwoOptResult:
    tour: Tour
    moves: int
    initial_length: Weight
    final_length: Weight
    # length after each applied move, starting with the initial length
    trace: list[Weight] = field(default_factory=list)


def run_two_opt(instance: Instance, start: Tour,
                policy: ScanPolicy | None = None,
                max_moves: int | None = None) -> TwoOptResult:
    """Apply improving 2-changes until none is left.

    The first-improvement scan restarts at the least pair after every move,
    but skips work it can prove redundant: rows before the last move's first
    position were free of improving pairs, and of their partners only the
    edges inside the reversed span have changed.  The move sequence is the
    same as with a full rescan.
    """
    policy = policy or ScanPolicy()
    eps_raw = instance.to_raw(policy.resolve_epsilon(instance))
    D = instance.matrix
    order = _order_array(start)
    reverse = _kernels.pick(D, _kernels.reverse_segment)

    length = start.length
    trace = [length]
    moves = 0
    if policy.strategy == FIRST:
        scan = _kernels.pick(D, _kernels.scan_first)
        i, j, g = scan(D, order, eps_raw, 0, 0, -1, 0)
    else:
        scan = _kernels.pick(D, _kernels.scan_best)
        i, j, g = scan(D, order, eps_raw)
    while i >= 0 and (max_moves is None or moves < max_moves):
        i, j = int(i), int(j)
        reverse(order, i + 1, j)
        length = length - instance.to_weight(g)
        trace.append(length)
        moves += 1
        if policy.strategy == FIRST:
            i, j, g = scan(D, order, eps_raw, i, i, j, i)
        else:
            i, j, g = scan(D, order, eps_raw)

    final_order = tuple(order.tolist())
    if instance.is_exact:
        final = Tour(final_order, length)
    else:
        # incremental float lengths drift; report the recomputed one
        final = Tour(final_order, tour_length(instance, final_order))
    return TwoOptResult(final, moves, start.length, final.length, trace)
