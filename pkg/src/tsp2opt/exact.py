"""Exact optimal tours for small instances.

Two independent routes: exhaustive enumeration of all ``(n-1)!/2`` cycles and
the Held-Karp subset dynamic program.  Both return a tour that starts at
vertex 0, so the certificate module can embed it directly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .instance import Instance, Tour, make_tour


class SolverLimitError(ValueError):
    """Instance too large for the requested exact solver."""


@dataclass(frozen=True)
class SolverLimits:
    max_n_brute: int = 10
    max_n_heldkarp: int = 20

    def __post_init__(self):
        if self.max_n_brute > self.max_n_heldkarp:
            raise ValueError("max_n_brute must not exceed max_n_heldkarp")


DEFAULT_LIMITS = SolverLimits()


@lru_cache(maxsize=8)
def _cycles(n: int) -> np.ndarray:
    # Permutations of 1..n-1 in lexicographic order, keeping one orientation
    # per cycle: successor of 0 < predecessor of 0.
    perms = np.array(list(itertools.permutations(range(1, n))), dtype=np.intp)
    perms = perms[perms[:, 0] < perms[:, -1]]
    perms.setflags(write=False)
    return perms


def brute_force_opt(instance: Instance, limits: SolverLimits = DEFAULT_LIMITS) -> Tour:
    """Minimum tour by enumeration.

    Ties go to the lexicographically least vertex order starting at 0.
    """
    n = instance.n
    if n > limits.max_n_brute:
        raise SolverLimitError(f"brute force limited to n <= {limits.max_n_brute}, got {n}")
    D = instance.matrix
    perms = _cycles(n)
    lengths = D[0, perms[:, 0]] + D[perms[:, -1], 0]
    for k in range(n - 2):
        lengths = lengths + D[perms[:, k], perms[:, k + 1]]
    best = int(np.argmin(lengths)) if D.dtype != np.object_ else min(
        range(len(lengths)), key=lengths.__getitem__)
    return make_tour(instance, (0, *perms[best].tolist()))


def held_karp_opt(instance: Instance, limits: SolverLimits = DEFAULT_LIMITS) -> Tour:
    """Minimum tour by dynamic programming over (visited subset, endpoint).

    Vertex 0 is the fixed start.  ``cost[mask, j]`` is the shortest path from
    0 through exactly the vertices in ``mask`` (bit ``j`` = vertex ``j+1``),
    ending at vertex ``j+1``.  Masks are processed layer by layer in popcount
    order with the inner minimisation vectorised.
    """
    n = instance.n
    if n > limits.max_n_heldkarp:
        raise SolverLimitError(f"Held-Karp limited to n <= {limits.max_n_heldkarp}, got {n}")
    D = instance.matrix
    m = n - 1
    full = (1 << m) - 1
    if D.dtype == np.float64:
        inf = np.inf
    else:
        inf = int(D.max()) * n + 1
    cost = np.full((1 << m, m), inf, dtype=D.dtype)
    parent = np.full((1 << m, m), -1, dtype=np.int16)
    for j in range(m):
        cost[1 << j, j] = D[0, j + 1]

    masks = np.arange(1 << m)
    popcount = np.bitwise_count(masks)
    into = D[1:, 1:]
    for size in range(2, m + 1):
        layer = masks[popcount == size]
        for j in range(m):
            sel = layer[(layer >> j) & 1 == 1]
            prev = sel ^ (1 << j)
            cand = cost[prev] + into[:, j][None, :]
            k = _argmin_rows(cand)
            cost[sel, j] = cand[np.arange(len(sel)), k]
            parent[sel, j] = k

    closing = cost[full] + D[1:, 0]
    j = int(_argmin_rows(closing[None, :])[0])
    path = []
    mask = full
    while j >= 0:
        path.append(j + 1)
        k = int(parent[mask, j])
        mask ^= 1 << j
        j = k
    return make_tour(instance, [0] + path[::-1])


def _argmin_rows(a: np.ndarray) -> np.ndarray:
    if a.dtype != np.object_:
        return np.argmin(a, axis=1)
    return np.array([min(range(len(r)), key=r.__getitem__) for r in a], dtype=np.intp)

