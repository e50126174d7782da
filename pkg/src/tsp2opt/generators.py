"""Instance families: the tight lower-bound construction and random benchmarks.

Lower-bound family
------------------
For ``k >= 2`` the instance has ``n = 2k^2`` vertices ``v(i,j)`` and
``w(i,j)``, ``1 <= i, j <= k``.  The ``v``'s and ``w``'s are the two halves;
for fixed ``i`` the sets ``V_i = {v(i,.)}`` and ``W_i = {w(i,.)}`` are
sections.  Weights: 1 across halves; within a half, 0 inside a section and 2
between sections.  Vertices are flattened as::

    v(i,j) -> (i-1)k + (j-1)
    w(i,j) -> k^2 + (i-1)k + (j-1)

``tour_T`` walks each section pair ``V_i, W_i`` in turn and has length ``2k``
(optimal).  ``tour_Tprime`` alternates ``v(i,j) -> w(j,i) -> v(i,j+1)`` and has
``2k^2`` unit edges, yet admits no improving 2-change.

Random families
---------------
Each instance ``index`` of a :class:`RandomFamilySpec` draws from its own
``numpy.random.Generator(PCG64(seed + index))``, so generating instances one
at a time, in any order or in parallel, reproduces the serial output.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .instance import EXACT, FLOAT, Instance, Tour, make_tour

PAPER_LB = "paper-lb"
EUCLIDEAN = "random-euclidean"
METRIC_CLOSURE = "random-metric"
RANDOM_FAMILIES = (EUCLIDEAN, METRIC_CLOSURE)

# denominator of the dyadic weights drawn for exact metric-closure instances
DYADIC_BITS = 32


class Label(NamedTuple):
    half: str
    i: int
    j: int

    def __str__(self):
        return f"{self.half}_{self.i}_{self.j}"


@dataclass(frozen=True)
class SectionedInstance:
    k: int
    instance: Instance
    label_map: tuple[Label, ...]
    tour_T: Tour
    tour_Tprime: Tour

    def index(self, half: str, i: int, j: int) -> int:
        return flat_index(self.k, half, i, j)

    def comments(self) -> list[str]:
        return [f"{v} = {lab}" for v, lab in enumerate(self.label_map)]


def flat_index(k: int, half: str, i: int, j: int) -> int:
    base = 0 if half == "v" else k * k
    return base + (i - 1) * k + (j - 1)


def paper_lower_bound(k: int) -> SectionedInstance:
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    n = 2 * k * k
    labels = tuple(Label(h, i, j) for h in "vw"
                   for i in range(1, k + 1) for j in range(1, k + 1))
    weights = [[0] * n for _ in range(n)]
    for a, la in enumerate(labels):
        for b, lb in enumerate(labels):
            if la.half != lb.half:
                weights[a][b] = 1
            elif la.i != lb.i:
                weights[a][b] = 2
    inst = Instance.from_weights(weights, mode=EXACT, name=f"{PAPER_LB}-k{k}")

    v = lambda i, j: flat_index(k, "v", i, j)  # noqa: E731
    w = lambda i, j: flat_index(k, "w", i, j)  # noqa: E731
    order_T = []
    for i in range(1, k + 1):
        order_T += [v(i, j) for j in range(1, k + 1)]
        order_T += [w(i, j) for j in range(1, k + 1)]
    order_Tp = []
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            order_Tp += [v(i, j), w(j, i)]
    return SectionedInstance(k, inst, labels, make_tour(inst, order_T),
                             make_tour(inst, order_Tp))


@dataclass(frozen=True)
class RandomFamilySpec:
    family: str
    n: int
    seed: int = 0
    count: int = 1
    exact: bool = False

    def __post_init__(self):
        if self.family not in RANDOM_FAMILIES:
            raise ValueError(f"unknown random family {self.family!r}")
        if self.n < 4:
            raise ValueError(f"n must be at least 4, got {self.n}")
        if self.count < 1:
            raise ValueError(f"count must be at least 1, got {self.count}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.exact and self.family == EUCLIDEAN:
            raise ValueError("euclidean instances are float only")


def rng_for(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed + index))


def euclidean_instance(spec: RandomFamilySpec, index: int) -> Instance:
    pts = rng_for(spec.seed, index).random((spec.n, 2))
    dx = pts[:, None, 0] - pts[None, :, 0]
    dy = pts[:, None, 1] - pts[None, :, 1]
    return Instance(np.hypot(dx, dy), 1, FLOAT, _name(spec, index))


def random_euclidean(spec: RandomFamilySpec) -> list[Instance]:
    if spec.family != EUCLIDEAN:
        raise ValueError(f"spec family is {spec.family!r}")
    return [euclidean_instance(spec, idx) for idx in range(spec.count)]


def metric_closure_instance(spec: RandomFamilySpec, index: int) -> Instance:
    rng = rng_for(spec.seed, index)
    n = spec.n
    iu = np.triu_indices(n, 1)
    if spec.exact:
        raw = np.zeros((n, n), dtype=np.int64)
        raw[iu] = rng.integers(0, 1 << DYADIC_BITS, size=len(iu[0]), endpoint=True)
        raw = raw + raw.T
        closed = Instance.from_numerators(raw, 1 << DYADIC_BITS, _name(spec, index))
    else:
        raw = np.zeros((n, n))
        raw[iu] = rng.random(len(iu[0]))
        raw = raw + raw.T
        closed = Instance(raw, 1, FLOAT, _name(spec, index))
    return metric_closure(closed)


def random_metric_closure(spec: RandomFamilySpec) -> list[Instance]:
    if spec.family != METRIC_CLOSURE:
        raise ValueError(f"spec family is {spec.family!r}")
    return [metric_closure_instance(spec, idx) for idx in range(spec.count)]


def generate(spec: RandomFamilySpec) -> list[Instance]:
    if spec.family == EUCLIDEAN:
        return random_euclidean(spec)
    return random_metric_closure(spec)


def metric_closure(instance: Instance) -> Instance:
    """Replace every weight by its shortest-path distance (Floyd-Warshall).

    Float matrices are relaxed repeatedly until a full sweep changes nothing,
    at which point every rounded triangle sum is at least the direct weight.
    """
    D = instance.matrix.copy()
    while True:
        changed = False
        for k in range(instance.n):
            via = D[:, k, None] + D[None, k, :]
            shorter = via < D
            if shorter.any():
                D = np.where(shorter, via, D)
                changed = True
        if not changed or instance.is_exact:
            break
    if instance.is_exact:
        return Instance.from_numerators(D, instance.scale, instance.name)
    return Instance(D, 1, FLOAT, instance.name)


def _name(spec: RandomFamilySpec, index: int) -> str:
    suffix = "-exact" if spec.exact else ""
    return f"{spec.family}{suffix}-n{spec.n}-s{spec.seed}-{index}"
