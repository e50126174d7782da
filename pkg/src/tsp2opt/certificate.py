"""Packing certificate for the sqrt(n/2) bound on 2-optimal tours.

Given a (presumed) optimal tour ``T`` scaled to length 1 and a candidate tour
``T'``, every vertex is placed on the unit circle ``[0, 1)`` by its distance
along ``T`` from a base vertex.  Each directed edge ``(u, v)`` of ``T'`` owns
an open L1 ball ("diamond") on the torus ``[0, 1)^2``, centred at
``(pos_p[u], pos_q[v])`` with radius ``w(u, v) / w(T)``.  On a metric
instance two overlapping diamonds yield an improving 2-change, so for a
2-optimal ``T'`` the diamonds are pairwise disjoint.  Each has area
``2 r^2``; packing them into the unit square gives ``2 * sum(r^2) <= 1`` and
then ``sum(r) <= sqrt(n * sum(r^2)) <= sqrt(n / 2)``.

Exact instances are certified in rational arithmetic with no slack.  Float
instances use an absolute tolerance of :data:`FLOAT_TOL` on every inequality,
and the report says so.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .instance import Instance, Tour, Weight, check_metric
from .twoopt import TwoChange, gain

FLOAT_TOL = 1e-9


class CertificateError(ValueError):
    """Precondition failure: zero-length reference tour, non-metric instance,
    or a radius above 1/2."""


def circle_metric(x, y):
    """Shorter arc length between two points of the unit circle ``[0, 1)``."""
    if not (0 <= x < 1 and 0 <= y < 1):
        raise ValueError(f"points must lie in [0, 1), got {x}, {y}")
    d = abs(x - y)
    return min(d, 1 - d)


def torus_distance(c1, c2):
    return circle_metric(c1[0], c2[0]) + circle_metric(c1[1], c2[1])


@dataclass(frozen=True)
class CircleEmbedding:
    reference_tour: Tour
    base: int
    positions: tuple  # vertex -> coordinate in [0, 1)

    def __getitem__(self, v: int):
        return self.positions[v]


def _frac(x):
    return x - math.floor(x)


def embed(instance: Instance, optimal_tour: Tour, p: int) -> CircleEmbedding:
    """Positions along ``optimal_tour`` from ``p``, normalised to total length 1."""
    total = optimal_tour.length
    if total <= 0:
        raise CertificateError("reference tour has zero length; cannot normalise")
    order = optimal_tour.order
    n = len(order)
    start = order.index(p)
    positions = [None] * n
    acc = Fraction(0) if instance.is_exact else 0.0
    prev = p
    positions[p] = acc
    for step in range(1, n):
        v = order[(start + step) % n]
        acc = acc + instance.weight(prev, v)
        positions[v] = _frac(acc / total)
        prev = v
    if not instance.is_exact:
        positions = [x if x < 1.0 else 0.0 for x in positions]
    return CircleEmbedding(optimal_tour, p, tuple(positions))


def rebase_embedding(embedding: CircleEmbedding, new_base: int) -> CircleEmbedding:
    """Same embedding re-anchored at ``new_base`` (a rotation of the circle)."""
    shift = embedding.positions[new_base]
    positions = tuple(_wrap(x - shift) for x in embedding.positions)
    return CircleEmbedding(embedding.reference_tour, new_base, positions)


def _wrap(x):
    x = _frac(x)
    return 0.0 if isinstance(x, float) and x >= 1.0 else x


@dataclass(frozen=True)
class Diamond:
    center: tuple
    radius: Weight
    edge: tuple[int, int]


def diamonds_disjoint(d1: Diamond, d2: Diamond, tol: float = 0.0) -> bool:
    """Open L1 balls on the torus are disjoint iff the centre distance is at
    least the radius sum.  Empty (radius 0) diamonds are disjoint from all."""
    if d1.radius == 0 or d2.radius == 0:
        return True
    reach = d1.radius + d2.radius
    if tol:
        reach = reach - tol
    return torus_distance(d1.center, d2.center) >= reach


def diamond_area(d: Diamond, tol: float = 0.0):
    """Exact area ``2 r^2`` of an open L1 ball of radius ``r <= 1/2``."""
    if d.radius > (Fraction(1, 2) + tol if tol else Fraction(1, 2)):
        raise CertificateError(f"radius {d.radius} exceeds 1/2; formula does not apply")
    return 2 * d.radius * d.radius


def estimate_diamond_area(d: Diamond, grid_resolution: int = 1000) -> float:
    """Fraction of the grid ``{(i/R, j/R)}`` lying inside the open diamond."""
    if grid_resolution < 100:
        raise ValueError("grid_resolution must be at least 100")
    if d.radius == 0:
        return 0.0
    grid = np.arange(grid_resolution) / grid_resolution

    def arc(c):
        delta = np.abs(grid - float(c))
        return np.minimum(delta, 1.0 - delta)

    inside = arc(d.center[0])[:, None] + arc(d.center[1])[None, :] < float(d.radius)
    return float(np.count_nonzero(inside)) / grid_resolution**2


def build_diamonds(instance: Instance, candidate: Tour, emb_p: CircleEmbedding,
                   emb_q: CircleEmbedding, normalization) -> list[Diamond]:
    out = []
    for u, v in candidate.edges():
        r = instance.weight(u, v) / normalization
        out.append(Diamond((emb_p[u], emb_q[v]), r, (u, v)))
    return out


@dataclass
class CertificateReport:
    n: int
    mode: str
    p: int
    q: int
    normalization: Weight
    radii: list
    areas: list
    disjoint: bool
    violation_pair: tuple[int, int] | None
    witness: TwoChange | None
    sum_len: object          # normalised candidate length = achieved ratio
    sum_sq: object
    packing_lhs: object      # 2 * sum_sq = total diamond area
    packing_ok: bool
    am_qm_rhs: float         # sqrt(n * sum_sq)
    am_qm_ok: bool
    bound: object            # sqrt(n / 2), exact when n/2 is a square
    bound_ok: bool
    tolerance: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def ratio(self):
        return self.sum_len

    @property
    def total_area(self):
        return self.packing_lhs

    @property
    def ok(self) -> bool:
        return self.disjoint and self.packing_ok and self.am_qm_ok and self.bound_ok

    def to_kv(self) -> str:
        pair = "none" if self.violation_pair is None else "%d,%d" % self.violation_pair
        items = [
            ("n", self.n),
            ("mode", self.mode),
            ("p", self.p),
            ("q", self.q),
            ("normalization", _fmt(self.normalization)),
            ("sum_sq", _fmt(self.sum_sq)),
            ("packing_lhs", _fmt(self.packing_lhs)),
            ("am_qm_rhs", _fmt(self.am_qm_rhs)),
            ("bound", _fmt(self.bound)),
            ("ratio", _fmt(self.sum_len)),
            ("disjoint", "yes" if self.disjoint else "no"),
            ("violation_pair", pair),
            ("witness_gain", "none" if self.witness is None else _fmt(self.witness.gain)),
            ("packing_ok", _yn(self.packing_ok)),
            ("am_qm_ok", _yn(self.am_qm_ok)),
            ("bound_ok", _yn(self.bound_ok)),
            ("tolerance", _fmt(self.tolerance)),
        ]
        return "".join(f"{k}={v}\n" for k, v in items)

    def to_text(self) -> str:
        lines = [
            f"certificate for n={self.n} ({self.mode} mode, base p={self.p}, q={self.q})",
            f"  reference length (normalisation): {_fmt(self.normalization)}",
            f"  diamonds: {len(self.radii)}, max radius {_fmt(max(self.radii))}",
        ]
        if self.disjoint:
            lines.append("  pairwise disjoint: yes")
        else:
            i, j = self.violation_pair
            lines.append(f"  pairwise disjoint: NO, diamonds at positions {i} and {j} overlap")
            if self.witness is not None:
                lines.append(f"    improving 2-change ({self.witness.pos_i}, "
                             f"{self.witness.pos_j}) with gain {_fmt(self.witness.gain)}")
        lines += [
            f"  sum of squared radii: {_fmt(self.sum_sq)}",
            f"  total area 2*sum_sq = {_fmt(self.packing_lhs)} <= 1: {_yn(self.packing_ok)}",
            f"  sum of radii {_fmt(self.sum_len)} <= sqrt(n*sum_sq) = "
            f"{_fmt(self.am_qm_rhs)}: {_yn(self.am_qm_ok)}",
            f"  ratio {_fmt(self.sum_len)} <= sqrt(n/2) = {_fmt(self.bound)}: {_yn(self.bound_ok)}",
        ]
        if self.tolerance:
            lines.append(f"  float mode: inequalities checked with absolute tolerance "
                         f"{self.tolerance:g}")
        lines += [f"  note: {s}" for s in self.notes]
        lines.append("  verdict: " + ("all inequalities hold" if self.ok else "FAILED"))
        return "\n".join(lines) + "\n"


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def sqrt_half_n(n: int):
    """sqrt(n/2), as an exact integer when n = 2k^2."""
    if n % 2 == 0:
        k = math.isqrt(n // 2)
        if k * k == n // 2:
            return Fraction(k)
    return math.sqrt(n / 2)


def _leq_sqrt(lhs, radicand, tol: float) -> bool:
    """``lhs <= sqrt(radicand)``, decided exactly for rationals."""
    if isinstance(lhs, Fraction) and isinstance(radicand, Fraction):
        return lhs <= 0 or lhs * lhs <= radicand
    return float(lhs) <= math.sqrt(float(radicand)) + tol


def first_overlap(diamonds: Sequence[Diamond], tol: float = 0.0):
    """Lexicographically least overlapping pair of diamond indices, or None."""
    for a in range(len(diamonds)):
        if diamonds[a].radius == 0:
            continue
        for b in range(a + 1, len(diamonds)):
            if not diamonds_disjoint(diamonds[a], diamonds[b], tol):
                return a, b
    return None


def certify(instance: Instance, optimal_tour: Tour, candidate_tour: Tour,
            p: int | None = None, q: int | None = None,
            check_metricity: bool = True) -> CertificateReport:
    """Evaluate the packing inequality chain for ``candidate_tour``."""
    if optimal_tour.length <= 0:
        raise CertificateError("reference tour has zero length; cannot normalise")
    if optimal_tour.n != instance.n or candidate_tour.n != instance.n:
        raise CertificateError("tour size does not match instance")
    tol = 0.0 if instance.is_exact else FLOAT_TOL
    if check_metricity and check_metric(instance, tol=tol):
        raise CertificateError("instance violates the triangle inequality")
    p = optimal_tour.order[0] if p is None else p
    q = optimal_tour.order[0] if q is None else q

    L = optimal_tour.length
    emb_p = embed(instance, optimal_tour, p)
    emb_q = emb_p if q == p else embed(instance, optimal_tour, q)
    diamonds = build_diamonds(instance, candidate_tour, emb_p, emb_q, L)
    areas = [diamond_area(d, tol) for d in diamonds]
    radii = [d.radius for d in diamonds]

    pair = first_overlap(diamonds, tol)
    witness = None
    notes = []
    if pair is not None:
        a, b = pair
        try:
            witness = TwoChange(a, b, gain(instance, candidate_tour, a, b))
        except ValueError:
            notes.append("overlapping diamonds belong to adjacent edges")

    n = instance.n
    if instance.is_exact:
        sum_len = sum(radii, Fraction(0))
        sum_sq = sum((r * r for r in radii), Fraction(0))
        packing_lhs = 2 * sum_sq
        packing_ok = packing_lhs <= 1
        am_qm_ok = _leq_sqrt(sum_len, n * sum_sq, 0.0)
        bound_ok = sum_len <= 0 or sum_len * sum_len <= Fraction(n, 2)
    else:
        sum_len = math.fsum(radii)
        sum_sq = math.fsum(r * r for r in radii)
        packing_lhs = 2 * sum_sq
        packing_ok = packing_lhs <= 1 + tol
        am_qm_ok = _leq_sqrt(sum_len, n * sum_sq, tol)
        bound_ok = sum_len <= math.sqrt(n / 2) + tol
    if witness is not None and witness.gain <= 0:
        notes.append("overlap without a strictly improving 2-change; "
                     "reference tour may not be optimal or instance not metric")

    return CertificateReport(
        n=n, mode=instance.mode, p=p, q=q, normalization=L,
        radii=radii, areas=areas,
        disjoint=pair is None, violation_pair=pair, witness=witness,
        sum_len=sum_len, sum_sq=sum_sq, packing_lhs=packing_lhs, packing_ok=packing_ok,
        am_qm_rhs=math.sqrt(n * sum_sq), am_qm_ok=am_qm_ok,
        bound=sqrt_half_n(n), bound_ok=bound_ok, tolerance=tol, notes=notes,
    )


def _pair_distances(diamonds: Sequence[Diamond]) -> list:
    return [torus_distance(diamonds[a].center, diamonds[b].center)
            for a in range(len(diamonds)) for b in range(a + 1, len(diamonds))]


def _verdicts(diamonds: Sequence[Diamond], tol: float) -> list[bool]:
    return [diamonds_disjoint(diamonds[a], diamonds[b], tol)
            for a in range(len(diamonds)) for b in range(a + 1, len(diamonds))]


def invariance_check(instance: Instance, optimal_tour: Tour, candidate_tour: Tour,
                     trials: int = 10, seed: int = 0,
                     rebases: Sequence[tuple[int, int]] | None = None) -> bool:
    """Areas, disjointness verdicts and centre distances do not depend on the
    base vertices.

    The baseline uses ``p = q = optimal_tour.order[0]``; each trial re-anchors
    both embeddings at random vertices (or at the explicit ``rebases``).
    Exact instances must match exactly, float ones within ``FLOAT_TOL``.
    """
    tol = 0.0 if instance.is_exact else FLOAT_TOL
    L = optimal_tour.length
    base = embed(instance, optimal_tour, optimal_tour.order[0])
    ref = build_diamonds(instance, candidate_tour, base, base, L)
    ref_areas = [diamond_area(d, tol) for d in ref]
    ref_dist = _pair_distances(ref)
    ref_verdicts = _verdicts(ref, tol)

    if rebases is None:
        rng = np.random.default_rng(seed)
        rebases = [tuple(int(v) for v in rng.integers(0, instance.n, size=2))
                   for _ in range(trials)]
    for p, q in rebases:
        emb_p = rebase_embedding(base, p)
        emb_q = rebase_embedding(base, q)
        ds = build_diamonds(instance, candidate_tour, emb_p, emb_q, L)
        if [diamond_area(d, tol) for d in ds] != ref_areas:
            return False
        if _verdicts(ds, tol) != ref_verdicts:
            return False
        dist = _pair_distances(ds)
        if instance.is_exact:
            if dist != ref_dist:
                return False
        elif any(abs(a - b) > tol for a, b in zip(dist, ref_dist)):
            return False
    return True
