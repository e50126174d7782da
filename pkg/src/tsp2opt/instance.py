"""Metric TSP instances and directed tours.

An :class:`Instance` is a complete graph on ``n`` vertices with a symmetric,
non-negative weight table and zero diagonal.  Every instance carries one of two
numeric modes:

``exact``
    Weights are rationals.  Internally they are stored as integer numerators
    over one common denominator (``scale``), so every downstream sum and
    comparison is carried out in integer arithmetic without rounding.

``float``
    Weights are IEEE doubles.

Tours are directed cycles given by a vertex order; the edge set is
``order[i] -> order[i + 1 mod n]``.

File formats
------------
Instance files are line oriented::

    NAME: square
    MODE: EXACT
    N: 4
    WEIGHTS:
    0 1 2 1
    1 0 1 2
    2 1 0 1
    1 2 1 0

Exact entries are ``p`` or ``p/q``; float entries are decimal literals.  Lines
starting with ``#`` are comments and may appear anywhere.  Tour files hold one
line of whitespace separated vertex indices plus optional comment lines.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

Weight = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

# int64 headroom: gains add four entries, Held-Karp sums up to n entries.
_INT64_SAFE = 2**62

_EXACT_TOKEN = re.compile(r"^(\d+)(?:/(\d+))?$")


class InstanceError(ValueError):
    """Invalid instance data (structure, symmetry, sign, diagonal, format)."""


class TourError(ValueError):
    """Invalid tour (not a permutation, or wrong size for its instance)."""


def parse_weight(token: str, mode: str) -> Weight:
    """Parse a single weight entry in the given mode."""
    if mode == EXACT:
        m = _EXACT_TOKEN.match(token)
        if m is None:
            raise InstanceError(f"bad exact weight {token!r}; expected p or p/q")
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise InstanceError(f"zero denominator in {token!r}")
        return Fraction(int(m.group(1)), den)
    try:
        value = float(token)
    except ValueError:
        raise InstanceError(f"bad float weight {token!r}") from None
    if not math.isfinite(value):
        raise InstanceError(f"non-finite weight {token!r}")
    if value < 0:
        raise InstanceError(f"negative weight {token!r}")
    return value


def format_weight(value: Weight) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))


def _as_fraction(value) -> Fraction:
    if isinstance(value, str):
        return parse_weight(value, EXACT)
    if isinstance(value, float):
        return Fraction(value)
    return Fraction(value)


@dataclass(frozen=True, eq=False)
class Instance:
    """Complete graph with a symmetric weight table.

    Build instances with :meth:`from_weights` rather than the raw constructor.
    ``matrix`` holds float64 weights in float mode and integer numerators
    (int64, or Python ints in an object array when int64 could overflow) in
    exact mode; the true weight is ``matrix[i, j] / scale``.
    """

    matrix: np.ndarray
    scale: int
    mode: str
    name: str = "instance"

    def __post_init__(self):
        if self.mode not in MODES:
            raise InstanceError(f"unknown mode {self.mode!r}")
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InstanceError(f"weight table must be square, got shape {m.shape}")
        n = m.shape[0]
        if n < 3:
            raise InstanceError(f"need at least 3 vertices, got {n}")
        bad = _first_bad_entry(m)
        if bad is not None:
            raise bad
        m.setflags(write=False)

    @classmethod
    def from_weights(cls, rows: Sequence[Sequence], mode: str | None = None,
                     name: str = "instance") -> "Instance":
        """Build an instance from a nested sequence of weights.

        ``mode`` defaults to exact when every entry is an int, Fraction or
        rational string, and to float otherwise.
        """
        rows = [list(r) for r in rows]
        n = len(rows)
        for i, r in enumerate(rows):
            if len(r) != n:
                raise InstanceError(f"row {i} has {len(r)} entries, expected {n}")
        if mode is None:
            exact_types = (int, Fraction, str)
            mode = EXACT if all(isinstance(v, exact_types) for r in rows for v in r) else FLOAT
        if mode == FLOAT:
            matrix = np.array([[float(v) for v in r] for r in rows], dtype=np.float64)
            return cls(matrix, 1, FLOAT, name)
        fracs = [[_as_fraction(v) for v in r] for r in rows]
        scale = math.lcm(*(v.denominator for r in fracs for v in r)) if n else 1
        nums = [[v.numerator * (scale // v.denominator) for v in r] for r in fracs]
        return cls(_int_matrix(nums, n), scale, EXACT, name)

    @classmethod
    def from_numerators(cls, numerators: np.ndarray, scale: int,
                        name: str = "instance") -> "Instance":
        """Exact instance from integer numerators over a common denominator."""
        nums = np.asarray(numerators).tolist()
        g = math.gcd(scale, *(v for r in nums for v in r))
        if g > 1:
            nums = [[v // g for v in r] for r in nums]
            scale //= g
        return cls(_int_matrix(nums, len(nums)), scale, EXACT, name)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_exact(self) -> bool:
        return self.mode == EXACT

    def weight(self, i: int, j: int) -> Weight:
        v = self.matrix[i, j]
        if self.is_exact:
            return Fraction(int(v), self.scale)
        return float(v)

    @cached_property
    def weights(self) -> tuple[tuple[Weight, ...], ...]:
        if self.is_exact:
            s = self.scale
            return tuple(tuple(Fraction(int(v), s) for v in r) for r in self.matrix.tolist())
        return tuple(tuple(r) for r in self.matrix.tolist())

    def to_weight(self, raw) -> Weight:
        """Convert a raw matrix-unit quantity (e.g. a kernel gain) to a Weight."""
        if self.is_exact:
            return Fraction(int(raw), self.scale)
        return float(raw)

    def to_raw(self, value: Weight):
        """Convert a Weight threshold into matrix units (floored in exact mode)."""
        if self.is_exact:
            return math.floor(Fraction(value) * self.scale)
        return float(value)

    def with_name(self, name: str) -> "Instance":
        return Instance(self.matrix.copy(), self.scale, self.mode, name)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.mode == other.mode and self.name == other.name
                and self.scale == other.scale and self.n == other.n
                and bool(np.array_equal(self.matrix, other.matrix)))

    def __hash__(self):
        return hash((self.mode, self.name, self.n))

    def __repr__(self):
        return f"Instance(name={self.name!r}, n={self.n}, mode={self.mode!r})"


def _int_matrix(nums: list[list[int]], n: int) -> np.ndarray:
    biggest = max((abs(v) for r in nums for v in r), default=0)
    if biggest * 4 * max(n, 1) < _INT64_SAFE:
        return np.array(nums, dtype=np.int64).reshape(n, n)
    out = np.empty((n, n), dtype=object)
    for i, r in enumerate(nums):
        for j, v in enumerate(r):
            out[i, j] = v
    return out


def _first_bad_entry(m: np.ndarray) -> InstanceError | None:
    neg = np.argwhere(m < 0)
    if len(neg):
        i, j = map(int, neg[0])
        return _located(f"negative weight at ({i}, {j})", i, j)
    diag = np.nonzero(np.diagonal(m) != 0)[0]
    if len(diag):
        i = int(diag[0])
        return _located(f"nonzero diagonal entry at ({i}, {i})", i, i)
    asym = np.argwhere(m != m.T)
    if len(asym):
        # row-major first hit is upper-triangle; blame the row read second
        i, j = map(int, asym[0])
        return _located(f"asymmetric weights at ({i}, {j}) and ({j}, {i})", j, i)
    return None


def _located(msg: str, row: int, col: int) -> InstanceError:
    err = InstanceError(msg)
    err.row, err.col = row, col
    return err


@dataclass(frozen=True)
class Tour:
    """Directed cycle ``order[0] -> order[1] -> ... -> order[0]``."""

    order: tuple[int, ...]
    length: Weight

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(v) for v in self.order))
        _check_permutation(self.order)

    @property
    def n(self) -> int:
        return len(self.order)

    def edges(self) -> list[tuple[int, int]]:
        o = self.order
        return [(o[i], o[(i + 1) % len(o)]) for i in range(len(o))]


def _check_permutation(order: Sequence[int]) -> None:
    n = len(order)
    seen = [False] * n
    for v in order:
        if not 0 <= v < n:
            raise TourError(f"vertex index {v} out of range 0..{n - 1}")
        if seen[v]:
            raise TourError(f"vertex {v} repeated in tour")
        seen[v] = True


def make_tour(instance: Instance, order: Iterable[int]) -> Tour:
    order = tuple(int(v) for v in order)
    if len(order) != instance.n:
        raise TourError(f"tour has {len(order)} vertices, instance has {instance.n}")
    return Tour(order, tour_length(instance, order))


def tour_length(instance: Instance, tour: Tour | Sequence[int]) -> Weight:
    """Length of the directed cycle, exact in exact mode.

    Float lengths use a correctly rounded sum, so rotating or reversing a tour
    never changes its length.
    """
    order = tour.order if isinstance(tour, Tour) else tuple(tour)
    if len(order) != instance.n:
        raise TourError(f"tour has {len(order)} vertices, instance has {instance.n}")
    idx = np.asarray(order, dtype=np.intp)
    steps = instance.matrix[idx, np.roll(idx, -1)]
    if instance.is_exact:
        return Fraction(sum(int(v) for v in steps.tolist()), instance.scale)
    return math.fsum(steps.tolist())


def same_cycle(a: Sequence[int], b: Sequence[int], directed: bool = False) -> bool:
    """True if ``b`` is a rotation of ``a`` (or of its reversal when undirected)."""
    a, b = list(a), list(b)
    if len(a) != len(b) or sorted(a) != sorted(b):
        return False
    if not a:
        return True
    candidates = [b] if directed else [b, b[::-1]]
    for c in candidates:
        k = c.index(a[0])
        if c[k:] + c[:k] == a:
            return True
    return False


def check_metric(instance: Instance, tol: float = 0.0) -> list[tuple[int, int, int]]:
    """Triples ``(i, j, k)`` with ``w[i][k] > w[i][j] + w[j][k] + tol``.

    Weights are symmetric, so ``(k, j, i)`` fails exactly when ``(i, j, k)``
    does; each violation is listed once, with ``i < k``.  An empty list means
    the instance is metric.  ``tol`` only applies in float mode; exact
    instances are always checked without slack.
    """
    m = instance.matrix
    exact = instance.is_exact
    violations = []
    for j in range(instance.n):
        through = m[:, j, None] + m[None, j, :]
        bad = m > through if exact else m > through + tol
        for i, k in np.argwhere(bad).tolist():
            if i < k:
                violations.append((i, j, k))
    violations.sort()
    return violations


def write_instance(instance: Instance, comments: Iterable[str] = ()) -> str:
    lines = [
        f"NAME: {instance.name}",
        f"MODE: {instance.mode.upper()}",
        f"N: {instance.n}",
    ]
    lines += [f"# {c}" for c in comments]
    lines.append("WEIGHTS:")
    for row in instance.weights:
        lines.append(" ".join(format_weight(v) for v in row))
    return "\n".join(lines) + "\n"


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def _header(lines, key: str) -> tuple[int, str]:
    try:
        lineno, line = next(lines)
    except StopIteration:
        raise InstanceError(f"unexpected end of file, expected {key}:") from None
    prefix = key + ":"
    if not line.upper().startswith(prefix):
        raise InstanceError(f"line {lineno}: expected '{prefix}', got {line!r}")
    return lineno, line[len(prefix):].strip()


def parse_instance(text: str) -> Instance:
    lines = _content_lines(text)
    _, name = _header(lines, "NAME")
    lineno, mode = _header(lines, "MODE")
    mode = mode.lower()
    if mode not in MODES:
        raise InstanceError(f"line {lineno}: MODE must be EXACT or FLOAT, got {mode!r}")
    lineno, n_text = _header(lines, "N")
    try:
        n = int(n_text)
    except ValueError:
        raise InstanceError(f"line {lineno}: N must be an integer, got {n_text!r}") from None
    if n < 3:
        raise InstanceError(f"line {lineno}: need N >= 3, got {n}")
    lineno, rest = _header(lines, "WEIGHTS")
    if rest:
        raise InstanceError(f"line {lineno}: unexpected text after WEIGHTS:")

    rows: list[list[Weight]] = []
    row_lines: list[int] = []
    for lineno, line in lines:
        if len(rows) == n:
            raise InstanceError(f"line {lineno}: extra content after {n} weight rows")
        tokens = line.split()
        if len(tokens) != n:
            raise InstanceError(f"line {lineno}: expected {n} entries, got {len(tokens)}")
        try:
            rows.append([parse_weight(t, mode) for t in tokens])
        except InstanceError as exc:
            raise InstanceError(f"line {lineno}: {exc}") from None
        row_lines.append(lineno)
    if len(rows) != n:
        raise InstanceError(f"expected {n} weight rows, got {len(rows)}")

    try:
        return Instance.from_weights(rows, mode=mode, name=name)
    except InstanceError as exc:
        row = getattr(exc, "row", None)
        if row is None:
            raise
        raise InstanceError(f"line {row_lines[row]}: {exc}") from None


def write_tour(tour: Tour | Sequence[int], comments: Iterable[str] = ()) -> str:
    order = tour.order if isinstance(tour, Tour) else tour
    lines = [f"# {c}" for c in comments]
    lines.append(" ".join(str(v) for v in order))
    return "\n".join(lines) + "\n"


def parse_tour_order(text: str) -> tuple[int, ...]:
    """Vertex order from a tour file; validates the permutation property."""
    order: list[int] = []
    for lineno, line in _content_lines(text):
        if order:
            raise TourError(f"line {lineno}: tour must be on a single line")
        try:
            order = [int(t) for t in line.split()]
        except ValueError:
            raise TourError(f"line {lineno}: non-integer vertex index") from None
    if not order:
        raise TourError("empty tour file")
    _check_permutation(order)
    return tuple(order)


def parse_tour(text: str, instance: Instance) -> Tour:
    return make_tour(instance, parse_tour_order(text))
