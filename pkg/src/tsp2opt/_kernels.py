"""Compiled 2-change scans.

All kernels work on the raw weight matrix (float64, or int64 numerators in
exact mode) and a position -> vertex ``order`` array.  Pair ``(i, j)`` with
``i < j`` names the directed tour edges at positions ``i`` and ``j``; adjacent
pairs, including the wrap pair ``(0, n - 1)``, are never visited.  The gain
expression is evaluated left to right as
``w(a,b) + w(x,y) - w(a,x) - w(b,y)`` everywhere, so compiled and Python
evaluations agree bit for bit.

Object-dtype matrices (exact instances whose numerators overflow int64) fall
back to ``kernel.py_func``.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def scan_first(D, order, eps, rows_before, col_lo, col_hi, start_row):
    """Lexicographically least pair with gain > eps.

    Rows below ``rows_before`` are only scanned over columns
    ``[col_lo, col_hi]``; rows from ``start_row`` on are scanned fully.  With
    ``rows_before = start_row = 0`` this is a plain full scan.  Returns
    ``(i, j, gain)`` or ``(-1, -1, gain_placeholder)``.
    """
    n = order.shape[0]
    zero = D[0, 0]
    for r in range(rows_before):
        a = order[r]
        b = order[r + 1]
        dab = D[a, b]
        lo = max(col_lo, r + 2)
        hi = col_hi
        if r == 0 and hi == n - 1:
            hi = n - 2
        for s in range(lo, hi + 1):
            x = order[s]
            y = order[(s + 1) % n]
            g = dab + D[x, y] - D[a, x] - D[b, y]
            if g > eps:
                return r, s, g
    for i in range(start_row, n - 2):
        a = order[i]
        b = order[i + 1]
        dab = D[a, b]
        jmax = n - 1 if i > 0 else n - 2
        for j in range(i + 2, jmax + 1):
            x = order[j]
            y = order[(j + 1) % n]
            g = dab + D[x, y] - D[a, x] - D[b, y]
            if g > eps:
                return i, j, g
    return -1, -1, zero


@njit(cache=True)
def scan_best(D, order, eps):
    """Pair with maximal gain > eps; ties go to the least ``(i, j)``."""
    n = order.shape[0]
    bi = -1
    bj = -1
    bg = D[0, 0]
    found = False
    for i in range(n - 2):
        a = order[i]
        b = order[i + 1]
        dab = D[a, b]
        jmax = n - 1 if i > 0 else n - 2
        for j in range(i + 2, jmax + 1):
            x = order[j]
            y = order[(j + 1) % n]
            g = dab + D[x, y] - D[a, x] - D[b, y]
            if g > eps and (not found or g > bg):
                bi = i
                bj = j
                bg = g
                found = True
    return bi, bj, bg


@njit(cache=True)
def reverse_segment(order, lo, hi):
    while lo < hi:
        t = order[lo]
        order[lo] = order[hi]
        order[hi] = t
        lo += 1
        hi -= 1


def pick(D, kernel):
    """Compiled kernel for numeric matrices, pure Python for object ones."""
    if D.dtype == np.object_:
        return kernel.py_func
    return kernel
