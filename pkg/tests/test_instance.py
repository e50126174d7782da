import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tsp2opt import (Instance, InstanceError, TourError, check_metric, make_tour,
                     paper_lower_bound, parse_instance, parse_tour, same_cycle, tour_length,
                     write_instance, write_tour)
from tsp2opt.generators import RandomFamilySpec, random_euclidean, random_metric_closure
from tsp2opt.instance import parse_tour_order


def test_lower_bound_tour_lengths():
    sec = paper_lower_bound(4)
    assert tour_length(sec.instance, sec.tour_T) == 8
    assert tour_length(sec.instance, sec.tour_Tprime) == 32


def test_three_vertex_tour_is_edge_sum():
    inst = Instance.from_weights([[0, 2, 3], [2, 0, 4], [3, 4, 0]])
    for order in ([0, 1, 2], [0, 2, 1], [2, 1, 0]):
        assert tour_length(inst, order) == 9


def test_tour_length_dimension_mismatch():
    inst = Instance.from_weights([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    with pytest.raises(TourError):
        tour_length(inst, [0, 1, 2, 3])
    with pytest.raises(TourError):
        make_tour(inst, [0, 1])


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_lower_bound_instance_is_metric(k):
    assert check_metric(paper_lower_bound(k).instance) == []


def test_check_metric_reports_violation():
    inst = Instance.from_weights([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert check_metric(inst) == [(0, 1, 2)]


def test_check_metric_closure_exhaustive():
    spec = RandomFamilySpec("random-metric", 9, seed=3, count=3, exact=True)
    for inst in random_metric_closure(spec):
        assert check_metric(inst) == []
        w = inst.weights
        n = inst.n
        assert all(w[i][k] <= w[i][j] + w[j][k]
                   for i in range(n) for j in range(n) for k in range(n))


def test_check_metric_float_tolerance():
    inst = Instance.from_weights([[0, 1, 2 + 1e-13], [1, 0, 1], [2 + 1e-13, 1, 0]], mode="float")
    assert check_metric(inst) != []
    assert check_metric(inst, tol=1e-12) == []


MINIMAL = """NAME: tri
MODE: EXACT
N: 3
WEIGHTS:
0 1 1
1 0 1
1 1 0
"""


def test_parse_minimal():
    inst = parse_instance(MINIMAL)
    assert inst.n == 3 and inst.name == "tri" and inst.is_exact
    assert inst.weight(0, 2) == 1


def test_parse_rational_entry_exact():
    text = MINIMAL.replace("0 1 1\n1 0 1", "0 3/2 1\n3/2 0 1")
    inst = parse_instance(text)
    assert inst.weight(0, 1) == Fraction(3, 2)
    assert isinstance(inst.weight(0, 1), Fraction)


@pytest.mark.parametrize("text, line, fragment", [
    (MINIMAL.replace("0 1 1\n1 0 1", "0 2 1\n1 0 1"), 6, "asymmetric"),
    (MINIMAL.replace("1 1 0", "1 1 7"), 7, "diagonal"),
    (MINIMAL.replace("MODE: EXACT", "MODE: FLOAT").replace("1 1 0", "-1 1 0"), 7, "negative"),
    (MINIMAL.replace("NAME: tri", "NAM tri"), 1, "NAME"),
    (MINIMAL.replace("N: 3", "N: x"), 3, "integer"),
    (MINIMAL.replace("1 0 1\n", "1 0\n"), 6, "entries"),
    (MINIMAL.replace("0 1 1\n", "0 1.5 1\n"), 5, "exact weight"),
])
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(InstanceError) as info:
        parse_instance(text)
    msg = str(info.value)
    assert fragment in msg
    assert f"line {line}" in msg


def test_parse_rejects_rather_than_symmetrizes():
    with pytest.raises(InstanceError, match="asymmetric"):
        Instance.from_weights([[0, 1, 2], [1, 0, 1], [3, 1, 0]])


def test_parse_requires_three_vertices():
    with pytest.raises(InstanceError):
        parse_instance("NAME: x\nMODE: EXACT\nN: 2\nWEIGHTS:\n0 1\n1 0\n")


def test_comments_are_ignored():
    text = MINIMAL.replace("WEIGHTS:", "# 0 = v_1_1\nWEIGHTS:\n# mid comment")
    assert parse_instance(text) == parse_instance(MINIMAL)


def test_roundtrip_exact():
    inst = Instance.from_weights([[0, "3/2", 5], ["3/2", 0, "7/3"], [5, "7/3", 0]], name="r")
    again = parse_instance(write_instance(inst, comments=["hello"]))
    assert again == inst
    assert again.weights == inst.weights


def test_roundtrip_float_bit_exact():
    inst = random_euclidean(RandomFamilySpec("random-euclidean", 12, seed=5))[0]
    again = parse_instance(write_instance(inst))
    assert again == inst
    assert np.array_equal(again.matrix, inst.matrix)


def test_roundtrip_large_denominators_object_dtype():
    big = Fraction(1, 2**70 + 1)
    inst = Instance.from_weights([[0, big, 1], [big, 0, 1], [1, 1, 0]])
    assert inst.matrix.dtype == object
    assert parse_instance(write_instance(inst)) == inst
    assert inst.weight(0, 1) == big


def test_parse_tour():
    inst = parse_instance(MINIMAL)
    tour = parse_tour("0 1 2", inst)
    assert tour.order == (0, 1, 2) and tour.length == 3
    with pytest.raises(TourError, match="repeated"):
        parse_tour_order("0 1 1")
    with pytest.raises(TourError, match="range"):
        parse_tour_order("0 1 3")
    with pytest.raises(TourError):
        parse_tour("0 1 2 3", inst)


def test_tour_roundtrip_canonical():
    s = "3 0 2 1\n"
    assert write_tour(parse_tour_order(s)) == s
    assert parse_tour_order("# comment\n  3   0 2 1 \n") == (3, 0, 2, 1)


def test_same_cycle():
    assert same_cycle([0, 1, 2, 3], [2, 3, 0, 1], directed=True)
    assert not same_cycle([0, 1, 2, 3], [3, 2, 1, 0], directed=True)
    assert same_cycle([0, 1, 2, 3], [3, 2, 1, 0])
    assert not same_cycle([0, 1, 2, 3], [0, 2, 1, 3])


def test_instance_is_immutable():
    inst = parse_instance(MINIMAL)
    with pytest.raises(ValueError):
        inst.matrix[0, 1] = 5


@st.composite
def metric_instance_and_order(draw):
    n = draw(st.integers(4, 9))
    seed = draw(st.integers(0, 2**32))
    exact = draw(st.booleans())
    inst = random_metric_closure(RandomFamilySpec("random-metric", n, seed, exact=exact))[0]
    order = draw(st.permutations(list(range(n))))
    return inst, order


@settings(max_examples=60, deadline=None)
@given(metric_instance_and_order(), st.integers(0, 20))
def test_length_invariant_under_rotation_and_reversal(data, shift):
    inst, order = data
    k = shift % len(order)
    base = tour_length(inst, order)
    assert tour_length(inst, order[k:] + order[:k]) == base
    assert tour_length(inst, order[::-1]) == base


@settings(max_examples=60, deadline=None)
@given(metric_instance_and_order())
def test_edges_at_most_half_tour_on_metric(data):
    inst, order = data
    tour = make_tour(inst, order)
    for u, v in tour.edges():
        assert inst.weight(u, v) <= tour.length / 2 + (0 if inst.is_exact else 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=0, max_value=10, max_denominator=50), min_size=3, max_size=3))
def test_exact_addition_associative(vals):
    a, b, c = vals
    inst = Instance.from_weights([[0, a, b], [a, 0, c], [b, c, 0]])
    wa, wb, wc = inst.weight(0, 1), inst.weight(0, 2), inst.weight(1, 2)
    assert (wa + wb) + wc == wa + (wb + wc)
    assert tour_length(inst, [0, 1, 2]) == a + b + c
