import itertools
import math

import pytest

from tsp2opt import (Instance, SolverLimitError, SolverLimits, brute_force_opt, held_karp_opt,
                     make_tour, paper_lower_bound, same_cycle, tour_length)
from tsp2opt.generators import RandomFamilySpec, euclidean_instance, metric_closure_instance


def test_unit_square(unit_square):
    # the three distinct cycles through 4 points: perimeter and two bow-ties
    lengths = sorted(tour_length(unit_square, [0, *p]) for p in [(1, 2, 3), (1, 3, 2), (2, 1, 3)])
    assert lengths[0] == 4.0 and lengths[1] == pytest.approx(2 + 2 * math.sqrt(2))
    assert brute_force_opt(unit_square).length == 4.0
    assert held_karp_opt(unit_square).length == 4.0


def test_triangle_unique_tour():
    inst = Instance.from_weights([[0, 2, 3], [2, 0, 4], [3, 4, 0]])
    assert brute_force_opt(inst).order == (0, 1, 2)
    assert held_karp_opt(inst).length == 9


def test_lower_bound_k2_optimum():
    sec = paper_lower_bound(2)
    assert brute_force_opt(sec.instance).length == 4
    assert held_karp_opt(sec.instance).length == 4


def test_all_ones_gives_n():
    n = 9
    inst = Instance.from_weights([[0 if i == j else 1 for j in range(n)] for i in range(n)])
    assert held_karp_opt(inst).length == n
    # ties resolve to the lexicographically least order
    assert brute_force_opt(inst).order == tuple(range(n))


def test_brute_force_covers_every_cycle_once():
    from tsp2opt.exact import _cycles
    for n in range(3, 8):
        assert len(_cycles(n)) == math.factorial(n - 1) // 2


def test_brute_matches_exhaustive_permutations():
    for idx in range(5):
        inst = metric_closure_instance(RandomFamilySpec("random-metric", 7, 9, exact=True), idx)
        best = min(tour_length(inst, (0, *p)) for p in itertools.permutations(range(1, 7)))
        assert brute_force_opt(inst).length == best


@pytest.mark.parametrize("n", [5, 6, 7, 8, 9])
def test_held_karp_agrees_with_brute_force(n):
    for idx in range(4):
        for inst in (euclidean_instance(RandomFamilySpec("random-euclidean", n, 100), idx),
                     metric_closure_instance(RandomFamilySpec("random-metric", n, 100, exact=True), idx)):
            hk = held_karp_opt(inst)
            bf = brute_force_opt(inst)
            assert hk.length == bf.length
            assert hk.order[0] == 0


def test_held_karp_object_dtype():
    base = metric_closure_instance(RandomFamilySpec("random-metric", 7, 2, exact=True), 0)
    wide = Instance.from_weights([[w * 2**80 for w in r] for r in base.weights])
    assert wide.matrix.dtype == object
    assert held_karp_opt(wide).length == held_karp_opt(base).length * 2**80
    assert brute_force_opt(wide).length == held_karp_opt(wide).length


def test_limits():
    inst = euclidean_instance(RandomFamilySpec("random-euclidean", 11, 0), 0)
    with pytest.raises(SolverLimitError):
        brute_force_opt(inst)
    with pytest.raises(SolverLimitError):
        held_karp_opt(inst, SolverLimits(max_n_brute=5, max_n_heldkarp=10))
    with pytest.raises(ValueError):
        SolverLimits(max_n_brute=12, max_n_heldkarp=10)


def test_optimum_lower_bounds_other_tours():
    inst = metric_closure_instance(RandomFamilySpec("random-metric", 8, 31, exact=True), 0)
    opt = held_karp_opt(inst)
    for p in itertools.islice(itertools.permutations(range(8)), 0, 5000, 7):
        assert opt.length <= tour_length(inst, p)


def test_returned_tour_length_is_consistent():
    inst = euclidean_instance(RandomFamilySpec("random-euclidean", 10, 42), 0)
    hk = held_karp_opt(inst)
    assert hk.length == tour_length(inst, hk.order)
    assert same_cycle(hk.order, brute_force_opt(inst).order)
