"""Springer membership and counting, anchored on the a0*b1 = 0 cell count."""

import random

import pytest

from springer_pavings.cells import Window, make_cell
from springer_pavings.gamma import (
    GammaSpec,
    matrix_spec_instantiate,
    mixed_gl3_matrix_spec,
)
from springer_pavings.lattice import (
    BudgetError,
    LatticePoint,
    basis_matrix,
    canonical_form,
    cell_points,
    coweights_in_window,
    enumerate_window,
    mat_mul,
)
from springer_pavings.series import PrimeField, TruncSeries
from springer_pavings.springer import (
    NotPure,
    count_cell,
    count_region,
    in_springer,
    in_springer_conjugation,
    power_check,
)

H = 12
GAMMA = GammaSpec.make([[[2, 1]], [[4, 1]], [[4, -1]]])  # diag(eps^2, eps^4, -eps^4)


def fixed_point(w, q=5, horizon=H, a=None):
    d = len(w)
    cell = make_cell(a or (0,) * d, w)
    return LatticePoint.make(cell, {}, PrimeField(q), horizon)


def test_fixed_points_always_members():
    g = GAMMA.instantiate(5, H)
    for w in [(0, 0, 0), (2, -1, -1), (1, 1, -2), (-1, 3, -2)]:
        assert in_springer(fixed_point(w), g)
        assert in_springer_conjugation(fixed_point(w), g)


def test_example_cell_equation_branches():
    # cell C(0,2,-2): membership is the vanishing of a0*b1
    g = GAMMA.instantiate(5, H)
    cell = make_cell((0, 0, 0), (0, 2, -2))
    # a0 = coord (1,3) exponent 0; b1 = coord (2,1) exponent 1 (1-based),
    # i.e. slots (0,2,0) and (1,0,1) here
    both = LatticePoint.make(cell, {(0, 2, 0): 1, (1, 0, 1): 1}, PrimeField(5), H)
    assert not in_springer(both, g)
    only_a = LatticePoint.make(cell, {(0, 2, 0): 1}, PrimeField(5), H)
    assert in_springer(only_a, g)
    only_b = LatticePoint.make(cell, {(1, 0, 1): 1}, PrimeField(5), H)
    assert in_springer(only_b, g)


def test_two_membership_routes_agree():
    rng = random.Random(31415)
    g = GAMMA.instantiate(5, H)
    cells = [make_cell((0, 0, 0), w) for w in coweights_in_window(3, 1, 0)]
    checked = 0
    for _ in range(300):
        cell = rng.choice(cells)
        coords = {}
        for slot in cell.coordinate_slots():
            c = rng.randrange(5)
            if c:
                coords[slot] = c
        L = LatticePoint.make(cell, coords, PrimeField(5), H)
        assert in_springer(L, g) == in_springer_conjugation(L, g)
        checked += 1
    assert checked == 300


def test_membership_invariant_under_basis_change():
    # replacing the canonical basis by another O-basis of the same lattice
    rng = random.Random(999)
    g = GAMMA.instantiate(5, H)
    cell = make_cell((0, 0, 0), (0, 2, -2))
    from tests.test_lattice import random_k_matrix

    for _ in range(30):
        coords = {}
        for slot in cell.coordinate_slots():
            c = rng.randrange(5)
            if c:
                coords[slot] = c
        L = LatticePoint.make(cell, coords, PrimeField(5), H)
        B = basis_matrix(L, H + 16)
        K = random_k_matrix(rng, 3, PrimeField(5), H + 16)
        L2 = canonical_form(mat_mul(B, K), (0, 0, 0))
        assert in_springer(L, g) == in_springer(L2, g)


@pytest.mark.parametrize("q,expected", [(5, 2 * 5**6 - 5**5), (7, 2 * 7**6 - 7**5)])
def test_example_cell_count_closed_form(q, expected):
    # solutions of a0*b1 = 0 in A^7: q^7 - (q-1)^2 q^5 = 2 q^6 - q^5
    g = GAMMA.instantiate(q, H)
    cell = make_cell((0, 0, 0), (0, 2, -2))
    res = count_cell(cell, g, q)
    assert res.count == expected


def test_example_cell_not_pure():
    counts = {q: 2 * q**6 - q**5 for q in (5, 7)}
    assert isinstance(power_check(counts), NotPure)


def test_count_dim0_cell():
    g = GAMMA.instantiate(5, H)
    cell = make_cell((0, 0, 0), (0, 0, 0), Window(m_low=0))
    assert cell.dim == 0
    assert count_cell(cell, g, 5).count == 1


def test_batch_matches_scalar_exhaustively():
    g3 = GAMMA.instantiate(3, H)
    for w in [(0, 2, -2), (1, 0, -1), (2, -1, -1), (1, 1, -2), (-1, 2, -1)]:
        cell = make_cell((0, 0, 0), w, Window(m_low=2))
        scalar = count_cell(cell, g3, 3, engine="scalar")
        vector = count_cell(cell, g3, 3, engine="batch")
        assert scalar.count == vector.count, w


def test_batch_matches_scalar_shifted_iwahori():
    g3 = GAMMA.instantiate(3, H)
    a = (2, 4, 4)
    for w in [(1, 0, -1), (0, 1, -1), (2, -1, -1)]:
        cell = make_cell(a, w, Window(m_low=1))
        scalar = count_cell(cell, g3, 3, engine="scalar")
        vector = count_cell(cell, g3, 3, engine="batch")
        assert scalar.count == vector.count, w


def test_batch_matches_scalar_block_gamma():
    mat3 = matrix_spec_instantiate(mixed_gl3_matrix_spec(0, 0, 1, 1), 3, H)
    for w in [(1, 0, -1), (0, 0, 0), (1, -1, 0)]:
        cell = make_cell((3, 0, 0), w, Window(m_low=1))
        scalar = count_cell(cell, mat3, 3, engine="scalar")
        vector = count_cell(cell, mat3, 3, engine="batch")
        assert scalar.count == vector.count, w


def test_count_region_additivity_and_empty():
    g = GAMMA.instantiate(5, H)
    cells = [make_cell((0, 0, 0), w, Window(m_low=1)) for w in coweights_in_window(3, 1, 0)]
    total = count_region(cells, g, 5, region="window")
    assert total.count == sum(count_cell(c, g, 5).count for c in cells)
    assert count_region([], g, 5).count == 0


def test_power_check_cases():
    assert power_check({3: 27, 5: 125}) == 3
    assert isinstance(power_check({3: 24, 5: 120}), NotPure)
    assert power_check({3: 1, 5: 1}) == 0
    assert isinstance(power_check({3: 9, 5: 125}), NotPure)


def test_budget_guard():
    g = GAMMA.instantiate(5, H)
    cell = make_cell((0, 0, 0), (4, -2, -2))
    with pytest.raises(BudgetError):
        count_cell(cell, g, 5, budget=10)


def test_region_cross_prime_purity_failure_detected():
    # whole-window counts at two primes follow the same polynomial in q;
    # the standard paving is not pure for this gamma but totals still match
    g5 = GAMMA.instantiate(5, H)
    g7 = GAMMA.instantiate(7, H)
    cells5 = [make_cell((0, 0, 0), w, Window(m_low=1)) for w in coweights_in_window(3, 1, 0)]
    n5 = count_region(cells5, g5, 5).count
    n7 = count_region(cells5, g7, 7).count
    assert n5 > 0 and n7 > 0
    assert isinstance(power_check({5: n5, 7: n7}), (int, NotPure))
