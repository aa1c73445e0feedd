"""GL3 slice pavings: purity certificates, partition property, c-independence."""

import pytest

from springer_pavings import slices
from springer_pavings.cells import Window, make_cell
from springer_pavings.gamma import GammaSpec
from springer_pavings.lattice import cell_points, enumerate_window, limit_point
from springer_pavings.paving import (
    build_gl3_paving,
    build_gl3_slice_piece,
    certify_gl3,
    gl3_corner_paving_check,
    gl3_paving_certified,
    gl3_region_paving,
    translate_gl3,
)
from springer_pavings.series import PrimeField

GAMMA = GammaSpec.make([[[2, 1]], [[4, 1]], [[4, -1]]])
EQUIVALUED = GammaSpec.make([[[1, 1]], [[1, 2]], [[1, 3]]])


def test_gl3_acceptance_shape_is_pure():
    paving, report = gl3_paving_certified(GAMMA, (2, -1, -1), [5, 7])
    assert report.status == "pure", report.failures
    assert report.totals == report.region_counts
    assert len(paving.pieces) == 7
    assert report.total_dims[-1] == 5


def test_gl3_trivial_v():
    paving, report = gl3_paving_certified(GAMMA, (0, 0, 0), [5])
    assert report.status == "pure"
    assert report.total_dims == [0]
    assert report.totals == {5: 1}


def test_gl3_equivalued_sanity():
    _, report = gl3_paving_certified(EQUIVALUED, (2, -1, -1), [5, 7])
    assert report.status == "pure", report.failures


def test_gl3_case2_shape():
    _, report = gl3_paving_certified(GAMMA, (1, 1, -2), [5])
    assert report.status == "pure", report.failures


def test_gl3_partition_property_exhaustive():
    """Every F_q point of the region lies in exactly one emitted box, and
    the box is the one the limit classification selects (q=2, m=1)."""
    q = 2
    nu = GAMMA.nu_int()
    paving = build_gl3_paving(nu, (2, -1, -1), -1)
    field = PrimeField(q)
    horizon = 10

    # collect every box point, keyed by canonical std coordinates
    seen = {}
    for pi, ci, piece, cell in paving.all_cells():
        for L in cell_points(cell.box, field, horizon):
            w_std = limit_point(L, (0, 0, 0))
            from springer_pavings.lattice import basis_matrix, canonical_form

            std = canonical_form(basis_matrix(L, horizon + 12), (0, 0, 0))
            key = (std.cell.w, std.coords)
            assert key not in seen, f"duplicate point {key}"
            seen[key] = (pi, ci)

    # region points enumerated independently must all appear, with the
    # classifier agreeing with the enumeration assignment
    total = 0
    for L in enumerate_window(3, 1, q, 0, horizon=horizon):
        total += 1
        w_std = L.cell.w
        key = (L.cell.w, L.coords)
        assert key in seen, f"missing region point at {w_std}"
        pi, ci = paving.classify(L, w_std)
        assert seen[key] == (pi, ci)
    assert total == len(seen)


def test_gl3_c_interval_independence(monkeypatch):
    """Two admissible cuts in the same interval give identical reports."""
    from fractions import Fraction

    reports = []
    for offset in (Fraction(1, 4), Fraction(3, 4)):
        orig = slices.choose_c

        def skewed(v, _orig=orig, _off=offset):
            res = _orig(v)
            if res is None:
                return None
            case, c = res
            lo = c - Fraction(1, 2)
            return case, lo + _off

        monkeypatch.setattr(slices, "choose_c", skewed)
        paving, report = gl3_paving_certified(GAMMA, (2, -1, -1), [5])
        monkeypatch.setattr(slices, "choose_c", orig)
        reports.append(report.to_json())
    assert reports[0] == reports[1]


def test_gl3_slice_piece_rejects_bad_pattern():
    nu = GAMMA.nu_int()
    with pytest.raises(ValueError):
        build_gl3_slice_piece(
            nu, frozenset({0}), slices.Fraction(-1, 2), [(-1, 0, 1)],
            Window(m_low=1), "bad",
        )


def test_gl3_region_paving_matches_schubert():
    nu = GAMMA.nu_int()
    paving = gl3_region_paving(nu, 0, -1)
    assert set(paving.region_points) == set(
        w for w in slices.sch_fixed_points((2, -1, -1))
    )


def test_translate_gl3_consistency():
    nu = GAMMA.nu_int()
    paving = build_gl3_paving(nu, (2, -1, -1), -1)
    moved = translate_gl3(paving, (1, 0, 0))
    assert sorted(moved.piece_of_w) == sorted(
        tuple(x + y for x, y in zip(w, (1, 0, 0))) for w in paving.piece_of_w
    )
    for (p0, p1) in zip(paving.pieces, moved.pieces):
        assert [c.box.dim for c in p0.cells] == [c.box.dim for c in p1.cells]
        assert [c.kernel for c in p0.cells] == [c.kernel for c in p1.cells]


def test_corner_paving_check_mixed():
    report = gl3_corner_paving_check(0, 0, 1, 1, 1, [5, 7])
    assert report.status == "pure", report.failures
    assert report.totals[5] == report.region_counts[5]


def test_corner_paving_check_m0():
    report = gl3_corner_paving_check(0, 0, 1, 1, 0, [5, 7])
    assert report.status == "pure"
    assert report.totals == {5: 1, 7: 1}


def test_corner_paving_equivalued_diagonal_sanity():
    """A split diagonal gamma run through the same corner paving also passes."""
    from springer_pavings.cells import bruhat_mod_less
    from springer_pavings.lattice import coweights_in_window
    from springer_pavings.springer import NotPure, count_cell, power_check
    from springer_pavings import weyl

    m, shift = 1, (3, 0, 0)
    window = Window(m_low=1)
    pts = coweights_in_window(3, 1, 0)
    ordered = weyl.linear_extension(pts, lambda u, v: bruhat_mod_less(u, v, shift))
    for q in (5,):
        g = EQUIVALUED.instantiate(q, 8)
        for w in ordered:
            box = make_cell(shift, w, window)
            counts = {
                p: count_cell(box, EQUIVALUED.instantiate(p, 8), p).count
                for p in (5, 7)
            }
            if any(counts.values()):
                assert not isinstance(power_check(counts), NotPure), (w, counts)
