"""Root valuations, minimal form (against the d! brute-force oracle), GL4 types."""

import random

import pytest

from springer_pavings.gamma import (
    GL4Type,
    GammaError,
    GammaSpec,
    classify_gl4,
    is_minimal_form,
    minimal_form,
    minimal_form_brute,
    root_valuations,
)
from springer_pavings.series import PrimeField, TruncSeries

F5 = PrimeField(5)
H = 12


def spec(*entries):
    return GammaSpec.make(entries)


GAMMA_EXAMPLE = spec([[2, 1]], [[4, 1]], [[4, -1]])  # diag(eps^2, eps^4, -eps^4)


def test_example_nu_matrix():
    g = GAMMA_EXAMPLE.instantiate(5, H)
    assert g.nu[0][1] == 2 and g.nu[0][2] == 2
    assert g.nu[1][0] == 2 and g.nu[1][2] == 4
    assert g.nu[2][0] == 2 and g.nu[2][1] == 4


def test_gl4_nu_with_eps_perturbation():
    g = spec([[0, 0]], [[0, 1]], [[0, 2]], [[0, 2], [1, 1]])
    # entry 1 is literally 0; regularity still holds via the differences
    data = g.instantiate(5, H)
    assert data.nu[2][3] == 1
    for i in range(4):
        for j in range(4):
            if i != j and (i, j) not in [(2, 3), (3, 2)]:
                assert data.nu[i][j] == 0


def test_non_regular_rejected():
    with pytest.raises(GammaError):
        spec([[0, 3]], [[0, 3]]).instantiate(5, H)


def test_mod_p_validation():
    # difference 5 has valuation 0 over Z but dies mod 5
    bad = spec([[0, 7]], [[0, 2]])
    with pytest.raises(GammaError):
        bad.validate_mod_p(5)
    bad.validate_mod_p(7)


def test_is_minimal_form_examples():
    g = GAMMA_EXAMPLE.instantiate(5, H)
    assert is_minimal_form(g.nu)  # 2 = min(2, 4)
    # reordered (eps^4, eps^2, -eps^4): nu_13 = 4 but consecutive mins are 2
    g2 = spec([[4, 1]], [[2, 1]], [[4, -1]]).instantiate(5, H)
    assert not is_minimal_form(g2.nu)


def test_minimal_form_reorders_swapped_example():
    g2 = spec([[4, 1]], [[2, 1]], [[4, -1]])
    cert = minimal_form(g2)
    assert is_minimal_form_after(g2, cert)
    assert sorted(cert.radicial) == [2, 4]


def is_minimal_form_after(gspec, cert):
    nu = gspec.nu_int()
    d = gspec.d
    permuted = [[nu[cert.perm[i]][cert.perm[j]] for j in range(d)] for i in range(d)]
    return is_minimal_form(permuted)


def test_minimal_form_identity_accepted():
    cert = minimal_form(GAMMA_EXAMPLE)
    assert is_minimal_form_after(GAMMA_EXAMPLE, cert)


def test_gl4_type2_example():
    g = spec([[0, 1]], [[0, 1], [1, 1]], [[0, 2]], [[0, 2], [1, 1]])
    cert = minimal_form(g)
    assert is_minimal_form_after(g, cert)
    assert cert.radicial == (1, 0, 1)
    t = classify_gl4(cert)
    assert t.kind == "type2" and t.n == 0 and t.n1 == 1 and t.n2 == 1


def test_gl4_type1_example():
    g = spec([[0, 0]], [[0, 1]], [[0, 2]], [[0, 2], [1, 1]])
    cert = minimal_form(g)
    assert cert.radicial == (0, 0, 1)
    assert classify_gl4(cert).kind == "type1"


def test_classify_patterns():
    from springer_pavings.gamma import MinimalFormCert

    assert classify_gl4(MinimalFormCert((0, 1, 2, 3), (0, 0, 1))).kind == "type1"
    assert classify_gl4(MinimalFormCert((0, 1, 2, 3), (1, 0, 1))).kind == "type2"
    assert classify_gl4(MinimalFormCert((0, 1, 2, 3), (2, 2, 2))).kind == "type1"


def test_caterpillar_tree_gets_a_type():
    # radicial (0,2,1) as given; the layout must find a type-compatible order
    g = spec([[0, 1]], [[0, 2]], [[0, 2], [2, 1]], [[0, 2], [1, 1]])
    data = g.instantiate(5, H)
    assert data.nu[1][2] == 2 and data.nu[1][3] == 1 and data.nu[0][1] == 0
    cert = minimal_form(g)
    assert is_minimal_form_after(g, cert)
    classify_gl4(cert)  # must not raise


def random_ultrametric_gamma(rng, d, nu_cap=3):
    """Random integral diagonal entries with integer coefficients."""
    entries = []
    for _ in range(d):
        terms = [(e, rng.randint(0, 3)) for e in range(0, nu_cap + 2)]
        entries.append(terms)
    return GammaSpec.make(entries)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_minimal_form_matches_brute_force(d):
    rng = random.Random(1000 + d)
    done = 0
    while done < 250:
        g = random_ultrametric_gamma(rng, d)
        try:
            nu = g.nu_int()
        except GammaError:
            continue
        done += 1
        cert = minimal_form(g)
        assert is_minimal_form_after(g, cert)
        brute = minimal_form_brute(nu)
        assert brute is not None  # existence, per the recursion
        # the multiset of all root valuations is permutation-invariant
        flat = sorted(x for row in nu for x in row if x is not None)
        permuted = [[nu[cert.perm[i]][cert.perm[j]] for j in range(d)] for i in range(d)]
        assert sorted(x for row in permuted for x in row if x is not None) == flat
        if d == 4:
            classify_gl4(cert)


def test_mixed_block_form_builds():
    from springer_pavings.gamma import matrix_spec_instantiate, mixed_gl3_matrix_spec

    mat = matrix_spec_instantiate(mixed_gl3_matrix_spec(0, 0, 1, 1), 5, H)
    assert mat[0][0].terms() == [(0, 1)]
    assert mat[1][2].terms() == [(0, 1)]
    assert mat[2][1].terms() == [(1, 1)]
    assert mat[1][1].is_zero()
