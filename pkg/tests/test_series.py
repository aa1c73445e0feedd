"""Series arithmetic: anchors from the GL3 running example plus ring axioms."""

import random

import pytest

from springer_pavings.series import (
    FieldMismatchError,
    PrecisionError,
    PrimeField,
    TruncSeries,
)

F5 = PrimeField(5)
F7 = PrimeField(7)
H = 12


def ser(field, terms, horizon=H):
    return TruncSeries.from_terms(field, terms, horizon)


def test_prime_validation():
    with pytest.raises(ValueError):
        PrimeField(6)
    PrimeField(2)


def test_add_gamma_entries():
    # eps^2 + eps^4 plus -eps^4 collapses to eps^2 over F_5
    s = ser(F5, [(2, 1), (4, 1)])
    t = ser(F5, [(4, -1)])
    u = s + t
    assert u.terms() == [(2, 1)]
    assert u.horizon == H


def test_add_identity():
    s = ser(F5, [(0, 3), (2, 1)])
    z = TruncSeries.zero(F5, H)
    assert (s + z) == s


def test_add_mod_p_cancellation():
    # (1 + eps) + (p-1 + eps) = 2 eps over F_p
    s = ser(F5, [(0, 1), (1, 1)])
    t = ser(F5, [(0, 4), (1, 1)])
    assert (s + t).terms() == [(1, 2)]


def test_valuation_example():
    s = ser(F5, [(2, 1)]) - ser(F5, [(4, 1)])
    assert s.valuation() == 2


def test_valuation_unresolved():
    z = TruncSeries.zero(F5, H)
    with pytest.raises(PrecisionError):
        z.valuation()
    assert z.val_at_least(H)
    with pytest.raises(PrecisionError):
        z.val_at_least(H + 1)


def test_inv_one():
    one = TruncSeries.one(F5, H)
    assert one.inv() == one


def test_mul_exponent_cancellation():
    s = TruncSeries.monomial(F5, -1, 1, H)
    t = TruncSeries.monomial(F5, 1, 1, H)
    u = s * t
    assert u.terms() == [(0, 1)]


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        ser(F5, [(0, 1)]) + ser(F7, [(0, 1)])


def test_inv_relative_precision():
    # s known on [1, 12) -> 11 relative digits -> s^-1 known on [-1, 10)
    s = ser(F5, [(1, 2), (3, 1)])
    t = s.inv()
    assert t.low == -1
    assert t.horizon == -1 + (H - 1)
    prod = s * t
    assert prod.coeff(0) == 1
    assert all(prod.coeff(e) == 0 for e in range(prod.val_lower_bound(), prod.horizon) if e != 0)


def random_series(rng, field, horizon=H):
    lo = rng.randint(-3, 3)
    coeffs = [rng.randrange(field.p) for _ in range(rng.randint(0, 6))]
    return TruncSeries.make(field, lo, coeffs, horizon)


def test_ring_axioms_seeded():
    rng = random.Random(20260810)
    for _ in range(300):
        s, t, u = (random_series(rng, F5) for _ in range(3))
        assert ((s + t) + u).agrees_with(s + (t + u))
        assert (s + t).agrees_with(t + s)
        assert (s * t).agrees_with(t * s)
        assert ((s * t) * u).agrees_with(s * (t * u))
        assert (s * (t + u)).agrees_with(s * t + s * u)


def test_val_additive_and_inverse_seeded():
    rng = random.Random(7)
    for _ in range(200):
        s = random_series(rng, F7)
        t = random_series(rng, F7)
        if s.is_zero() or t.is_zero():
            continue
        assert (s * t).valuation() == s.valuation() + t.valuation()
        prod = s * s.inv()
        assert prod.coeff(0) == 1
        for e in range(prod.val_lower_bound(), prod.horizon):
            if e != 0:
                assert prod.coeff(e) == 0


def test_horizon_clips_input_terms():
    s = TruncSeries.from_terms(F5, [(0, 1), (20, 3)], H)
    assert s.terms() == [(0, 1)]
