"""Exact arithmetic for prime fields and truncated formal Laurent series.

A ``TruncSeries`` stores the coefficients of a Laurent series over F_p on
the exponent range ``[low, horizon)``; exponents below ``low`` are known
zeros, exponents at or beyond ``horizon`` are unknown.  Every arithmetic
operation tracks the horizon of the result exactly, and any query whose
answer would depend on unknown coefficients raises ``PrecisionError``
instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class PrecisionError(ArithmeticError):
    """A decision depended on coefficients at or beyond the horizon."""


class FieldMismatchError(ValueError):
    """Operands live over different prime fields."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p, p prime."""

    p: int

    def __post_init__(self) -> None:
        if not _is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")

    def reduce(self, c: int) -> int:
        return c % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(a, self.p - 2, self.p)


def _common_field(s: "TruncSeries", t: "TruncSeries") -> PrimeField:
    if s.field != t.field:
        raise FieldMismatchError(f"F_{s.field.p} vs F_{t.field.p}")
    return s.field


@dataclass(frozen=True)
class TruncSeries:
    """A Laurent series over F_p known exactly on exponents < horizon.

    ``coeffs[k]`` is the coefficient of eps^(low+k); the normalized form
    has ``coeffs`` empty or starting with a nonzero entry.  An empty
    ``coeffs`` means the series is indistinguishable from 0 below the
    horizon.
    """

    field: PrimeField
    low: int
    coeffs: tuple[int, ...]
    horizon: int

    # -- constructors -------------------------------------------------

    @staticmethod
    def make(field: PrimeField, low: int, coeffs: Sequence[int], horizon: int) -> "TruncSeries":
        cs = [field.reduce(c) for c in coeffs]
        # clip to the horizon, then strip leading zeros (they stay known).
        if low + len(cs) > horizon:
            cs = cs[: max(0, horizon - low)]
        while cs and cs[0] == 0:
            cs.pop(0)
            low += 1
        while cs and cs[-1] == 0:
            cs.pop()
        if not cs:
            low = horizon
        return TruncSeries(field, low, tuple(cs), horizon)

    @staticmethod
    def from_terms(field: PrimeField, terms: Iterable[tuple[int, int]], horizon: int) -> "TruncSeries":
        """Build from ``[(exponent, integer coefficient), ...]`` pairs."""
        acc: dict[int, int] = {}
        for e, c in terms:
            acc[e] = (acc.get(e, 0) + c) % field.p
        acc = {e: c for e, c in acc.items() if c and e < horizon}
        if not acc:
            return TruncSeries(field, horizon, (), horizon)
        lo = min(acc)
        hi = max(acc)
        return TruncSeries.make(field, lo, [acc.get(e, 0) for e in range(lo, hi + 1)], horizon)

    @staticmethod
    def zero(field: PrimeField, horizon: int) -> "TruncSeries":
        return TruncSeries(field, horizon, (), horizon)

    @staticmethod
    def one(field: PrimeField, horizon: int) -> "TruncSeries":
        return TruncSeries.make(field, 0, [1], horizon)

    @staticmethod
    def monomial(field: PrimeField, exp: int, coef: int, horizon: int) -> "TruncSeries":
        return TruncSeries.make(field, exp, [coef], horizon)

    # -- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        """True when every known coefficient vanishes."""
        return not self.coeffs

    def valuation(self) -> int:
        """Exact valuation; PrecisionError if indistinguishable from 0."""
        if not self.coeffs:
            raise PrecisionError(
                f"valuation not resolved below horizon {self.horizon}"
            )
        return self.low

    def val_lower_bound(self) -> int:
        """A certified lower bound for the valuation."""
        return self.low if self.coeffs else self.horizon

    def val_at_least(self, n: int) -> bool:
        """Decide valuation >= n; needs n <= horizon."""
        if n > self.horizon:
            raise PrecisionError(f"threshold {n} beyond horizon {self.horizon}")
        return self.val_lower_bound() >= n

    def coeff(self, e: int) -> int:
        if e >= self.horizon:
            raise PrecisionError(f"coefficient at {e} beyond horizon {self.horizon}")
        if e < self.low or e >= self.low + len(self.coeffs):
            return 0
        return self.coeffs[e - self.low]

    def terms(self) -> list[tuple[int, int]]:
        return [(self.low + k, c) for k, c in enumerate(self.coeffs) if c]

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        field = _common_field(self, other)
        horizon = min(self.horizon, other.horizon)
        if not self.coeffs:
            return other.truncate(horizon)
        if not other.coeffs:
            return self.truncate(horizon)
        lo = min(self.low, other.low)
        hi = min(horizon, max(self.low + len(self.coeffs), other.low + len(other.coeffs)))
        cs = [0] * max(0, hi - lo)
        for e, c in self.terms():
            if e < hi:
                cs[e - lo] = c
        for e, c in other.terms():
            if e < hi:
                cs[e - lo] = (cs[e - lo] + c) % field.p
        return TruncSeries.make(field, lo, cs, horizon)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.field, self.low,
                           tuple(self.field.neg(c) for c in self.coeffs), self.horizon)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        field = _common_field(self, other)
        horizon = min(self.horizon + other.val_lower_bound(),
                      other.horizon + self.val_lower_bound())
        if not self.coeffs or not other.coeffs:
            return TruncSeries.zero(field, horizon)
        lo = self.low + other.low
        width = max(0, horizon - lo)
        cs = [0] * width
        p = field.p
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                k = i + j
                if k >= width:
                    break
                cs[k] = (cs[k] + a * b) % p
        return TruncSeries.make(field, lo, cs, horizon)

    def scalar_mul(self, c: int) -> "TruncSeries":
        c = self.field.reduce(c)
        if c == 0:
            return TruncSeries.zero(self.field, self.horizon)
        return TruncSeries.make(self.field, self.low,
                                [c * a for a in self.coeffs], self.horizon)

    def shift(self, n: int) -> "TruncSeries":
        """Multiply by eps^n (exact)."""
        return TruncSeries(self.field, self.low + n, self.coeffs, self.horizon + n)

    def truncate(self, horizon: int) -> "TruncSeries":
        if horizon >= self.horizon:
            return self
        return TruncSeries.make(self.field, self.low, self.coeffs, horizon)

    def inv(self) -> "TruncSeries":
        """Two-sided inverse up to the available relative precision."""
        if not self.coeffs:
            raise PrecisionError("division by a series indistinguishable from 0")
        v = self.low
        rel = self.horizon - v  # relative precision, >= 1
        c = self.coeffs
        p = self.field.p
        c0inv = self.field.inv(c[0])
        out = [0] * rel
        out[0] = c0inv
        for k in range(1, rel):
            s = 0
            for i in range(1, min(k, len(c) - 1) + 1):
                s += c[i] * out[k - i]
            out[k] = (-c0inv * s) % p
        return TruncSeries.make(self.field, -v, out, -v + rel)

    def __truediv__(self, other: "TruncSeries") -> "TruncSeries":
        return self * other.inv()

    # -- misc ----------------------------------------------------------

    def restrict_val_ge(self, n: int) -> "TruncSeries":
        """Keep only the part with exponents >= n (exact split)."""
        cs = [(e, c) for e, c in self.terms() if e >= n]
        return TruncSeries.from_terms(self.field, cs, self.horizon)

    def restrict_val_lt(self, n: int) -> "TruncSeries":
        cs = [(e, c) for e, c in self.terms() if e < n]
        return TruncSeries.from_terms(self.field, cs, self.horizon)

    def agrees_with(self, other: "TruncSeries") -> bool:
        """Coefficientwise equality on the common known window."""
        _common_field(self, other)
        hi = min(self.horizon, other.horizon)
        lo = min(self.val_lower_bound(), other.val_lower_bound())
        return all(self.coeff(e) == other.coeff(e) for e in range(lo, hi))

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"O(eps^{self.horizon})"
        parts = []
        for e, c in self.terms():
            if e == 0:
                parts.append(f"{c}")
            elif e == 1:
                parts.append(f"{c}*eps" if c != 1 else "eps")
            else:
                parts.append(f"{c}*eps^{e}" if c != 1 else f"eps^{e}")
        return " + ".join(parts) + f" + O(eps^{self.horizon})"


def default_horizon(d: int, m: int, nu_max: int) -> int:
    """Working precision for window parameter m, group size d, max root valuation.

    Membership tests meet entries with valuations bounded by d*m + nu_max;
    the guard of 2 absorbs carries.
    """
    return d * max(m, 0) + max(nu_max, 0) + 2
