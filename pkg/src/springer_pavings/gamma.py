"""Diagonal regular elements: root valuations, minimal form, GL4 types.

GammaSpec holds integer-coefficient series literals (prime-independent);
instantiating at a prime yields GammaData with exact series entries and
the root-valuation matrix nu[i][j] = val(gamma_i - gamma_j).  The minimal
form algorithm contracts maximal equivalued blocks recursively; the
expansion lays clusters out by increasing join depth, which keeps the
radicial valuation of a GL4 element inside the two admissible patterns.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Optional, Sequence

from springer_pavings.series import PrimeField, TruncSeries

IntSeries = tuple[tuple[int, int], ...]  # ((exponent, integer coefficient), ...)


class GammaError(ValueError):
    """Invalid gamma input (non-regular, non-integral, or bad reduction)."""


def _int_terms(terms: Sequence[Sequence[int]]) -> IntSeries:
    acc: dict[int, int] = {}
    for e, c in terms:
        acc[int(e)] = acc.get(int(e), 0) + int(c)
    return tuple(sorted((e, c) for e, c in acc.items() if c))


def _int_valuation(terms: IntSeries) -> Optional[int]:
    nz = [e for e, c in terms if c != 0]
    return min(nz) if nz else None


def _int_diff(s: IntSeries, t: IntSeries) -> IntSeries:
    acc = dict(s)
    for e, c in t:
        acc[e] = acc.get(e, 0) - c
    return tuple(sorted((e, c) for e, c in acc.items() if c))


@dataclass(frozen=True)
class GammaSpec:
    """Integer-coefficient diagonal gamma, reusable across primes."""

    entries: tuple[IntSeries, ...]

    @staticmethod
    def make(entries: Sequence[Sequence[Sequence[int]]]) -> "GammaSpec":
        return GammaSpec(tuple(_int_terms(e) for e in entries))

    @property
    def d(self) -> int:
        return len(self.entries)

    def nu_int(self) -> list[list[Optional[int]]]:
        """Root valuations over the integers (exact, prime-independent)."""
        d = self.d
        nu: list[list[Optional[int]]] = [[None] * d for _ in range(d)]
        for i in range(d):
            for j in range(d):
                if i != j:
                    v = _int_valuation(_int_diff(self.entries[i], self.entries[j]))
                    if v is None:
                        raise GammaError(f"entries {i+1} and {j+1} coincide: not regular")
                    nu[i][j] = v
        return nu

    def nu_max(self) -> int:
        return max(x for row in self.nu_int() for x in row if x is not None)

    def validate_mod_p(self, p: int) -> None:
        """Reject the pair (gamma, p) when a difference's leading coefficient
        dies mod p: the valuation would jump and counts would not be
        comparable across primes."""
        for i in range(self.d):
            for j in range(i + 1, self.d):
                diff = _int_diff(self.entries[i], self.entries[j])
                v = _int_valuation(diff)
                if v is None:
                    raise GammaError("not regular")
                lead = dict(diff)[v]
                if lead % p == 0:
                    raise GammaError(
                        f"leading coefficient of gamma_{i+1}-gamma_{j+1} vanishes mod {p}"
                    )

    def is_integral(self) -> bool:
        return all((_int_valuation(e) or 0) >= 0 and all(x >= 0 for x, _ in e)
                   for e in self.entries)

    def permute(self, perm: Sequence[int]) -> "GammaSpec":
        """Entry k of the result is entry perm[k] of the input."""
        return GammaSpec(tuple(self.entries[p] for p in perm))

    def instantiate(self, p: int, horizon: int) -> "GammaData":
        self.validate_mod_p(p)
        field = PrimeField(p)
        entries = tuple(
            TruncSeries.from_terms(field, list(e), horizon) for e in self.entries
        )
        return root_valuations(entries, spec=self)

    def to_json(self) -> dict:
        return {"entries": [[list(t) for t in e] for e in self.entries]}

    @staticmethod
    def from_json(obj: dict) -> "GammaSpec":
        return GammaSpec.make(obj["entries"])


@dataclass(frozen=True)
class GammaData:
    """Instantiated diagonal gamma over a prime field."""

    entries: tuple[TruncSeries, ...]
    nu: tuple[tuple[Optional[int], ...], ...]
    field: PrimeField
    spec: Optional[GammaSpec] = None

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def horizon(self) -> int:
        return min(e.horizon for e in self.entries)

    def matrix(self) -> list[list[TruncSeries]]:
        d = self.d
        z = TruncSeries.zero(self.field, self.horizon)
        mat = [[z for _ in range(d)] for _ in range(d)]
        for i in range(d):
            mat[i][i] = self.entries[i]
        return mat

    def nu_max(self) -> int:
        return max(x for row in self.nu for x in row if x is not None)

    def block(self, indices: Sequence[int]) -> "GammaData":
        idx = list(indices)
        entries = tuple(self.entries[i] for i in idx)
        nu = tuple(
            tuple(self.nu[i][j] if i != j else None for j in idx) for i in idx
        )
        sub = None
        if self.spec is not None:
            sub = GammaSpec(tuple(self.spec.entries[i] for i in idx))
        return GammaData(entries, nu, self.field, sub)

    def permute(self, perm: Sequence[int]) -> "GammaData":
        return self.block(list(perm))


def root_valuations(entries: Sequence[TruncSeries], spec: Optional[GammaSpec] = None) -> GammaData:
    """GammaData from diagonal entries; asserts regularity and integrality."""
    entries = tuple(entries)
    d = len(entries)
    field = entries[0].field
    nu: list[list[Optional[int]]] = [[None] * d for _ in range(d)]
    for i in range(d):
        if not entries[i].is_zero() and entries[i].valuation() < 0:
            raise GammaError("gamma is not integral")
        for j in range(d):
            if i == j:
                continue
            diff = entries[i] - entries[j]
            if diff.is_zero():
                raise GammaError(f"entries {i+1} and {j+1} coincide: not regular")
            nu[i][j] = diff.valuation()
    # ultrametric sanity
    for i in range(d):
        for j in range(d):
            for k in range(d):
                if len({i, j, k}) == 3:
                    assert nu[i][k] >= min(nu[i][j], nu[j][k])
    return GammaData(entries, tuple(tuple(r) for r in nu), field, spec)


# -- minimal form ------------------------------------------------------------


@dataclass(frozen=True)
class MinimalFormCert:
    """A permutation achieving minimal form, with its radicial valuation."""

    perm: tuple[int, ...]
    radicial: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "perm": [p + 1 for p in self.perm],
            "radicial": list(self.radicial),
        }


def is_minimal_form(nu: Sequence[Sequence[Optional[int]]]) -> bool:
    """val(alpha_{i,j}) equals the min of the consecutive valuations."""
    d = len(nu)
    rad = [nu[i][i + 1] for i in range(d - 1)]
    for i in range(d):
        for j in range(i + 1, d):
            if nu[i][j] != min(rad[i:j]):
                return False
    return True


def _cluster_layout(indices: list[int], nu, depth_of: dict[int, int]) -> list[int]:
    """Recursive layout: leaves first, then subclusters by join depth."""
    if len(indices) == 1:
        return indices
    t = min(nu[i][j] for i in indices for j in indices if i != j)
    # children: classes of the relation nu > t (an equivalence here)
    children: list[list[int]] = []
    for i in sorted(indices):
        placed = False
        for ch in children:
            if nu[i][ch[0]] is not None and nu[i][ch[0]] > t:
                ch.append(i)
                placed = True
                break
        if not placed:
            children.append([i])

    def key(ch: list[int]):
        if len(ch) == 1:
            return (0, 0, ch[0])
        inner = min(nu[i][j] for i in ch for j in ch if i != j)
        return (1, inner, min(ch))

    out: list[int] = []
    for ch in sorted(children, key=key):
        out.extend(_cluster_layout(ch, nu, depth_of))
    return out


def minimal_form(g: GammaData | GammaSpec) -> MinimalFormCert:
    """A Weyl conjugation into minimal form.

    Contracting all maximal equivalued blocks at the deepest valuation and
    recursing is the same as laying out the ultrametric cluster tree with
    every subtree contiguous; any such layout satisfies the minimal-form
    condition.  Children are ordered leaves-first, then by join depth, so
    the d=4 radicial vector always matches one of the two type patterns.
    """
    nu = g.nu_int() if isinstance(g, GammaSpec) else [list(r) for r in g.nu]
    d = len(nu)
    if d == 1:
        return MinimalFormCert((0,), ())
    perm = _cluster_layout(list(range(d)), nu, {})
    rad = tuple(nu[perm[k]][perm[k + 1]] for k in range(d - 1))
    permuted = [[nu[perm[i]][perm[j]] for j in range(d)] for i in range(d)]
    if not is_minimal_form(permuted):
        raise RuntimeError("cluster layout failed the minimal-form condition")
    return MinimalFormCert(tuple(perm), rad)


def minimal_form_brute(nu: Sequence[Sequence[Optional[int]]]) -> Optional[MinimalFormCert]:
    """Exhaustive search over all d! permutations (test oracle)."""
    d = len(nu)
    for perm in permutations(range(d)):
        permuted = [[nu[perm[i]][perm[j]] for j in range(d)] for i in range(d)]
        if is_minimal_form(permuted):
            rad = tuple(permuted[i][i + 1] for i in range(d - 1))
            return MinimalFormCert(perm, rad)
    return None


@dataclass(frozen=True)
class GL4Type:
    """Radicial-pattern classification for d = 4."""

    kind: str  # "type1" or "type2"
    n1: int
    n2: int
    n3: Optional[int] = None  # type1 only
    n: Optional[int] = None  # type2 only


def classify_gl4(cert: MinimalFormCert) -> GL4Type:
    if len(cert.radicial) != 3:
        raise GammaError("GL4 classification needs a rank-4 element")
    r1, r2, r3 = cert.radicial
    if r1 <= r2 <= r3:
        return GL4Type("type1", n1=r1, n2=r2, n3=r3)
    if r2 <= r1 <= r3:
        return GL4Type("type2", n1=r1, n=r2, n2=r3)
    raise GammaError(
        f"radicial vector {cert.radicial} fits neither GL4 pattern; minimal_form bug"
    )


def mixed_gl3_matrix_spec(n1: int, n2: int, a: int, b: int) -> list[list[IntSeries]]:
    """The non-split GL3 block form: diagonal first entry a*eps^n1, lower
    2x2 block with antidiagonal entries eps^n2 and b*eps^{n2+1}."""
    if n1 > n2:
        raise GammaError("block form needs n1 <= n2")
    z: IntSeries = ()
    return [
        [_int_terms([(n1, a)]), z, z],
        [z, z, _int_terms([(n2, 1)])],
        [z, _int_terms([(n2 + 1, b)]), z],
    ]


def matrix_spec_instantiate(
    mat: Sequence[Sequence[IntSeries]], p: int, horizon: int
) -> list[list[TruncSeries]]:
    field = PrimeField(p)
    return [
        [TruncSeries.from_terms(field, list(e), horizon) for e in row] for row in mat
    ]
