"""Slice partitions of truncated affine Schubert varieties.

R(v) collects the Weyl translates of the dominant coweights below v with
some tight intermediate partial sum; the complement of R(v) inside the
fixed points of Sch(v) is the fixed-point set of a smaller Schubert
variety Sch(vbar), which drives the recursion.  A cut parameter c
(a half-integer, so floors and ceilings are unambiguous) splits R(v) by
the subset of coordinates above c; each part belongs to one maximal
parabolic and carries the slice machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from springer_pavings import weyl

Vec = tuple[int, ...]


def dominants_below(v: Vec) -> list[Vec]:
    """All dominant coweights <= v in dominance order (equal total)."""
    d = len(v)
    total = sum(v)
    sums = [sum(v[: k + 1]) for k in range(d)]
    out: list[Vec] = []

    def rec(prefix: list[int]) -> None:
        k = len(prefix)
        cur = sum(prefix)
        if k == d:
            if cur == total:
                out.append(tuple(prefix))
            return
        hi = sums[k] - cur
        if prefix:
            hi = min(hi, prefix[-1])
        remaining = d - k
        # remaining entries are <= x each, so x >= ceil((total-cur)/remaining)
        lo = -(-(total - cur) // remaining)
        for x in range(hi, lo - 1, -1):
            rec(prefix + [x])

    rec([])
    return sorted(out, reverse=True)


def sch_fixed_points(v: Vec) -> set[Vec]:
    """All torus-fixed points of the Schubert variety of a dominant v."""
    pts: set[Vec] = set()
    for dom in dominants_below(v):
        for sigma in weyl.all_perms(len(v)):
            pts.add(weyl.act(sigma, dom))
    return pts


def r_set(v: Vec) -> set[Vec]:
    """Translates of dominants below v with a tight partial sum."""
    d = len(v)
    sums = [sum(v[: k + 1]) for k in range(d - 1)]
    pts: set[Vec] = set()
    for dom in dominants_below(v):
        dsums = [sum(dom[: k + 1]) for k in range(d - 1)]
        if any(ds == s for ds, s in zip(dsums, sums)):
            for sigma in weyl.all_perms(d):
                pts.add(weyl.act(sigma, dom))
    return pts


def has_slice_shape(v: Vec) -> bool:
    """v_1 >= v_2 = ... = v_{d-1} >= v_d."""
    d = len(v)
    if d < 2:
        return True
    mid = v[1:-1]
    return (
        all(v[i] >= v[i + 1] for i in range(d - 1))
        and all(x == v[1] for x in mid)
    )


def vbar(v: Vec) -> Optional[Vec]:
    """The smaller dominant coweight with Sch(v)^T = Sch(vbar)^T u R(v).

    None at the recursion bottom, where R(v) already covers everything.
    """
    d = len(v)
    if not has_slice_shape(v):
        raise ValueError(f"{v} does not have the slice shape")
    sch = sch_fixed_points(v)
    r = r_set(v)
    if sch == r:
        return None
    if v[0] > v[1] and v[1] == v[-1]:
        out = (v[0] - d + 1,) + tuple(x + 1 for x in v[1:])
    elif v[0] == v[-2] and v[-2] > v[-1]:
        out = tuple(x - 1 for x in v[:-1]) + (v[-1] + d - 1,)
    else:
        out = (v[0] - 1,) + v[1:-1] + (v[-1] + 1,)
    if not has_slice_shape(out):
        raise RuntimeError(f"vbar({v}) = {out} lost the slice shape")
    sch_bar = sch_fixed_points(out)
    if sch != sch_bar | r or (sch_bar & r):
        raise RuntimeError(f"vbar({v}) = {out} fails the fixed-point identity")
    return out


def choose_c(v: Vec) -> Optional[tuple[int, Fraction]]:
    """The cut parameter as the half-integer midpoint of its interval.

    Returns (case, c): case 1 cuts just above the middle value, case 2
    just below it.  None for central v (no slices).
    """
    if not has_slice_shape(v):
        raise ValueError(f"{v} does not have the slice shape")
    if v[0] > v[1]:
        return 1, Fraction(2 * v[1] + 1, 2)
    if v[-2] > v[-1]:
        return 2, Fraction(2 * v[-2] - 1, 2)
    return None


def above_set(w: Vec, c: Fraction) -> frozenset[int]:
    return frozenset(j for j, x in enumerate(w) if x > c)


def partition_r_set(v: Vec, c: Fraction) -> dict[frozenset[int], list[Vec]]:
    """Split R(v) by the coordinates above the cut; checks the defining
    partial-sum condition of each part."""
    d = len(v)
    parts: dict[frozenset[int], list[Vec]] = {}
    for w in sorted(r_set(v)):
        J = above_set(w, c)
        if not (0 < len(J) < d):
            raise RuntimeError(f"{w} has no proper above-set at c={c}")
        r = len(J)
        if sum(w[j] for j in J) != sum(v[:r]):
            raise RuntimeError(
                f"{w} violates the weight condition for J={sorted(J)} at c={c}"
            )
        parts.setdefault(J, []).append(w)
    return parts


def family_order(d: int, r: int) -> list[frozenset[int]]:
    """Subsets of size r by the reversed Bruhat order of their minimal
    coset representatives (length-descending extension, lex tie-break)."""
    from itertools import combinations

    subs = [frozenset(c) for c in combinations(range(d), r)]
    return sorted(
        subs,
        key=lambda J: (-weyl.length(weyl.subset_min_rep(tuple(sorted(J)), d)),
                       tuple(sorted(J))),
    )


def ordered_slice_families(v: Vec, c: Fraction, case: int) -> list[frozenset[int]]:
    """All proper subsets in paving order: family sizes per the case
    (descending for case 1, ascending for case 2), reversed Bruhat inside."""
    d = len(v)
    sizes = range(d - 1, 0, -1) if case == 1 else range(1, d)
    out: list[frozenset[int]] = []
    for r in sizes:
        out.extend(family_order(d, r))
    return out


def witness_upper(v: Vec, r: int) -> Optional[Vec]:
    """The longest element of the size-r part in case 1; None when empty.

    The emptiness criterion only applies for r >= 2; the size-1 family
    always contains v itself in case 1.
    """
    if r == 1:
        return v
    if v[0] - v[r - 1] <= r - 1:
        return None
    return (v[0] - r + 1,) + tuple(x + 1 for x in v[1:r]) + v[r:]


def witness_lower(v: Vec, r: int) -> Optional[Vec]:
    """The longest element of the size-r part in case 2; None when empty."""
    d = len(v)
    if r == d - 1:
        return v
    if v[r] - v[-1] < d - r:
        return None
    return v[:r] + tuple(x - 1 for x in v[r:-1]) + (v[-1] + d - r - 1,)
