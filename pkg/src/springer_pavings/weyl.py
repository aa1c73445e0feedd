"""Symmetric-group combinatorics: Bruhat order, cosets, and the modified
Bruhat-Tits order on coweights.

Permutations of range(d) are tuples in one-line notation, sigma mapping
i -> sigma[i].  The action on integer vectors is (sigma . v)[sigma[i]] = v[i],
so sigma . e_i = e_{sigma[i]}.

The modified order on coweights is two-stage: distinct Weyl orbits are
compared through dominance partial sums of their dominant representatives;
within one orbit, cosets of the stabilizer are compared by the REVERSED
Bruhat order on minimal-length representatives.  Shifted-Iwahori versions
translate by the shift first.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations

Perm = tuple[int, ...]
Vec = tuple[int, ...]


def identity(d: int) -> Perm:
    return tuple(range(d))


def length(sigma: Perm) -> int:
    """Number of inversions (Coxeter length)."""
    d = len(sigma)
    return sum(1 for i in range(d) for j in range(i + 1, d) if sigma[i] > sigma[j])


def perm_mul(a: Perm, b: Perm) -> Perm:
    """(a b)(i) = a(b(i))."""
    return tuple(a[b[i]] for i in range(len(a)))


def perm_inv(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def act(sigma: Perm, v: Vec) -> Vec:
    """Permute coordinates: sigma . e_i = e_{sigma[i]}."""
    out = [0] * len(v)
    for i, x in enumerate(v):
        out[sigma[i]] = x
    return tuple(out)


@lru_cache(maxsize=None)
def all_perms(d: int) -> tuple[Perm, ...]:
    return tuple(permutations(range(d)))


def bruhat_leq(a: Perm, b: Perm) -> bool:
    """Bruhat order via the rank-matrix (dominance) criterion.

    a <= b iff for all i, j: #{k <= i : a(k) >= j} <= #{k <= i : b(k) >= j}.
    """
    d = len(a)
    for i in range(d - 1):
        for j in range(1, d):
            ca = sum(1 for k in range(i + 1) if a[k] >= j)
            cb = sum(1 for k in range(i + 1) if b[k] >= j)
            if ca > cb:
                return False
    return True


def bruhat_less(a: Perm, b: Perm) -> bool:
    return a != b and bruhat_leq(a, b)


@lru_cache(maxsize=None)
def bruhat_leq_table(d: int) -> dict[tuple[Perm, Perm], bool]:
    """Transitive closure of length-increasing transposition covers.

    Independent of the rank-matrix criterion; used to cross-validate it.
    """
    perms = all_perms(d)
    leq = {(a, a): True for a in perms}
    covers: dict[Perm, list[Perm]] = {a: [] for a in perms}
    for a in perms:
        la = length(a)
        for i in range(d):
            for j in range(i + 1, d):
                t = list(range(d))
                t[i], t[j] = t[j], t[i]
                b = perm_mul(a, tuple(t))
                if length(b) == la + 1:
                    covers[a].append(b)
    # BFS the closure from each element
    order = sorted(perms, key=length, reverse=True)
    up: dict[Perm, set[Perm]] = {a: {a} for a in perms}
    for a in order:
        for b in covers[a]:
            up[a] |= up[b]
    return {(a, b): (b in up[a]) for a in perms for b in perms}


def dominant(v: Vec) -> Vec:
    return tuple(sorted(v, reverse=True))


def dominance_leq(v: Vec, w: Vec) -> bool:
    """Partial sums of dominant vectors; totals must agree."""
    if sum(v) != sum(w):
        raise ValueError("degree mismatch in dominance comparison")
    sv = sw = 0
    for a, b in zip(v[:-1], w[:-1]):
        sv += a
        sw += b
        if sv > sw:
            return False
    return True


def min_coset_rep(v: Vec) -> Perm:
    """Minimal-length sigma with sigma . dominant(v) = v.

    Stable sort positions: the k-th largest value goes to the k-th
    position holding that value, scanning left to right.
    """
    d = len(v)
    idx = sorted(range(d), key=lambda i: (-v[i], i))
    # dominant(v)[k] sits at position idx[k], so sigma[k] = idx[k]
    return tuple(idx)


def stabilizer_is_trivial(v: Vec) -> bool:
    return len(set(v)) == len(v)


def coweight_strictly_less(v: Vec, w: Vec) -> bool:
    """The modified order v < w on coweights (standard Iwahori).

    Distinct orbits: dominance of dominant representatives (strict).
    Same orbit: reversed Bruhat order on minimal-length coset reps.
    """
    if len(v) != len(w):
        raise ValueError("rank mismatch")
    if sum(v) != sum(w):
        raise ValueError("degree mismatch")
    if v == w:
        return False
    dv, dw = dominant(v), dominant(w)
    if dv != dw:
        return dominance_leq(dv, dw)
    gv, gw = min_coset_rep(v), min_coset_rep(w)
    return bruhat_less(gw, gv)


def coweight_less_shifted(v: Vec, w: Vec, a: Vec) -> bool:
    """v < w for the Iwahori conjugated by eps^a: translate then compare."""
    vv = tuple(x - s for x, s in zip(v, a))
    ww = tuple(x - s for x, s in zip(w, a))
    return coweight_strictly_less(vv, ww)


def subset_min_rep(subset: frozenset[int] | tuple[int, ...], d: int) -> Perm:
    """Minimal-length coset representative sending {0..r-1} onto the subset.

    Cosets of W/W_{varpi_r} correspond to r-element subsets; the minimal
    representative lists the subset increasingly, then the complement.
    """
    j = sorted(subset)
    rest = sorted(set(range(d)) - set(j))
    # sigma maps position k to the k-th listed value: sigma[k] = value
    out = [0] * d
    for k, val in enumerate(j + rest):
        out[k] = val
    # one-line notation as "sigma(i) = out.index.." -- we want sigma.{0..r-1} = subset:
    # sigma[i] = out[i] works: sigma(k) = out[k].
    return tuple(out)


def linear_extension(points: list[Vec], less) -> list[Vec]:
    """Deterministic topological sort: minimal elements first, lex tie-break."""
    remaining = sorted(points)
    out: list[Vec] = []
    while remaining:
        for cand in remaining:
            if not any(less(other, cand) for other in remaining if other != cand):
                out.append(cand)
                remaining.remove(cand)
                break
        else:
            raise ValueError("cycle in order relation")
    return out
