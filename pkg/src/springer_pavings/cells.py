"""Shifted Iwahori subgroups, their cells in the affine Grassmannian, and
the closure-order certificate.

A cell is the intersection of an I_a-orbit of a torus-fixed lattice with
truncation constraints; in canonical coordinates it is a box: each matrix
slot (i, j) carries an exponent interval [lo, hi).  The Iwahori lower bound
for the shift a is the integer ceiling of a_i - a_j + (i - j)/d.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from springer_pavings import weyl

Vec = tuple[int, ...]


def iwahori_lower_bound(a: Sequence[int], i: int, j: int) -> int:
    """Least exponent allowed in slot (i, j) of I_a, 0-based indices."""
    if i == j:
        raise ValueError("diagonal slot has no window")
    return a[i] - a[j] + (1 if i > j else 0)


@dataclass(frozen=True)
class Window:
    """Truncation constraints: m_low bounds L inside eps^{-m_low} O^d,
    m_high bounds L outside eps^{m_high} O^d."""

    m_low: Optional[int] = None
    m_high: Optional[int] = None

    def to_json(self) -> dict:
        return {"m_low": self.m_low, "m_high": self.m_high}

    @staticmethod
    def from_json(obj: dict) -> "Window":
        return Window(obj.get("m_low"), obj.get("m_high"))


@dataclass(frozen=True)
class CellSpec:
    """An Iwahori-orbit cell in canonical box coordinates.

    slots: tuple of (i, j, lo, hi) with lo <= n < hi the allowed exponents
    of the (i, j) entry of the unipotent coordinate matrix.  dim is the
    total number of exponent slots.
    """

    d: int
    a: Vec
    w: Vec
    slots: tuple[tuple[int, int, int, int], ...]
    window: Optional[Window] = None

    @property
    def dim(self) -> int:
        return sum(hi - lo for (_, _, lo, hi) in self.slots)

    def slot_interval(self, i: int, j: int) -> tuple[int, int] | None:
        for (si, sj, lo, hi) in self.slots:
            if (si, sj) == (i, j):
                return (lo, hi)
        return None

    def coordinate_slots(self) -> list[tuple[int, int, int]]:
        """Flattened (i, j, exponent) coordinate list, deterministic order."""
        out = []
        for (i, j, lo, hi) in self.slots:
            for n in range(lo, hi):
                out.append((i, j, n))
        return out

    def translate(self, t: Sequence[int]) -> "CellSpec":
        """Conjugate the whole cell by eps^t (exact coordinate shift)."""
        slots = tuple(
            (i, j, lo + t[i] - t[j], hi + t[i] - t[j]) for (i, j, lo, hi) in self.slots
        )
        return CellSpec(
            self.d,
            tuple(x + y for x, y in zip(self.a, t)),
            tuple(x + y for x, y in zip(self.w, t)),
            slots,
            self.window,
        )

    def to_json(self) -> dict:
        return {
            "a": list(self.a),
            "w": list(self.w),
            "slots": [[i + 1, j + 1, lo, hi] for (i, j, lo, hi) in self.slots],
            "dim": self.dim,
        }


def make_cell(
    a: Sequence[int],
    w: Sequence[int],
    window: Optional[Window] = None,
    col_cuts: Optional[dict[int, int]] = None,
    row_cuts: Optional[dict[int, int]] = None,
    std_lb_slots: Optional[Iterable[tuple[int, int]]] = None,
    drop_slots: Optional[Iterable[tuple[int, int]]] = None,
) -> CellSpec:
    """Cell of I_a through eps^w, cut by truncations.

    The slot (i, j) interval is [max(lb, cuts), w_i - w_j) where lb is the
    Iwahori bound for a; a window with m_low = m contributes the cut
    -m - w_j on every column.  The slice pavings need two refinements:

    * col_cuts[j] = t adds the cut t - w_j on column j (both-sided slice
      truncations at the cut parameter),
    * row_cuts[i] = t adds the cut w_i - t on row i (the dual-type bound),
    * std_lb_slots lists slots whose lower bound is the standard-Iwahori
      one regardless of a (the unipotent-radical part of slice cells),
    * drop_slots lists slots forced empty.
    """
    a = tuple(a)
    w = tuple(w)
    d = len(w)
    if len(a) != d:
        raise ValueError("shift and coweight rank mismatch")
    std_set = set(std_lb_slots or ())
    drop_set = set(drop_slots or ())
    slots = []
    for i in range(d):
        for j in range(d):
            if i == j or (i, j) in drop_set:
                continue
            if (i, j) in std_set:
                lo = 1 if i > j else 0
            else:
                lo = iwahori_lower_bound(a, i, j)
            if window is not None and window.m_low is not None:
                lo = max(lo, -window.m_low - w[j])
            if col_cuts and j in col_cuts:
                lo = max(lo, col_cuts[j] - w[j])
            if row_cuts and i in row_cuts:
                lo = max(lo, w[i] - row_cuts[i])
            hi = w[i] - w[j]
            if lo < hi:
                slots.append((i, j, lo, hi))
    return CellSpec(d, a, w, tuple(slots), window)


def cell_dimension(
    a: Sequence[int], w: Sequence[int], window: Optional[Window] = None
) -> int:
    return make_cell(a, w, window).dim


def bruhat_mod_less(v: Sequence[int], w: Sequence[int], a: Sequence[int]) -> bool:
    """Strict modified Bruhat-Tits order for the shifted Iwahori I_a."""
    return weyl.coweight_less_shifted(tuple(v), tuple(w), tuple(a))


@dataclass(frozen=True)
class OrderCert:
    """Certified strict pairs (v, w) with v < w, all respected by the order."""

    pairs: tuple[tuple[Vec, Vec], ...]


@dataclass(frozen=True)
class OrderViolation:
    piece: str
    earlier: Vec
    later: Vec

    def __str__(self) -> str:
        return (
            f"piece {self.piece}: {self.later} < {self.earlier} "
            "but emitted in the opposite order"
        )


def closure_order_check(
    pieces: Sequence[tuple[str, Sequence[int], Sequence[Sequence[int]]]],
) -> OrderCert | OrderViolation:
    """Verify the emitted within-piece cell orders extend the necessary
    closure relations.

    Each piece is (label, shift a, ordered fixed points).  If u < u' in
    the modified order for I_a, the paving must place u before u'.
    Returns the certificate of all verified strict pairs, or the first
    violation.
    """
    pairs: list[tuple[Vec, Vec]] = []
    for label, a, fixed in pieces:
        a = tuple(a)
        pts = [tuple(u) for u in fixed]
        for x in range(len(pts)):
            for y in range(len(pts)):
                if x == y:
                    continue
                if bruhat_mod_less(pts[x], pts[y], a):
                    if x > y:
                        return OrderViolation(label, pts[y], pts[x])
                    pairs.append((pts[x], pts[y]))
    return OrderCert(tuple(pairs))


def hasse_edges(points: Sequence[Vec], a: Sequence[int]) -> list[tuple[Vec, Vec]]:
    """Covering pairs of the modified order restricted to the point set."""
    pts = [tuple(p) for p in points]
    less = {
        (u, v)
        for u in pts
        for v in pts
        if u != v and bruhat_mod_less(u, v, tuple(a))
    }
    edges = []
    for (u, v) in sorted(less):
        if not any((u, t) in less and (t, v) in less for t in pts):
            edges.append((u, v))
    return edges


def order_graph_dot(points: Sequence[Vec], a: Sequence[int]) -> str:
    """DOT source for the Hasse diagram of the modified order on the set."""
    lines = ["digraph closure_order {", "  rankdir=BT;"]

    def name(v: Vec) -> str:
        return '"' + ",".join(str(x) for x in v) + '"'

    for v in sorted(tuple(p) for p in points):
        lines.append(f"  {name(v)};")
    for (u, v) in hasse_edges(points, a):
        lines.append(f"  {name(u)} -> {name(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
