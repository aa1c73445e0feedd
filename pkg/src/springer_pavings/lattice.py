"""Lattices in F^d at finite precision: canonical cell coordinates,
limits, duality, truncation windows, and exhaustive enumeration.

A lattice is carried as a ``LatticePoint``: the cell it lives in (shift a,
coweight w, slot windows) plus the finitely many field coefficients of the
unipotent coordinate matrix.  ``canonical_form`` recovers this unique
representative from any basis matrix by echelon reduction under the weight
order of the attracting cocharacter of I_a; the weight of eps^n e_i is
d*n + (d - i) - d*a_i (0-based rows), which is injective across rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from springer_pavings.cells import CellSpec, Window, make_cell
from springer_pavings.series import PrecisionError, PrimeField, TruncSeries

Vec = tuple[int, ...]
Matrix = list[list[TruncSeries]]


class SingularMatrixError(ValueError):
    """The columns do not span a lattice at the available precision."""


class BudgetError(RuntimeError):
    """An enumeration would exceed the configured point-test budget."""


@dataclass(frozen=True)
class LatticePoint:
    """A lattice in canonical cell coordinates.

    coords maps (i, j, n) to a nonzero field element: the coefficient of
    eps^n in the (i, j) entry of the unipotent matrix u; the lattice is
    spanned by the columns of u * diag(eps^w).
    """

    cell: CellSpec
    coords: tuple[tuple[tuple[int, int, int], int], ...]
    field: PrimeField
    horizon: int

    @staticmethod
    def make(cell: CellSpec, coords: dict[tuple[int, int, int], int],
             field: PrimeField, horizon: int) -> "LatticePoint":
        items = tuple(sorted((k, field.reduce(c)) for k, c in coords.items() if field.reduce(c)))
        return LatticePoint(cell, items, field, horizon)

    @property
    def w(self) -> Vec:
        return self.cell.w

    @property
    def degree(self) -> int:
        return sum(self.cell.w)

    def coord_dict(self) -> dict[tuple[int, int, int], int]:
        return dict(self.coords)

    def unipotent_entry(self, i: int, j: int) -> TruncSeries:
        terms = [(n, c) for ((si, sj, n), c) in self.coords if (si, sj) == (i, j)]
        return TruncSeries.from_terms(self.field, terms, self.horizon)

    def translate(self, t: Sequence[int]) -> "LatticePoint":
        cell = self.cell.translate(t)
        coords = {
            (i, j, n + t[i] - t[j]): c for ((i, j, n), c) in self.coords
        }
        return LatticePoint.make(cell, coords, self.field, self.horizon)

    def to_json(self) -> dict:
        return {
            "w": list(self.cell.w),
            "coords": [[i + 1, j + 1, n, c] for ((i, j, n), c) in self.coords],
        }

    def __repr__(self) -> str:
        return f"LatticePoint(w={self.cell.w}, a={self.cell.a}, coords={dict(self.coords)})"


# -- series matrices -------------------------------------------------------


def zero_matrix(d: int, field: PrimeField, horizon: int) -> Matrix:
    return [[TruncSeries.zero(field, horizon) for _ in range(d)] for _ in range(d)]


def identity_matrix(d: int, field: PrimeField, horizon: int) -> Matrix:
    m = zero_matrix(d, field, horizon)
    for i in range(d):
        m[i][i] = TruncSeries.one(field, horizon)
    return m


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    d = len(a)
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            acc = a[i][0] * b[0][j]
            for k in range(1, d):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_vec(a: Matrix, v: list[TruncSeries]) -> list[TruncSeries]:
    d = len(a)
    out = []
    for i in range(d):
        acc = a[i][0] * v[0]
        for k in range(1, d):
            acc = acc + a[i][k] * v[k]
        out.append(acc)
    return out


def mat_transpose(a: Matrix) -> Matrix:
    d = len(a)
    return [[a[j][i] for j in range(d)] for i in range(d)]


def mat_inverse(a: Matrix) -> Matrix:
    """Gauss-Jordan with valuation-minimal pivoting, exact at truncation."""
    d = len(a)
    field = a[0][0].field
    horizon = min(s.horizon for row in a for s in row)
    work = [[s.truncate(horizon) for s in row] for row in a]
    inv = identity_matrix(d, field, horizon)
    used: list[int] = []
    for col in range(d):
        pivot_row, pivot_val = -1, None
        for r in range(d):
            if r in used:
                continue
            s = work[r][col]
            if not s.is_zero() and (pivot_val is None or s.valuation() < pivot_val):
                pivot_row, pivot_val = r, s.valuation()
        if pivot_row < 0:
            raise SingularMatrixError(
                "no pivot in column at available precision"
            )
        used.append(pivot_row)
        piv_inv = work[pivot_row][col].inv()
        work[pivot_row] = [s * piv_inv for s in work[pivot_row]]
        inv[pivot_row] = [s * piv_inv for s in inv[pivot_row]]
        for r in range(d):
            if r == pivot_row:
                continue
            f = work[r][col]
            if f.is_zero():
                continue
            work[r] = [x - f * y for x, y in zip(work[r], work[pivot_row])]
            inv[r] = [x - f * y for x, y in zip(inv[r], inv[pivot_row])]
    # undo the implicit row permutation: work[used[col]] has 1 at col
    perm = [0] * d
    for col, r in enumerate(used):
        perm[col] = r
    return [inv[perm[i]] for i in range(d)]


def basis_matrix(point: LatticePoint, horizon: Optional[int] = None) -> Matrix:
    """Columns are the canonical O-basis eps^{w_j} (e_j + sum u_ij e_i).

    The coordinates are exact polynomials, so the matrix can be built at
    any requested working precision.
    """
    d = point.cell.d
    field = point.field
    if horizon is None:
        horizon = point.horizon
    w = point.cell.w
    mat = zero_matrix(d, field, horizon)
    for j in range(d):
        mat[j][j] = TruncSeries.monomial(field, w[j], 1, horizon)
        for i in range(d):
            if i != j:
                terms = [(n + w[j], c) for ((si, sj, n), c) in point.coords if (si, sj) == (i, j)]
                mat[i][j] = TruncSeries.from_terms(field, terms, horizon)
    return mat


# -- canonical form ---------------------------------------------------------


def _weight(d: int, a: Sequence[int], i: int, n: int) -> int:
    """Attracting weight of the basis line eps^n e_i for the shift a."""
    return d * n + (d - i) - d * a[i]


def canonical_form(mat: Matrix, a: Sequence[int], window: Optional[Window] = None) -> LatticePoint:
    """Unique cell coordinates of the lattice spanned by the columns.

    Greedy echelon: repeatedly select the globally minimal-weight leading
    term among unpivoted columns (the weight order is total), normalize
    that column to make the pivot entry exactly eps^n, and clear every
    other column's pivot-row components at exponents >= n.  Raises
    PrecisionError when a selection would depend on unknown coefficients.
    """
    d = len(mat)
    a = tuple(a)
    field = mat[0][0].field
    cols = [[mat[i][j] for i in range(d)] for j in range(d)]
    pivots: dict[int, tuple[int, int]] = {}  # row -> (col index, exponent)

    def reduce_column(cj: list[TruncSeries], exclude_row: int = -1) -> list[TruncSeries]:
        # clear pivoted-row components at exponents >= the pivot exponent
        guard = 8 * d * (mat[0][0].horizon - min(s.val_lower_bound() for s in cj) + 8)
        for _ in range(max(guard, 16)):
            changed = False
            for row, (pc, pe) in pivots.items():
                if row == exclude_row:
                    continue
                comp = cj[row].restrict_val_ge(pe)
                if comp.is_zero():
                    continue
                t = comp.shift(-pe)  # an O-multiple since comp has val >= pe
                pcol = cols[pc]
                cj = [x - t * y for x, y in zip(cj, pcol)]
                changed = True
            if not changed:
                return cj
        raise PrecisionError("echelon reduction did not stabilize")

    unassigned = list(range(d))
    for _ in range(d):
        best = None  # (weight, col, row, exp)
        for j in unassigned:
            cols[j] = reduce_column(cols[j])
            for i in range(d):
                s = cols[j][i]
                if s.is_zero():
                    continue
                wt = _weight(d, a, i, s.valuation())
                if best is None or wt < best[0]:
                    best = (wt, j, i, s.valuation())
        if best is None:
            raise SingularMatrixError("a column vanished to the horizon")
        wt, j, i, n = best
        # the choice is safe only if no unknown tail could beat it
        for jj in unassigned:
            for ii in range(d):
                s = cols[jj][ii]
                if s.is_zero() and _weight(d, a, ii, s.horizon) <= wt:
                    raise PrecisionError(
                        "pivot selection not resolved below horizon"
                    )
        if i in pivots:
            raise RuntimeError("pivot row selected twice")
        unit = cols[j][i].shift(-n)  # valuation 0
        inv_unit = unit.inv()
        cols[j] = [s * inv_unit for s in cols[j]]
        pivots[i] = (j, n)
        unassigned.remove(j)

    w = [0] * d
    col_of_row = [0] * d
    for row, (pc, pe) in pivots.items():
        w[row] = pe
        col_of_row[row] = pc
    # final full reduction so every column is clean against the other pivots
    for row in range(d):
        j = col_of_row[row]
        cols[j] = reduce_column(cols[j], exclude_row=row)

    cell = make_cell(a, tuple(w), window)
    coords: dict[tuple[int, int, int], int] = {}
    horizon = min(s.horizon for col in cols for s in col)
    for jrow in range(d):
        cj = cols[col_of_row[jrow]]
        for i in range(d):
            if i == jrow:
                continue
            u = cj[i].shift(-w[jrow])
            interval = cell.slot_interval(i, jrow)
            for (n, c) in u.terms():
                if interval is None or not (interval[0] <= n < interval[1]):
                    raise RuntimeError(
                        f"canonical coordinate ({i},{jrow},{n}) outside the cell window"
                    )
                coords[(i, jrow, n)] = c
    base_horizon = min(horizon - w[j] for j in range(d))
    return LatticePoint.make(cell, coords, field, base_horizon)


def _work_horizon(point: LatticePoint, a: Sequence[int]) -> int:
    """Generous precision for echelon work on an exact point (free to raise)."""
    w = point.cell.w
    spread = max(max(abs(x) for x in w), max((abs(x) for x in a), default=0), 1)
    return point.horizon + 4 * point.cell.d * (spread + 1) + 8


def limit_point(point: LatticePoint, a: Sequence[int]) -> Vec:
    """Coweight of the attracting cell of I_a containing the lattice."""
    h = _work_horizon(point, a)
    return canonical_form(basis_matrix(point, h), a).cell.w


# -- solving and membership -------------------------------------------------


def solve_in_lattice(point: LatticePoint, vec: list[TruncSeries]) -> list[TruncSeries]:
    """Coordinates x with B x = vec for the canonical basis B.

    Solves (1 + n) y = vec exactly by a weight-graded triangular solve:
    the cell windows force every term of n to raise the attracting weight
    of I_a strictly, so the coefficient of y at one weight level depends
    only on strictly lower levels.  Unknown coefficients of vec propagate
    into per-row horizons of y; nothing else is lost.
    """
    d = point.cell.d
    field = point.field
    w = point.cell.w
    a = point.cell.a
    # exact terms of the unipotent coordinate matrix
    n_terms: list[tuple[int, int, int, int]] = []  # (i, j, exp, coef)
    for ((i, j, n), c) in point.coords:
        assert d * n + (j - i) + d * (a[j] - a[i]) >= 1, "cell window violated"
        n_terms.append((i, j, n, c))

    lows = [s.val_lower_bound() for s in vec]
    # y = U^{-1} vec; a crude exponent floor: applying n lowers the
    # exponent by at most max(0, -min term exponent) per step, and each
    # step raises the weight by >= 1, so d * span bounds the drop.
    min_shift = min((n for (_, _, n, _) in n_terms), default=0)
    span = max(s.horizon for s in vec) - min(lows)
    floor = min(lows) + min(0, min_shift) * (d * (span + 2))
    # per-row first-unknown exponent, seeded by the inputs
    hz = [s.horizon for s in vec]
    ycoef: list[dict[int, int]] = [dict(s.terms()) for s in vec]
    yh = list(hz)

    # candidate slots sorted by attracting weight
    cap = max(hz)
    slots = [
        (d * e + (d - i) - d * a[i], i, e)
        for i in range(d)
        for e in range(floor, cap)
    ]
    slots.sort()
    for (_, i, e) in slots:
        if e >= yh[i]:
            continue
        acc = ycoef[i].get(e, 0)
        unknown = False
        for (ti, tj, tn, tc) in n_terms:
            if ti != i:
                continue
            src = e - tn
            if src >= yh[tj]:
                unknown = True
                break
            acc = (acc - tc * ycoef[tj].get(src, 0)) % field.p
        if unknown:
            yh[i] = min(yh[i], e)
            continue
        if acc:
            ycoef[i][e] = acc
        elif e in ycoef[i]:
            del ycoef[i][e]
    out = []
    for i in range(d):
        s = TruncSeries.from_terms(field, list(ycoef[i].items()), yh[i])
        out.append(s.shift(-w[i]))
    return out


def vector_in_lattice(point: LatticePoint, vec: list[TruncSeries]) -> bool:
    """Is the vector an O-combination of the canonical basis columns?"""
    x = solve_in_lattice(point, vec)
    return all(s.val_at_least(0) for s in x)


def in_window(point: LatticePoint, window: Window) -> bool:
    """Check both truncation constraints exactly."""
    d = point.cell.d
    w = point.cell.w
    ok = True
    if window.m_low is not None:
        m = window.m_low
        if any(wj < -m for wj in w):
            ok = False
        else:
            for (i, j, lo, hi) in point.cell.slots:
                u = point.unipotent_entry(i, j)
                if not u.is_zero() and u.valuation() + w[j] < -m:
                    ok = False
    if ok and window.m_high is not None:
        t = window.m_high
        field, horizon = point.field, point.horizon
        for i in range(d):
            e = [TruncSeries.zero(field, horizon + t) for _ in range(d)]
            e[i] = TruncSeries.monomial(field, t, 1, horizon + t)
            if not vector_in_lattice(point, e):
                ok = False
                break
    return ok


# -- duality ----------------------------------------------------------------


def dual(point: LatticePoint, a: Sequence[int] | None = None) -> LatticePoint:
    """The trace-pairing dual lattice, re-canonicalized (degree negates)."""
    if a is None:
        a = (0,) * point.cell.d
    mat = basis_matrix(point, _work_horizon(point, a))
    inv_t = mat_transpose(mat_inverse(mat))
    return canonical_form(inv_t, a)


# -- enumeration ------------------------------------------------------------


def coweights_in_window(d: int, m: int, degree: int) -> list[Vec]:
    """All w with w_i >= -m and sum w_i = degree, lexicographic order."""
    out: list[Vec] = []

    def rec(prefix: list[int]) -> None:
        k = len(prefix)
        s = sum(prefix)
        if k == d - 1:
            last = degree - s
            if last >= -m:
                out.append(tuple(prefix) + (last,))
            return
        hi = degree - s + (d - k - 1) * m
        for x in range(-m, hi + 1):
            rec(prefix + [x])

    rec([])
    return sorted(out)


def cell_points(cell: CellSpec, field: PrimeField, horizon: int) -> Iterator[LatticePoint]:
    """Every F_q-point of the cell box, coordinates in slot order."""
    slots = cell.coordinate_slots()
    q = field.p
    total = q ** len(slots)
    for idx in range(total):
        coords: dict[tuple[int, int, int], int] = {}
        rem = idx
        for s in slots:
            rem, c = divmod(rem, q)
            if c:
                coords[s] = c
        yield LatticePoint.make(cell, coords, field, horizon)


def enumerate_window(
    d: int,
    m: int,
    q: int,
    degree: int,
    horizon: int,
    budget: Optional[int] = None,
) -> Iterator[LatticePoint]:
    """Every F_q-point of the degree component of the window, exactly once,
    via the standard-Iwahori paving."""
    field = PrimeField(q)
    window = Window(m_low=m)
    cells = [make_cell((0,) * d, w, window) for w in coweights_in_window(d, m, degree)]
    total = sum(q ** c.dim for c in cells)
    if budget is not None and total > budget:
        raise BudgetError(f"{total} points exceed budget {budget}")
    for cell in cells:
        yield from cell_points(cell, field, horizon)


def count_window(d: int, m: int, q: int, degree: int) -> int:
    """Closed-form |window(F_q)| from the standard paving dimensions."""
    window = Window(m_low=m)
    return sum(
        q ** make_cell((0,) * d, w, window).dim
        for w in coweights_in_window(d, m, degree)
    )
