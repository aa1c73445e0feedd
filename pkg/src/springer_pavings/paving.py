"""Construction of the affine-space pavings: GL3 slice pavings (recursive),
the GL4 algorithm for both radicial types, and the certification driver.

All emitted cells are explicit coordinate boxes, so every certified count
is an exhaustive enumeration.  For GL4 the refined cells fiber over a GL3
sub-paving: their points are counted by scanning the ambient boxes of the
piece and classifying each surviving point's lower 3x3 block into its GL3
cell (an exact per-point computation reusing the scalar canonical form).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Optional, Sequence

from springer_pavings import batch, slices, weyl
from springer_pavings.cells import (
    CellSpec,
    OrderCert,
    OrderViolation,
    Window,
    bruhat_mod_less,
    closure_order_check,
    make_cell,
)
from springer_pavings.gamma import (
    GL4Type,
    GammaError,
    GammaSpec,
    MinimalFormCert,
    classify_gl4,
    minimal_form,
)
from springer_pavings.lattice import (
    BudgetError,
    LatticePoint,
    coweights_in_window,
    limit_point,
)
from springer_pavings.series import default_horizon
from springer_pavings.springer import (
    NotPure,
    budget_from_env,
    count_cell,
    power_check,
)

Vec = tuple[int, ...]


# -- structure dataclasses ---------------------------------------------------


@dataclass(frozen=True)
class BaseRef:
    """A GL1/GL2 base cell whose Springer dimension is read empirically."""

    cell: CellSpec  # in the block's own coordinates (d <= 2)
    gamma_idx: tuple[int, ...]  # indices into the block gamma

    @property
    def key(self) -> tuple:
        return (self.cell.a, self.cell.w, self.cell.slots, self.gamma_idx)


@dataclass
class SubCell:
    """One affine cell of a GL3-level paving."""

    order_key: Vec  # fixed point indexing the cell within its piece
    box: CellSpec  # enumerable ambient box
    kernel: int  # closed-form fiber-kernel contribution
    base: Optional[BaseRef]  # empirically-read base dimension (None = 0)
    claimed_dim: Optional[int] = None
    counts: dict = field(default_factory=dict)


@dataclass
class SubPiece:
    label: str
    shift: Vec
    method: str  # "std" | "plus" | "minus" | "point"
    cells: list[SubCell]

    def fixed_points(self) -> list[Vec]:
        return [c.order_key for c in self.cells]


@dataclass
class GL3Paving:
    """Ordered pieces paving a truncated GL3 Schubert region."""

    nu: tuple  # 3x3 root-valuation matrix of the block
    region_points: list[Vec]  # all fixed points of the region
    pieces: list[SubPiece]
    piece_of_w: dict  # std fixed point -> piece index

    def classify(self, point: LatticePoint, w_std: Vec) -> tuple[int, int]:
        """(piece, cell) of a region point whose standard limit is known."""
        pi = self.piece_of_w[w_std]
        piece = self.pieces[pi]
        if piece.method in ("std", "point"):
            key = w_std
        else:
            key = limit_point(point, piece.shift)
        for ci, cell in enumerate(piece.cells):
            if cell.order_key == key:
                return pi, ci
        raise RuntimeError(
            f"point at {w_std} has limit {key} outside piece {piece.label}"
        )

    def all_cells(self):
        for pi, piece in enumerate(self.pieces):
            for ci, cell in enumerate(piece.cells):
                yield pi, ci, piece, cell


# -- GL3 cell constructions --------------------------------------------------


def _gl3_shift_from_nu(nu) -> Vec:
    """The slice shift (n1, n2, n2) of a minimal-form GL3 block."""
    n1, n2 = nu[0][1], nu[1][2]
    if not (n1 <= n2 and nu[0][2] == n1):
        raise GammaError(
            f"GL3 block not in ascending minimal form: nu={nu}"
        )
    return (n1, n2, n2)


def _kernel_dim(w: Vec, roots: Sequence[tuple[int, int]], nu) -> int:
    """Fiber kernel over the cell of w: per root, the part of the unipotent
    quotient killed by ad(gamma)."""
    total = 0
    for (i, j) in roots:
        lb = 1 if i > j else 0
        q = max(0, w[i] - w[j] - lb)
        r = max(0, w[i] - w[j] - lb - nu[i][j])
        total += q - r
    return total


def _std_lb(i: int, j: int) -> int:
    return 1 if i > j else 0


def build_gl3_slice_piece(
    nu,
    J: frozenset[int],
    c: Fraction,
    pts: Sequence[Vec],
    window: Window,
    label: str,
) -> SubPiece:
    """One slice family: the piece over the fixed-point set pts for the
    maximal parabolic with above-set J, recut at the parameter c."""
    a_fam = _gl3_shift_from_nu(nu)
    Js = tuple(sorted(J))
    Jbar = tuple(sorted(set(range(3)) - J))
    for w in pts:
        if not all(w[j] > c for j in Js) or not all(w[j] < c for j in Jbar):
            raise ValueError(f"{w} does not match the above-set {Js} at c={c}")

    if J == frozenset({0}) or J == frozenset({1, 2}):
        method = "std"
        shift: Vec = (0, 0, 0)
        roots = [(0, 1), (0, 2)] if J == frozenset({0}) else [(1, 0), (2, 0)]

        def cell_box(w: Vec) -> CellSpec:
            return make_cell(shift, w, window)

        def base_of(w: Vec) -> BaseRef:
            sub = make_cell((0, 0), (w[1], w[2]))
            return BaseRef(sub, (1, 2))

    elif len(J) == 2:  # J = {0, k}: recut with I_{+a}
        method = "plus"
        shift = a_fam
        k = [x for x in Js if x != 0][0]
        jbar = Jbar[0]
        roots = [(i, jbar) for i in Js]
        t_up = ceil(c)

        def cell_box(w: Vec) -> CellSpec:
            return make_cell(
                shift,
                w,
                window,
                col_cuts={j: t_up for j in Js},
                std_lb_slots=[(i, jbar) for i in Js],
            )

        def base_of(w: Vec) -> BaseRef:
            a2 = (shift[0], shift[k])
            sub = make_cell(a2, (w[0], w[k]), col_cuts={0: t_up, 1: t_up})
            return BaseRef(sub, (0, k))

    else:  # J = {k}, k != 0: recut with I_{-a}
        method = "minus"
        shift = tuple(-x for x in a_fam)
        k = Js[0]
        roots = [(k, j) for j in Jbar]
        t_dn = floor(c)

        def cell_box(w: Vec) -> CellSpec:
            return make_cell(
                shift,
                w,
                window,
                row_cuts={i: t_dn for i in Jbar},
                std_lb_slots=[(k, j) for j in Jbar],
            )

        def base_of(w: Vec) -> BaseRef:
            p, q = Jbar
            a2 = (shift[p], shift[q])
            sub = make_cell(a2, (w[p], w[q]), row_cuts={0: t_dn, 1: t_dn})
            return BaseRef(sub, (p, q))

    ordered = weyl.linear_extension(
        [tuple(w) for w in pts], lambda u, v: bruhat_mod_less(u, v, shift)
    )
    cells = []
    for w in ordered:
        box = cell_box(w)
        base = base_of(w)
        kern = _kernel_dim(w, roots, nu)
        # the box must factor as N-part x base block coordinates
        n_dims = sum(max(0, w[i] - w[j] - _std_lb(i, j)) for (i, j) in roots)
        if box.dim != n_dims + base.cell.dim:
            raise RuntimeError(
                f"slice cell at {w} (J={Js}) does not factor: "
                f"{box.dim} != {n_dims} + {base.cell.dim}"
            )
        cells.append(SubCell(w, box, kern, base))
    return SubPiece(label, shift, method, cells)


def build_gl3_paving(nu, v_top: Vec, floor_exp: int, label_prefix: str = "") -> GL3Paving:
    """Recursive slice paving of Sch(v_top) cut to the window above
    eps^{floor_exp} O^3, pieces ordered deepest level first."""
    window = Window(m_low=-floor_exp)
    levels = []
    v: Optional[Vec] = v_top
    while v is not None:
        if v[0] == v[-1]:  # central: a single fixed point
            levels.append(("point", v, None, None))
            break
        case_c = slices.choose_c(v)
        assert case_c is not None
        case, c = case_c
        parts = slices.partition_r_set(v, c)
        levels.append(("slices", v, case, (c, parts)))
        v = slices.vbar(v)

    in_window = lambda w: all(x >= floor_exp for x in w)
    pieces: list[SubPiece] = []
    for depth, (kind, v, case, payload) in enumerate(reversed(levels)):
        lab = f"{label_prefix}L{len(levels) - 1 - depth}(v={','.join(map(str, v))})"
        if kind == "point":
            if in_window(v):
                box = make_cell((0, 0, 0), v, window)
                assert box.dim == 0
                pieces.append(
                    SubPiece(lab + ":pt", (0, 0, 0), "point", [SubCell(v, box, 0, None)])
                )
            continue
        c, parts = payload
        for J in slices.ordered_slice_families(v, c, case):
            pts = [w for w in parts.get(J, []) if in_window(w)]
            if not pts:
                continue
            label = lab + f":J={''.join(str(j + 1) for j in sorted(J))}"
            pieces.append(build_gl3_slice_piece(nu, J, c, pts, window, label))

    piece_of_w = {}
    region = []
    for pi, piece in enumerate(pieces):
        for w in piece.fixed_points():
            if piece.method in ("std", "point"):
                key = w
            else:
                key = w  # fixed points agree across shifts
            if key in piece_of_w:
                raise RuntimeError(f"fixed point {key} in two pieces")
            piece_of_w[key] = pi
            region.append(key)
    expected = {
        w
        for w in slices.sch_fixed_points(v_top)
        if in_window(w)
    }
    if set(region) != expected:
        missing = expected - set(region)
        extra = set(region) - expected
        raise RuntimeError(
            f"paving fixed points mismatch: missing {sorted(missing)[:4]}, "
            f"extra {sorted(extra)[:4]}"
        )
    return GL3Paving(nu, sorted(region), pieces, piece_of_w)


def translate_gl3(paving: GL3Paving, t: Vec) -> GL3Paving:
    """Conjugate a GL3 paving by eps^t (cells, shifts, fixed points)."""
    pieces = []
    for piece in paving.pieces:
        cells = []
        for cell in piece.cells:
            base = cell.base
            if base is not None:
                tsub = tuple(t[i] for i in base.gamma_idx)
                base = BaseRef(base.cell.translate(tsub), base.gamma_idx)
            cells.append(
                SubCell(
                    tuple(x + y for x, y in zip(cell.order_key, t)),
                    cell.box.translate(t),
                    cell.kernel,
                    base,
                )
            )
        pieces.append(
            SubPiece(
                piece.label + f"+eps^{list(t)}",
                tuple(x + y for x, y in zip(piece.shift, t)),
                piece.method,
                cells,
            )
        )
    piece_of_w = {
        tuple(x + y for x, y in zip(w, t)): pi for w, pi in paving.piece_of_w.items()
    }
    region = sorted(piece_of_w)
    return GL3Paving(paving.nu, region, pieces, piece_of_w)


def gl3_region_paving(nu, degree: int, floor_exp: int, label_prefix: str = "") -> GL3Paving:
    """Paving of the full degree component of the window above floor_exp."""
    v_top = (degree - 2 * floor_exp, floor_exp, floor_exp)
    if not (v_top[0] >= v_top[1]):
        raise ValueError("empty region")
    return build_gl3_paving(nu, v_top, floor_exp, label_prefix)


# -- reports and certification ------------------------------------------------


@dataclass
class PavingReport:
    """Ordered pieces with per-cell claimed dimensions and per-prime counts."""

    label: str
    primes: tuple[int, ...]
    pieces: list[dict]
    total_dims: list[int]
    totals: dict
    region_counts: dict
    status: str
    failures: list[str]
    order_pairs: int = 0

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "primes": list(self.primes),
            "pieces": self.pieces,
            "total_dims": self.total_dims,
            "totals": {str(q): n for q, n in sorted(self.totals.items())},
            "region_counts": {str(q): n for q, n in sorted(self.region_counts.items())},
            "status": self.status,
            "failures": self.failures,
            "order_pairs": self.order_pairs,
        }


def _block_spec(gspec: GammaSpec, idx: Sequence[int]) -> GammaSpec:
    return GammaSpec(tuple(gspec.entries[i] for i in idx))


def _read_base_dims(
    base_refs: dict,
    gspec: GammaSpec,
    primes: Sequence[int],
    horizon: int,
    failures: list[str],
) -> dict:
    """Empirical Springer dimension of every distinct GL1/GL2 base cell,
    via power_check across the supplied primes."""
    dims: dict = {}
    for key, ref in base_refs.items():
        counts = {}
        for q in primes:
            sub = _block_spec(gspec, ref.gamma_idx)
            gd = sub.instantiate(q, horizon)
            counts[q] = count_cell(ref.cell, gd, q, horizon=horizon).count
        e = power_check(counts)
        if isinstance(e, NotPure):
            failures.append(
                f"base cell {ref.cell.to_json()} not a q-power: {counts}"
            )
            dims[key] = None
        else:
            dims[key] = e
    return dims


def _collect_base_refs(paving: GL3Paving) -> dict:
    refs: dict = {}
    for _, _, _, cell in paving.all_cells():
        if cell.base is not None:
            refs[cell.base.key] = cell.base
    return refs


def _region_std_cells(points: Sequence[Vec], window: Window) -> list[CellSpec]:
    d = len(points[0])
    return [make_cell((0,) * d, w, window) for w in sorted(points)]


def certify_gl3(
    paving: GL3Paving,
    gspec: GammaSpec,
    primes: Sequence[int],
    floor_exp: int,
    label: str = "gl3",
    horizon: Optional[int] = None,
    budget: Optional[int] = None,
    jobs: int = 1,
) -> PavingReport:
    """Count every cell at every prime and check the purity certificate."""
    if budget is None:
        budget = budget_from_env()
    if horizon is None:
        horizon = default_horizon(3, -floor_exp, gspec.nu_max())
    failures: list[str] = []
    window = Window(m_low=-floor_exp)

    base_dims = _read_base_dims(
        _collect_base_refs(paving), gspec, primes, horizon, failures
    )
    gammas = {q: gspec.instantiate(q, horizon) for q in primes}

    spent = 0
    for _, _, piece, cell in paving.all_cells():
        base_e = 0
        if cell.base is not None:
            e = base_dims[cell.base.key]
            if e is None:
                cell.claimed_dim = None
                continue
            base_e = e
        cell.claimed_dim = cell.kernel + base_e
        for q in primes:
            spent += q ** cell.box.dim
            if spent > budget:
                raise BudgetError(f"certification exceeds budget {budget}")
            n = count_cell(cell.box, gammas[q], q, horizon=horizon, jobs=jobs).count
            cell.counts[q] = n
            if n != q ** cell.claimed_dim:
                failures.append(
                    f"{piece.label} cell {cell.order_key}: count {n} != "
                    f"{q}^{cell.claimed_dim}"
                )

    totals = {
        q: sum(cell.counts.get(q, 0) for _, _, _, cell in paving.all_cells())
        for q in primes
    }
    region_counts = {}
    for q in primes:
        n = 0
        for rc in _region_std_cells(paving.region_points, window):
            spent += q ** rc.dim
            if spent > budget:
                raise BudgetError(f"region count exceeds budget {budget}")
            n += count_cell(rc, gammas[q], q, horizon=horizon, jobs=jobs).count
        region_counts[q] = n
        if totals[q] != n:
            failures.append(f"totals at q={q}: paving {totals[q]} != region {n}")

    order_input = [
        (piece.label, piece.shift, piece.fixed_points()) for piece in paving.pieces
    ]
    cert = closure_order_check(order_input)
    if isinstance(cert, OrderViolation):
        failures.append(str(cert))
        pairs = 0
    else:
        pairs = len(cert.pairs)

    pieces_json = []
    for piece in paving.pieces:
        pieces_json.append(
            {
                "label": piece.label,
                "a": list(piece.shift),
                "cells": [
                    {
                        "w": list(cell.order_key),
                        "dim": cell.claimed_dim,
                        "counts": {str(q): cell.counts.get(q) for q in primes},
                    }
                    for cell in piece.cells
                ],
            }
        )
    dims = sorted(
        cell.claimed_dim
        for _, _, _, cell in paving.all_cells()
        if cell.claimed_dim is not None
    )
    status = "pure" if not failures else "failed"
    return PavingReport(
        label, tuple(primes), pieces_json, dims, totals, region_counts,
        status, failures, pairs,
    )


def gl3_paving_certified(
    gspec: GammaSpec,
    v: Vec,
    primes: Sequence[int],
    horizon: Optional[int] = None,
    budget: Optional[int] = None,
    jobs: int = 1,
) -> tuple[GL3Paving, PavingReport]:
    """Build and certify the slice paving of Sch(v) for a diagonal regular
    integral GL3 element in ascending minimal form."""
    if gspec.d != 3:
        raise GammaError("gl3 paving needs a rank-3 element")
    if not gspec.is_integral():
        raise GammaError("gamma must be integral")
    nu = gspec.nu_int()
    _gl3_shift_from_nu(nu)  # validates minimal form
    if not slices.has_slice_shape(v):
        raise ValueError(f"v={v} lacks the slice shape")
    floor_exp = v[-1]
    paving = build_gl3_paving(nu, v, floor_exp)
    report = certify_gl3(
        paving, gspec, primes, floor_exp,
        label=f"gl3:v={list(v)}", horizon=horizon, budget=budget, jobs=jobs,
    )
    return paving, report


# -- the corner paving for the non-split GL3 form ------------------------------


def gl3_corner_paving_check(
    n1: int,
    n2: int,
    a_unit: int,
    b_unit: int,
    m: int,
    primes: Sequence[int],
    horizon: Optional[int] = None,
    budget: Optional[int] = None,
    jobs: int = 1,
) -> PavingReport:
    """Pave the degree-0 window with the corner Iwahori Ad(diag(eps^{3m},1,1))I
    and verify every nonempty cell meets the fiber in a single q-power.

    gamma here is the non-split block form (diagonal first entry, lower 2x2
    block with antidiagonal entries); no slice machinery is used.
    """
    from springer_pavings.gamma import matrix_spec_instantiate, mixed_gl3_matrix_spec

    if budget is None:
        budget = budget_from_env()
    if horizon is None:
        horizon = default_horizon(3, m, n2 + 1)
    failures: list[str] = []
    window = Window(m_low=m)
    shift = (3 * m, 0, 0)
    points = coweights_in_window(3, m, 0)
    ordered = weyl.linear_extension(
        points, lambda u, v: bruhat_mod_less(u, v, shift)
    )
    mat_spec = mixed_gl3_matrix_spec(n1, n2, a_unit, b_unit)
    mats = {q: matrix_spec_instantiate(mat_spec, q, horizon) for q in primes}

    cells_json = []
    dims = []
    totals = {q: 0 for q in primes}
    spent = 0
    for w in ordered:
        box = make_cell(shift, w, window)
        counts = {}
        for q in primes:
            spent += q ** box.dim
            if spent > budget:
                raise BudgetError(f"corner check exceeds budget {budget}")
            counts[q] = count_cell(box, mats[q], q, horizon=horizon, jobs=jobs).count
            totals[q] += counts[q]
        if all(n == 0 for n in counts.values()):
            dim = None
        else:
            e = power_check(counts)
            if isinstance(e, NotPure):
                failures.append(f"corner cell {w}: counts {counts} not a q-power")
                dim = None
            else:
                dim = e
                dims.append(e)
        cells_json.append(
            {"w": list(w), "dim": dim, "counts": {str(q): counts[q] for q in primes}}
        )

    region_counts = {}
    for q in primes:
        n = 0
        for rc in _region_std_cells(points, window):
            spent += q ** rc.dim
            if spent > budget:
                raise BudgetError(f"corner region count exceeds budget {budget}")
            n += count_cell(rc, mats[q], q, horizon=horizon, jobs=jobs).count
        region_counts[q] = n
        if totals[q] != n:
            failures.append(f"corner totals at q={q}: {totals[q]} != region {n}")

    cert = closure_order_check([("corner", shift, ordered)])
    pairs = 0
    if isinstance(cert, OrderViolation):
        failures.append(str(cert))
    else:
        pairs = len(cert.pairs)
    status = "pure" if not failures else "failed"
    return PavingReport(
        f"gl3-corner:m={m}", tuple(primes),
        [{"label": "corner", "a": list(shift), "cells": cells_json}],
        sorted(dims), totals, region_counts, status, failures, pairs,
    )


# -- GL4: the main algorithm ---------------------------------------------------


@dataclass
class GL4Piece:
    """One locally closed piece of the GL4 paving.

    Fibered pieces retract onto a GL3 sub-paving with constant fiber-kernel
    dimension; box pieces (the complement of the closed part in type 2)
    are unions of single affine cells.
    """

    label: str
    b: int
    kind: str  # "fibered" | "boxes"
    shift: Vec
    sigma: list[Vec]
    boxes: list[CellSpec]
    kernel: Optional[int] = None
    sub: Optional[GL3Paving] = None
    cells: Optional[list[SubCell]] = None


@dataclass
class GL4Paving:
    m: int
    gtype: GL4Type
    nu: tuple
    pieces: list[GL4Piece]


def gl4_fiber_kernel_dim(w: Vec, m: int, nu, col: int = 0) -> int:
    """Kernel dimension of ad(gamma) on the column-`col` unipotent quotient
    with window exponent -m - w_col."""
    d = len(w)
    total = 0
    for i in range(d):
        if i == col:
            continue
        lo = -m - w[col]
        q = max(0, w[i] - w[col] - lo)
        r = max(0, w[i] - w[col] - lo - nu[i][col])
        total += q - r
    return total


def _sigma_partition(points3: Sequence[Vec], c: Fraction):
    """Split a level's GL3-coordinate fixed points by their pattern against
    the cut: the all-one-side part, the pair-above parts (pinned low
    coordinate), the single-above parts (pinned high coordinate).

    Returns (sigma0, pairs, singles) with pairs/singles keyed by
    (above-set, pinned value).
    """
    sigma0: list[Vec] = []
    pairs: dict = {}
    singles: dict = {}
    for u in sorted(points3):
        J = frozenset(j for j in range(3) if u[j] > c)
        if len(J) in (0, 3):
            sigma0.append(u)
        elif len(J) == 2:
            low = next(j for j in range(3) if j not in J)
            pairs.setdefault((J, u[low]), []).append(u)
        else:
            high = next(iter(J))
            singles.setdefault((J, u[high]), []).append(u)
    return sigma0, pairs, singles


def _ordered_sigma_pieces(points3: Sequence[Vec], c: Fraction):
    """Sigma pieces in paving order: the all-one-side residual first, then
    the families per the slice-case order (pairs before singles when the
    residual is the all-above type), reversed Bruhat inside a family, the
    pinned value ascending as tie-break."""
    sigma0, pairs, singles = _sigma_partition(points3, c)
    above_case = bool(sigma0) and all(x > c for x in sigma0[0])
    if not sigma0:
        total = sum(points3[0]) if points3 else 0
        above_case = c < Fraction(total, 3)
    out = []
    if sigma0:
        tag = "S0>" if above_case else "S0<"
        out.append((tag, None, None, sigma0))

    def family(parts: dict, r: int, sym: str):
        res = []
        for J in slices.family_order(3, r):
            keys = sorted(k for k in parts if k[0] == J)
            for (JJ, pinned) in keys:
                res.append((f"{sym}{''.join(str(j+1) for j in sorted(JJ))}@{pinned}",
                            JJ, pinned, parts[(JJ, pinned)]))
        return res

    if above_case:
        out.extend(family(pairs, 2, "S"))
        out.extend(family(singles, 1, "S*"))
    else:
        out.extend(family(singles, 1, "S*"))
        out.extend(family(pairs, 2, "S"))
    return out


def _wrap_single_piece(nu3, piece: SubPiece) -> GL3Paving:
    pts = piece.fixed_points()
    return GL3Paving(nu3, sorted(pts), [piece], {w: 0 for w in pts})


def _sigma0_paving(nu3, pts3: Sequence[Vec], c: Fraction, m: int, label: str) -> GL3Paving:
    """The all-one-side region is a (window-cut) Schubert variety; pave it
    with the full recursion."""
    delta = sum(pts3[0])
    if all(x > c for x in pts3[0]):
        t0 = ceil(c)
        v_top = (delta - 2 * t0, t0, t0)
        floor_exp = t0
    else:
        t1 = floor(c)
        v_top = (t1, t1, delta - 2 * t1)
        floor_exp = -m
    sub = build_gl3_paving(nu3, v_top, floor_exp, label_prefix=label + ":")
    if set(sub.region_points) != set(pts3):
        raise RuntimeError(
            f"{label}: sigma0 region mismatch {sorted(set(pts3) ^ set(sub.region_points))[:4]}"
        )
    return sub


def _block_nu(nu, idx: Sequence[int]):
    return tuple(tuple(nu[i][j] if i != j else None for j in idx) for i in idx)


def build_gl4_paving(gspec: GammaSpec, m: int) -> GL4Paving:
    """The GL4 paving of the degree-0 window for a diagonal regular integral
    element already in minimal form with a classified radicial type."""
    if gspec.d != 4:
        raise GammaError("gl4 paving needs a rank-4 element")
    if not gspec.is_integral():
        raise GammaError("gamma must be integral")
    nu = gspec.nu_int()
    rad = (nu[0][1], nu[1][2], nu[2][3])
    from springer_pavings.gamma import is_minimal_form

    if not is_minimal_form(nu):
        raise GammaError("gamma is not in minimal form; conjugate first")
    gtype = classify_gl4(MinimalFormCert((0, 1, 2, 3), rad))
    window = Window(m_low=m)
    nu3 = _block_nu(nu, (1, 2, 3))
    all_w = coweights_in_window(4, m, 0)
    pieces: list[GL4Piece] = []

    if gtype.kind == "type1":
        n1 = gtype.n1
        c4 = Fraction(2 * (n1 - m) - 1, 2)
        a_corner = (4 * m, 0, 0, 0)
        for b in range(3 * m, -m - 1, -1):
            r_b = [w for w in all_w if w[0] == b]
            if not r_b:
                continue
            for (tag, J3, pinned, pts3) in _ordered_sigma_pieces(
                [w[1:] for w in r_b], c4
            ):
                label = f"V{b}:{tag}"
                if J3 is None:
                    sub = _sigma0_paving(nu3, pts3, c4, m, label)
                else:
                    piece = build_gl3_slice_piece(
                        nu3, J3, c4, pts3, window, label
                    )
                    sub = _wrap_single_piece(nu3, piece)
                sigma4 = [(b,) + u for u in sorted(pts3)]
                kernels = {gl4_fiber_kernel_dim(w, m, nu) for w in sigma4}
                if len(kernels) != 1:
                    raise RuntimeError(f"{label}: kernel not constant: {kernels}")
                boxes = [make_cell(a_corner, w, window) for w in sigma4]
                pieces.append(
                    GL4Piece(label, b, "fibered", a_corner, sigma4, boxes,
                             kernels.pop(), sub)
                )
    else:
        n1, n, n2 = gtype.n1, gtype.n, gtype.n2
        a3 = n1 - n
        A = (4 * m + a3, a3, 0, 0)
        ct = Fraction(2 * (n - m) - 1, 2)
        t3 = (a3, 0, 0)
        for b in range(3 * m, -m - 1, -1):
            r_b = [w for w in all_w if w[0] == b]
            if not r_b:
                continue
            r_b1 = [w for w in r_b if w[1] >= -m + a3]
            residual = [w for w in r_b if w[1] < -m + a3]
            if r_b1:
                pts3pp = [(w[1] - a3, w[2], w[3]) for w in r_b1]
                for (tag, J3, pinned, ptspp) in _ordered_sigma_pieces(pts3pp, ct):
                    label = f"V{b}.1:{tag}"
                    if J3 is None:
                        subpp = _sigma0_paving(nu3, ptspp, ct, m, label)
                    else:
                        piece = build_gl3_slice_piece(
                            nu3, J3, ct, ptspp, window, label
                        )
                        subpp = _wrap_single_piece(nu3, piece)
                    sub = translate_gl3(subpp, t3)
                    sigma4 = [
                        (b, u[0] + a3, u[1], u[2]) for u in sorted(ptspp)
                    ]
                    kernels = {gl4_fiber_kernel_dim(w, m, nu) for w in sigma4}
                    if len(kernels) != 1:
                        raise RuntimeError(f"{label}: kernel not constant: {kernels}")
                    boxes = [make_cell(A, w, window) for w in sigma4]
                    pieces.append(
                        GL4Piece(label, b, "fibered", A, sigma4, boxes,
                                 kernels.pop(), sub)
                    )
            if residual:
                ordered = weyl.linear_extension(
                    residual, lambda u, v: bruhat_mod_less(u, v, A)
                )
                cells = []
                boxes = []
                for w in ordered:
                    box = make_cell(A, w, window)
                    kern1 = gl4_fiber_kernel_dim(w, m, nu, col=0)
                    # second retraction: the column-2 unipotent part
                    kern2 = 0
                    for i in (2, 3):
                        from springer_pavings.cells import iwahori_lower_bound

                        lo = max(iwahori_lower_bound(A, i, 1), -m - w[1])
                        q = max(0, w[i] - w[1] - lo)
                        r = max(0, w[i] - w[1] - lo - nu[i][1])
                        kern2 += q - r
                    base = BaseRef(make_cell((0, 0), (w[2], w[3])), (2, 3))
                    cells.append(SubCell(w, box, kern1 + kern2, base))
                    boxes.append(box)
                pieces.append(
                    GL4Piece(f"V{b}\\V{b}.1", b, "boxes", A, list(ordered),
                             boxes, None, None, cells)
                )
    return GL4Paving(m, gtype, tuple(tuple(r) for r in nu), pieces)


def _extract_block(point: LatticePoint) -> LatticePoint:
    """The lower 3x3 block lattice of a GL4 point whose first-row slots are
    empty (the Iwasawa projection onto the Levi's GL3 factor)."""
    cell = point.cell
    for (i, j, lo, hi) in cell.slots:
        if i == 0 and j >= 1:
            raise RuntimeError("first-row slot present; block extraction invalid")
    sub_slots = tuple(
        (i - 1, j - 1, lo, hi) for (i, j, lo, hi) in cell.slots if i >= 1 and j >= 1
    )
    sub_cell = CellSpec(3, cell.a[1:], cell.w[1:], sub_slots, None)
    sub_coords = {
        (i - 1, j - 1, n): c for ((i, j, n), c) in point.coords if i >= 1 and j >= 1
    }
    return LatticePoint.make(sub_cell, sub_coords, point.field, point.horizon)


def certify_gl4(
    paving: GL4Paving,
    gspec: GammaSpec,
    primes: Sequence[int],
    label: str = "gl4",
    horizon: Optional[int] = None,
    budget: Optional[int] = None,
    jobs: int = 1,
) -> PavingReport:
    """Scan every piece at every prime, classify surviving points onto the
    GL3 sub-pavings, and check all per-cell counts, totals, and orders."""
    m = paving.m
    if budget is None:
        budget = budget_from_env()
    if horizon is None:
        horizon = default_horizon(4, m, gspec.nu_max())
    failures: list[str] = []
    window = Window(m_low=m)

    base_refs: dict = {}
    for piece in paving.pieces:
        if piece.kind == "fibered":
            for key, ref in _collect_base_refs(piece.sub).items():
                base_refs.setdefault(key, (ref, True))  # block-relative indices
        else:
            for cell in piece.cells:
                if cell.base is not None:
                    base_refs.setdefault(cell.base.key, (cell.base, False))
    # resolve block-relative gamma indices (GL3 block = rows 1..3)
    resolved = {
        key: BaseRef(ref.cell, tuple(i + 1 for i in ref.gamma_idx) if rel else ref.gamma_idx)
        for key, (ref, rel) in base_refs.items()
    }
    base_dims = _read_base_dims(resolved, gspec, primes, horizon, failures)

    gammas = {q: gspec.instantiate(q, horizon) for q in primes}
    pieces_json = []
    dims: list[int] = []
    totals = {q: 0 for q in primes}
    spent = 0
    order_input = []

    for piece in paving.pieces:
        if piece.kind == "boxes":
            cells_json = []
            for cell in piece.cells:
                e = base_dims.get(cell.base.key) if cell.base else 0
                if e is None:
                    cell.claimed_dim = None
                    continue
                cell.claimed_dim = cell.kernel + e
                dims.append(cell.claimed_dim)
                for q in primes:
                    spent += q ** cell.box.dim
                    if spent > budget:
                        raise BudgetError(f"certification exceeds budget {budget}")
                    nq = count_cell(
                        cell.box, gammas[q], q, horizon=horizon, jobs=jobs
                    ).count
                    cell.counts[q] = nq
                    totals[q] += nq
                    if nq != q ** cell.claimed_dim:
                        failures.append(
                            f"{piece.label} cell {cell.order_key}: {nq} != "
                            f"{q}^{cell.claimed_dim}"
                        )
                cells_json.append(
                    {"w": list(cell.order_key), "dim": cell.claimed_dim,
                     "counts": {str(q): cell.counts.get(q) for q in primes}}
                )
            order_input.append(
                (piece.label, piece.shift, [c.order_key for c in piece.cells])
            )
            pieces_json.append(
                {"label": piece.label, "a": list(piece.shift), "cells": cells_json}
            )
            continue

        # fibered piece: claimed dims from the sub-paving plus the kernel
        sub = piece.sub
        claims = {}
        for pi, ci, spiece, scell in sub.all_cells():
            e = 0
            if scell.base is not None:
                e = base_dims.get(scell.base.key)
                if e is None:
                    continue
            claims[(pi, ci)] = scell.kernel + e + piece.kernel
            dims.append(claims[(pi, ci)])
        hists = {q: {} for q in primes}
        for q in primes:
            g4 = gammas[q]
            for w, box in zip(piece.sigma, piece.boxes):
                spent += q ** box.dim
                if spent > budget:
                    raise BudgetError(f"certification exceeds budget {budget}")
                cnt, surv = batch.count_cell_points(
                    box, g4, q, horizon, jobs=jobs, collect=True
                )
                totals[q] += cnt
                for idx in surv:
                    L4 = batch.point_from_index(box, int(idx), q, horizon)
                    L3 = _extract_block(L4)
                    key = sub.classify(L3, tuple(w[1:]))
                    hists[q][key] = hists[q].get(key, 0) + 1
        cells_json = []
        for pi, ci, spiece, scell in sub.all_cells():
            claimed = claims.get((pi, ci))
            counts = {q: hists[q].get((pi, ci), 0) for q in primes}
            if claimed is None:
                failures.append(f"{piece.label}/{spiece.label}: base read failed")
            else:
                for q in primes:
                    if counts[q] != q ** claimed:
                        failures.append(
                            f"{piece.label}/{spiece.label} cell {scell.order_key}: "
                            f"{counts[q]} != {q}^{claimed}"
                        )
            cells_json.append(
                {"w": [piece.b] + list(scell.order_key), "dim": claimed,
                 "counts": {str(q): counts[q] for q in primes}}
            )
        for spiece in sub.pieces:
            order_input.append(
                (f"{piece.label}/{spiece.label}", spiece.shift, spiece.fixed_points())
            )
        pieces_json.append(
            {"label": piece.label, "a": list(piece.shift),
             "kernel": piece.kernel, "cells": cells_json}
        )

    region_counts = {}
    for q in primes:
        n = 0
        for rc in _region_std_cells(coweights_in_window(4, m, 0), window):
            spent += q ** rc.dim
            if spent > budget:
                raise BudgetError(f"region count exceeds budget {budget}")
            n += count_cell(rc, gammas[q], q, horizon=horizon, jobs=jobs).count
        region_counts[q] = n
        if totals[q] != n:
            failures.append(f"totals at q={q}: paving {totals[q]} != region {n}")

    cert = closure_order_check(order_input)
    if isinstance(cert, OrderViolation):
        failures.append(str(cert))
        pairs = 0
    else:
        pairs = len(cert.pairs)
    status = "pure" if not failures else "failed"
    return PavingReport(
        label, tuple(primes), pieces_json, sorted(dims), totals,
        region_counts, status, failures, pairs,
    )


def gl4_paving_certified(
    gspec: GammaSpec,
    m: int,
    primes: Sequence[int],
    horizon: Optional[int] = None,
    budget: Optional[int] = None,
    jobs: int = 1,
    minimize: bool = True,
) -> tuple[GL4Paving, PavingReport]:
    """Minimal form, type classification, paving, and certification."""
    cert = minimal_form(gspec) if minimize else MinimalFormCert(
        (0, 1, 2, 3), tuple(gspec.nu_int()[i][i + 1] for i in range(3))
    )
    permuted = gspec.permute(cert.perm)
    paving = build_gl4_paving(permuted, m)
    report = certify_gl4(
        paving, permuted, primes,
        label=f"gl4:{paving.gtype.kind}:m={m}",
        horizon=horizon, budget=budget, jobs=jobs,
    )
    return paving, report
