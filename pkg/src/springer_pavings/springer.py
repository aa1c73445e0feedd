"""Membership of lattices in the affine Springer fiber, and the
brute-force point-counting oracle over prime fields.

Membership is gamma . b_j in L for every canonical basis column, decided
by exact elimination against the basis (the conjugation route is kept as
an independent cross-check).  Counting enumerates a cell's box and
filters pointwise; the vectorized engine in ``batch`` applies the same
predicate and is validated against the scalar route.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence

from springer_pavings import batch
from springer_pavings.cells import CellSpec
from springer_pavings.gamma import GammaData
from springer_pavings.lattice import (
    BudgetError,
    LatticePoint,
    basis_matrix,
    cell_points,
    mat_inverse,
    mat_mul,
    solve_in_lattice,
)
from springer_pavings.series import PrimeField, TruncSeries

Matrix = list[list[TruncSeries]]

DEFAULT_BUDGET = 10**9


def budget_from_env(default: int = DEFAULT_BUDGET) -> int:
    raw = os.environ.get("SPRINGER_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return default


def _gamma_matrix(g: GammaData | Matrix, horizon: int, field: PrimeField) -> Matrix:
    if isinstance(g, GammaData):
        if g.spec is not None:
            from springer_pavings.gamma import matrix_spec_instantiate

            d = g.d
            diag = g.spec.entries
            z: tuple = ()
            mat_spec = [[diag[i] if i == j else z for j in range(d)] for i in range(d)]
            return matrix_spec_instantiate(mat_spec, field.p, horizon)
        return g.matrix()
    return g


def in_springer(point: LatticePoint, g: GammaData | Matrix) -> bool:
    """gamma L inside L, via elimination against the canonical basis."""
    from springer_pavings.lattice import _work_horizon

    h = _work_horizon(point, point.cell.a)
    gamma = _gamma_matrix(g, h, point.field)
    B = basis_matrix(point, h)
    d = point.cell.d
    for j in range(d):
        col = [B[i][j] for i in range(d)]
        image = []
        for i in range(d):
            acc = gamma[i][0] * col[0]
            for k in range(1, d):
                acc = acc + gamma[i][k] * col[k]
            image.append(acc)
        x = solve_in_lattice(point, image)
        if not all(s.val_at_least(0) for s in x):
            return False
    return True


def in_springer_conjugation(point: LatticePoint, g: GammaData | Matrix) -> bool:
    """Independent route: Ad(B^{-1}) gamma must be integral."""
    from springer_pavings.lattice import _work_horizon

    h = _work_horizon(point, point.cell.a) + 8
    gamma = _gamma_matrix(g, h, point.field)
    B = basis_matrix(point, h)
    X = mat_mul(mat_inverse(B), mat_mul(gamma, B))
    return all(s.val_at_least(0) for row in X for s in row)


@dataclass(frozen=True)
class CountResult:
    """Deterministic count of Springer points in a region at one prime."""

    q: int
    region: str
    count: int

    def to_json(self) -> dict:
        return {"q": self.q, "region": self.region, "count": self.count}


def count_cell(
    cell: CellSpec,
    g: GammaData | Matrix,
    q: int,
    horizon: Optional[int] = None,
    budget: Optional[int] = None,
    jobs: int = 1,
    engine: str = "auto",
) -> CountResult:
    """|cell box ∩ Springer fiber|(F_q) by exhaustive enumeration."""
    field = PrimeField(q)
    if isinstance(g, GammaData) and g.field.p != q:
        raise ValueError("gamma lives over a different prime")
    if budget is None:
        budget = budget_from_env()
    total = q ** cell.dim
    if total > budget:
        raise BudgetError(f"{total} point tests exceed budget {budget}")
    if horizon is None:
        hz = g.horizon if isinstance(g, GammaData) else min(s.horizon for r in g for s in r)
        horizon = hz
    if engine == "scalar" or (engine == "auto" and total <= 2048):
        gamma = _gamma_matrix(g, horizon + 16, field)
        n = sum(1 for L in cell_points(cell, field, horizon) if in_springer(L, gamma))
    else:
        n = batch.count_cell_points(cell, g, q, horizon, jobs=jobs)
    return CountResult(q, f"cell(a={list(cell.a)},w={list(cell.w)})", n)


def count_region(
    cells: Sequence[CellSpec],
    g: GammaData | Matrix,
    q: int,
    horizon: Optional[int] = None,
    budget: Optional[int] = None,
    jobs: int = 1,
    region: str = "region",
) -> CountResult:
    """Sum of count_cell over disjoint cells (disjoint by construction)."""
    if budget is None:
        budget = budget_from_env()
    total_tests = sum(q ** c.dim for c in cells)
    if total_tests > budget:
        raise BudgetError(f"{total_tests} point tests exceed budget {budget}")
    n = 0
    for c in cells:
        n += count_cell(c, g, q, horizon=horizon, budget=budget, jobs=jobs).count
    return CountResult(q, region, n)


@dataclass(frozen=True)
class NotPure:
    """Witness that the counts are not a single q-power."""

    witnesses: tuple[tuple[int, int], ...]  # (q, count)

    def __bool__(self) -> bool:
        return False


def power_check(counts: dict[int, int]) -> int | NotPure:
    """The common exponent e with count(q) = q^e at every prime, else NotPure."""
    if not counts:
        raise ValueError("no counts supplied")
    exps = set()
    for q, n in counts.items():
        if n <= 0:
            return NotPure(tuple(sorted(counts.items())))
        e = 0
        x = n
        while x % q == 0:
            x //= q
            e += 1
        if x != 1:
            return NotPure(tuple(sorted(counts.items())))
        exps.add(e)
    if len(exps) != 1:
        return NotPure(tuple(sorted(counts.items())))
    return exps.pop()
