"""Two-phase tableau simplex over exact rationals (Bland's rule).

Sized for desk-scale programs: dense list-of-Fraction tableaux, no
presolve.  Bland's rule guarantees termination under degeneracy, which is
the common case for the 0/1 covering games solved here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class InfeasibleLP(ValueError):
    pass


class UnboundedLP(ValueError):
    pass


@dataclass(frozen=True)
class LPSolution:
    x: tuple[Fraction, ...]
    value: Fraction


def _pivot(rows: list[list[Fraction]], z: list[Fraction], r: int, c: int) -> None:
    piv = rows[r][c]
    row = rows[r] if piv == 1 else [v / piv for v in rows[r]]
    rows[r] = row
    for i, other in enumerate(rows):
        if i != r:
            f = other[c]
            if f:
                rows[i] = [a - f * b for a, b in zip(other, row)]
    f = z[c]
    if f:
        z[:] = [a - f * b for a, b in zip(z, row)]


def _optimize(rows, basis, cost, columns) -> list[Fraction]:
    """Maximize ``cost`` over the current basis; returns the reduced-cost row."""
    width = len(rows[0]) if rows else len(cost) + 1
    z = [-cj for cj in cost] + [Fraction(0)]
    z += [Fraction(0)] * (width - len(z))
    for r, b in enumerate(basis):
        if cost[b]:
            cb = cost[b]
            z = [zj + cb * tj for zj, tj in zip(z, rows[r])]
    while True:
        enter = next((j for j in columns if z[j] < 0), None)
        if enter is None:
            return z
        best = None
        for r, row in enumerate(rows):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            raise UnboundedLP("objective unbounded")
        r = best[1]
        _pivot(rows, z, r, enter)
        basis[r] = enter


def maximize(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
) -> LPSolution:
    """Solve ``max c.x`` s.t. ``A_ub x <= b_ub``, ``A_eq x == b_eq``, ``x >= 0``."""
    n = len(c)
    cons = [([Fraction(a) for a in row], Fraction(b), True) for row, b in zip(A_ub, b_ub)]
    cons += [([Fraction(a) for a in row], Fraction(b), False) for row, b in zip(A_eq, b_eq)]
    n_slack = sum(1 for _, _, ub in cons if ub)
    needs_art = [(not ub) or b < 0 for _, b, ub in cons]
    n_art = sum(needs_art)
    width = n + n_slack + n_art + 1

    rows: list[list[Fraction]] = []
    basis: list[int] = []
    slack_at, art_at = n, n + n_slack
    for (coef, b, ub), art in zip(cons, needs_art):
        row = coef + [Fraction(0)] * (width - n)
        if ub:
            row[slack_at] = Fraction(1)
        if b < 0:
            row = [-v for v in row]
        row[-1] = abs(b)
        if art:
            row[art_at] = Fraction(1)
            basis.append(art_at)
            art_at += 1
        else:
            basis.append(slack_at)
        if ub:
            slack_at += 1
        rows.append(row)

    real_cols = list(range(n + n_slack))
    if n_art:
        phase1 = [Fraction(0)] * (n + n_slack) + [Fraction(-1)] * n_art
        z = _optimize(rows, basis, phase1, list(range(width - 1)))
        if z[-1] != 0:
            raise InfeasibleLP("constraints are infeasible")
        # Drive zero-level artificials out of the basis; drop redundant rows.
        r = 0
        while r < len(rows):
            if basis[r] >= n + n_slack:
                col = next((j for j in real_cols if rows[r][j] != 0), None)
                if col is None:
                    del rows[r]
                    del basis[r]
                    continue
                _pivot(rows, [Fraction(0)] * width, r, col)
                basis[r] = col
            r += 1
        rows = [row[: n + n_slack] + [row[-1]] for row in rows]

    cost = [Fraction(v) for v in c] + [Fraction(0)] * n_slack
    _optimize(rows, basis, cost, real_cols)
    x = [Fraction(0)] * n
    for r, b in enumerate(basis):
        if b < n:
            x[b] = rows[r][-1]
    value = sum((ci * xi for ci, xi in zip(cost, x)), Fraction(0))
    return LPSolution(tuple(x), value)
