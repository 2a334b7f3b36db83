"""Exact rational simplex for unary covering LPs.

A unary LP minimises ``sum(x)`` subject to ``sum(x[j] for j in C) >= 1`` for
each constraint set ``C`` and ``x >= 0``. The solver runs Bland's-rule primal
simplex on the dual packing program

    max sum(y)   s.t.   sum(y[i] for constraints i containing j) <= 1,  y >= 0

whose all-slack basis is feasible at the origin, so no phase one is needed.
The covering solution is read off the slack reduced costs of the final
tableau.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

ZERO = Fraction(0)
ONE = Fraction(1)


class LPError(ValueError):
    pass


@dataclass(frozen=True)
class UnaryLP:
    variables: tuple[str, ...]
    constraints: tuple[tuple[str, frozenset[str]], ...]

    def __post_init__(self) -> None:
        if len(set(self.variables)) != len(self.variables):
            raise LPError("duplicate variable label")
        labels = [lab for lab, _ in self.constraints]
        if len(set(labels)) != len(labels):
            raise LPError("duplicate constraint label")
        known = set(self.variables)
        for lab, vs in self.constraints:
            if not vs:
                raise LPError(f"constraint {lab!r} is empty")
            unknown = set(vs) - known
            if unknown:
                raise LPError(f"constraint {lab!r} uses undeclared {sorted(unknown)}")

    @classmethod
    def build(
        cls,
        variables: Iterable[str],
        constraints: Mapping[str, Iterable[str]] | Iterable[tuple[str, Iterable[str]]],
    ) -> "UnaryLP":
        items = constraints.items() if isinstance(constraints, Mapping) else constraints
        return cls(tuple(variables), tuple((lab, frozenset(vs)) for lab, vs in items))

    def dump(self) -> str:
        """Debug listing, one ``label: a + b >= 1`` line per constraint."""
        order = {v: i for i, v in enumerate(self.variables)}
        lines = []
        for lab, vs in self.constraints:
            terms = " + ".join(sorted(vs, key=order.__getitem__))
            lines.append(f"{lab}: {terms} >= 1")
        return "\n".join(lines)


@dataclass(frozen=True)
class LPSolution:
    optimum: Fraction
    primal: dict[str, Fraction]
    dual: dict[str, Fraction]
    status: str = "optimal"


def solve(lp: UnaryLP) -> LPSolution:
    n = len(lp.variables)
    m = len(lp.constraints)
    col = {v: j for j, v in enumerate(lp.variables)}

    # Tableau rows = covering variables (packing constraints); columns are the
    # packing variables 0..m-1 followed by the slacks m..m+n-1.
    width = m + n
    rows: list[list[Fraction]] = []
    for j in range(n):
        row = [ZERO] * width
        row[m + j] = ONE
        rows.append(row)
    for i, (_, vs) in enumerate(lp.constraints):
        for v in vs:
            rows[col[v]][i] = ONE
    rhs = [ONE] * n
    basis = [m + j for j in range(n)]
    # reduced costs z_j - c_j for a maximisation; optimal when all >= 0
    obj = [-ONE] * m + [ZERO] * n
    value = ZERO

    while True:
        enter = next((c for c in range(width) if obj[c] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for r in range(n):
            a = rows[r][enter]
            if a > 0:
                ratio = rhs[r] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:
            # cannot happen: every packing column has a positive entry
            raise LPError("packing LP unbounded; covering LP infeasible")
        prow = rows[leave]
        piv = prow[enter]
        if piv != 1:
            prow = [a / piv for a in prow]
            rows[leave] = prow
            rhs[leave] /= piv
        nz = [c for c in range(width) if prow[c]]
        for r in range(n):
            if r == leave:
                continue
            f = rows[r][enter]
            if f:
                row = rows[r]
                for c in nz:
                    row[c] -= f * prow[c]
                rhs[r] -= f * rhs[leave]
        f = obj[enter]
        for c in nz:
            obj[c] -= f * prow[c]
        value -= f * rhs[leave]
        basis[leave] = enter

    y = [ZERO] * m
    for r, b in enumerate(basis):
        if b < m:
            y[b] = rhs[r]
    primal = {v: obj[m + j] for j, v in enumerate(lp.variables)}
    dual = {lab: y[i] for i, (lab, _) in enumerate(lp.constraints)}
    return LPSolution(value, primal, dual)


def verify(lp: UnaryLP, sol: LPSolution) -> bool:
    """Check a solution certificate without re-solving.

    True iff the primal is feasible, the dual is feasible and both objectives
    equal the reported optimum.
    """
    if set(sol.primal) != set(lp.variables) or set(sol.dual) != {
        lab for lab, _ in lp.constraints
    }:
        raise LPError("solution labels do not match the LP")
    x, y = sol.primal, sol.dual
    if any(v < 0 for v in x.values()) or any(v < 0 for v in y.values()):
        return False
    if any(sum((x[v] for v in vs), ZERO) < 1 for _, vs in lp.constraints):
        return False
    load = dict.fromkeys(lp.variables, ZERO)
    for lab, vs in lp.constraints:
        for v in vs:
            load[v] += y[lab]
    if any(t > 1 for t in load.values()):
        return False
    return sum(x.values(), ZERO) == sol.optimum == sum(y.values(), ZERO)
