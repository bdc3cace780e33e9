"""Branch-and-bound global minimization over boxes.

Each popped box is mapped onto the unit box, its Bernstein form is
bounded at the configured relaxation level, and the box is then resolved
by one of: exactness (vertex condition or placeholder recovery), the
incumbent cutoff test, the monotonicity test (which spawns a reduced
"edge" subproblem solved recursively), or bisection.

The worklist is best-first on the parent bound; statistics for the main
run and for the recursive edge subproblems are tracked separately.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .bernstein import min_coefficient, to_bernstein, upper_bounds
from .poly import Box, Polynomial, restrict_facet, to_unit_box
from .relax import (
    LEVEL_0,
    LEVEL_1,
    LEVEL_2,
    LEVEL_FIRST,
    LEVELS,
    CutMatrix,
    bound_at_level,
    build_cut_matrix,
    semialgebraic_rows,
)

SPLIT_LONGEST = "longest_edge"
SPLIT_ZERO = "zero_centered"


@dataclass
class BnbConfig:
    level: str = LEVEL_0
    epsilon: float = 1e-6
    max_boxes: int = 100_000
    min_box_width: float = 1e-12
    split: str = SPLIT_LONGEST
    exact: bool = False

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValueError(f"unknown level {self.level!r}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_boxes < 1:
            raise ValueError("max_boxes must be at least 1")
        if self.split not in (SPLIT_LONGEST, SPLIT_ZERO):
            raise ValueError(f"unknown split strategy {self.split!r}")


@dataclass
class BnbStats:
    subdivisions: int = 0
    cutoff_count: int = 0
    mono_count: int = 0
    edge_subdivisions: int = 0
    edge_cutoffs: int = 0
    elapsed: float = 0.0
    edge_elapsed: float = 0.0


@dataclass
class BnbResult:
    lower_bound: object
    upper_bound: object
    witness: Optional[tuple]
    stats: BnbStats
    converged: bool


def cutoff_test(lower: object, incumbent: object, epsilon) -> bool:
    """Prune a box whose bound cannot improve the incumbent by more than
    the relative tolerance: lower >= incumbent - eps * max(1, |incumbent|)."""
    if incumbent is None:
        return False
    if isinstance(incumbent, float) and math.isinf(incumbent):
        return False
    slack = epsilon * max(1, abs(incumbent))
    return lower >= incumbent - slack


def split_box(box: Box, strategy: str = SPLIT_LONGEST) -> tuple[Box, Box]:
    """Bisect the widest axis; the zero-centered strategy splits at the
    origin instead whenever it lies strictly inside that side."""
    axis = box.widest_axis()
    lo, hi = box.lower[axis], box.upper[axis]
    at = lo + (hi - lo) / 2
    if strategy == SPLIT_ZERO and lo < 0 < hi:
        at = type(at)(0) if isinstance(at, Fraction) else 0.0
    return box.split(axis, at)


def monotonicity_test(p: Polynomial, box: Box) -> tuple[str, ...]:
    """Per-axis derivative sign over the box via Bernstein enclosures:
    '+' when all coefficients of dp/dx_r are positive, '-' when all are
    negative, 'mixed' otherwise."""
    return _monotonicity_signs([p.derivative(r) for r in range(p.dimension)], box)


def _monotonicity_signs(derivs: Sequence[Polynomial], box: Box) -> tuple[str, ...]:
    signs = []
    for d in derivs:
        if d.is_zero():
            # objective constant along this axis: fixing the lower bound is lossless
            signs.append("+")
            continue
        q, _ = to_unit_box(d, box)
        bf = to_bernstein(q)
        lo = min(bf.coeffs)
        hi = max(bf.coeffs)
        if lo > 0:
            signs.append("+")
        elif hi < 0:
            signs.append("-")
        else:
            signs.append("mixed")
    return tuple(signs)


def edge_subproblem(
    p: Polynomial, box: Box, signs: Sequence[str]
) -> tuple[Polynomial, Optional[Box], list[tuple[int, object]]]:
    """Fix every non-mixed axis at its active bound ('+' -> lower,
    '-' -> upper) and drop those variables.  Returns the reduced
    polynomial, the reduced box (None when no axis remains), and the
    (axis, value) substitutions performed, in original axis order."""
    fixed = []
    for axis, s in enumerate(signs):
        if s == "+":
            fixed.append((axis, box.lower[axis]))
        elif s == "-":
            fixed.append((axis, box.upper[axis]))
    if not fixed:
        raise ValueError("no monotone axis to substitute")
    reduced = p
    reduced_box = box
    for axis, value in reversed(fixed):
        reduced = restrict_facet(reduced, axis, value)
        reduced_box = reduced_box.drop_axis(axis) if reduced_box.dimension > 1 else None
    return reduced, reduced_box, fixed


def sample_upper_bound(
    p: Polynomial,
    box: Box,
    bf=None,
    constraints: Sequence[Polynomial] = (),
    mapping=None,
) -> tuple[object, Optional[tuple]]:
    """Candidate upper bound from the box center and the grid point of the
    argmin Bernstein coefficient; infeasible candidates are skipped."""
    candidates = [box.center()]
    if bf is not None and mapping is not None:
        _, idx = min_coefficient(bf)
        z = tuple(
            (Fraction(i, d) if isinstance(box.lower[0], Fraction) else i / d)
            if d
            else 0
            for i, d in zip(idx, bf.degree)
        )
        candidates.append(mapping(z))
    best, best_pt = None, None
    for pt in candidates:
        if any(g.eval(pt) > 0 for g in constraints):
            continue
        val = p.eval(pt)
        if best is None or val < best:
            best, best_pt = val, pt
    return best, best_pt


class _RunState:
    """Incumbent and node budget shared across the recursion."""

    def __init__(self, objective, constraints, max_boxes):
        self.objective = objective
        self.constraints = constraints
        self.max_boxes = max_boxes
        self.nodes = 0
        self.exhausted = False
        self.incumbent = None
        self.witness = None

    def charge(self) -> bool:
        if self.nodes >= self.max_boxes:
            self.exhausted = True
            return False
        self.nodes += 1
        return True

    def offer(self, point: tuple) -> None:
        """Evaluate the top-level objective at a candidate feasible point."""
        if point is None:
            return
        if any(g.eval(point) > 0 for g in self.constraints):
            return
        val = self.objective.eval(point)
        if self.incumbent is None or val < self.incumbent:
            self.incumbent = val
            self.witness = tuple(point)


def branch_and_bound(
    p: Polynomial,
    constraints: Sequence[Polynomial],
    box: Box,
    cfg: BnbConfig,
    degree=None,
) -> BnbResult:
    """Globally minimize ``p`` over ``box`` subject to g_i(x) <= 0."""
    if box.dimension != p.dimension:
        raise ValueError("box dimension does not match objective")
    for g in constraints:
        if g.dimension != p.dimension:
            raise ValueError("constraint dimension does not match objective")
    stats = BnbStats()
    state = _RunState(p, tuple(constraints), cfg.max_boxes)
    start = time.perf_counter()
    lower = _solve_problem(
        p, tuple(constraints), box, cfg, state, lift=lambda pt: pt, stats=stats,
        depth=0, degree=degree,
    )
    stats.elapsed = time.perf_counter() - start - stats.edge_elapsed
    upper = state.incumbent
    converged = (
        not state.exhausted
        and upper is not None
        and lower is not None
        and not (isinstance(lower, float) and math.isinf(lower))
        and upper - lower <= cfg.epsilon * max(1, abs(upper))
    )
    return BnbResult(
        lower_bound=lower,
        upper_bound=upper,
        witness=state.witness,
        stats=stats,
        converged=converged,
    )


def _solve_problem(p, constraints, box, cfg, state, lift, stats, depth, degree=None):
    """Worklist loop for one (sub)problem; returns its lower bound."""
    if p.dimension == 0:
        val = p.eval(())
        state.offer(lift(()))
        return val

    delta = tuple(degree) if degree is not None else p.degree
    for g in constraints:
        delta = tuple(max(a, b) for a, b in zip(delta, g.degree))
    exact = cfg.exact
    u = upper_bounds(delta, exact=exact) if cfg.level != LEVEL_0 else None
    cuts = build_cut_matrix(delta, exact) if cfg.level == LEVEL_2 else None
    derivs = [p.derivative(r) for r in range(p.dimension)]

    counter = itertools.count()
    heap: list = [(-math.inf, next(counter), box)]
    contrib = None

    def add_contrib(value):
        nonlocal contrib
        if contrib is None or value < contrib:
            contrib = value

    while heap:
        if not state.charge():
            while heap:
                parent_bound, _, _ = heapq.heappop(heap)
                add_contrib(parent_bound)
            break
        _, _, cur = heapq.heappop(heap)
        if depth == 0:
            stats.subdivisions += 1
        else:
            stats.edge_subdivisions += 1

        q, amap = to_unit_box(p, cur)
        bf = to_bernstein(q, delta)
        extra_rows = ()
        if constraints:
            g_units = [to_unit_box(g, cur)[0] for g in constraints]
            extra_rows = semialgebraic_rows(g_units, delta, exact)
        outcome = bound_at_level(
            bf, cfg.level, u=u, cuts=cuts, extra_rows=extra_rows,
            mapping=amap, exact=exact,
        )
        bound = outcome.bound

        _, pt = sample_upper_bound(p, cur, bf, constraints, amap)
        if pt is not None:
            state.offer(lift(pt))
        if outcome.exact and not constraints:
            state.offer(lift(outcome.witness))
            add_contrib(bound)
            continue
        if cutoff_test(bound, state.incumbent, cfg.epsilon):
            if depth == 0:
                stats.cutoff_count += 1
            else:
                stats.edge_cutoffs += 1
            add_contrib(bound)
            continue
        if not constraints:
            signs = _monotonicity_signs(derivs, cur)
            if any(s != "mixed" for s in signs):
                stats.mono_count += 1
                reduced, reduced_box, fixed = edge_subproblem(p, cur, signs)
                sub_lift = _make_lift(lift, fixed)
                if reduced_box is None:
                    val = reduced.eval(())
                    state.offer(sub_lift(()))
                    add_contrib(val)
                else:
                    t0 = time.perf_counter()
                    sub_lower = _solve_problem(
                        reduced, (), reduced_box, cfg, state, sub_lift, stats,
                        depth + 1,
                    )
                    if depth == 0:  # nested recursion is inside this window
                        stats.edge_elapsed += time.perf_counter() - t0
                    add_contrib(sub_lower)
                continue
        if cur.width(cur.widest_axis()) <= cfg.min_box_width:
            add_contrib(bound)
            continue
        left, right = split_box(cur, cfg.split)
        heapq.heappush(heap, (_key(bound), next(counter), left))
        heapq.heappush(heap, (_key(bound), next(counter), right))

    return contrib


def _key(bound) -> float:
    return float(bound)


def _make_lift(outer: Callable, fixed: list) -> Callable:
    def lifted(pt: tuple) -> tuple:
        full = list(pt)
        for axis, value in fixed:  # fixed is in ascending axis order
            full.insert(axis, value)
        return outer(tuple(full))

    return lifted


# ---------------------------------------------------------------------------
# run report in the benchmark-table column layout


def report_row(label: str, level: str, result: BnbResult) -> dict:
    s = result.stats
    return {
        "label": label,
        "level": level,
        "sub": s.subdivisions,
        "time": round(s.elapsed, 3),
        "cutoff": s.cutoff_count,
        "mono": s.mono_count,
        "sub_edge": s.edge_subdivisions,
        "cutoff_edge": s.edge_cutoffs,
        "time_edge": round(s.edge_elapsed, 3),
        "opt": None if result.upper_bound is None else float(result.upper_bound),
        "lower": None if result.lower_bound is None else float(result.lower_bound),
        "converged": result.converged,
    }


def format_report(rows: Sequence[dict]) -> str:
    headers = ("ID", "Ineq", "Sub", "Time", "Cutoff", "Mono", "Sub*", "Cutoff*", "Time*", "Opt")
    table = [headers]
    for r in rows:
        table.append(
            (
                str(r["label"]), str(r["level"]), str(r["sub"]), f"{r['time']:.2f}",
                str(r["cutoff"]), str(r["mono"]), str(r["sub_edge"]),
                str(r["cutoff_edge"]), f"{r['time_edge']:.2f}",
                "-" if r["opt"] is None else f"{r['opt']:.6g}",
            )
        )
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    lines = [
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in table
    ]
    return "\n".join(lines)
