"""Lyapunov-certificate verification and the bundled benchmark registry.

A candidate certificate V for dx/dt = f(x) proves asymptotic stability of
the origin on a region R when  min_R V >= 0  and  min_R -dV/dt >= 0.  Both
minima are lower-bounded by a certification-mode branch-and-bound with
zero-centered splitting, which decomposes R around the equilibrium where
the bounds have the best chance of being exact.

Certification differs from optimization in one way: since V(0) = 0, a box
touching the equilibrium can have a small negative relaxation bound that
improves like h^2 under bisection without ever certifying nonnegativity.
Chasing such boxes proves nothing, so a box whose bound has not improved
faster than the quadratic rate over two generations is abandoned and its
bound reported as the certification obstacle.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .bernstein import to_bernstein, upper_bounds
from .bnb import SPLIT_ZERO, BnbConfig, split_box
from .poly import Box, Polynomial, lie_derivative, to_unit_box
from .problems import (
    load_fixture,
    load_problem,
    lyapunov_fixture_names,
    poly_from_text,
    pop_fixture_names,
)
from .relax import LEVEL_FIRST, bound_at_level

# a certificate counts as verified once both bounds clear this precision
STABILITY_TOL = 1e-9

# minimal per-two-generations improvement factor; h^2 scaling of a
# quadratic equilibrium gap is exactly 4 per two bisections
_STALL_FACTOR = 4


@dataclass(frozen=True)
class OdeSystem:
    dimension: int
    f: tuple

    def __post_init__(self):
        if len(self.f) != self.dimension:
            raise ValueError("vector field length does not match dimension")
        for component in self.f:
            if component.dimension != self.dimension:
                raise ValueError("vector field component dimension mismatch")


@dataclass(frozen=True)
class LyapunovCase:
    name: str
    system: OdeSystem
    v: Polynomial
    region: Box
    expected_verdict: str  # "pass" | "fail"
    printed_vdot: Optional[Polynomial] = None


@dataclass
class VerificationRun:
    lower_bound: float
    nodes: int
    verified_boxes: int
    stalled_boxes: int
    elapsed: float
    exhausted: bool


@dataclass
class Verdict:
    v_bound: float
    vdot_bound: float
    stable: bool
    v_run: VerificationRun
    vdot_run: VerificationRun


def default_config(max_boxes: int = 50_000) -> BnbConfig:
    return BnbConfig(
        level=LEVEL_FIRST,
        epsilon=STABILITY_TOL,
        max_boxes=max_boxes,
        split=SPLIT_ZERO,
    )


def certify_nonnegative(p: Polynomial, region: Box, cfg: Optional[BnbConfig] = None) -> VerificationRun:
    """Lower-bound ``p`` over ``region`` for certification purposes.

    Boxes are resolved as verified (bound >= -epsilon), stalled (bound
    still negative but improving no faster than the equilibrium rate), or
    split further.  The returned lower bound is the minimum over resolved
    boxes, so a stall reports the obstacle that blocked certification.
    """
    if cfg is None:
        cfg = default_config()
    start = time.perf_counter()
    u_cache: dict = {}
    run = VerificationRun(0.0, 0, 0, 0, 0.0, False)
    lower = None
    # depth-first entries: (box, gray ancestor bounds, guaranteed parent bound);
    # the history restarts once a box lies in a single orthant, because the
    # zero-decomposition splits before that are structural, not chasing
    stack: list[tuple[Box, tuple, object]] = [(region, (), None)]
    while stack:
        if run.nodes >= cfg.max_boxes:
            run.exhausted = True
            for _, _, guaranteed in stack:
                fallback = -float("inf") if guaranteed is None else guaranteed
                if lower is None or fallback < lower:
                    lower = fallback
            break
        box, hist, _ = stack.pop()
        run.nodes += 1
        q, amap = to_unit_box(p, box)
        bf = to_bernstein(q)
        if bf.degree not in u_cache:
            u_cache[bf.degree] = upper_bounds(bf.degree, exact=cfg.exact)
        outcome = bound_at_level(
            bf, cfg.level, u=u_cache[bf.degree], mapping=amap, exact=cfg.exact
        )
        bound = outcome.bound
        straddles = any(lo < 0 < hi for lo, hi in zip(box.lower, box.upper))
        if bound >= -cfg.epsilon:
            run.verified_boxes += 1
        elif not straddles and len(hist) >= 2 and bound <= hist[-2] / _STALL_FACTOR:
            run.stalled_boxes += 1
        elif box.width(box.widest_axis()) <= cfg.min_box_width:
            run.stalled_boxes += 1
        else:
            child_hist = () if straddles else hist + (bound,)
            left, right = split_box(box, SPLIT_ZERO)
            stack.append((left, child_hist, bound))
            stack.append((right, child_hist, bound))
            continue
        if lower is None or bound < lower:
            lower = bound
    run.lower_bound = float(lower) if lower is not None else 0.0
    run.elapsed = time.perf_counter() - start
    return run


def verify_lyapunov(case: LyapunovCase, cfg: Optional[BnbConfig] = None) -> Verdict:
    """Check min V >= 0 and min -dV/dt >= 0 over the region."""
    if cfg is None:
        cfg = default_config()
    origin = tuple(0 for _ in range(case.v.dimension))
    if abs(float(case.v.eval(origin))) > 1e-12:
        warnings.warn(f"{case.name}: V(0) = {case.v.eval(origin)}, expected 0")
    vdot = lie_derivative(case.v, case.system.f)
    v_run = certify_nonnegative(case.v, case.region, cfg)
    vdot_run = certify_nonnegative(-vdot, case.region, cfg)
    stable = (
        v_run.lower_bound >= -STABILITY_TOL
        and vdot_run.lower_bound >= -STABILITY_TOL
    )
    return Verdict(
        v_bound=v_run.lower_bound,
        vdot_bound=vdot_run.lower_bound,
        stable=stable,
        v_run=v_run,
        vdot_run=vdot_run,
    )


# ---------------------------------------------------------------------------
# registry


def load_lyapunov_case(source, exact: bool = False) -> LyapunovCase:
    """Build a case from a fixture dict or JSON file with plain-text polys."""
    import json
    from pathlib import Path

    if isinstance(source, (str, Path)) and Path(str(source)).exists():
        data = json.loads(Path(source).read_text())
    elif isinstance(source, str):
        data = json.loads(source)
    else:
        data = source
    dim = int(data["dimension"])
    variables = data.get("variables", ["x", "y", "z"][:dim])
    v = poly_from_text(data["V"], variables, exact)
    f = tuple(poly_from_text(ode, variables, exact) for ode in data["odes"])
    region = Box(
        tuple(Fraction(b) if exact else float(b) for b in data["region"]["lower"]),
        tuple(Fraction(b) if exact else float(b) for b in data["region"]["upper"]),
    )
    printed = None
    if data.get("printed_vdot"):
        printed = poly_from_text(data["printed_vdot"], variables, exact)
    return LyapunovCase(
        name=data.get("name", "case"),
        system=OdeSystem(dim, f),
        v=v,
        region=region,
        expected_verdict=data.get("expected_verdict", "pass"),
        printed_vdot=printed,
    )


def benchmark_registry(exact: bool = False) -> dict:
    """Every bundled benchmark: box-minimization problems under "pop" and
    certificate checks under "lyapunov"."""
    pops = {name: load_problem(load_fixture(name), exact) for name in pop_fixture_names()}
    lyap = {
        name: load_lyapunov_case(load_fixture(name), exact)
        for name in lyapunov_fixture_names()
    }
    return {"pop": pops, "lyapunov": lyap}


def cross_check_appendix_derivatives(registry: Optional[dict] = None, tol: float = 1e-9) -> list[dict]:
    """Compare the recomputed flow derivative of each bundled case against
    the derivative polynomial printed in its source.

    Transcribed long expansions are typo-prone, so the registry always
    trusts the recomputed derivative; this report surfaces where the two
    disagree, term by term.
    """
    if registry is None:
        registry = benchmark_registry()
    reports = []
    for name, case in registry["lyapunov"].items():
        computed = lie_derivative(case.v, case.system.f)
        diffs = {}
        if case.printed_vdot is not None:
            keys = set(computed.terms) | set(case.printed_vdot.terms)
            for idx in sorted(keys):
                a = float(computed.terms.get(idx, 0))
                b = float(case.printed_vdot.terms.get(idx, 0))
                if abs(a - b) > tol:
                    diffs[idx] = (a, b)
        reports.append(
            {
                "name": name,
                "match": not diffs,
                "diffs": diffs,
            }
        )
    return reports
