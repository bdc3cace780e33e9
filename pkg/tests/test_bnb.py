import math

import pytest

from bernpop.bnb import (
    BnbConfig,
    branch_and_bound,
    cutoff_test,
    edge_subproblem,
    format_report,
    monotonicity_test,
    report_row,
    sample_upper_bound,
    split_box,
)
from bernpop.bernstein import to_bernstein
from bernpop.poly import Box, Polynomial, to_unit_box
from conftest import algebraic4, himmelblau


def test_cutoff_prunes_above_incumbent():
    assert cutoff_test(5.0, 0.0, 1e-9)
    assert not cutoff_test(-1.0, 0.0, 1e-9)


def test_cutoff_boundary_arithmetic():
    eps = 1e-6
    assert cutoff_test(1.0 - eps / 2, 1.0, eps)
    assert not cutoff_test(1.0 - 2 * eps, 1.0, eps)


def test_cutoff_without_incumbent():
    assert not cutoff_test(-10.0, None, 1e-9)
    assert not cutoff_test(-10.0, math.inf, 1e-9)


def test_split_longest_edge():
    left, right = split_box(Box((0.0, 0.0), (1.0, 1.0)))
    assert left.upper == (0.5, 1.0)
    assert right.lower == (0.5, 0.0)


def test_split_zero_centered():
    left, right = split_box(Box((-1.0,), (1.0,)), "zero_centered")
    assert left.upper == (0.0,) and right.lower == (0.0,)
    left, right = split_box(Box((-1.0,), (3.0,)), "zero_centered")
    assert left.upper == (0.0,) and right.lower == (0.0,)


def test_split_zero_centered_falls_back_to_midpoint():
    left, right = split_box(Box((1.0,), (3.0,)), "zero_centered")
    assert left.upper == (2.0,)


def test_monotonicity_signs():
    x = Polynomial.variable(1, 0)
    assert monotonicity_test(x, Box((-2.0,), (5.0,))) == ("+",)
    square = Polynomial(1, {(2,): 1})
    assert monotonicity_test(square, Box((-1.0,), (1.0,))) == ("mixed",)
    assert monotonicity_test(square, Box((0.1,), (1.0,))) == ("+",)
    assert monotonicity_test(square, Box((-1.0,), (-0.1,))) == ("-",)


def test_edge_subproblem_single_axis():
    p = Polynomial(2, {(1, 0): 1, (0, 2): 1})  # x1 + x2^2
    reduced, rbox, fixed = edge_subproblem(p, Box((0.0, 0.0), (1.0, 1.0)), ("+", "mixed"))
    assert reduced.terms == {(2,): 1}
    assert rbox.lower == (0.0,) and rbox.upper == (1.0,)
    assert fixed == [(0, 0.0)]


def test_edge_subproblem_all_axes():
    p = Polynomial(2, {(1, 0): 1, (0, 1): -1})
    reduced, rbox, fixed = edge_subproblem(p, Box((0.0, 0.0), (1.0, 1.0)), ("+", "-"))
    assert rbox is None
    assert reduced.eval(()) == pytest.approx(-1.0)
    assert fixed == [(0, 0.0), (1, 1.0)]


def test_edge_subproblem_square_on_positive_interval():
    square = Polynomial(1, {(2,): 1})
    reduced, rbox, _ = edge_subproblem(square, Box((0.1,), (1.0,)), ("+",))
    assert rbox is None
    assert reduced.eval(()) == pytest.approx(0.01)


def test_sample_upper_bound_center():
    square = Polynomial(1, {(2,): 1})
    val, pt = sample_upper_bound(square, Box((-1.0,), (1.0,)))
    assert val == pytest.approx(0.0) and pt == (0.0,)


def test_sample_upper_bound_grid_argmin():
    box = Box((-5.0, -5.0), (5.0, 5.0))
    q, amap = to_unit_box(himmelblau(), box)
    bf = to_bernstein(q, (4, 4))
    val, pt = sample_upper_bound(himmelblau(), box, bf, (), amap)
    assert val is not None and val >= 0.0


def test_sample_upper_bound_infeasible():
    p = Polynomial(1, {(2,): 1})
    g = Polynomial(1, {(1,): 1, (0,): 1})  # x + 1 <= 0, never on [0,1]
    val, pt = sample_upper_bound(p, Box((0.0,), (1.0,)), constraints=[g])
    assert val is None and pt is None


def test_config_validation():
    with pytest.raises(ValueError):
        BnbConfig(level="9")
    with pytest.raises(ValueError):
        BnbConfig(epsilon=0.0)
    with pytest.raises(ValueError):
        BnbConfig(max_boxes=0)
    with pytest.raises(ValueError):
        BnbConfig(split="diagonal")


def test_univariate_square_all_levels():
    p = Polynomial(1, {(2,): 1})
    box = Box((-1.0,), (1.0,))
    for level in ("0", "first", "1", "2"):
        res = branch_and_bound(p, (), box, BnbConfig(level=level, epsilon=1e-9))
        assert res.converged
        assert res.lower_bound <= 0.0 <= res.upper_bound
        assert res.upper_bound - res.lower_bound <= 1e-6


def test_himmelblau_level0():
    res = branch_and_bound(
        himmelblau(), (), Box((-5.0, -5.0), (5.0, 5.0)),
        BnbConfig(level="0", epsilon=1e-9, max_boxes=50_000),
    )
    assert res.converged
    assert res.lower_bound <= 0.0 <= res.upper_bound
    assert res.upper_bound - res.lower_bound <= 1e-6
    assert himmelblau().eval(res.witness) == pytest.approx(res.upper_bound, abs=1e-12)


def test_bounds_bracket_known_optimum_anytime():
    # stop early: bounds must still bracket the optimum
    res = branch_and_bound(
        himmelblau(), (), Box((-5.0, -5.0), (5.0, 5.0)),
        BnbConfig(level="0", epsilon=1e-9, max_boxes=25),
    )
    assert not res.converged
    assert res.lower_bound <= 0.0 <= res.upper_bound


def test_algebraic4_level0():
    res = branch_and_bound(
        algebraic4(), (), Box((-0.1,) * 4, (0.1,) * 4),
        BnbConfig(level="0", epsilon=1e-3, max_boxes=50_000),
    )
    assert res.converged
    assert res.lower_bound <= -1.0 <= res.upper_bound
    assert res.upper_bound - res.lower_bound <= 1e-2


def test_constrained_run_semialgebraic():
    # minimize x1 + x2 on [0,1]^2 subject to 0.5 - x1 <= 0 (i.e. x1 >= 0.5)
    p = Polynomial(2, {(1, 0): 1.0, (0, 1): 1.0})
    g = Polynomial(2, {(0, 0): 0.5, (1, 0): -1.0})
    res = branch_and_bound(
        p, (g,), Box((0.0, 0.0), (1.0, 1.0)),
        BnbConfig(level="1", epsilon=1e-6, max_boxes=20_000),
    )
    assert res.lower_bound <= 0.5 + 1e-9
    assert res.upper_bound == pytest.approx(0.5, abs=1e-5)
    assert res.witness[0] >= 0.5 - 1e-9


def test_zero_centered_split_on_symmetric_problem():
    p = Polynomial(2, {(2, 0): 1, (0, 2): 1})
    res = branch_and_bound(
        p, (), Box((-1.0, -1.0), (1.0, 1.0)),
        BnbConfig(level="1", epsilon=1e-9, split="zero_centered"),
    )
    assert res.converged
    assert res.upper_bound == pytest.approx(0.0, abs=1e-12)
    assert res.lower_bound >= -1e-9


def test_level_dominance_on_himmelblau():
    subs = {}
    for level in ("0", "1", "2"):
        res = branch_and_bound(
            himmelblau(), (), Box((-5.0, -5.0), (5.0, 5.0)),
            BnbConfig(level=level, epsilon=1e-9, max_boxes=50_000),
        )
        assert res.converged
        subs[level] = res.stats.subdivisions
    assert subs["2"] <= subs["1"] <= subs["0"]


def test_exact_arithmetic_run():
    from fractions import Fraction

    p = Polynomial(1, {(2,): Fraction(1)})
    box = Box((Fraction(-1),), (Fraction(1),))
    res = branch_and_bound(p, (), box, BnbConfig(level="1", epsilon=1e-9, exact=True))
    assert res.converged
    assert isinstance(res.upper_bound, Fraction)
    assert res.upper_bound == 0
    assert res.lower_bound <= 0


def test_bound_soundness_on_random_boxes(rng):
    # every level's bound stays below a dense sample minimum on the box
    from bernpop.bernstein import to_bernstein
    from bernpop.relax import bound_at_level
    from conftest import grid_min, random_box, random_polynomial

    for _ in range(10):
        p = random_polynomial(rng, 2, 3)
        box = random_box(rng, 2)
        q, amap = to_unit_box(p, box)
        bf = to_bernstein(q)
        sampled = grid_min(p, box, 9)
        for level in ("0", "first", "1", "2"):
            out = bound_at_level(bf, level, mapping=amap)
            assert out.bound <= sampled + 1e-7


def test_report_row_and_format():
    res = branch_and_bound(
        Polynomial(1, {(2,): 1}), (), Box((-1.0,), (1.0,)),
        BnbConfig(level="0", epsilon=1e-6),
    )
    row = report_row("square", "0", res)
    assert row["label"] == "square" and row["opt"] == pytest.approx(res.upper_bound)
    text = format_report([row])
    assert "Sub" in text and "square" in text.splitlines()[1]
