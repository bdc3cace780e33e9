"""Shared fixtures: benchmark polynomials and brute-force oracles."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from bernpop.poly import Box, Polynomial


def himmelblau() -> Polynomial:
    """(x1^2 + x2 - 11)^2 + (x1 + x2^2 - 7)^2, built from the factored form."""
    x1 = Polynomial.variable(2, 0)
    x2 = Polynomial.variable(2, 1)
    c = Polynomial.constant
    f1 = x1 * x1 + x2 - c(2, 11)
    f2 = x1 + x2 * x2 - c(2, 7)
    return f1 * f1 + f2 * f2


def himmelblau_exact() -> Polynomial:
    p = himmelblau()
    return Polynomial(2, {i: Fraction(c) for i, c in p.terms.items()})


def motzkin3() -> Polynomial:
    x1 = Polynomial.variable(3, 0)
    x2 = Polynomial.variable(3, 1)
    x3 = Polynomial.variable(3, 2)
    return (
        x1**4 * x2**2
        + x1**2 * x2**4
        - (x1**2 * x2**2 * x3**2).scale(3)
        + x3**6
    )


def algebraic4() -> Polynomial:
    xs = [Polynomial.variable(4, j) for j in range(4)]
    p = xs[0] ** 4 + xs[1] ** 4 + xs[2] ** 4 + xs[3] ** 4
    return p - (xs[0] * xs[1] * xs[2] * xs[3]).scale(4) - Polynomial.constant(4, 1)


def random_polynomial(rng: random.Random, dimension: int, max_degree: int) -> Polynomial:
    terms = {}
    n_terms = rng.randint(1, 6)
    for _ in range(n_terms):
        idx = tuple(rng.randint(0, max_degree) for _ in range(dimension))
        terms[idx] = terms.get(idx, 0) + rng.uniform(-5, 5)
    return Polynomial(dimension, terms)


def random_box(rng: random.Random, dimension: int) -> Box:
    lower, upper = [], []
    for _ in range(dimension):
        a = rng.uniform(-3, 2)
        b = a + rng.uniform(0.5, 3)
        lower.append(a)
        upper.append(b)
    return Box(tuple(lower), tuple(upper))


def grid_min(p: Polynomial, box: Box, points_per_axis: int = 9) -> float:
    """Brute-force sample minimum over a regular grid (an upper bound on
    the true minimum, hence every sound lower bound must stay below it)."""
    axes = [
        [lo + (hi - lo) * t / (points_per_axis - 1) for t in range(points_per_axis)]
        for lo, hi in zip(box.lower, box.upper)
    ]
    return min(p.eval(pt) for pt in itertools.product(*axes))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
