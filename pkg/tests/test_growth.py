from fractions import Fraction
from math import comb, e

import pytest

from bootgrid import (
    GridSpec,
    GrowthEventSpec,
    Rect,
    RuleFamily,
    closure_naive,
    column_growth_polynomial,
    empty_configuration,
    estimate_growth_mc,
    horizontal_step_probability,
    make_rule,
    occupy_rect,
    row_growth_polynomial,
    strategy_range,
)

ONE_TWO = make_rule(RuleFamily.one_two())


def column_event_by_closure(n: int, helper_bits: int) -> bool:
    """Full-grid oracle: 2 x n rectangle plus helper column, real closure."""
    grid = GridSpec((3, n))
    cfg = occupy_rect(empty_configuration(grid), Rect((0, 0), (2, n)))
    for y in range(n):
        if (helper_bits >> y) & 1:
            cfg = occupy_rect(cfg, Rect((2, y), (1, 1)))
    closed = closure_naive(cfg, ONE_TWO)
    return all(closed.get((2, y)) for y in range(n))


def row_event_by_closure(x: int, helper_bits: int) -> bool:
    """Full-grid oracle: x-wide, 2-tall rectangle plus two helper rows."""
    grid = GridSpec((x, 4))
    cfg = occupy_rect(empty_configuration(grid), Rect((0, 0), (x, 2)))
    for h in range(2 * x):
        if (helper_bits >> h) & 1:
            cfg = occupy_rect(cfg, Rect((h % x, 2 + h // x), (1, 1)))
    closed = closure_naive(cfg, ONE_TWO)
    return all(closed.get((c, 2)) for c in range(x))


def polynomial_from_oracle(event, cells: int):
    counts = [0] * (cells + 1)
    for bits in range(1 << cells):
        if event(bits):
            counts[bin(bits).count("1")] += 1
    coeffs = [0] * (cells + 1)
    for k, ck in enumerate(counts):
        for j in range(cells - k + 1):
            coeffs[k + j] += ck * comb(cells - k, j) * (-1) ** j
    return [Fraction(c) for c in coeffs]


class TestEventSpec:
    def test_helper_depth(self):
        assert GrowthEventSpec("east_column", 5).helper_cells == 5
        assert GrowthEventSpec("north_rows", 5).helper_cells == 10

    def test_validation(self):
        with pytest.raises(ValueError):
            GrowthEventSpec("west_column", 3)
        with pytest.raises(ValueError):
            GrowthEventSpec("east_column", 0)


class TestColumnPolynomial:
    def test_n1_is_p(self):
        poly = column_growth_polynomial(1)
        assert list(poly.coeffs) == [0, 1]

    def test_n3_at_half(self):
        assert column_growth_polynomial(3).evaluate(0.5) == pytest.approx(0.875, abs=1e-12)

    @pytest.mark.parametrize("n", range(1, 13))
    def test_matches_one_minus_qn(self, n):
        # coefficient-level identity with the binomial expansion of 1-(1-p)^n
        poly = column_growth_polynomial(n)
        expect = [Fraction(0)] + [Fraction((-1) ** (j + 1) * comb(n, j)) for j in range(1, n + 1)]
        assert list(poly.coeffs) == expect

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_matches_full_grid_closure_oracle(self, n):
        got = column_growth_polynomial(n)
        want = polynomial_from_oracle(lambda bits: column_event_by_closure(n, bits), n)
        assert list(got.coeffs) == want

    def test_cost_guard(self):
        with pytest.raises(ValueError):
            column_growth_polynomial(21)


class TestRowPolynomial:
    def test_x1_is_p(self):
        poly = row_growth_polynomial(1)
        assert list(poly.coeffs) == [0, 1, 0]

    @pytest.mark.parametrize("x", [1, 2, 3, 4])
    def test_matches_full_grid_closure_oracle(self, x):
        got = row_growth_polynomial(x)
        want = polynomial_from_oracle(lambda bits: row_event_by_closure(x, bits), 2 * x)
        assert list(got.coeffs) == want

    def test_empty_helpers_never_fill(self):
        for x in range(1, 5):
            assert not row_event_by_closure(x, 0)

    def test_p2_coefficient_nondecreasing_in_x(self):
        c2 = [row_growth_polynomial(x).coefficient(2) for x in range(2, 9)]
        assert all(b >= a for a, b in zip(c2, c2[1:]))

    def test_cost_guard(self):
        with pytest.raises(ValueError):
            row_growth_polynomial(13)


class TestPolynomialShape:
    @pytest.mark.parametrize(
        "poly",
        [column_growth_polynomial(6), row_growth_polynomial(5)],
        ids=["column6", "row5"],
    )
    def test_values_in_unit_interval_and_monotone(self, poly):
        grid = [i / 40 for i in range(41)]
        values = [poly.evaluate(p) for p in grid]
        assert all(-1e-12 <= v <= 1.0 + 1e-12 for v in values)
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_exact_evaluation(self):
        poly = column_growth_polynomial(4)
        assert poly.evaluate_exact(Fraction(1, 2)) == 1 - Fraction(1, 2) ** 4


class TestGrowthMonteCarlo:
    def test_east_column_against_closed_form(self):
        est = estimate_growth_mc(GrowthEventSpec("east_column", 4), 0.2, 100_000, seed=5)
        expect = 1.0 - 0.8**4
        assert abs(est.mean - expect) <= 3.0 * est.stderr

    def test_north_rows_against_enumeration(self):
        poly = row_growth_polynomial(6)
        est = estimate_growth_mc(GrowthEventSpec("north_rows", 6), 0.1, 50_000, seed=6)
        assert abs(est.mean - poly.evaluate(0.1)) <= 3.0 * est.stderr

    def test_p_zero(self):
        est = estimate_growth_mc(GrowthEventSpec("north_rows", 4), 0.0, 500, seed=1)
        assert est.mean == 0.0 and est.stderr == 0.0

    def test_p_one(self):
        est = estimate_growth_mc(GrowthEventSpec("east_column", 4), 1.0, 500, seed=1)
        assert est.mean == 1.0

    def test_deterministic(self):
        spec = GrowthEventSpec("north_rows", 5)
        a = estimate_growth_mc(spec, 0.15, 3000, seed=9)
        b = estimate_growth_mc(spec, 0.15, 3000, seed=9)
        assert a == b

    def test_bad_p(self):
        with pytest.raises(ValueError):
            estimate_growth_mc(GrowthEventSpec("east_column", 3), 1.2, 10, seed=0)


class TestHorizontalStepProbability:
    def test_near_einv_at_strategy_start(self):
        p = 1e-3
        n = -(-strategy_range(p).n0 // 1)  # ceil
        value = horizontal_step_probability(p, n)
        assert 0.2 <= value <= 0.5

    def test_limit_one_over_e(self):
        p = 1e-6
        n = int(strategy_range(p).n0) + 1
        value = horizontal_step_probability(p, n)
        assert abs(value - 1.0 / e) / (1.0 / e) < 0.01

    def test_tiny_n_tiny_p_near_zero(self):
        assert horizontal_step_probability(1e-8, 1) < 1e-6

    def test_overflow_raises(self):
        with pytest.raises(OverflowError):
            horizontal_step_probability(0.5, 5000)

    def test_domain(self):
        with pytest.raises(ValueError):
            horizontal_step_probability(0.0, 5)
        with pytest.raises(ValueError):
            horizontal_step_probability(0.3, 0)
