import math

import numpy as np
import pytest

from conftest import elliptic_real_period_oracle
from fiberatlas.errors import NumericalError, ValidationError
from fiberatlas.fibers import GridSpec
from fiberatlas.newton import parse_poly
from fiberatlas.periods import (
    Cycle,
    _auto_cycles,
    _branch_points,
    _contour_period,
    cauchy_riemann_check,
    periods,
    synthetic_sample,
)


class TestConicPeriods:
    def test_magnitude_pi_constant(self):
        f = parse_poly("z^2 + w^2")
        grid = GridSpec(0.8, 1.2, 0.3, 0.7, 5, 5)
        ps = periods(f, grid)
        assert ps.ncycles == 1
        assert np.max(np.abs(np.abs(ps.values) - math.pi)) < 1e-6

    def test_cauchy_riemann_near_zero(self):
        f = parse_poly("z^2 + w^2")
        grid = GridSpec(0.8, 1.2, 0.3, 0.7, 5, 5)
        rep = cauchy_riemann_check(periods(f, grid))
        assert rep.cr_residual < 1e-10
        assert rep.closedness_residual < 1e-10

    def test_grid_through_critical_value_rejected(self):
        f = parse_poly("z^2 + w^2")
        grid = GridSpec(-0.2, 0.2, -0.2, 0.2, 5, 5)  # contains 0 = Cr_f
        with pytest.raises(ValidationError):
            periods(f, grid)


class TestEllipticPeriods:
    def test_agm_oracle_match(self):
        """Cycle around the two smallest real branch points vs AGM value."""
        f = parse_poly("w^2 - z^3 + z")
        for xi in (0.1, 0.2, 0.3):
            branch, _ = _branch_points(f, xi)
            cycles = _auto_cycles(branch, 1e-9)
            per = _contour_period(f, xi, cycles[0])
            oracle = elliptic_real_period_oracle(xi)
            assert abs(abs(per) - oracle) <= 1e-8 * oracle

    def test_contour_independence(self):
        """Different contours in the same class give the same period."""
        f = parse_poly("w^2 - z^3 + z")
        xi = 0.15
        branch, _ = _branch_points(f, xi)
        cycles = _auto_cycles(branch, 1e-9)
        base = cycles[0]
        fat = Cycle(center=base.center, half_span=base.half_span, rho=base.rho * 0.55)
        p1 = _contour_period(f, xi, base)
        p2 = _contour_period(f, xi, fat, panels=64)
        assert abs(p1 - p2) <= 1e-8 * abs(p1)

    def test_holomorphic_in_xi(self):
        f = parse_poly("w^2 - z^3 + z")
        grid = GridSpec(0.05, 0.25, -0.08, 0.08, 9, 9)
        ps = periods(f, grid)
        assert ps.ncycles == 2
        rep = cauchy_riemann_check(ps)
        assert rep.cr_residual < 1e-2
        assert rep.cr_order is not None and rep.cr_order >= 1.9
        assert rep.closedness_order is not None and rep.closedness_order >= 1.9

    def test_cycle_collision_near_critical(self):
        f = parse_poly("w^2 - z^3 + z")
        crit = 2.0 / (3.0 * math.sqrt(3.0))
        with pytest.raises((NumericalError, ValidationError)):
            branch, _ = _branch_points(f, crit - 1e-9)
            _auto_cycles(branch, 1e-6)


class TestSyntheticSamples:
    def test_conjugate_separates_cr_from_closedness(self):
        grid = GridSpec(0.0, 1.0, 0.0, 1.0, 11, 11)
        sam = synthetic_sample(grid, lambda x: np.conj(x))
        rep = cauchy_riemann_check(sam)
        assert rep.cr_residual == pytest.approx(2.0, abs=1e-12)
        assert rep.closedness_residual == pytest.approx(0.0, abs=1e-12)

    def test_holomorphic_function_clean(self):
        grid = GridSpec(0.0, 1.0, 0.0, 1.0, 21, 21)
        sam = synthetic_sample(grid, lambda x: np.exp(0.3 * x))
        rep = cauchy_riemann_check(sam)
        assert rep.cr_residual < 1e-3
        assert rep.cr_order >= 1.9
        assert rep.closedness_order >= 1.9

    def test_grid_too_small(self):
        with pytest.raises(ValidationError):
            GridSpec(0, 1, 0, 1, 2, 5)


class TestCycleValidation:
    def test_auto_needs_degree_two(self):
        f = parse_poly("1 + z^4 + w^3")
        grid = GridSpec(3.0, 3.4, 3.0, 3.4, 3, 3)
        with pytest.raises(ValidationError):
            periods(f, grid)

    def test_explicit_cycle_used(self):
        f = parse_poly("z^2 + w^2")
        grid = GridSpec(0.9, 1.1, -0.1, 0.1, 3, 3)
        cyc = Cycle(center=0j, half_span=1.0 + 0j, rho=0.4)
        ps = periods(f, grid, cycles=[cyc])
        assert np.max(np.abs(np.abs(ps.values) - math.pi)) < 1e-6
