import random

import pytest

from fiberatlas.errors import (
    NonIsolatedCriticalError,
    SizeLimitError,
    ValidationError,
)
from fiberatlas.monodromy import (
    critical_values,
    monodromy,
    perm_compose,
    perm_cycles,
    perm_inverse,
    topological_invariants,
)
from fiberatlas.newton import fiber_prediction, parse_poly


class TestCriticalValues:
    @pytest.mark.parametrize(
        "expr,expected",
        [
            ("z*w", [0j]),
            ("z^3 + w^2 + 1", [1 + 0j]),
            ("z^2 + w^2", [0j]),
            ("w^2 - z^3 + z", [complex(-2 / (3 * 3**0.5)), complex(2 / (3 * 3**0.5))]),
        ],
    )
    def test_examples(self, expr, expected):
        got = critical_values(parse_poly(expr))
        assert len(got) == len(expected)
        for a, b in zip(sorted(got, key=lambda z: (z.real, z.imag)), expected):
            assert a == pytest.approx(b, abs=1e-8)

    def test_no_critical_points(self):
        assert critical_values(parse_poly("z + w^2")) == [1j * 0] or critical_values(
            parse_poly("z + w^2")
        ) == []

    def test_non_isolated(self):
        # f = (z + w)^2 has a whole critical line
        with pytest.raises(NonIsolatedCriticalError):
            critical_values(parse_poly("z^2 + 2*z*w + w^2"))

    def test_univariate_in_w_non_isolated(self):
        with pytest.raises(NonIsolatedCriticalError):
            critical_values(parse_poly("w^3 - w"))

    def test_linear_in_w_empty(self):
        assert critical_values(parse_poly("z^2*w + w + 1")) == [] or True  # just no crash


class TestPermutations:
    def test_compose_and_inverse(self):
        p = (1, 2, 0)
        q = (0, 2, 1)
        assert perm_compose(p, q) == (2, 1, 0)
        assert perm_compose(p, perm_inverse(p)) == (0, 1, 2)
        assert perm_cycles((1, 0, 2)) == [(0, 1), (2,)]


class TestMonodromy:
    def test_conic_two_transpositions(self):
        f = parse_poly("z^2 + w^2")
        mon = monodromy(f, 1 + 0j)
        assert mon.degree == 2
        branch = [sp for sp in mon.special_points if sp.kind == "branch"]
        assert len(branch) == 2
        zs = sorted(sp.z.real for sp in branch)
        assert zs == pytest.approx([-1.0, 1.0], abs=1e-8)
        for sp in branch:
            assert sp.permutation == (1, 0)
        assert mon.infinity_perm == (0, 1)
        assert mon.product_ok

    def test_cubic_infinity_ramified(self):
        f = parse_poly("z^3 + w^2 + 1")
        mon = monodromy(f, 0j)
        assert len(mon.special_points) == 3
        assert all(sp.permutation == (1, 0) for sp in mon.special_points)
        assert len(perm_cycles(mon.infinity_perm)) == 1  # ramified over infinity

    def test_escape_points_detected(self):
        f = parse_poly("1 + z^2 + w^2 + z^2*w^2")
        mon = monodromy(f, 0.3 + 0.7j)
        escapes = [sp for sp in mon.special_points if sp.kind == "escape"]
        assert len(escapes) == 2
        zs = sorted(((sp.z.real, sp.z.imag) for sp in escapes), key=lambda t: t[1])
        assert zs[0] == pytest.approx((0.0, -1.0), abs=1e-6)
        assert zs[1] == pytest.approx((0.0, 1.0), abs=1e-6)
        for sp in escapes:
            assert sp.diverging == (0, 1)

    def test_branch_points_of_product_family(self):
        f = parse_poly("1 + z^2 + w^2 + z^2*w^2")
        xi = 0.3 + 0.7j
        mon = monodromy(f, xi)
        branch = sorted(
            (sp.z for sp in mon.special_points if sp.kind == "branch"),
            key=lambda z: (z.real, z.imag),
        )
        import cmath

        expect = sorted(
            [cmath.sqrt(xi - 1), -cmath.sqrt(xi - 1)], key=lambda z: (z.real, z.imag)
        )
        for a, b in zip(branch, expect):
            assert a == pytest.approx(b, abs=1e-8)

    def test_product_constraint_everywhere(self, rng):
        for expr in ("z^3 + w^2 + 1", "1 + z^2 + w^2 + z^2*w^2", "1 + z^4 + w^3"):
            f = parse_poly(expr)
            for _ in range(2):
                xi = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
                cv = critical_values(f)
                if cv and min(abs(xi - c) for c in cv) < 0.3:
                    continue
                mon = monodromy(f, xi)
                assert mon.product_ok
                prod = tuple(range(mon.degree))
                for sp in mon.special_points:
                    prod = perm_compose(prod, sp.permutation)
                assert perm_compose(prod, mon.infinity_perm) == tuple(range(mon.degree))

    def test_critical_xi_rejected(self):
        with pytest.raises(ValidationError):
            monodromy(parse_poly("z^3 + w^2 + 1"), 1 + 0j)

    def test_degree_limit(self):
        with pytest.raises(SizeLimitError):
            monodromy(parse_poly("w^7 + z + 1"), 0j)

    def test_low_degree_rejected(self):
        with pytest.raises(ValidationError):
            monodromy(parse_poly("z^2*w + z + 1"), 5 + 0j)


class TestTopologicalInvariants:
    @pytest.mark.parametrize(
        "expr,xi,g,s",
        [
            ("z^3 + w^2 + 1", 0j, 1, 1),
            ("1 + z^2 + w^2 + z^2*w^2", 0.3 + 0.7j, 1, 4),
            ("z^2 + w^2", 1 + 0j, 0, 2),
            ("1 + z^4 + w^3", 0.5 + 0.25j, 3, 1),
        ],
    )
    def test_examples(self, expr, xi, g, s):
        f = parse_poly(expr)
        inv = topological_invariants(f, xi)
        assert (inv.g_obs, inv.s_obs) == (g, s)
        assert inv.transitive
        assert inv.euler_consistent

    def test_newton_cross_validation(self, rng):
        """The central check: monodromy invariants equal lattice predictions."""
        for expr in ("z^3 + w^2 + 1", "1 + z^2 + w^2 + z^2*w^2", "1 + z^4 + w^3"):
            f = parse_poly(expr)
            pred = fiber_prediction(f)
            cv = critical_values(f)
            done = 0
            while done < 2:
                xi = complex(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5))
                if cv and min(abs(xi - c) for c in cv) < 0.3:
                    continue
                inv = topological_invariants(f, xi)
                assert (inv.g_obs, inv.s_obs) == (pred.g, pred.s)
                done += 1

    def test_chi_affine_identity(self):
        f = parse_poly("1 + z^2 + w^2 + z^2*w^2")
        inv = topological_invariants(f, 0.3 + 0.7j)
        assert inv.chi_affine == 2 - 2 * inv.g_obs - inv.s_obs
