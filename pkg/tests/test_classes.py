import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradedspline.classes import (
    ClassKind,
    ClassSpecError,
    FunctionClassSpec,
    SingularFunction,
    PolynomialPrototype,
    check_membership,
    default_probe_grid,
    derive_params,
    distance_to_boundary,
    growth_profile,
    multi_indices,
    test_function as make_test_function,
)


def spec(kind, r, gamma=1.0, u=1, l=1):
    return FunctionClassSpec(ClassKind(kind), r, gamma, u, l)


class TestDeriveParams:
    def test_barQu_r2(self):
        d = derive_params(spec("barQ_u", 2, 1))
        assert (d.s, d.zeta, d.mu) == (3, 0.0, 1.0)
        assert d.v == pytest.approx(1.5)

    def test_Qu_half(self):
        d = derive_params(spec("Q_u", 1, 0.5))
        assert d.s == 2
        assert d.zeta == pytest.approx(0.5) and d.mu == pytest.approx(0.5)
        assert d.v == pytest.approx(4 / 3)

    def test_barQu_r1(self):
        d = derive_params(spec("barQ_u", 1, 1))
        assert d.s == 2 and d.v == pytest.approx(2.0)

    def test_Qr_uses_gamma_r_plus_one(self):
        d = derive_params(FunctionClassSpec(ClassKind.Q_r, 2))
        assert d.s == 5 and d.zeta == 0.0

    @given(
        st.sampled_from(["Q_rgamma", "barQ_u", "Q_u"]),
        st.integers(1, 6),
        st.floats(0.05, 6.0),
        st.integers(1, 4),
    )
    def test_v_identity(self, kind, r, gamma, u):
        if kind == "barQ_u":
            gamma = float(max(1, round(gamma)))
        if kind == "Q_u" and abs(gamma - round(gamma)) < 1e-3:
            gamma += 0.25
        sp = spec(kind, r, gamma, u)
        d = derive_params(sp)
        assert d.v > 1
        assert (d.s - sp.gamma) * d.v == pytest.approx(d.s, rel=4e-16, abs=0)
        assert 0.0 <= d.zeta < 1.0 and d.mu == pytest.approx(1 - d.zeta)


class TestSpecValidation:
    @pytest.mark.parametrize(
        "args, code",
        [
            (("barQ_u", 1, 1.5), "gamma-not-integer"),
            (("Q_u", 1, 2.0), "gamma-integer"),
            (("barQ_u", 0, 1.0), "bad-r"),
            (("barQ_u", 1, 1.0, 0), "bad-u"),
            (("barQ_u", 1, 1.0, 1, 0), "bad-l"),
            (("Q_rgamma", 1, -1.0), "bad-gamma"),
        ],
    )
    def test_rejections(self, args, code):
        with pytest.raises(ClassSpecError) as ei:
            spec(*args)
        assert ei.value.code == code

    def test_incompatible_family(self):
        with pytest.raises(ClassSpecError) as ei:
            make_test_function(spec("barQ_u", 1, 1), "Q_u")
        assert ei.value.code == "incompatible-family"


class TestDistance:
    def test_examples(self):
        assert distance_to_boundary(np.array([0.0, 0.0])) == 1.0
        assert distance_to_boundary(-1.0) == 0.0
        assert distance_to_boundary(np.array([0.5, -0.9])) == pytest.approx(0.1)


class TestFamilies:
    def test_Qrgamma_value_at_zero(self):
        # (1 - x^2)^(r + gamma) (1 + x/3) at 0
        f = make_test_function(spec("Q_rgamma", 1, 1))
        assert f(0.0) == pytest.approx(1.0)

    def test_barQu_vanishes_at_ends(self):
        f = make_test_function(spec("barQ_u", 2, 1))
        assert f(np.array([-1.0, 1.0])) == pytest.approx([0.0, 0.0], abs=0)

    def test_barQu_second_derivative_log_growth(self):
        f = make_test_function(spec("barQ_u", 2, 1))
        d = 2.0 ** -np.arange(4, 30)
        g2 = np.abs(f.derivative(1.0 - d, (2,)))
        # grows like |ln d|: ratio to ln d settles, values are unbounded
        assert np.all(np.diff(g2) > 0)
        ratio = g2 / np.abs(np.log(d))
        assert abs(ratio[-1] - ratio[-2]) < 0.05 * ratio[-1]

    def test_closed_form_against_sympy(self):
        sympy = pytest.importorskip("sympy")
        x = sympy.symbols("x")
        w = 1 - x**2
        g = w**2 * sympy.log(sympy.E * w / 2)
        f = make_test_function(spec("barQ_u", 2, 1))
        for order in range(4):
            expr = sympy.lambdify(x, sympy.diff(g, x, order))
            for t in (-0.7, 0.1, 0.55):
                assert f.derivative(t, (order,)) == pytest.approx(float(expr(t)), rel=1e-12, abs=1e-14)

    @pytest.mark.parametrize(
        "args",
        [("Q_rgamma", 1, 1.0, 1, 2), ("Q_rgamma", 2, 0.5, 1, 1), ("barQ_u", 2, 1.0, 2, 2),
         ("Q_u", 1, 0.5, 1, 2), ("Q_u", 2, 1.5, 2, 1)],
    )
    def test_derivatives_match_finite_differences(self, args):
        sp = spec(*args)
        f = make_test_function(sp)
        rng = np.random.default_rng(1)
        pts = rng.uniform(-0.9, 0.9, (8, sp.l))
        h = 1e-3
        for v in multi_indices(sp.l, min(derive_params(sp).s, 3), 1):
            # build the FD stencil one axis at a time from the lower-order derivative
            axis = next(i for i, k in enumerate(v) if k)
            lower = list(v)
            lower[axis] -= 1
            e = np.zeros(sp.l)
            e[axis] = h
            fd = (
                -f.derivative(pts + 2 * e, lower) + 8 * f.derivative(pts + e, lower)
                - 8 * f.derivative(pts - e, lower) + f.derivative(pts - 2 * e, lower)
            ) / (12 * h)
            exact = f.derivative(pts, v)
            scale = np.maximum(np.abs(exact), 1.0)
            assert np.max(np.abs(fd - exact) / scale) <= 1e-4

    def test_continuous_at_boundary(self):
        f = make_test_function(spec("Q_u", 1, 0.5, 1, 2))
        corner = f(np.array([[1.0, 1.0], [-1.0, 0.3]]))
        assert np.all(np.isfinite(corner)) and np.all(corner == 0.0)


class TestMembership:
    def _linear(self, c):
        return SingularFunction(spec("Q_rgamma", 1, 1), "custom", PolynomialPrototype([0.0, c]))

    def test_identity_eps_one(self):
        assert check_membership(self._linear(1.0)).eps == pytest.approx(1.0, rel=1e-14)

    def test_linear_scaling(self):
        assert check_membership(self._linear(2.0)).eps == pytest.approx(2.0, rel=1e-14)

    def test_barQu_normalization_stable(self):
        f = make_test_function(spec("barQ_u", 2, 1))
        a, b = check_membership(f).eps, check_membership(f).eps
        assert math.isfinite(a) and a > 0 and abs(a - b) <= 1e-6 * a
        g = f.normalized()
        assert check_membership(g).eps == pytest.approx(1.0, rel=1e-12)

    @given(st.floats(1e-3, 1e3))
    def test_homogeneity(self, c):
        f = make_test_function(spec("Q_u", 1, 0.5))
        base = check_membership(f).eps
        assert check_membership(f.scaled(c)).eps == pytest.approx(c * base, rel=1e-12)

    def test_flags_nonpositive_exponent(self):
        # gamma just below its ceiling: |v| = r + 1 has exponent 1 - zeta > 0, never flagged
        rep = check_membership(make_test_function(spec("Q_rgamma", 1, 0.9)))
        assert rep.flagged_orders == ()
        assert rep.n_points == len(default_probe_grid(1).points)

    @pytest.mark.parametrize(
        "args", [("Q_rgamma", 1, 1.0), ("barQ_u", 2, 1.0, 2), ("Q_u", 1, 0.5, 1), ("Q_u", 1, 0.5, 1, 2)]
    )
    def test_growth_profile_monotone_under_restriction(self, args):
        sp = spec(*args)
        f = make_test_function(sp)
        grid = default_probe_grid(sp.l)
        full = growth_profile(f, grid)
        inner = growth_profile(f, grid.restricted(1e-3))
        for order, val in full.items():
            assert math.isfinite(val)
            assert inner[order] <= val * (1 + 1e-12)
