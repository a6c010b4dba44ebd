import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradedspline.classes import ClassKind, FunctionClassSpec, derive_params, test_function as make_test_function
from gradedspline.mesh_ld import decompose_domain, decompose_domain_aligned, schedule_ld
from gradedspline.spline_ld import (
    build_spline_ld,
    eval_spline_ld,
    max_interface_jump,
    nodes_per_dim,
    sample_points_ld,
    sup_error_ld,
    tensor_interpolate,
)

BARQ11 = FunctionClassSpec(ClassKind.barQ_u, 1, 1.0, 1, 2)


def _sep_poly(seed, s, l=2):
    rng = np.random.default_rng(seed)
    polys = [np.polynomial.Polynomial(rng.uniform(-1, 1, s)) for _ in range(l)]

    def f(t):
        t = np.atleast_2d(t)
        out = np.ones(len(t))
        for d, p in enumerate(polys):
            out *= p(t[:, d])
        return out

    return f


class TestTensorInterpolate:
    def test_product_reproduced(self):
        p = tensor_interpolate(lambda t: t[:, 0] * t[:, 1], [-1, -1], [1, 1], 2)
        pts = np.random.default_rng(0).uniform(-1, 1, (50, 2))
        assert np.max(np.abs(p(pts) - pts[:, 0] * pts[:, 1])) <= 1e-13

    def test_constant(self):
        p = tensor_interpolate(lambda t: np.full(len(t), 7.0), [0, 0], [1, 2], 3)
        assert np.allclose(p(np.array([[0.3, 1.9], [1.0, 0.0]])), 7.0, atol=1e-13)

    def test_monomial_error(self):
        # t1^s with s plain-zero nodes would give 2^(1-s); anchored nodes give
        # the 1D anchored remainder, constant in t2
        import math

        s = 3
        p = tensor_interpolate(lambda t: t[:, 0] ** s, [-1, -1], [1, 1], s)
        x = np.linspace(-1, 1, 4001)
        pts = np.stack([x, np.full_like(x, 0.37)], axis=1)
        err = np.max(np.abs(p(pts) - x**s))
        assert err == pytest.approx(2.0 ** (1 - s) / math.cos(math.pi / (2 * s)) ** s, rel=1e-6)
        pts[:, 1] = -0.9
        assert np.max(np.abs(p(pts) - x**s)) == pytest.approx(err, rel=1e-12)

    def test_nodes_anchor_corners(self):
        nodes = tensor_interpolate(lambda t: t[:, 0], [0, 0], [1, 1], 3).nodes
        assert [0.0, 0.0] in nodes.tolist() and [1.0, 1.0] in nodes.tolist()

    @given(st.integers(0, 2**32 - 1), st.integers(2, 5))
    def test_random_separable_reproduction(self, seed, s):
        f = _sep_poly(seed, s)
        p = tensor_interpolate(f, [-0.3, 0.1], [0.4, 0.9], s)
        pts = np.random.default_rng(seed + 1).uniform([-0.3, 0.1], [0.4, 0.9], (64, 2))
        assert np.max(np.abs(p(pts) - f(pts))) <= 1e-10


class TestBuild:
    @pytest.mark.parametrize("aligned, continuous", [(False, False), (True, False), (True, True)])
    def test_reproduction_all_cells(self, aligned, continuous):
        build = decompose_domain_aligned if aligned else decompose_domain
        part = build(4, 2.0, 2, [2, 1, 1, 1])
        f = _sep_poly(5, 3)
        sp = build_spline_ld(f, part, 3, continuous=continuous)
        assert sup_error_ld(sp, f) <= 1e-10
        if aligned:
            assert max_interface_jump(sp) <= 1e-12

    def test_continuous_barQ(self):
        f = make_test_function(BARQ11)
        part = decompose_domain_aligned(4, 2.0, 2)
        sp = build_spline_ld(f, part, 2, continuous=True)
        assert max_interface_jump(sp) <= 1e-9

    def test_discontinuous_jumps_small(self):
        f = make_test_function(BARQ11)
        part = decompose_domain(4, 2.0, 2)
        sp = build_spline_ld(f, part, 2)
        jump = max_interface_jump(sp)
        assert 0 < jump <= 2 * 2 * sup_error_ld(sp, f)

    def test_continuous_needs_aligned(self):
        with pytest.raises(ValueError):
            build_spline_ld(np.sin, decompose_domain(3, 2.0, 2), 2, continuous=True)

    def test_rejects(self):
        part = decompose_domain_aligned(3, 2.0, 2)
        with pytest.raises(ValueError):
            build_spline_ld(lambda t: t[:, 0], part, 1)
        with pytest.raises(ValueError, match="non-finite"):
            build_spline_ld(lambda t: np.where(t[:, 0] > 0.5, np.inf, 0.0), part, 2)


@pytest.fixture(scope="module")
def cont():
    f = make_test_function(BARQ11)
    return build_spline_ld(f, decompose_domain_aligned(4, 2.0, 2, [2, 1, 1, 1]), 3, continuous=True), f


class TestEvaluate:
    def test_interior_point_matches_cell(self, cont):
        sp, _ = cont
        p = sp.partition
        c = 17
        t = 0.3 * p.lo[c] + 0.7 * p.hi[c]
        assert eval_spline_ld(sp, t) == sp.eval_cells(np.array([c]), t[None])[0]

    def test_shared_face_agrees(self, cont):
        sp, _ = cont
        p = sp.partition
        # faces between the central cube and its neighbours
        c = p.n_cells - 1
        t = np.array([p.hi[c, 0], 0.1])
        nb = p.locate(t + np.array([1e-9, 0.0]))
        a = sp.eval_cells(np.array([c]), t[None])[0]
        b = sp.eval_cells(nb, t[None])[0]
        assert abs(a - b) <= 1e-9

    def test_corner_is_node(self, cont):
        sp, f = cont
        assert eval_spline_ld(sp, np.array([-1.0, -1.0])) == f(np.array([[-1.0, -1.0]]))[0]

    def test_shape(self, cont):
        sp, _ = cont
        assert sp(np.zeros((3, 5, 2))).shape == (3, 5)


class TestSwitch:
    def test_Qu_s_eq_r_plus_1(self):
        sp = FunctionClassSpec(ClassKind.Q_u, 1, 0.5, 1, 2)
        assert nodes_per_dim(sp) == derive_params(sp).s + 1 == 3

    def test_no_switch_otherwise(self):
        assert nodes_per_dim(FunctionClassSpec(ClassKind.Q_u, 1, 1.5, 1, 2)) == 3
        assert nodes_per_dim(BARQ11) == 2

    def test_inventory_reflects_switch(self):
        sp = FunctionClassSpec(ClassKind.Q_u, 1, 0.5, 1, 2)
        d = derive_params(sp)
        part = decompose_domain_aligned(2, d.v, 2)
        spl = build_spline_ld(make_test_function(sp), part, nodes_per_dim(sp), continuous=True)
        assert spl.values.shape[1] == 9
        # one-cell check: the central cube alone carries 3 x 3 nodes
        assert len(np.unique(spl.node_points()[-9:], axis=0)) == 9


class TestSampling:
    def test_covers_all_cells_and_boundary(self):
        part = decompose_domain(3, 2.0, 2)
        seen = set()
        near = 1.0
        for idx, pts in sample_points_ld(part, q=5):
            assert np.all((part.lo[idx] <= pts) & (pts <= part.hi[idx]))
            seen.update(idx.tolist())
            near = min(near, float(np.min(1 - np.max(np.abs(pts), axis=1)[np.max(np.abs(pts), axis=1) < 1])))
        assert seen == set(range(part.n_cells))
        assert near < 1e-6


class TestRates:
    def test_below_error_ratio(self):
        sp = FunctionClassSpec(ClassKind.barQ_u, 3, 1.0, 1, 2)
        d = derive_params(sp)
        f = make_test_function(sp).normalized()
        e = []
        for N in (8, 16):
            part = decompose_domain_aligned(N, d.v, 2, schedule_ld(sp, d, N, "thm31"))
            e.append(sup_error_ld(build_spline_ld(f, part, 4, continuous=True), f))
        assert 0.6 / 16 <= e[1] / e[0] <= 1.4 / 16

    def test_above_bounded_ratio(self):
        import math

        sp = FunctionClassSpec(ClassKind.barQ_u, 1, 2.0, 1, 2)
        d = derive_params(sp)
        f = make_test_function(sp).normalized()
        q = []
        for N in (4, 8, 16):
            part = decompose_domain_aligned(N, d.v, 2)
            e = sup_error_ld(build_spline_ld(f, part, d.s, continuous=True), f)
            q.append(e * N**d.s / math.log(N) ** sp.u)
        assert max(q) / min(q) <= 3
