import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradedspline.classes import ClassKind, FunctionClassSpec, derive_params, test_function as make_test_function
from gradedspline.mesh1d import build_mesh1d, closed_form_node_count
from gradedspline.spline1d import build_spline1d, eval_spline1d, node_count, sample_points, sup_error

BARQ = FunctionClassSpec(ClassKind.barQ_u, 2, 1.0, 1)


@pytest.fixture(scope="module")
def barq_spline():
    f = make_test_function(BARQ).normalized()
    m = build_mesh1d(BARQ, 8, "ThmA_u1")
    return build_spline1d(f, m, 3), f


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_polynomial_reproduction(s, seed):
    c = np.random.default_rng(seed).uniform(-1, 1, s)
    poly = np.polynomial.Polynomial(c)
    sp = build_spline1d(poly, build_mesh1d(BARQ, 8, "ThmA_u1"), s)
    assert sup_error(sp, poly) <= 1e-11


def test_continuity(barq_spline):
    sp, f = barq_spline
    bp = sp.mesh.breakpoints[1:-1]
    left = np.array([sp.values[i, -1] for i in range(len(bp))])
    right = np.array([sp.values[i + 1, 0] for i in range(len(bp))])
    assert np.max(np.abs(left - right)) <= 1e-10
    eps = 1e-12
    assert np.max(np.abs(sp(bp - eps) - sp(bp + eps))) <= 1e-10


def test_endpoints_and_seam(barq_spline):
    sp, f = barq_spline
    assert sp(-1.0) == f(-1.0)
    assert isinstance(sp(0.0), float)


def test_node_count_enumerated_vs_closed_form():
    # the construction has 2(M + N - 1) intervals, i.e. 2(s - 1) more nodes than the closed form
    m = build_mesh1d(BARQ, 8, "ThmA_u1")
    sp = build_spline1d(make_test_function(BARQ), m, 3)
    assert sp.n_nodes == node_count(m, 3) == 2 * 20 + 1 == 41
    assert sp.n_nodes - closed_form_node_count(8, 3) == 2 * (3 - 1)


def test_monomial_single_interval_error():
    # t^s on [-1, 1], s anchored nodes, q=65 Lobatto samples: within 2% of the true max
    import math

    from gradedspline.cheb import interpolate

    s = 3
    p = interpolate(lambda t: t**s, -1.0, 1.0, s)
    q = 65
    y = (1 - np.cos(np.pi * np.arange(q) / (q - 1))) / 2
    sampled = np.max(np.abs(p(-1 + 2 * y) - (-1 + 2 * y) ** s))
    true = 2.0 ** (1 - s) / math.cos(math.pi / (2 * s)) ** s
    assert true * 0.98 <= sampled <= true * (1 + 1e-12)


def test_error_ratio_on_doubling():
    f = make_test_function(BARQ).normalized()
    e8 = sup_error(build_spline1d(f, build_mesh1d(BARQ, 8, "ThmA_u1"), 3), f)
    e16 = sup_error(build_spline1d(f, build_mesh1d(BARQ, 16, "ThmA_u1"), 3), f)
    assert 8 * 0.65 <= e8 / e16 <= 8 * 1.35


def test_error_nondecreasing_in_q(barq_spline):
    # nested Lobatto sets: q = 2^k + 1 contains the q = 2^(k-1) + 1 points
    sp, f = barq_spline
    errs = [sup_error(sp, f, q) for q in (5, 9, 17, 33, 65)]
    assert all(b >= a for a, b in zip(errs, errs[1:]))


def test_localization():
    m = build_mesh1d(BARQ, 8, "ThmA_u1")
    f = make_test_function(BARQ)
    i = 5
    a, b = m.breakpoints[i], m.breakpoints[i + 1]

    def g(t):
        t = np.asarray(t, dtype=float)
        return f(t) + np.where((t > a) & (t < b), np.sin(50 * t) * (t - a) * (b - t), 0.0)

    s1, s2 = build_spline1d(f, m, 3), build_spline1d(g, m, 3)
    changed = np.flatnonzero(np.any(s1.values != s2.values, axis=1))
    assert set(changed) <= {i - 1, i, i + 1}
    far = np.ones(m.n_intervals, bool)
    far[max(i - 1, 0): i + 2] = False
    x = sample_points(m)
    sel = far[m.locate(x)]
    assert np.array_equal(s1(x[sel]), s2(x[sel]))


def test_rejects():
    m = build_mesh1d(BARQ, 4, "ThmA_u1")
    with pytest.raises(ValueError):
        build_spline1d(np.sin, m, 1)
    with pytest.raises(ValueError, match="non-finite"):
        build_spline1d(lambda t: np.where(t > 0.5, np.nan, t), m, 3)


def test_sample_points_cover_boundary_ladder():
    m = build_mesh1d(BARQ, 8, "ThmA_u1")
    x = sample_points(m)
    assert x[0] == -1 and x[-1] == 1
    assert np.min(x[x > -1] + 1) < 1e-9


@pytest.mark.parametrize(
    "sp, variant",
    [(FunctionClassSpec(ClassKind.barQ_u, 2, 1.0, 1), "ThmA_u1"),
     (FunctionClassSpec(ClassKind.barQ_u, 1, 2.0, 2), "ThmA_u2"),
     (FunctionClassSpec(ClassKind.Q_rgamma, 2, 1.0, 1), "ThmA_u1"),
     (FunctionClassSpec(ClassKind.Q_u, 1, 0.5, 1), "ThmB_Qu")],
)
def test_error_decay_slope(sp, variant):
    from gradedspline.bench import fit_slope

    s = derive_params(sp).s
    f = make_test_function(sp).normalized()
    pts = []
    for N in (8, 16, 32, 64, 128):
        spl = build_spline1d(f, build_mesh1d(sp, N, variant), s)
        pts.append((spl.n_nodes, sup_error(spl, f)))
    slope = fit_slope(pts)[0]
    assert s - 0.3 <= slope <= s + 0.5


def test_eval_shapes(barq_spline):
    sp, _ = barq_spline
    t = np.linspace(-1, 1, 12).reshape(3, 4)
    assert eval_spline1d(sp, t).shape == (3, 4)


def test_Qu_local_log_schedule_slope():
    from gradedspline.bench import fit_slope

    sp = FunctionClassSpec(ClassKind.Q_u, 1, 0.5, 1)
    f = make_test_function(sp).normalized()
    pts = []
    for N in (8, 16, 32, 64, 128):
        spl = build_spline1d(f, build_mesh1d(sp, N, "ThmB_Qu", local_log=True), 2)
        pts.append((spl.n_nodes, sup_error(spl, f)))
    assert 1.7 <= fit_slope(pts)[0] <= 2.5
