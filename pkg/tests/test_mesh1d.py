import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradedspline._numeric import guarded_ceil, log_power
from gradedspline.classes import ClassKind, FunctionClassSpec, derive_params
from gradedspline.mesh1d import (
    ScheduleWarning,
    Variant1D,
    build_mesh1d,
    closed_form_node_count,
    graded_points,
    subdivision_counts,
)

BARQ = FunctionClassSpec(ClassKind.barQ_u, 2, 1.0, 1)
BARQ_U2 = FunctionClassSpec(ClassKind.barQ_u, 1, 2.0, 2)
QU = FunctionClassSpec(ClassKind.Q_u, 1, 0.5, 1)


def test_guarded_ceil():
    assert guarded_ceil(3.0 + 1e-14) == 3
    assert guarded_ceil(3.01) == 4
    assert guarded_ceil(0.2) == 1
    assert log_power(5.0, 0) == 1.0
    assert log_power(0.5, 2) == 0.0


class TestGradedPoints:
    def test_examples(self):
        assert graded_points(2, 2, "left") == pytest.approx([-1, -0.75, 0], abs=0)
        assert graded_points(2, 2, "right") == pytest.approx([1, 0.75, 0], abs=0)
        assert graded_points(4, 1.5)[1] == pytest.approx(-0.875, abs=1e-15)

    def test_seam_exact(self):
        assert graded_points(7, 1.7)[-1] == 0.0

    @pytest.mark.parametrize("N, v", [(1, 2.0), (3, 1.0), (2.5, 2.0)])
    def test_rejects(self, N, v):
        with pytest.raises(ValueError):
            graded_points(N, v)

    @given(st.integers(2, 200), st.floats(1.01, 6.0))
    def test_widths_increase(self, N, v):
        h = np.diff(graded_points(N, v))
        assert np.all(np.diff(h) > 0)


class TestCounts:
    def test_thmA_u1(self):
        assert subdivision_counts(BARQ, None, 8, "ThmA_u1") == [3] + [1] * 7

    def test_thmA_u2(self):
        M = subdivision_counts(BARQ_U2, None, 8, "ThmA_u2")
        assert M[0] == 5 and M[4] == 1

    def test_thmB(self):
        assert subdivision_counts(QU, None, 8, "ThmB_Qu")[0] == 2

    def test_thmB_local_log(self):
        M = subdivision_counts(QU, None, 64, "ThmB_Qu", local_log=True)
        assert M[1] == guarded_ceil(math.log(64) ** 0.5)
        assert M[63] == 1

    def test_variant_kind_mismatch(self):
        with pytest.raises(ValueError):
            subdivision_counts(BARQ, None, 8, "ThmB_Qu")
        with pytest.raises(ValueError):
            subdivision_counts(QU, None, 8, "ThmA_u1")

    def test_warnings(self):
        with warnings.catch_warnings(record=True) as rec:
            warnings.simplefilter("always")
            subdivision_counts(BARQ_U2, None, 8, "ThmA_u1")
            subdivision_counts(BARQ, None, 8, "ThmA_u2")
        assert sum(issubclass(w.category, ScheduleWarning) for w in rec) == 2

    def test_u2_schedule_is_linear_in_N(self):
        r = [sum(subdivision_counts(BARQ_U2, None, N, "ThmA_u2")) / N for N in (8, 16, 32, 64, 128)]
        assert max(r) / min(r) <= 3


class TestBuild:
    def test_N2(self):
        m = build_mesh1d(FunctionClassSpec(ClassKind.barQ_u, 1, 1.0, 1), 2, "ThmA_u1")
        assert m.n_intervals == 4
        assert m.breakpoints == pytest.approx([-1, -0.75, 0, 0.75, 1], abs=0)

    def test_u2_interval_count(self):
        m = build_mesh1d(BARQ_U2, 4, "ThmA_u2")
        s = derive_params(BARQ_U2).s
        M = [guarded_ceil(math.log(4) ** 2)] + [guarded_ceil(math.log(4 / k) ** (1 / s)) for k in (1, 2, 3)]
        assert m.n_intervals == 2 * sum(M)

    @given(st.integers(2, 80), st.sampled_from(list(Variant1D)))
    def test_tiling(self, N, variant):
        sp = QU if variant is Variant1D.ThmB_Qu else BARQ_U2 if variant is Variant1D.ThmA_u2 else BARQ
        m = build_mesh1d(sp, N, variant)
        assert abs(m.lengths.sum() - 2.0) <= 1e-14
        assert np.all(m.lengths > 0)
        assert m.breakpoints[0] == -1 and m.breakpoints[-1] == 1
        assert 0.0 in m.breakpoints

    def test_metadata(self):
        m = build_mesh1d(BARQ, 8, "ThmA_u1")
        assert m.layer[:3] == (0, 0, 0) and m.sub[:3] == (0, 1, 2)
        assert m.side[-1] == "right" and m.layer[-1] == 0 and m.sub[-1] == 0

    def test_locate(self):
        m = build_mesh1d(BARQ, 8, "ThmA_u1")
        bp = m.breakpoints
        idx = m.locate(bp)
        assert idx[0] == 0 and idx[-1] == m.n_intervals - 1
        assert np.all(idx[1:-1] == np.arange(m.n_intervals - 1))
        with pytest.raises(ValueError):
            m.locate([1.5])


def test_closed_form_value():
    assert closed_form_node_count(8, 3) == 37
