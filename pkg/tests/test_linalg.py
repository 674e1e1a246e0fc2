import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import toeplitz

from toepcov.base import AutocovarianceSequence, SymmetricToeplitz
from toepcov.io import read_toeplitz, toeplitz_to_csv, toeplitz_to_json
from toepcov.linalg import (
    NormConvergenceError,
    gershgorin_bound,
    norm_of_difference,
    operator_norm,
    operator_norms,
    toeplitz_matvec,
)

columns = arrays(np.float64, st.integers(1, 60), elements=st.floats(-5, 5))


class TestToeplitz:
    def test_dense(self):
        np.testing.assert_array_equal(SymmetricToeplitz([1, 2, 3]).to_dense(),
                                      [[1, 2, 3], [2, 1, 2], [3, 2, 1]])

    def test_arithmetic(self):
        a, b = SymmetricToeplitz([1.0, 2.0]), SymmetricToeplitz([0.5, 0.5])
        np.testing.assert_array_equal((a - b).first_column, [0.5, 1.5])
        np.testing.assert_array_equal((2 * a + b).first_column, [2.5, 4.5])
        with pytest.raises(ValueError):
            a - SymmetricToeplitz([1.0])

    def test_invalid(self):
        with pytest.raises(ValueError):
            SymmetricToeplitz([])
        with pytest.raises(ValueError):
            SymmetricToeplitz([1.0, np.inf])

    def test_sequence_to_toeplitz(self):
        s = AutocovarianceSequence([1.0, 0.5], tail_bound=0.0)
        np.testing.assert_array_equal(s.to_toeplitz(4).first_column, [1, 0.5, 0, 0])
        with pytest.raises(ValueError):
            AutocovarianceSequence([1.0, 0.5]).to_toeplitz(4)


class TestMatvec:
    def test_identity(self):
        v = np.arange(5.0)
        np.testing.assert_allclose(toeplitz_matvec(SymmetricToeplitz([1, 0, 0, 0, 0]), v), v)

    @given(columns)
    @settings(max_examples=100, deadline=None)
    def test_matches_dense(self, col):
        m = SymmetricToeplitz(col)
        v = np.random.default_rng(col.size).standard_normal(col.size)
        want = toeplitz(col) @ v
        np.testing.assert_allclose(m @ v, want, atol=1e-10 * (1 + np.abs(col).sum() * np.abs(v).max()))

    def test_matrix_argument(self):
        rng = np.random.default_rng(0)
        m = SymmetricToeplitz(rng.standard_normal(17))
        V = rng.standard_normal((17, 3))
        np.testing.assert_allclose(toeplitz_matvec(m, V), m.to_dense() @ V, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            toeplitz_matvec(SymmetricToeplitz([1.0, 0.0]), np.ones(3))


class TestNorm:
    def test_identity(self):
        r = operator_norm(SymmetricToeplitz([1, 0, 0, 0]))
        assert r.value == 1.0 and r.method == "dense"

    def test_negative_extreme(self):
        # eigenvalues of [[0,1],[1,0]] are +-1; [[1,-2],[-2,1]] has -1 and 3
        assert operator_norm(SymmetricToeplitz([1.0, -2.0])).value == pytest.approx(3.0)
        assert operator_norm(SymmetricToeplitz([-3.0, 1.0])).value == pytest.approx(4.0)

    def test_iterative_matches_dense(self):
        rng = np.random.default_rng(1)
        col = rng.standard_normal(300) / np.arange(1, 301)
        m = SymmetricToeplitz(col)
        it = operator_norm(m, method="iterative")
        dense = np.abs(np.linalg.eigvalsh(m.to_dense())).max()
        assert it.method == "iterative" and it.iterations > 0
        assert it.value == pytest.approx(dense, rel=1e-8)
        assert it.residual <= 1e-10 * gershgorin_bound(m)

    def test_iterative_zero_matrix(self):
        assert operator_norm(SymmetricToeplitz(np.zeros(10)), method="iterative").value == 0.0

    def test_nonconvergence_reports_estimate(self):
        col = np.random.default_rng(2).standard_normal(400)
        with pytest.raises(NormConvergenceError) as info:
            operator_norm(SymmetricToeplitz(col), method="iterative", max_iter=1, tol=1e-14)
        assert info.value.estimate == info.value.estimate or np.isnan(info.value.estimate)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            operator_norm(SymmetricToeplitz([1.0]), tol=0)
        with pytest.raises(ValueError):
            operator_norm(SymmetricToeplitz([1.0]), method="power")

    @given(columns)
    @settings(max_examples=100, deadline=None)
    def test_gershgorin_dominates(self, col):
        m = SymmetricToeplitz(col)
        assert operator_norm(m).value <= gershgorin_bound(m) * (1 + 1e-12) + 1e-12

    @given(columns, columns)
    @settings(max_examples=50, deadline=None)
    def test_triangle_inequality(self, a, b):
        n = min(a.size, b.size)
        A, B = SymmetricToeplitz(a[:n]), SymmetricToeplitz(b[:n])
        lhs = norm_of_difference(A, B).value
        assert lhs <= operator_norm(A).value + operator_norm(B).value + 1e-9

    @pytest.mark.parametrize("T", [1, 2, 3, 4, 5, 16, 17, 64, 101])
    def test_batched_matches_direct(self, T):
        cols = np.random.default_rng(T).standard_normal((7, T))
        want = [np.abs(np.linalg.eigvalsh(toeplitz(c))).max() for c in cols]
        np.testing.assert_allclose(operator_norms(cols), want, rtol=1e-12, atol=1e-12)


class TestSerialization:
    def test_json_roundtrip_exact(self, tmp_path):
        col = np.random.default_rng(3).standard_normal(9)
        p = tmp_path / "m.json"
        p.write_text(toeplitz_to_json(SymmetricToeplitz(col)))
        np.testing.assert_array_equal(read_toeplitz(p).first_column, col)

    def test_dict_roundtrip(self):
        m = SymmetricToeplitz([1.0, 0.25])
        assert SymmetricToeplitz.from_dict(m.to_dict()).first_column.tolist() == [1.0, 0.25]
        with pytest.raises(ValueError):
            SymmetricToeplitz.from_dict({"dimension": 3, "first_column": [1.0]})

    @given(arrays(np.float64, st.integers(1, 30), elements=st.floats(-1e6, 1e6)))
    @settings(max_examples=50, deadline=None)
    def test_csv_roundtrip(self, col):
        import tempfile
        from pathlib import Path

        with tempfile.TemporaryDirectory() as d:
            p = Path(d) / "m.csv"
            p.write_text(toeplitz_to_csv(SymmetricToeplitz(col), {"seed": None}))
            once = read_toeplitz(p).first_column
            np.testing.assert_allclose(once, col, rtol=1e-9, atol=1e-300)
            # ten-digit values survive a second round exactly
            p.write_text(toeplitz_to_csv(SymmetricToeplitz(once)))
            np.testing.assert_array_equal(read_toeplitz(p).first_column, once)
