import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hhgeo.errors import AsymmetryError, DimensionError, DomainError, EigenDecompositionError, MatrixFormatError
from hhgeo.funcat import catalogue_fn
from hhgeo.linalg import (
    Interval,
    block2_psd,
    diag,
    format_matrix,
    identity,
    jacobi_eigh,
    loewner_leq,
    matrix_function,
    operator_norm,
    parse_matrix,
    read_matrix,
    spectral_decompose,
    spectrum_in,
    sym_matrix,
    write_matrix,
)
from hhgeo.means import gmean_t

from conftest import spd_from, spd_matrices

METHODS = ["lapack", "jacobi"]


class TestConstruction:
    def test_small_asymmetry_is_averaged(self):
        a = sym_matrix([[1.0, 2.0], [2.0 + 1e-15, 3.0]])
        assert a[0, 1] == a[1, 0]

    def test_large_asymmetry_rejected(self):
        with pytest.raises(AsymmetryError):
            sym_matrix([[1.0, 2.0], [2.1, 3.0]])

    def test_non_square_rejected(self):
        with pytest.raises(DimensionError):
            sym_matrix([[1.0, 2.0]])

    def test_scalar_becomes_1x1(self):
        assert sym_matrix(3.0).shape == (1, 1)

    def test_read_only(self):
        a = sym_matrix([[1.0]])
        with pytest.raises(ValueError):
            a[0, 0] = 2.0

    def test_interval_rejects_reversed(self):
        with pytest.raises(ValueError):
            Interval(2.0, 1.0)


class TestSpectralDecompose:
    @pytest.mark.parametrize("method", METHODS)
    def test_diagonal(self, method):
        dec = spectral_decompose(diag(3, 1), method)
        np.testing.assert_allclose(dec.eigenvalues, [1, 3])
        # signed permutation of the identity
        np.testing.assert_allclose(np.abs(dec.basis), [[0, 1], [1, 0]], atol=1e-15)

    @pytest.mark.parametrize("method", METHODS)
    def test_swap_matrix(self, method):
        dec = spectral_decompose(sym_matrix([[0, 1], [1, 0]]), method)
        np.testing.assert_allclose(dec.eigenvalues, [-1, 1], atol=1e-15)
        s = 1 / math.sqrt(2)
        np.testing.assert_allclose(np.abs(dec.basis[:, 0] @ np.array([s, -s])), 1.0)
        np.testing.assert_allclose(np.abs(dec.basis[:, 1] @ np.array([s, s])), 1.0)

    @pytest.mark.parametrize("method", METHODS)
    def test_analytic_2x2(self, method):
        dec = spectral_decompose(sym_matrix([[2, 1], [1, 2]]), method)
        np.testing.assert_allclose(dec.eigenvalues, [1, 3], rtol=1e-15)

    @pytest.mark.parametrize("method", METHODS)
    @given(A=spd_matrices(max_dim=8, lo=1e-3, hi=1e3))
    def test_decomposition_invariants(self, method, A):
        dec = spectral_decompose(A, method)
        assert np.all(np.diff(dec.eigenvalues) >= 0)
        assert np.max(np.abs(dec.basis.T @ dec.basis - np.eye(len(A)))) < 1e-12
        norm = operator_norm(A)
        assert np.max(np.abs(dec.reconstruct() - A)) <= 1e-12 * (1 + norm)
        assert np.linalg.norm(dec.reconstruct() - A) <= 1e-11 * (1 + np.linalg.norm(A))

    @given(A=spd_matrices(max_dim=8))
    def test_jacobi_matches_lapack(self, A):
        np.testing.assert_allclose(
            jacobi_eigh(A).eigenvalues, spectral_decompose(A).eigenvalues, atol=1e-13 * operator_norm(A)
        )

    def test_jacobi_indefinite_and_repeated(self):
        a = sym_matrix(np.diag([2.0, -1.0, 2.0]) + 0.0)
        np.testing.assert_allclose(jacobi_eigh(a).eigenvalues, [-1, 2, 2])

    def test_jacobi_budget_exhausted(self, rng):
        a = spd_from(rng, 6)
        with pytest.raises(EigenDecompositionError) as info:
            jacobi_eigh(a, max_sweeps=1, rtol=1e-300)
        assert info.value.residual > 0

    def test_zero_matrix(self):
        dec = jacobi_eigh(sym_matrix(np.zeros((3, 3))))
        np.testing.assert_array_equal(dec.eigenvalues, 0)


class TestMatrixFunction:
    def test_identity_fn(self, rng):
        a = spd_from(rng, 5)
        np.testing.assert_allclose(matrix_function(a, catalogue_fn("identity")), a, atol=1e-12)

    def test_inverse_diag(self):
        np.testing.assert_allclose(matrix_function(diag(2, 4), catalogue_fn("inv")), diag(0.5, 0.25))

    def test_sqrt_2x2(self):
        r3 = math.sqrt(3)
        expected = [[(r3 + 1) / 2, (r3 - 1) / 2], [(r3 - 1) / 2, (r3 + 1) / 2]]
        np.testing.assert_allclose(matrix_function(sym_matrix([[2, 1], [1, 2]]), np.sqrt), expected, rtol=1e-15)

    def test_domain_violation_names_eigenvalue(self):
        with pytest.raises(DomainError) as info:
            matrix_function(diag(-1, 2), catalogue_fn("inv"))
        assert info.value.eigenvalue == -1.0
        assert "-1" in str(info.value)

    def test_result_is_symmetric(self, rng):
        out = matrix_function(spd_from(rng, 6), np.log)
        np.testing.assert_array_equal(out, out.T)

    @given(A=spd_matrices(max_dim=6))
    def test_multiplicativity(self, A):
        fg = matrix_function(A, lambda x: np.exp(x) * np.sqrt(x))
        prod = matrix_function(A, np.exp) @ matrix_function(A, np.sqrt)
        assert np.linalg.norm(fg - prod) <= 1e-10 * max(1.0, operator_norm(fg))

    @given(A=spd_matrices(max_dim=6))
    def test_norm_identity(self, A):
        w = spectral_decompose(A).eigenvalues
        fa = matrix_function(A, np.log)
        expected = np.max(np.abs(np.log(w)))
        assert abs(operator_norm(fa) - expected) <= 1e-12 * max(1.0, expected)

    @given(A=spd_matrices(max_dim=6), c=st.floats(0.0, 2.0))
    def test_pointwise_order_lifts(self, A, c):
        # sqrt(x) <= (x + 1)/2 + c on (0, inf)
        lo = matrix_function(A, np.sqrt)
        hi = matrix_function(A, lambda x: (x + 1) / 2 + c)
        assert loewner_leq(lo, hi, 1e-12).ordered


class TestNormsAndOrder:
    def test_operator_norm_examples(self):
        assert operator_norm(identity(3)) == 1.0
        assert operator_norm(diag(-5, 2)) == 5.0
        assert operator_norm(sym_matrix([[2, 1], [1, 2]])) == pytest.approx(3.0, rel=1e-15)

    def test_loewner_examples(self, rng):
        a = spd_from(rng, 3)
        assert loewner_leq(a, a, 0.0) == (True, 0.0)
        assert loewner_leq(diag(1, 2), diag(2, 3)) == (True, 1.0)
        assert loewner_leq(diag(1, 2), diag(2, 1)) == (False, -1.0)

    def test_loewner_tolerance_is_relative(self):
        big = diag(1e6, 1e6)
        assert loewner_leq(big, big - diag(1e-4, 0), 1e-9).ordered
        assert not loewner_leq(diag(1, 1), diag(1 - 1e-4, 1), 1e-9).ordered

    def test_loewner_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            loewner_leq(identity(2), identity(3))

    @given(A=spd_matrices(max_dim=5))
    def test_antisymmetry(self, A):
        b = sym_matrix(np.array(A))
        assert loewner_leq(A, b, 0.0).ordered and loewner_leq(b, A, 0.0).ordered
        assert np.max(np.abs(A - b)) <= 1e-12

    def test_antisymmetry_detects_difference(self, rng):
        a = spd_from(rng, 4)
        b = sym_matrix(a + 1e-6 * np.diag([1.0, -1.0, 0.0, 0.0]))
        assert not (loewner_leq(a, b).ordered and loewner_leq(b, a).ordered)

    def test_spectrum_in_examples(self):
        assert spectrum_in(diag(2, 3), Interval(1, 4))
        assert not spectrum_in(diag(2, 5), Interval(1, 4))

    @given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
    def test_mean_stays_in_spectral_interval(self, seed, t):
        rng = np.random.default_rng(seed)
        a, b = spd_from(rng, 4, 0.5, 3.0), spd_from(rng, 4, 0.5, 3.0)
        assert spectrum_in(gmean_t(a, b, t), Interval(0.5, 3.0), 1e-12)

    def test_block_examples(self):
        i = identity(3)
        assert block2_psd(i, i, i)
        assert not block2_psd(i, 2 * i, i)

    def test_block_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            block2_psd(identity(2), identity(3), identity(2))


class TestMatrixFormat:
    @given(A=spd_matrices(max_dim=6, lo=1e-6, hi=1e6))
    def test_round_trip_is_exact(self, A):
        assert np.array_equal(parse_matrix(format_matrix(A)), A)

    def test_file_round_trip(self, tmp_path, rng):
        a = spd_from(rng, 3)
        write_matrix(tmp_path / "a.mat", a)
        assert np.array_equal(read_matrix(tmp_path / "a.mat"), a)

    def test_blank_lines_ignored(self):
        np.testing.assert_array_equal(parse_matrix("\n2\n1 0\n\n0 1\n"), identity(2))

    @pytest.mark.parametrize(
        "text, line",
        [
            ("x\n1\n", 1),
            ("2\n1 0\n0\n", 3),
            ("2\n1 0\n0 abc\n", 3),
            ("2\n1 0\n", 2),
            ("1\n1\n2\n", 3),
        ],
    )
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(MatrixFormatError) as info:
            parse_matrix(text)
        assert info.value.line == line
        assert f"line {line}" in str(info.value)

    def test_asymmetric_file_rejected(self):
        with pytest.raises(MatrixFormatError):
            parse_matrix("2\n1 2\n3 1\n")

    def test_empty_file(self):
        with pytest.raises(MatrixFormatError):
            parse_matrix("  \n")
