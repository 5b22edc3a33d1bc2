import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st
from hypothesis.extra.numpy import arrays
from unittest.mock import patch

# Adjust import paths
import sys
from pathlib import Path
project_root_path = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root_path))

from models.errors import AsymmetricInput, BadExponent, NoConvergence, NonFinite, NotPSD, NotSquare
from models.symmat import (
    SymMatrix,
    diagonal_matrix,
    eigh,
    is_positive_definite,
    matrix_power_psd,
    psd_decomposition,
    symmetrized,
    trace_power,
    validate_symmetric,
)

entries = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False, allow_subnormal=False)


@st.composite
def symmetric_matrices(draw, max_dim=6):
    dim = draw(st.integers(min_value=1, max_value=max_dim))
    raw = draw(arrays(np.float64, (dim, dim), elements=entries))
    return symmetrized(raw)


@pytest.fixture
def pair_2_1():
    return validate_symmetric([[2.0, 1.0], [1.0, 2.0]])


def test_validate_rejects_non_square():
    with pytest.raises(NotSquare):
        validate_symmetric([[1.0, 2.0, 3.0]])
    with pytest.raises(NotSquare):
        validate_symmetric(np.zeros((0, 0)))


def test_validate_rejects_non_finite():
    with pytest.raises(NonFinite):
        validate_symmetric([[1.0, float("nan")], [float("nan"), 1.0]])


def test_validate_rejects_asymmetric():
    with pytest.raises(AsymmetricInput):
        validate_symmetric([[1.0, 2.0], [0.0, 1.0]])


def test_validate_symmetrizes_roundoff():
    sym = validate_symmetric([[1.0, 1.0 + 1e-12], [1.0, 1.0]])
    assert sym.values[0, 1] == sym.values[1, 0]


def test_symmatrix_is_read_only(pair_2_1):
    with pytest.raises(ValueError):
        pair_2_1.values[0, 0] = 5.0


def test_eigh_two_by_two(pair_2_1):
    decomposition = eigh(pair_2_1)
    np.testing.assert_allclose(decomposition.eigenvalues, [3.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(np.abs(decomposition.eigenvectors), np.full((2, 2), 1.0 / math.sqrt(2.0)), atol=1e-12)


def test_eigh_diagonal_sorts_descending():
    decomposition = eigh(diagonal_matrix([1.0, 3.0, 2.0]))
    np.testing.assert_array_equal(decomposition.eigenvalues, [3.0, 2.0, 1.0])
    np.testing.assert_array_equal(decomposition.eigenvectors[:, 0], [0.0, 1.0, 0.0])
    np.testing.assert_array_equal(decomposition.eigenvectors[:, 2], [1.0, 0.0, 0.0])


def test_eigh_one_by_one():
    decomposition = eigh([[-2.5]])
    assert decomposition.eigenvalues.tolist() == [-2.5]
    assert decomposition.eigenvectors.tolist() == [[1.0]]


def test_eigh_sign_convention():
    decomposition = eigh([[4.0, 1.0], [1.0, 2.0]])
    u = decomposition.eigenvectors
    for i in range(2):
        assert u[np.argmax(np.abs(u[:, i])), i] > 0.0


def test_eigh_is_deterministic():
    a = symmetrized(np.arange(16.0).reshape(4, 4) % 5)
    first, second = eigh(a), eigh(a)
    np.testing.assert_array_equal(first.eigenvalues, second.eigenvalues)
    np.testing.assert_array_equal(first.eigenvectors, second.eigenvectors)


def test_eigh_raises_when_sweeps_exhausted(pair_2_1):
    with patch("models.symmat.MAX_SWEEPS", 0):
        with pytest.raises(NoConvergence):
            eigh(pair_2_1)


@hyp_settings(deadline=None, max_examples=60)
@given(symmetric_matrices())
def test_eigh_reconstructs_and_is_orthonormal(a):
    decomposition = eigh(a)
    err = np.max(np.abs(decomposition.reconstruct() - a.values))
    assert err <= 1e-9 * (1.0 + a.max_abs())
    u = decomposition.eigenvectors
    assert np.max(np.abs(u.T @ u - np.eye(a.dim))) <= 1e-10
    assert np.all(np.diff(decomposition.eigenvalues) <= 0.0)


def test_positive_definiteness():
    assert is_positive_definite([[2.0, 1.0], [1.0, 2.0]])
    assert not is_positive_definite([[1.0, 1.0], [1.0, 1.0]])
    assert not is_positive_definite([[1.0, 2.0], [2.0, 1.0]])


def test_psd_decomposition_rejects_indefinite():
    with pytest.raises(NotPSD):
        psd_decomposition([[1.0, 2.0], [2.0, 1.0]])
    # Singular but PSD is fine.
    psd_decomposition([[1.0, 1.0], [1.0, 1.0]])


def test_matrix_power_of_diagonal():
    root = matrix_power_psd(diagonal_matrix([4.0, 9.0]), 0.5)
    np.testing.assert_allclose(root.values, np.diag([2.0, 3.0]), atol=1e-14)


def test_square_root_squares_back(pair_2_1):
    root = matrix_power_psd(pair_2_1, 0.5).values
    np.testing.assert_allclose(root @ root, pair_2_1.values, atol=1e-12)


def test_trace_power(pair_2_1):
    assert trace_power(pair_2_1, 1.0) == pytest.approx(4.0, abs=1e-12)
    assert trace_power(pair_2_1, 0.5) == pytest.approx(math.sqrt(3.0) + 1.0, abs=1e-12)


@pytest.mark.parametrize("q", [0.0, -0.5, 1.5])
def test_bad_exponent(pair_2_1, q):
    with pytest.raises(BadExponent):
        trace_power(pair_2_1, q)
    with pytest.raises(BadExponent):
        matrix_power_psd(pair_2_1, q)


def test_off_diagonal_max():
    assert SymMatrix(np.diag([1.0, 2.0])).off_diagonal_max() == 0.0
    assert SymMatrix(np.array([[1.0, -3.0], [-3.0, 1.0]])).off_diagonal_max() == 3.0
