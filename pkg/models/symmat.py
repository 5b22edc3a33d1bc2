"""Dense symmetric-matrix kernel: validation, Jacobi eigendecomposition,
positive-definiteness and fractional powers.

Every public operation accepts a ``SymMatrix`` or anything array-like; raw
input goes through ``validate_symmetric`` first.
"""
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from models.errors import AsymmetricInput, BadExponent, NoConvergence, NonFinite, NotSquare, NotPSD

logger = logging.getLogger("symmat_logger")
logger.setLevel(logging.INFO)
handler = logging.StreamHandler()
formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
handler.setFormatter(formatter)
if not logger.handlers:
    logger.addHandler(handler)

SYMMETRY_TOL = 1e-8
JACOBI_TOL = 1e-12
MAX_SWEEPS = 100
SPECTRAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SymMatrix:
    values: np.ndarray

    def __post_init__(self):
        frozen = np.array(self.values, dtype=float, copy=True)
        frozen.setflags(write=False)
        object.__setattr__(self, "values", frozen)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def diagonal(self) -> np.ndarray:
        return np.diag(self.values).copy()

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def off_diagonal_max(self) -> float:
        if self.dim == 1:
            return 0.0
        off = self.values - np.diag(np.diag(self.values))
        return float(np.max(np.abs(off)))

    def trace(self) -> float:
        return float(np.trace(self.values))

    def tolist(self) -> list:
        return self.values.tolist()


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues in descending order; column i of ``eigenvectors`` pairs with eigenvalue i."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.T

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[-1])


MatrixLike = Union[SymMatrix, np.ndarray, Sequence[Sequence[float]]]


def symmetrized(arr: np.ndarray) -> SymMatrix:
    """Average with the transpose; mirrored entries come out bit-identical."""
    arr = np.asarray(arr, dtype=float)
    return SymMatrix((arr + arr.T) / 2.0)


def validate_symmetric(raw: MatrixLike) -> SymMatrix:
    if isinstance(raw, SymMatrix):
        raw = raw.values
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as e:
        raise NotSquare(f"Input is not a rectangular numeric matrix: {e}") from e
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise NotSquare(f"Expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("Matrix contains NaN or infinite entries")
    skew = float(np.max(np.abs(arr - arr.T)))
    tolerance = SYMMETRY_TOL * (1.0 + float(np.max(np.abs(arr))))
    if skew > tolerance:
        raise AsymmetricInput(f"Asymmetry {skew:.3e} exceeds tolerance {tolerance:.3e}")
    return symmetrized(arr)


def as_symmat(matrix: MatrixLike) -> SymMatrix:
    if isinstance(matrix, SymMatrix):
        return matrix
    return validate_symmetric(matrix)


def diagonal_matrix(values: Sequence[float]) -> SymMatrix:
    return SymMatrix(np.diag(np.asarray(values, dtype=float)))


def _off_diagonal_max(a: np.ndarray) -> float:
    if a.shape[0] == 1:
        return 0.0
    return float(np.max(np.abs(a - np.diag(np.diag(a)))))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    # Annihilates a[p, q] in place: a <- J^T a J, v <- v J.
    apq = a[p, q]
    app, aqq = a[p, p], a[q, q]
    theta = (aqq - app) / (2.0 * apq)
    t = 1.0 / (abs(theta) + math.hypot(theta, 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    col_p, col_q = a[:, p].copy(), a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q
    row_p, row_q = a[p, :].copy(), a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    a[p, p] = app - t * apq
    a[q, q] = aqq + t * apq
    a[p, q] = a[q, p] = 0.0

    vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
    v[:, p] = c * vec_p - s * vec_q
    v[:, q] = s * vec_p + c * vec_q


def eigh(matrix: MatrixLike) -> SpectralDecomposition:
    """Cyclic Jacobi eigendecomposition.

    Sweeps over all (p, q) pairs until every off-diagonal magnitude is at most
    ``JACOBI_TOL * ||A||_F``. Eigenvalues come back descending; each
    eigenvector column is signed so that its largest-magnitude entry is
    positive (lowest row index wins a tie).
    """
    sym = as_symmat(matrix)
    a = np.array(sym.values, dtype=float, copy=True)
    m = sym.dim
    v = np.eye(m)
    threshold = JACOBI_TOL * float(np.linalg.norm(a))

    sweeps = 0
    while _off_diagonal_max(a) > threshold:
        if sweeps == MAX_SWEEPS:
            raise NoConvergence(f"Jacobi did not converge after {MAX_SWEEPS} sweeps (dim={m})")
        for p in range(m - 1):
            for q in range(p + 1, m):
                if abs(a[p, q]) > threshold:
                    _rotate(a, v, p, q)
        sweeps += 1
    logger.debug(f"Jacobi converged in {sweeps} sweeps for dim={m}")

    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = v[:, order]
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.where(vectors[pivots, np.arange(m)] < 0.0, -1.0, 1.0)
    vectors = vectors * signs

    eigenvalues.setflags(write=False)
    vectors.setflags(write=False)
    return SpectralDecomposition(eigenvalues=eigenvalues, eigenvectors=vectors)


def _spectral_floor(decomposition: SpectralDecomposition) -> float:
    return SPECTRAL_TOL * max(decomposition.lambda_max, 1.0)


def is_positive_definite(matrix: MatrixLike) -> bool:
    decomposition = eigh(matrix)
    return decomposition.lambda_min > _spectral_floor(decomposition)


def psd_decomposition(matrix: MatrixLike) -> SpectralDecomposition:
    """Eigendecomposition of a matrix required to be PSD up to roundoff."""
    decomposition = eigh(matrix)
    if decomposition.lambda_min < -_spectral_floor(decomposition):
        raise NotPSD(f"Matrix is not positive semidefinite (lambda_min={decomposition.lambda_min:.3e})")
    return decomposition


def _check_exponent(q: float) -> None:
    if not (0.0 < q <= 1.0):
        raise BadExponent(f"Exponent must lie in (0, 1], got {q}")


def _clamped_powers(eigenvalues: np.ndarray, q: float) -> np.ndarray:
    if np.any(eigenvalues < 0.0):
        logger.debug(f"Clamping roundoff eigenvalues {eigenvalues[eigenvalues < 0.0]} to 0")
    return np.maximum(eigenvalues, 0.0) ** q


def matrix_power_psd(matrix: MatrixLike, q: float) -> SymMatrix:
    _check_exponent(q)
    decomposition = psd_decomposition(matrix)
    u = decomposition.eigenvectors
    return symmetrized((u * _clamped_powers(decomposition.eigenvalues, q)) @ u.T)


def trace_power(matrix: MatrixLike, q: float) -> float:
    _check_exponent(q)
    decomposition = psd_decomposition(matrix)
    return float(np.sum(_clamped_powers(decomposition.eigenvalues, q)))
