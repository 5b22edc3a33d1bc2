"""Bures-Wasserstein distances, the Gelbrich lower bound, and the
diagonal / eigenbasis bounds built on top of them.

All covariances are zero-mean. ``w2_closed`` and ``gelbrich_bound`` evaluate
the same expression; they differ in what the caller may conclude from it
(exact distance for same-generator ellipticals versus a lower bound for any
pair of laws with these covariances).
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from models.errors import BadExponent, DimMismatch, NonFinite, NonPositiveVariance, NotPD, NumericalBreakdown
from models.symmat import (
    MatrixLike,
    SymMatrix,
    as_symmat,
    diagonal_matrix,
    eigh,
    is_positive_definite,
    matrix_power_psd,
    psd_decomposition,
    symmetrized,
    trace_power,
)

logger = logging.getLogger("bures_logger")
logger.setLevel(logging.INFO)
handler = logging.StreamHandler()
formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
handler.setFormatter(formatter)
if not logger.handlers:
    logger.addHandler(handler)

RESIDUAL_CLAMP = 1e-9
DIAGONAL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class VarianceVector:
    """Per-coordinate variances.

    Entries must be finite and non-negative here; the operations that need
    strictly positive variances (``diag_bound``, ``minimizer_covariance``)
    enforce that themselves, so a rotated diagonal of a singular PSD
    covariance can still be reported.
    """
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if values.size == 0:
            raise DimMismatch("VarianceVector must not be empty")
        if not np.all(np.isfinite(values)):
            raise NonFinite("VarianceVector contains NaN or infinite entries")
        if np.any(values < 0.0):
            raise NonPositiveVariance(f"Negative variance in {values.tolist()}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def require_positive(self) -> "VarianceVector":
        if np.any(self.values <= 0.0):
            raise NonPositiveVariance(f"Variances must be strictly positive, got {self.values.tolist()}")
        return self

    def tolist(self) -> list:
        return self.values.tolist()


VarianceLike = Union[VarianceVector, np.ndarray, Sequence[float]]


def as_variances(values: VarianceLike) -> VarianceVector:
    if isinstance(values, VarianceVector):
        return values
    return VarianceVector(np.asarray(values, dtype=float))


class KleinResidual(NamedTuple):
    lhs: float
    rhs: float


class EigenbasisBound(NamedTuple):
    bound: float
    rotated_diag: VarianceVector


@dataclass(frozen=True, eq=False)
class BoundReport:
    gelbrich: float
    eigenbasis_bound: float
    rotated_diag: VarianceVector
    closed_form: Optional[float] = None
    diag_bound: Optional[float] = None


def _same_dim(sx: SymMatrix, sy: SymMatrix) -> None:
    if sx.dim != sy.dim:
        raise DimMismatch(f"Dimension mismatch: {sx.dim} vs {sy.dim}")


def _require_pd(sigma: SymMatrix, name: str) -> SymMatrix:
    if not is_positive_definite(sigma):
        raise NotPD(f"{name} must be positive definite")
    return sigma


def _aligning_rotation(root_x: np.ndarray, root_y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Singular values of root_y @ root_x and the orthogonal U minimizing ||root_x - root_y U||_F."""
    left, singular, right_t = np.linalg.svd(root_y @ root_x)
    return singular, left @ right_t


def _bures_formula(sx: SymMatrix, sy: SymMatrix) -> float:
    # W2 = min_U ||Sx^{1/2} - Sy^{1/2} U||_F, attained at the polar factor of Sy^{1/2} Sx^{1/2}.
    root_x = matrix_power_psd(sx, 0.5).values
    root_y = matrix_power_psd(sy, 0.5).values
    singular, rotation = _aligning_rotation(root_x, root_y)
    residual = sx.trace() + sy.trace() - 2.0 * float(np.sum(singular))
    if residual < -RESIDUAL_CLAMP * max(1.0, sx.trace() + sy.trace()):
        raise NumericalBreakdown(f"Bures trace residual {residual:.3e} is negative beyond roundoff")
    return float(np.linalg.norm(root_x - root_y @ rotation))


def w2_closed(sigma_x: MatrixLike, sigma_y: MatrixLike) -> float:
    """Exact W2 between two elliptical laws sharing a density generator."""
    sx, sy = as_symmat(sigma_x), as_symmat(sigma_y)
    _same_dim(sx, sy)
    _require_pd(sx, "Sigma_x")
    _require_pd(sy, "Sigma_y")
    return _bures_formula(sx, sy)


def gelbrich_bound(sigma_x: MatrixLike, sigma_y: MatrixLike) -> float:
    """Lower bound on W2 between any two laws with these covariances."""
    sx, sy = as_symmat(sigma_x), as_symmat(sigma_y)
    _same_dim(sx, sy)
    psd_decomposition(sx)
    psd_decomposition(sy)
    return _bures_formula(sx, sy)


def _diagonal_power_gap(sigma: SymMatrix, q: float) -> float:
    return float(np.sum(sigma.diagonal() ** q)) - trace_power(sigma, q)


def trace_sqrt_gap(sigma: MatrixLike) -> float:
    """sum_i sqrt(Sigma_ii) - tr(Sigma^{1/2}); non-negative, zero iff Sigma is diagonal."""
    s = _require_pd(as_symmat(sigma), "Sigma")
    return _diagonal_power_gap(s, 0.5)


def trace_power_gap(sigma: MatrixLike, q: float) -> float:
    if not (0.0 < q < 1.0):
        raise BadExponent(f"Exponent must lie in (0, 1), got {q}")
    s = _require_pd(as_symmat(sigma), "Sigma")
    return _diagonal_power_gap(s, q)


def klein_residual(sigma: MatrixLike) -> KleinResidual:
    """Both sides of the Klein trace inequality for f(x) = -sqrt(x) at B = diag(Sigma).

    lhs = tr(Lambda^{1/2} - Sigma^{1/2}), rhs = tr[(Sigma - Lambda)(-1/2 Lambda^{-1/2})].
    The rhs vanishes because Sigma - Lambda has a zero diagonal.
    """
    s = _require_pd(as_symmat(sigma), "Sigma")
    variances = s.diagonal()
    lhs = _diagonal_power_gap(s, 0.5)
    derivative = np.diag(-0.5 / np.sqrt(variances))
    rhs = float(np.trace((s.values - np.diag(variances)) @ derivative))
    return KleinResidual(lhs=lhs, rhs=rhs)


def _root_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(np.sum((np.sqrt(a) - np.sqrt(b)) ** 2)))


def diag_bound(dx: VarianceLike, dy: VarianceLike) -> float:
    vx = as_variances(dx).require_positive()
    vy = as_variances(dy).require_positive()
    if len(vx) != len(vy):
        raise DimMismatch(f"Variance vectors differ in length: {len(vx)} vs {len(vy)}")
    return _root_distance(vx.values, vy.values)


def eigenbasis_bound(sigma_x: MatrixLike, sigma_y: MatrixLike) -> EigenbasisBound:
    """Lower bound from rotating Sigma_y into the eigenbasis of Sigma_x.

    With repeated eigenvalues of Sigma_x the eigenbasis is not unique and the
    value depends on the ``eigh`` sign/order convention; it remains a valid
    lower bound for any orthonormal choice.
    """
    sx, sy = as_symmat(sigma_x), as_symmat(sigma_y)
    _same_dim(sx, sy)
    _require_pd(sx, "Sigma_x")
    psd_decomposition(sy)
    decomposition = eigh(sx)
    u = decomposition.eigenvectors
    rotated = np.diag(u.T @ sy.values @ u)
    rotated = np.maximum(rotated, 0.0)
    bound = _root_distance(np.maximum(decomposition.eigenvalues, 0.0), rotated)
    return EigenbasisBound(bound=bound, rotated_diag=VarianceVector(rotated))


def minimizer_covariance(sigma_x: MatrixLike, target_diag: VarianceLike) -> SymMatrix:
    """U_x diag(target) U_x^T: the covariance attaining the eigenbasis bound."""
    sx = _require_pd(as_symmat(sigma_x), "Sigma_x")
    target = as_variances(target_diag).require_positive()
    if len(target) != sx.dim:
        raise DimMismatch(f"Target has {len(target)} entries, Sigma_x has dim {sx.dim}")
    u = eigh(sx).eigenvectors
    return symmetrized((u * target.values) @ u.T)


def decorrelate(sigma: MatrixLike) -> SymMatrix:
    """Keep the marginal variances, drop every correlation."""
    return diagonal_matrix(as_symmat(sigma).diagonal())


def eigenbasis_projection(sigma_x: MatrixLike, sigma_y: MatrixLike) -> SymMatrix:
    """Covariance sharing Sigma_x's eigenbasis and Sigma_y's eigenbasis variances.

    Among covariances with those rotated variances it is the closest to
    Sigma_x in the Gelbrich sense.
    """
    rotated = eigenbasis_bound(sigma_x, sigma_y).rotated_diag
    return minimizer_covariance(sigma_x, rotated)


def full_report(sigma_x: MatrixLike, sigma_y: MatrixLike, same_generator: bool) -> BoundReport:
    sx, sy = as_symmat(sigma_x), as_symmat(sigma_y)
    _same_dim(sx, sy)
    _require_pd(sx, "Sigma_x")
    gelbrich = gelbrich_bound(sx, sy)
    eigen = eigenbasis_bound(sx, sy)
    closed_form = w2_closed(sx, sy) if same_generator else None
    diagonal = None
    if sx.off_diagonal_max() <= DIAGONAL_TOL:
        diagonal = _root_distance(sx.diagonal(), np.maximum(sy.diagonal(), 0.0))
    logger.debug(f"Bound report: gelbrich={gelbrich}, eigenbasis={eigen.bound}, closed={closed_form}, diag={diagonal}")
    return BoundReport(
        gelbrich=gelbrich,
        eigenbasis_bound=eigen.bound,
        rotated_diag=eigen.rotated_diag,
        closed_form=closed_form,
        diag_bound=diagonal,
    )
