"""Elliptical laws (Gaussian, multivariate Student-t) with covariance-matched
samplers, covariance estimation, and random test-matrix generators.

Every sampler takes an explicit 64-bit seed and an optional ``stream`` index;
the pair feeds a ``SeedSequence`` so draws never depend on global state.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from sklearn.covariance import empirical_covariance

from models.errors import BadDf, DimMismatch, NonFinite, NotPD, TooFewSamples
from models.symmat import MatrixLike, SymMatrix, as_symmat, eigh, is_positive_definite, matrix_power_psd, symmetrized, validate_symmetric

logger = logging.getLogger("elliptical_logger")
logger.setLevel(logging.INFO)
handler = logging.StreamHandler()
formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
handler.setFormatter(formatter)
if not logger.handlers:
    logger.addHandler(handler)


class GeneratorKind(str, Enum):
    GAUSSIAN = "gaussian"
    STUDENT_T = "student-t"


@dataclass(frozen=True)
class Generator:
    kind: GeneratorKind
    df: Optional[float] = None

    def __post_init__(self):
        kind = GeneratorKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is GeneratorKind.STUDENT_T:
            if self.df is None or not np.isfinite(self.df) or self.df <= 2.0:
                raise BadDf(f"Student-t needs df > 2 for a finite covariance, got {self.df}")
            object.__setattr__(self, "df", float(self.df))
        else:
            object.__setattr__(self, "df", None)

    @classmethod
    def gaussian(cls) -> "Generator":
        return cls(GeneratorKind.GAUSSIAN)

    @classmethod
    def student_t(cls, df: float) -> "Generator":
        return cls(GeneratorKind.STUDENT_T, df)

    @property
    def label(self) -> str:
        if self.kind is GeneratorKind.STUDENT_T:
            return f"student-t(df={self.df:g})"
        return self.kind.value


@dataclass(frozen=True, eq=False)
class EllipticalSpec:
    generator: Generator
    covariance: SymMatrix

    def __post_init__(self):
        covariance = as_symmat(self.covariance)
        if not is_positive_definite(covariance):
            raise NotPD("Elliptical covariance must be positive definite")
        object.__setattr__(self, "covariance", covariance)

    @property
    def dim(self) -> int:
        return self.covariance.dim


@dataclass(frozen=True, eq=False)
class SampleSet:
    """n x m draws, one realization per row, plus the seed that produced them."""
    rows: np.ndarray
    seed: int = 0

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float, copy=True)
        if rows.ndim == 1:
            rows = rows.reshape(-1, 1)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise TooFewSamples(f"SampleSet needs at least one row and one column, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise NonFinite("SampleSet contains NaN or infinite entries")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    def mean(self) -> np.ndarray:
        return self.rows.mean(axis=0)


def _rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(stream),)))


def _standard_normal(rng: np.random.Generator, shape: Tuple[int, int]) -> np.ndarray:
    # Box-Muller on uniform draws; 1 - U keeps the log argument in (0, 1].
    count = int(np.prod(shape))
    pairs = (count + 1) // 2
    u1 = 1.0 - rng.random(pairs)
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    normals = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return normals[:count].reshape(shape)


def sample(spec: EllipticalSpec, n: int, seed: int, stream: int = 0) -> SampleSet:
    """Draw n zero-mean realizations whose population covariance is exactly spec.covariance."""
    if n < 1:
        raise TooFewSamples(f"Need n >= 1 draws, got {n}")
    rng = _rng(seed, stream)
    z = _standard_normal(rng, (n, spec.dim))
    if spec.generator.kind is GeneratorKind.GAUSSIAN:
        root = matrix_power_psd(spec.covariance, 0.5).values
        rows = z @ root.T
    else:
        nu = spec.generator.df
        mixing = rng.chisquare(nu, size=n) / nu
        scale = SymMatrix(((nu - 2.0) / nu) * spec.covariance.values)
        root = matrix_power_psd(scale, 0.5).values
        rows = (z / np.sqrt(mixing)[:, None]) @ root.T
    logger.debug(f"Sampled {n} x {spec.dim} draws from {spec.generator.label} (seed={seed}, stream={stream})")
    return SampleSet(rows=rows, seed=seed)


def sample_mixture(covariance: MatrixLike, n: int, seed: int, spread: float = 0.5, stream: int = 0) -> SampleSet:
    """Equal-weight mixture of N(+mu, S) and N(-mu, S) with S + mu mu^T = covariance.

    mu points along the leading eigenvector with squared length spread * lambda_min,
    which keeps S positive definite. The law is not elliptical but has mean 0
    and covariance exactly ``covariance``.
    """
    if not (0.0 < spread < 1.0):
        raise ValueError(f"spread must lie in (0, 1), got {spread}")
    if n < 1:
        raise TooFewSamples(f"Need n >= 1 draws, got {n}")
    sigma = EllipticalSpec(Generator.gaussian(), covariance).covariance
    decomposition = eigh(sigma)
    mu = np.sqrt(spread * decomposition.lambda_min) * decomposition.eigenvectors[:, 0]
    component = symmetrized(sigma.values - np.outer(mu, mu))

    rng = _rng(seed, stream)
    z = _standard_normal(rng, (n, sigma.dim))
    signs = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    rows = z @ matrix_power_psd(component, 0.5).values.T + signs[:, None] * mu
    return SampleSet(rows=rows, seed=seed)


def sample_covariance(samples: SampleSet, center: bool = False) -> SymMatrix:
    """Divisor-n covariance; uncentered by default (zero-mean convention)."""
    if center and samples.n < 2:
        raise TooFewSamples("Centered covariance needs at least 2 samples")
    estimate = empirical_covariance(samples.rows, assume_centered=not center)
    return validate_symmetric(np.atleast_2d(estimate))


def random_pd(dim: int, seed: int, condition_cap: float = 100.0, scale: float = 1.0) -> SymMatrix:
    """Q diag(lambda) Q^T with Q Haar-orthogonal and lambda log-uniform in [scale/cap, scale]."""
    if dim < 1:
        raise DimMismatch(f"Dimension must be >= 1, got {dim}")
    if condition_cap < 1.0 or scale <= 0.0:
        raise ValueError(f"Need condition_cap >= 1 and scale > 0, got {condition_cap}, {scale}")
    rng = _rng(seed)
    q, r = np.linalg.qr(_standard_normal(rng, (dim, dim)))
    q = q * np.where(np.diag(r) < 0.0, -1.0, 1.0)
    eigenvalues = scale * np.exp(rng.uniform(-np.log(condition_cap), 0.0, size=dim))
    return symmetrized((q * eigenvalues) @ q.T)


def random_correlation(dim: int, seed: int, condition_cap: float = 100.0) -> SymMatrix:
    a = random_pd(dim, seed, condition_cap).values
    inv_sd = 1.0 / np.sqrt(np.diag(a))
    c = a * np.outer(inv_sd, inv_sd)
    np.fill_diagonal(c, 1.0)
    return symmetrized(c)
