"""Exact optimal transport between equal-weight empirical measures.

With n points on each side the optimal coupling is a permutation, so W2 reduces
to a linear assignment problem over the squared-Euclidean cost matrix.
"""
import logging
import math
from dataclasses import dataclass
from itertools import permutations
from typing import Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from models.elliptical import SampleSet
from models.errors import NonFinite, NotSquare, SizeMismatch, TooLarge

logger = logging.getLogger("discrete_ot_logger")
logger.setLevel(logging.INFO)
handler = logging.StreamHandler()
formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
handler.setFormatter(formatter)
if not logger.handlers:
    logger.addHandler(handler)

BRUTE_FORCE_MAX_N = 8
EMPIRICAL_MAX_N = 2048


@dataclass(frozen=True, eq=False)
class CostMatrix:
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float, copy=True)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise NotSquare(f"Cost matrix must be non-empty and square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise NonFinite("Cost matrix contains NaN or infinite entries")
        if np.any(entries < 0.0):
            raise ValueError("Cost matrix entries must be non-negative")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def total(self, perm: Tuple[int, ...]) -> float:
        return math.fsum(self.entries[i, j] for i, j in enumerate(perm))


@dataclass(frozen=True)
class Assignment:
    """Row i is matched to column perm[i]."""
    perm: Tuple[int, ...]
    total_cost: float


PointsLike = Union[SampleSet, np.ndarray]


def _points(samples: PointsLike) -> np.ndarray:
    if isinstance(samples, SampleSet):
        return samples.rows
    return SampleSet(rows=samples).rows


def cost_matrix(x: PointsLike, y: PointsLike) -> CostMatrix:
    xs, ys = _points(x), _points(y)
    if xs.shape != ys.shape:
        raise SizeMismatch(f"Sample sets differ in shape: {xs.shape} vs {ys.shape}")
    return CostMatrix(cdist(xs, ys, metric="sqeuclidean"))


def assignment_min(cost: CostMatrix) -> Assignment:
    """Globally optimal assignment.

    Delegates to scipy's shortest-augmenting-path solver, which maintains
    row/column dual potentials and runs in O(n^3).
    """
    rows, cols = linear_sum_assignment(cost.entries)
    perm = tuple(int(j) for _, j in sorted(zip(rows, cols)))
    return Assignment(perm=perm, total_cost=cost.total(perm))


def brute_force_min(cost: CostMatrix) -> Assignment:
    """Enumerate all n! permutations; ties go to the lexicographically smallest."""
    if cost.n > BRUTE_FORCE_MAX_N:
        raise TooLarge(f"Brute force is limited to n <= {BRUTE_FORCE_MAX_N}, got {cost.n}")
    best_perm, best_cost = None, math.inf
    for perm in permutations(range(cost.n)):
        total = cost.total(perm)
        if total < best_cost:
            best_perm, best_cost = perm, total
    return Assignment(perm=tuple(best_perm), total_cost=best_cost)


def empirical_w2(x: PointsLike, y: PointsLike, max_n: int = EMPIRICAL_MAX_N) -> float:
    """Exact W2 between the equal-weight empirical measures of x and y."""
    xs, ys = _points(x), _points(y)
    if xs.shape != ys.shape:
        raise SizeMismatch(f"Sample sets differ in shape: {xs.shape} vs {ys.shape}")
    max_n = min(max_n, EMPIRICAL_MAX_N)
    if xs.shape[0] > max_n:
        raise TooLarge(f"Empirical W2 is capped at n <= {max_n}, got {xs.shape[0]}")
    assignment = assignment_min(cost_matrix(xs, ys))
    logger.debug(f"Assignment over n={xs.shape[0]} points: total cost {assignment.total_cost}")
    return math.sqrt(assignment.total_cost / xs.shape[0])
