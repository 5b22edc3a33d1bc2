"""Empirical W2 experiments: sample both laws, solve the exact assignment,
and compare against the closed form and the Gelbrich bound."""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from config.settings import settings
from models.bures import gelbrich_bound, w2_closed
from models.discrete_ot import EMPIRICAL_MAX_N, empirical_w2
from models.elliptical import EllipticalSpec, Generator, sample, sample_covariance, sample_mixture
from models.errors import TooFewSamples, TooLarge
from models.symmat import MatrixLike, as_symmat

logger = logging.getLogger("experiments_logger")
logger.setLevel(settings.LOG_LEVEL)
handler = logging.StreamHandler()
formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
handler.setFormatter(formatter)
if not logger.handlers:
    logger.addHandler(handler)

CERTIFICATE_TOL = 1e-8


@dataclass(frozen=True)
class TrialResult:
    trial: int
    seed: int
    empirical: float
    gelbrich_centered: float
    mean_shift_sq: float

    @property
    def certified(self) -> bool:
        return self.empirical >= self.gelbrich_centered - CERTIFICATE_TOL

    @property
    def certified_with_means(self) -> bool:
        lower = self.mean_shift_sq + self.gelbrich_centered ** 2
        return self.empirical ** 2 >= lower - CERTIFICATE_TOL


@dataclass
class ExperimentSummary:
    generator: str
    n: int
    seed: int
    closed_form: Optional[float]
    gelbrich: float
    trials: List[TrialResult] = field(default_factory=list)

    @property
    def values(self) -> List[float]:
        return [t.empirical for t in self.trials]

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def minimum(self) -> float:
        return float(np.min(self.values))

    @property
    def maximum(self) -> float:
        return float(np.max(self.values))


def trial_seed(seed: int, trial: int) -> int:
    """Trial t uses seed XOR t, so adding trials never perturbs earlier ones."""
    return int(seed) ^ int(trial)


class EmpiricalExperiment:
    """Paired draws from two covariance-specified laws, one assignment solve per trial.

    ``target="mixture"`` replaces the second law with an equal-weight
    two-Gaussian mixture of the same covariance; no closed form applies then.
    """

    def __init__(self, cov_a: MatrixLike, cov_b: MatrixLike, generator: Generator, n: int, seed: int,
                 trials: int, target: str = "elliptical", mixture_spread: float = 0.5,
                 n_cap: Optional[int] = None):
        if target not in ("elliptical", "mixture"):
            raise ValueError(f"Unknown target law '{target}'")
        if trials < 1:
            raise TooFewSamples(f"Need at least one trial, got {trials}")
        if n < 2:
            raise TooFewSamples(f"Need n >= 2 draws per law for centered covariances, got {n}")
        self.n_cap = min(n_cap if n_cap is not None else settings.EMPIRICAL_N_CAP, EMPIRICAL_MAX_N)
        if n > self.n_cap:
            raise TooLarge(f"n={n} exceeds the empirical cap of {self.n_cap}")
        self.spec_a = EllipticalSpec(generator, as_symmat(cov_a))
        self.spec_b = EllipticalSpec(generator, as_symmat(cov_b))
        self.generator = generator
        self.n = n
        self.seed = seed
        self.trials = trials
        self.target = target
        self.mixture_spread = mixture_spread
        logger.debug(f"EmpiricalExperiment initialized: {generator.label}, n={n}, trials={trials}, target={target}")

    def _draw_pair(self, seed: int) -> tuple:
        x = sample(self.spec_a, self.n, seed, stream=0)
        if self.target == "mixture":
            y = sample_mixture(self.spec_b.covariance, self.n, seed, spread=self.mixture_spread, stream=1)
        else:
            y = sample(self.spec_b, self.n, seed, stream=1)
        return x, y

    def run_trial(self, trial: int) -> TrialResult:
        seed = trial_seed(self.seed, trial)
        x, y = self._draw_pair(seed)
        value = empirical_w2(x, y, max_n=self.n_cap)
        bound = gelbrich_bound(sample_covariance(x, center=True), sample_covariance(y, center=True))
        shift = float(np.sum((x.mean() - y.mean()) ** 2))
        result = TrialResult(trial=trial, seed=seed, empirical=value, gelbrich_centered=bound, mean_shift_sq=shift)
        if not result.certified:
            logger.warning(f"Trial {trial}: empirical W2 {value} below centered Gelbrich bound {bound}")
        return result

    def run(self) -> ExperimentSummary:
        logger.info(f"--- Starting empirical experiment ({self.generator.label}, target={self.target}, "
                    f"n={self.n}, trials={self.trials}) ---")
        closed = None
        if self.target == "elliptical":
            closed = w2_closed(self.spec_a.covariance, self.spec_b.covariance)
        summary = ExperimentSummary(
            generator=self.generator.label,
            n=self.n,
            seed=self.seed,
            closed_form=closed,
            gelbrich=gelbrich_bound(self.spec_a.covariance, self.spec_b.covariance),
        )
        for t in range(self.trials):
            summary.trials.append(self.run_trial(t))
        logger.info(f"--- Empirical experiment finished: mean={summary.mean:.6f}, closed_form={closed} ---")
        return summary


def _ceil_percent(value: float) -> float:
    return math.ceil(value * 100.0 - 1e-9) / 100.0


def suggest_envelope(closed_form: float, pilot_means: List[float], margin: float = 2.0) -> dict:
    """Relative envelope around ``closed_form`` covering the pilot means.

    Each side is the largest observed deviation on that side plus ``margin``
    times the pilot spread, rounded up to the next percent.
    """
    if closed_form <= 0.0 or not pilot_means:
        raise ValueError("Need a positive closed form and at least one pilot mean")
    relative = [(m - closed_form) / closed_form for m in pilot_means]
    spread = max(relative) - min(relative)
    lower = max(0.0, -min(relative)) + margin * spread
    upper = max(0.0, max(relative)) + margin * spread
    return {'lower': _ceil_percent(lower), 'upper': _ceil_percent(upper)}
