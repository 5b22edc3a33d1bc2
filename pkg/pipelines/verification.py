"""Property suites and acceptance checks, run from a single master seed.

Each suite returns ``Check`` records phrased as ``lhs <= rhs + tolerance``.
Suites over many trials report their worst trial: lhs = max_t (lhs_t - rhs_t)
and rhs = 0.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from config.settings import settings
from models.bures import (
    decorrelate,
    diag_bound,
    eigenbasis_bound,
    eigenbasis_projection,
    gelbrich_bound,
    klein_residual,
    minimizer_covariance,
    trace_power_gap,
    trace_sqrt_gap,
    w2_closed,
)
from models.discrete_ot import assignment_min, brute_force_min, CostMatrix, empirical_w2
from models.elliptical import (
    EllipticalSpec,
    Generator,
    SampleSet,
    random_correlation,
    random_pd,
    sample,
    sample_covariance,
    sample_mixture,
)
from models.symmat import SymMatrix, diagonal_matrix, eigh, matrix_power_psd, symmetrized, trace_power
from pipelines.experiments import EmpiricalExperiment, ExperimentSummary

logger = logging.getLogger("verification_logger")
logger.setLevel(settings.LOG_LEVEL)
handler = logging.StreamHandler()
formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
handler.setFormatter(formatter)
if not logger.handlers:
    logger.addHandler(handler)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    lhs: float
    rhs: float
    tolerance: float


def make_check(name: str, lhs: float, rhs: float, tolerance: float) -> Check:
    lhs, rhs = float(lhs), float(rhs)
    return Check(name=name, passed=bool(lhs <= rhs + tolerance), lhs=lhs, rhs=rhs, tolerance=float(tolerance))


def worst_case(name: str, pairs: Iterable[Tuple[float, float]], tolerance: float) -> Check:
    """Aggregate per-trial ``lhs_t <= rhs_t + tol`` into one check on the largest excess."""
    excess = [float(lhs) - float(rhs) for lhs, rhs in pairs]
    return make_check(name, max(excess) if excess else 0.0, 0.0, tolerance)


class VerificationRunner:
    def __init__(self, seed: int, quick: bool = False, config: Optional[dict] = None):
        self.seed = int(seed)
        self.quick = quick
        self.config = config if config is not None else settings.VERIFICATION
        self.corpus = self.config['corpus']
        logger.debug(f"VerificationRunner initialized (seed={self.seed}, quick={quick})")

    @property
    def suites(self) -> Dict[str, Callable[[], List[Check]]]:
        return {
            'symmat': self.symmat_suite,
            'trace_inequalities': self.trace_inequality_suite,
            'bures_properties': self.bures_property_suite,
            'independent_coupling': self.independent_coupling_suite,
            'eigenbasis_chain': self.eigenbasis_chain_suite,
            'eigenbasis_equality': self.eigenbasis_equality_suite,
            'assignment_oracle': self.assignment_oracle_suite,
            'empirical_metric': self.empirical_metric_suite,
            'covariance_matching': self.covariance_matching_suite,
            'empirical_gaussian': self.empirical_gaussian_suite,
            'empirical_student_t': self.empirical_student_suite,
            'empirical_mixture': self.empirical_mixture_suite,
        }

    # --- corpus helpers ---

    def _count(self, value: int) -> int:
        if not self.quick:
            return int(value)
        return max(1, int(value) // int(self.config.get('quick_divisor', 10)))

    def _rng(self, suite: str) -> np.random.Generator:
        key = sum((i + 1) * ord(ch) for i, ch in enumerate(suite))
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(key,)))

    @staticmethod
    def _draw_seed(rng: np.random.Generator) -> int:
        return int(rng.integers(0, 2 ** 63 - 1))

    def _pd_corpus(self, suite: str, count: int, with_diagonal: bool = False) -> List[SymMatrix]:
        rng = self._rng(suite)
        cap = float(self.corpus['condition_cap'])
        every = int(self.corpus.get('diagonal_every', 0))
        corpus = []
        for k in range(count):
            dim = int(rng.integers(self.corpus['pd_min_dim'], self.corpus['pd_max_dim'] + 1))
            if with_diagonal and every and k % every == 0:
                corpus.append(diagonal_matrix(np.exp(rng.uniform(-np.log(cap), 0.0, size=dim))))
            else:
                corpus.append(random_pd(dim, self._draw_seed(rng), cap))
        return corpus

    def _pd_pairs(self, suite: str, count: int, cap: Optional[float] = None) -> List[Tuple[SymMatrix, SymMatrix]]:
        rng = self._rng(suite)
        cap = float(cap if cap is not None else self.corpus['condition_cap'])
        pairs = []
        for _ in range(count):
            dim = int(rng.integers(self.corpus['pd_min_dim'], self.corpus['pd_max_dim'] + 1))
            pairs.append((random_pd(dim, self._draw_seed(rng), cap), random_pd(dim, self._draw_seed(rng), cap)))
        return pairs

    # --- suites ---

    def symmat_suite(self) -> List[Check]:
        rng = self._rng('symmat')
        reconstruction, orthogonality = [], []
        for _ in range(self._count(self.corpus['symmetric_matrices'])):
            dim = int(rng.integers(1, self.corpus['symmetric_max_dim'] + 1))
            a = symmetrized(rng.uniform(-1.0, 1.0, size=(dim, dim)))
            decomposition = eigh(a)
            err = np.max(np.abs(decomposition.reconstruct() - a.values))
            reconstruction.append((err / (1.0 + a.max_abs()), 0.0))
            u = decomposition.eigenvectors
            orthogonality.append((np.max(np.abs(u.T @ u - np.eye(dim))), 0.0))

        composition, trace_consistency = [], []
        for a in self._pd_corpus('symmat_pd', self._count(self.corpus['pd_matrices'])):
            root = matrix_power_psd(a, 0.5).values
            composition.append((np.max(np.abs(root @ root - a.values)) / (1.0 + a.max_abs()), 0.0))
            trace_consistency.append((abs(trace_power(a, 1.0) - a.trace()) / abs(a.trace()), 0.0))

        fixed = symmetrized(rng.uniform(-1.0, 1.0, size=(6, 6)))
        first, second = eigh(fixed), eigh(fixed)
        identical = (np.array_equal(first.eigenvalues, second.eigenvalues)
                     and np.array_equal(first.eigenvectors, second.eigenvectors))
        return [
            worst_case('symmat.reconstruction', reconstruction, 1e-9),
            worst_case('symmat.orthogonality', orthogonality, 1e-10),
            worst_case('symmat.power_composition', composition, 1e-8),
            worst_case('symmat.trace_consistency', trace_consistency, 1e-12),
            make_check('symmat.eigh_determinism', 0.0 if identical else 1.0, 0.0, 0.0),
        ]

    def trace_inequality_suite(self) -> List[Check]:
        corpus = self._pd_corpus('trace_sqrt_gap', self._count(self.corpus['pd_matrices']), with_diagonal=True)
        gaps, diagonal_gaps, strict = [], [], []
        klein_rhs, klein_lhs = [], []
        power_gaps = {q: [] for q in self.config['powers']}
        for sigma in corpus:
            gap = trace_sqrt_gap(sigma)
            gaps.append((-gap, 0.0))
            off = sigma.values - np.diag(sigma.diagonal())
            if sigma.off_diagonal_max() == 0.0:
                diagonal_gaps.append((abs(gap), 0.0))
            elif np.linalg.norm(off) >= 0.1:
                strict.append((-gap, -1e-6))
            for q in power_gaps:
                power_gaps[q].append((-trace_power_gap(sigma, q), 0.0))
            residual = klein_residual(sigma)
            klein_rhs.append((abs(residual.rhs) / (1.0 + sigma.max_abs()), 0.0))
            klein_lhs.append((-residual.lhs, 0.0))

        checks = [
            worst_case('trace_sqrt_gap.gap_nonnegative', gaps, 1e-10),
            worst_case('trace_sqrt_gap.diagonal_gap_zero', diagonal_gaps, 1e-10),
            worst_case('trace_sqrt_gap.offdiagonal_gap_strict', strict, 0.0),
        ]
        for q, pairs in power_gaps.items():
            checks.append(worst_case(f'trace_power_gap.q={q:g}.nonnegative', pairs, 1e-10))
        checks.append(worst_case('klein.rhs_cancels', klein_rhs, 1e-10))
        checks.append(worst_case('klein.lhs_nonnegative', klein_lhs, 1e-10))
        return checks

    def bures_property_suite(self) -> List[Check]:
        symmetry, identity, separation, scaling = [], [], [], []
        for a, b in self._pd_pairs('bures', self._count(self.corpus['pairs'])):
            ab, ba = w2_closed(a, b), w2_closed(b, a)
            symmetry.append((abs(ab - ba) / max(ab, ba, 1.0), 0.0))
            identity.append((w2_closed(a, a), 1e-7 * (1.0 + a.max_abs())))
            if np.max(np.abs(a.values - b.values)) > 1e-3:
                separation.append((-ab, 0.0))
            for c in (0.25, 4.0):
                scaled = w2_closed(SymMatrix(c * a.values), SymMatrix(c * b.values))
                scaling.append((abs(scaled - np.sqrt(c) * ab) / (np.sqrt(c) * max(ab, 1.0)), 0.0))

        rng = self._rng('diagonal_consistency')
        consistency = []
        for _ in range(self._count(self.corpus['pairs'])):
            dim = int(rng.integers(self.corpus['pd_min_dim'], self.corpus['pd_max_dim'] + 1))
            variances = np.exp(rng.uniform(-2.0, 2.0, size=dim))
            sigma_y = random_pd(dim, self._draw_seed(rng), 100.0)
            eigen = eigenbasis_bound(diagonal_matrix(variances), sigma_y).bound
            consistency.append((abs(eigen - diag_bound(variances, sigma_y.diagonal())), 0.0))
        return [
            worst_case('bures.symmetry', symmetry, 1e-9),
            worst_case('bures.identity', identity, 0.0),
            worst_case('bures.positivity', separation, 0.0),
            worst_case('bures.scaling', scaling, 1e-8),
            worst_case('bures.diagonal_consistency', consistency, 1e-10),
        ]

    def independent_coupling_suite(self) -> List[Check]:
        params = self.config['independent_coupling']
        rng = self._rng('independent_coupling')
        diag_match, minimization, strict = [], [], []
        for _ in range(self._count(params['trials'])):
            dim = int(rng.integers(self.corpus['pd_min_dim'], self.corpus['pd_max_dim'] + 1))
            lam_x = diagonal_matrix(rng.uniform(params['variance_low'], params['variance_high'], size=dim))
            dy = rng.uniform(params['variance_low'], params['variance_high'], size=dim)
            corr = random_correlation(dim, self._draw_seed(rng), params['correlation_cap'])
            root_d = np.sqrt(dy)
            sigma_y = symmetrized(corr.values * np.outer(root_d, root_d))
            diag_match.append((np.max(np.abs(sigma_y.diagonal() - dy)) / np.max(dy), 0.0))
            independent = w2_closed(lam_x, decorrelate(sigma_y))
            correlated = w2_closed(lam_x, sigma_y)
            minimization.append((independent, correlated))
            if np.linalg.norm(corr.values - np.eye(dim)) >= 0.1:
                strict.append((independent, correlated - 1e-6))
        return [
            worst_case('independent_coupling.diagonal_preserved', diag_match, 1e-12),
            worst_case('independent_coupling.independent_minimizes', minimization, 1e-9),
            worst_case('independent_coupling.strict_when_correlated', strict, 0.0),
        ]

    def eigenbasis_chain_suite(self) -> List[Check]:
        chain, nonnegative, projection_attains, projection_minimizes = [], [], [], []
        for sigma_x, sigma_y in self._pd_pairs('eigenbasis_chain', self._count(self.corpus['pairs'])):
            gelbrich = gelbrich_bound(sigma_x, sigma_y)
            eigen = eigenbasis_bound(sigma_x, sigma_y).bound
            chain.append((eigen, gelbrich))
            nonnegative.append((-eigen, 0.0))
            projected = gelbrich_bound(sigma_x, eigenbasis_projection(sigma_x, sigma_y))
            projection_attains.append((abs(projected - eigen) / (1.0 + eigen), 0.0))
            projection_minimizes.append((projected, gelbrich))
        return [
            worst_case('eigenbasis_chain.gelbrich_dominates_eigenbasis', chain, 1e-9),
            worst_case('eigenbasis_chain.eigenbasis_nonnegative', nonnegative, 0.0),
            worst_case('eigenbasis_projection.attains_bound', projection_attains, 1e-8),
            worst_case('eigenbasis_projection.minimizes', projection_minimizes, 1e-9),
        ]

    def eigenbasis_equality_suite(self) -> List[Check]:
        rng = self._rng('eigenbasis_equality')
        gaps = []
        for sigma_x in self._pd_corpus('eigenbasis_equality_corpus', self._count(self.corpus['equality_trials'])):
            target = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=sigma_x.dim))
            sigma_y = minimizer_covariance(sigma_x, target)
            gelbrich = gelbrich_bound(sigma_x, sigma_y)
            eigen = eigenbasis_bound(sigma_x, sigma_y).bound
            gaps.append((abs(gelbrich - eigen) / (1.0 + gelbrich), 0.0))
        return [worst_case('eigenbasis_equality.gap', gaps, 1e-8)]

    def assignment_oracle_suite(self) -> List[Check]:
        rng = self._rng('assignment_oracle')
        diffs = []
        for _ in range(self._count(self.corpus['cost_matrices'])):
            n = int(rng.integers(2, self.corpus['cost_max_n'] + 1))
            cost = CostMatrix(rng.uniform(0.0, 10.0, size=(n, n)))
            diffs.append((abs(assignment_min(cost).total_cost - brute_force_min(cost).total_cost), 0.0))
        return [worst_case('discrete_ot.oracle_agreement', diffs, 0.0)]

    def empirical_metric_suite(self) -> List[Check]:
        rng = self._rng('empirical_metric')
        size = int(self.corpus['sample_set_size'])
        symmetry, triangle, permutation, centered, certificate = [], [], [], [], []
        for _ in range(self._count(self.corpus['sample_sets'])):
            dim = int(rng.integers(1, 4))
            x, y, z = (rng.normal(size=(size, dim)) * rng.uniform(0.5, 2.0, size=dim) for _ in range(3))
            xy, yx = empirical_w2(x, y), empirical_w2(y, x)
            symmetry.append((abs(xy - yx), 0.0))
            triangle.append((empirical_w2(x, z), xy + empirical_w2(y, z)))
            shuffled = empirical_w2(x[rng.permutation(size)], y[rng.permutation(size)])
            permutation.append((abs(shuffled - xy), 0.0))
            cov_x = sample_covariance(SampleSet(rows=x), center=True)
            cov_y = sample_covariance(SampleSet(rows=y), center=True)
            gelbrich = gelbrich_bound(cov_x, cov_y)
            centered.append((gelbrich, xy))
            lower = float(np.sum((x.mean(axis=0) - y.mean(axis=0)) ** 2)) + gelbrich ** 2
            certificate.append((lower, xy ** 2))
        return [
            worst_case('discrete_ot.symmetry', symmetry, 1e-10),
            worst_case('discrete_ot.triangle', triangle, 1e-9),
            worst_case('discrete_ot.permutation_invariance', permutation, 1e-12),
            worst_case('discrete_ot.gelbrich_centered', centered, 1e-8),
            worst_case('discrete_ot.gelbrich_with_means', certificate, 1e-8),
        ]

    def covariance_matching_suite(self) -> List[Check]:
        params = self.config['covariance_matching']
        rng = self._rng('covariance_matching')
        gaussian, student = [], []
        for _ in range(self._count(params['seeds'])):
            dim = int(rng.integers(1, params['max_dim'] + 1))
            sigma = random_pd(dim, self._draw_seed(rng), 10.0)
            seed = self._draw_seed(rng)
            for generator, bucket in ((Generator.gaussian(), gaussian),
                                      (Generator.student_t(params['student_df']), student)):
                draws = sample(EllipticalSpec(generator, sigma), int(params['n']), seed)
                err = np.max(np.abs(sample_covariance(draws).values - sigma.values)) / sigma.max_abs()
                bucket.append((err, 0.0))
        draws_a = sample(EllipticalSpec(Generator.gaussian(), diagonal_matrix([4.0, 1.0])), 64, 7)
        draws_b = sample(EllipticalSpec(Generator.gaussian(), diagonal_matrix([4.0, 1.0])), 64, 7)
        identical = np.array_equal(draws_a.rows, draws_b.rows)
        return [
            worst_case('elliptical.gaussian_covariance_match', gaussian, params['gaussian_tolerance']),
            worst_case('elliptical.student_t_covariance_match', student, params['student_tolerance']),
            make_check('elliptical.sampler_determinism', 0.0 if identical else 1.0, 0.0, 0.0),
        ]

    def _empirical_checks(self, prefix: str, summary: ExperimentSummary,
                          envelope: Optional[dict] = None) -> List[Check]:
        checks = [
            worst_case(f'{prefix}.gelbrich_certified',
                       [(t.gelbrich_centered, t.empirical) for t in summary.trials], 1e-8),
            worst_case(f'{prefix}.gelbrich_with_means_certified',
                       [(t.mean_shift_sq + t.gelbrich_centered ** 2, t.empirical ** 2) for t in summary.trials],
                       1e-8),
        ]
        if envelope is not None and summary.closed_form is not None:
            lower = summary.closed_form * (1.0 - envelope['lower'])
            upper = summary.closed_form * (1.0 + envelope['upper'])
            checks.append(make_check(f'{prefix}.mean_above_envelope', lower, summary.mean, 0.0))
            checks.append(make_check(f'{prefix}.mean_below_envelope', summary.mean, upper, 0.0))
        return checks

    def _experiment(self, suite: str, generator: Generator, target: str = 'elliptical') -> EmpiricalExperiment:
        params = self.config['empirical']
        return EmpiricalExperiment(
            cov_a=params['cov_a'],
            cov_b=params['cov_b'],
            generator=generator,
            n=int(params['n']),
            seed=self._draw_seed(self._rng(suite)),
            trials=int(params['trials']),
            target=target,
            mixture_spread=float(params.get('mixture_spread', 0.5)),
        )

    def empirical_gaussian_suite(self) -> List[Check]:
        summary = self._experiment('empirical_gaussian', Generator.gaussian()).run()
        return self._empirical_checks('empirical.gaussian', summary, self.config['empirical']['gaussian_envelope'])

    def empirical_student_suite(self) -> List[Check]:
        params = self.config['empirical']
        summary = self._experiment('empirical_student_t', Generator.student_t(params['student_df'])).run()
        return self._empirical_checks('empirical.student_t', summary, params['student_envelope'])

    def empirical_mixture_suite(self) -> List[Check]:
        params = self.config['empirical']
        experiment = self._experiment('empirical_mixture', Generator.gaussian(), target='mixture')
        summary = experiment.run()
        rng = self._rng('mixture_covariance')
        draws = sample_mixture(params['cov_b'], 100000, self._draw_seed(rng), spread=params['mixture_spread'])
        cov_b = experiment.spec_b.covariance
        err = np.max(np.abs(sample_covariance(draws).values - cov_b.values)) / cov_b.max_abs()
        checks = self._empirical_checks('empirical.mixture', summary)
        checks.append(make_check('empirical.mixture_covariance_match', err, 0.0,
                                 self.config['covariance_matching']['gaussian_tolerance']))
        return checks

    def run_suite(self, name: str) -> List[Check]:
        logger.info(f"Verification suite '{name}': starting (seed={self.seed}, quick={self.quick})")
        checks = self.suites[name]()
        failed = [c.name for c in checks if not c.passed]
        if failed:
            logger.warning(f"Verification suite '{name}': failed checks {failed}")
        else:
            logger.info(f"Verification suite '{name}': {len(checks)} checks passed")
        return checks

    def run_all(self) -> List[Check]:
        logger.info("--- Starting full verification run ---")
        checks: List[Check] = []
        for name in self.suites:
            checks.extend(self.run_suite(name))
        logger.info(f"--- Verification finished: {sum(c.passed for c in checks)}/{len(checks)} checks passed ---")
        return checks
