import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

from cli.matrix_io import InputFormatError, parse_target_list, read_covariance_csv
from cli.schemas import CheckEntry, EmpiricalSection, ReportDocument, verify_report
from config.settings import settings
from models.bures import eigenbasis_bound, full_report, gelbrich_bound, minimizer_covariance
from models.elliptical import Generator, GeneratorKind
from models.errors import BuresError, TooLarge
from pipelines.experiments import EmpiricalExperiment
from pipelines.verification import VerificationRunner, make_check

logger = logging.getLogger("cli_logger")
logger.setLevel(settings.LOG_LEVEL)
handler = logging.StreamHandler(sys.stderr)
formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
handler.setFormatter(formatter)
if not logger.handlers:
    logger.addHandler(handler)

PROJECT_LOGGERS = (
    "cli_logger", "matrix_io_logger", "symmat_logger", "bures_logger", "elliptical_logger",
    "discrete_ot_logger", "experiments_logger", "verification_logger",
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_TOO_LARGE = 4

CHAIN_TOL = 1e-9
EQUALITY_TOL = 1e-8
CERTIFICATE_TOL = 1e-8
TARGETS = ["elliptical", "mixture"]


class FlagError(BuresError):
    """A subcommand flag has an unparseable or out-of-range value."""


def _integer(flag: str, raw: str, low: int, high: Optional[int] = None) -> int:
    try:
        value = int(raw, 0)
    except ValueError:
        raise FlagError(f"{flag}: '{raw}' is not an integer")
    if value < low or (high is not None and value > high):
        raise FlagError(f"{flag}: {value} is outside [{low}, {high if high is not None else 'inf'}]")
    return value


def _u64(raw: str) -> int:
    return _integer("--seed", raw, 0, 2 ** 64 - 1)


def _number(flag: str, raw: Optional[str]) -> Optional[float]:
    if raw is None:
        return None
    try:
        return float(raw)
    except ValueError:
        raise FlagError(f"{flag}: '{raw}' is not a number")


def _fraction(raw: str) -> float:
    value = _number("--spread", raw)
    if not 0.0 < value < 1.0:
        raise FlagError(f"--spread must lie in (0, 1), got {value}")
    return value


def _choice(flag: str, raw: str, allowed: List[str]) -> str:
    if raw not in allowed:
        raise FlagError(f"{flag}: '{raw}' is not one of {allowed}")
    return raw


def cmd_bounds(args: argparse.Namespace) -> ReportDocument:
    sigma_a = read_covariance_csv(args.cov_a)
    sigma_b = read_covariance_csv(args.cov_b)
    logger.info(f"Bounds: {args.cov_a} (dim {sigma_a.dim}) vs {args.cov_b} (dim {sigma_b.dim})")
    report = full_report(sigma_a, sigma_b, same_generator=args.same_generator)

    checks = [make_check("eigenbasis_chain.gelbrich_dominates_eigenbasis", report.eigenbasis_bound, report.gelbrich, CHAIN_TOL)]
    if report.diag_bound is not None:
        checks.append(make_check("diag_bound.below_gelbrich", report.diag_bound, report.gelbrich, CHAIN_TOL))
    return ReportDocument(
        command="bounds",
        inputs={"cov_a": str(args.cov_a), "cov_b": str(args.cov_b), "dim": sigma_a.dim,
                "same_generator": bool(args.same_generator)},
        closed_form=report.closed_form,
        gelbrich=report.gelbrich,
        eigenbasis_bound=report.eigenbasis_bound,
        diag_bound=report.diag_bound,
        rotated_diag=report.rotated_diag.tolist(),
        checks=[CheckEntry.model_validate(c) for c in checks],
    )


def cmd_minimizer(args: argparse.Namespace) -> ReportDocument:
    sigma_a = read_covariance_csv(args.cov_a)
    target = parse_target_list(args.target)
    minimizer = minimizer_covariance(sigma_a, target)
    gelbrich = gelbrich_bound(sigma_a, minimizer)
    eigen = eigenbasis_bound(sigma_a, minimizer)
    logger.info(f"Minimizer: target {target} in the eigenbasis of {args.cov_a}")
    gap = make_check("eigenbasis_equality.gap", abs(gelbrich - eigen.bound), 0.0, EQUALITY_TOL * (1.0 + gelbrich))
    return ReportDocument(
        command="minimizer",
        inputs={"cov_a": str(args.cov_a), "dim": sigma_a.dim, "target": target},
        gelbrich=gelbrich,
        eigenbasis_bound=eigen.bound,
        rotated_diag=eigen.rotated_diag.tolist(),
        minimizer=minimizer.tolist(),
        checks=[CheckEntry.model_validate(gap)],
    )


def cmd_empirical(args: argparse.Namespace) -> ReportDocument:
    sigma_a = read_covariance_csv(args.cov_a)
    sigma_b = read_covariance_csv(args.cov_b)
    kind = _choice("--generator", args.generator, [k.value for k in GeneratorKind])
    generator = Generator(GeneratorKind(kind), _number("--df", args.df))
    n = _integer("--n", args.n, 1)
    seed = _u64(args.seed)
    trials = _integer("--trials", args.trials, 1)
    target = _choice("--target", args.target, TARGETS)
    experiment = EmpiricalExperiment(
        cov_a=sigma_a,
        cov_b=sigma_b,
        generator=generator,
        n=n,
        seed=seed,
        trials=trials,
        target=target,
        mixture_spread=_fraction(args.spread),
        n_cap=settings.EMPIRICAL_N_CAP,
    )
    summary = experiment.run()

    checks = []
    for t in summary.trials:
        checks.append(make_check(f"empirical.trial_{t.trial}.gelbrich_certified",
                                 t.gelbrich_centered, t.empirical, CERTIFICATE_TOL))
        checks.append(make_check(f"empirical.trial_{t.trial}.gelbrich_with_means_certified",
                                 t.mean_shift_sq + t.gelbrich_centered ** 2, t.empirical ** 2, CERTIFICATE_TOL))
    empirical = EmpiricalSection(
        n=summary.n,
        seed=summary.seed,
        generator=generator.kind.value,
        df=generator.df,
        target=target,
        trials=len(summary.trials),
        value=summary.mean,
        values=summary.values,
        min=summary.minimum,
        max=summary.maximum,
        gelbrich_centered=[t.gelbrich_centered for t in summary.trials],
    )
    return ReportDocument(
        command="empirical",
        inputs={"cov_a": str(args.cov_a), "cov_b": str(args.cov_b), "dim": sigma_a.dim,
                "generator": generator.kind.value, "df": generator.df, "n": n, "seed": seed,
                "trials": trials, "target": target},
        closed_form=summary.closed_form,
        gelbrich=summary.gelbrich,
        empirical=empirical,
        checks=[CheckEntry.model_validate(c) for c in checks],
    )


def cmd_verify(args: argparse.Namespace) -> ReportDocument:
    seed = _u64(args.seed) if args.seed is not None else settings.DEFAULT_SEED
    checks = VerificationRunner(seed=seed, quick=args.quick).run_all()
    return verify_report(seed, args.quick, checks)


COMMANDS: Dict[str, Callable[[argparse.Namespace], ReportDocument]] = {
    "bounds": cmd_bounds,
    "minimizer": cmd_minimizer,
    "empirical": cmd_empirical,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m cli",
        description="Bures-Wasserstein distances and Gelbrich-type lower bounds for elliptical laws.",
    )
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level on standard error.")
    sub = parser.add_subparsers(dest="command", required=True)

    bounds = sub.add_parser("bounds", help="Closed form, Gelbrich, eigenbasis and diagonal bounds for two covariances.")
    bounds.add_argument("--cov-a", required=True, type=Path)
    bounds.add_argument("--cov-b", required=True, type=Path)
    bounds.add_argument("--same-generator", action="store_true",
                        help="Both laws share a density generator, so the closed form is the exact W2.")

    minimizer = sub.add_parser("minimizer", help="Covariance attaining the eigenbasis bound for given variances.")
    minimizer.add_argument("--cov-a", required=True, type=Path)
    minimizer.add_argument("--target", required=True, help="Comma-separated positive variances, e.g. '1,4'.")

    empirical = sub.add_parser("empirical", help="Exact empirical W2 between sampled laws.")
    empirical.add_argument("--cov-a", required=True, type=Path)
    empirical.add_argument("--cov-b", required=True, type=Path)
    empirical.add_argument("--generator", default=GeneratorKind.GAUSSIAN.value,
                           help="One of: " + ", ".join(k.value for k in GeneratorKind) + ".")
    empirical.add_argument("--df", default=None, help="Student-t degrees of freedom (> 2).")
    empirical.add_argument("--n", default="256")
    empirical.add_argument("--seed", default=str(settings.DEFAULT_SEED))
    empirical.add_argument("--trials", default="1")
    empirical.add_argument("--target", default="elliptical",
                           help="'mixture' draws the second law from a two-Gaussian mixture with covariance cov-b.")
    empirical.add_argument("--spread", default="0.5", help="Mixture mean offset as a fraction of lambda_min.")

    verify = sub.add_parser("verify", help="Run every property suite and acceptance check.")
    verify.add_argument("--seed", default=None)
    verify.add_argument("--quick", action="store_true", help="Shrink corpus sizes by the configured divisor.")
    return parser


def _set_verbose() -> None:
    for name in PROJECT_LOGGERS:
        logging.getLogger(name).setLevel(logging.DEBUG)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_BAD_INPUT
    if args.verbose:
        _set_verbose()

    try:
        report = COMMANDS[args.command](args)
    except InputFormatError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_BAD_INPUT
    except TooLarge as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_TOO_LARGE
    except BuresError as e:
        logger.error(f"{args.command}: {type(e).__name__} - {e}")
        return EXIT_PRECONDITION
    except Exception as e:
        logger.error(f"{args.command}: unexpected {type(e).__name__} - {e}", exc_info=True)
        return EXIT_CHECK_FAILED

    sys.stdout.write(report.to_json() + "\n")
    if not report.all_passed:
        failed = [c.name for c in report.checks if not c.passed]
        logger.error(f"{args.command}: {len(failed)} checks failed: {failed}")
        return EXIT_CHECK_FAILED
    return EXIT_OK
