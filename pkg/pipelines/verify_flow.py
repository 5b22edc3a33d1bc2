from prefect import flow, task
from typing import List, Optional
import logging

import sys
from pathlib import Path
project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

from cli.schemas import ReportDocument, verify_report
from config.settings import settings
from pipelines.verification import Check, VerificationRunner


@task(name="Run Verification Suite", log_prints=True)
def run_suite_task(suite: str, seed: int, quick: bool = False) -> List[Check]:
    prefect_logger = logging.getLogger("prefect.task_runs")
    prefect_logger.info(f"Task (Run Verification Suite): '{suite}' with seed={seed}, quick={quick}...")
    checks = VerificationRunner(seed=seed, quick=quick).run_suite(suite)
    failed = [c.name for c in checks if not c.passed]
    if failed:
        prefect_logger.warning(f"Task (Run Verification Suite): '{suite}' failed {failed}")
    else:
        prefect_logger.info(f"Task (Run Verification Suite): '{suite}' passed all {len(checks)} checks.")
    return checks


@task(name="Save Verification Report", log_prints=True)
def save_report_task(report: ReportDocument, run_name: str, reports_dir: Optional[Path] = None) -> Path:
    prefect_logger = logging.getLogger("prefect.task_runs")
    out_dir = reports_dir if reports_dir is not None else settings.REPORTS_DIR
    out_dir.mkdir(parents=True, exist_ok=True)
    f_path = out_dir / f"verify_{run_name}.json"
    f_path.write_text(report.to_json() + "\n")
    prefect_logger.info(f"Task (Save Verification Report): {len(report.checks)} checks saved to {f_path}")
    return f_path


@flow(name="Bounds Verification Flow", log_prints=True)
def verification_flow(seed: Optional[int] = None, quick: bool = False, run_name: str = "default_run") -> ReportDocument:
    flow_logger = logging.getLogger("prefect.flow_runs")
    effective_seed = seed if seed is not None else settings.DEFAULT_SEED
    flow_logger.info(f"=== Starting Bounds Verification Flow: {run_name} (seed={effective_seed}, quick={quick}) ===")

    checks: List[Check] = []
    # Suites run in declaration order so the report matches `python -m cli verify`.
    for suite in VerificationRunner(seed=effective_seed, quick=quick).suites:
        checks.extend(run_suite_task(suite, effective_seed, quick))

    report = verify_report(effective_seed, quick, checks)
    save_report_task(report, run_name)
    if report.all_passed:
        flow_logger.info(f"=== Bounds Verification Flow: {run_name} completed, all {len(checks)} checks passed. ===")
    else:
        flow_logger.error(f"Flow: {sum(not c.passed for c in report.checks)} checks failed in run {run_name}.")
    return report


if __name__ == "__main__":
    from datetime import datetime
    test_run_name = f"manual_test_run_{datetime.now().strftime('%Y%m%d_%H%M%S')}"
    verification_flow(run_name=test_run_name)
