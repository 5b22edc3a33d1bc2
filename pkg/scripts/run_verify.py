#!/usr/bin/env python3
import argparse
import logging
from datetime import datetime

# Adjust import paths based on project structure
import sys
from pathlib import Path
project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

from config.settings import settings
from pipelines.verify_flow import verification_flow

script_logger = logging.getLogger("run_verify_script")
script_logger.setLevel(logging.INFO)
if not script_logger.handlers:
    handler = logging.StreamHandler(sys.stderr)
    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    handler.setFormatter(formatter)
    script_logger.addHandler(handler)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run the verification suites as a Prefect flow and archive the report.")
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args()

    script_logger.info("Starting bounds verification flow script...")
    current_time_str = datetime.now().strftime("%Y%m%d_%H%M%S")
    flow_run_name = f"verify_seed{args.seed}_{current_time_str}"

    try:
        report = verification_flow(seed=args.seed, quick=args.quick, run_name=flow_run_name)
    except Exception as e:
        script_logger.error(f"An error occurred during the verification flow {flow_run_name}: {e}", exc_info=True)
        sys.exit(1)
    if not report.all_passed:
        script_logger.error(f"Verification run {flow_run_name} finished with failed checks.")
        sys.exit(1)
    script_logger.info(f"Verification flow script finished successfully for run: {flow_run_name}.")
