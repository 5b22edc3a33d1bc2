#!/usr/bin/env python3
import argparse
import json
import logging
from datetime import datetime

import sys
from pathlib import Path
project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

from config.settings import settings
from models.elliptical import Generator
from pipelines.experiments import EmpiricalExperiment, suggest_envelope

script_logger = logging.getLogger("calibrate_envelopes_script")
script_logger.setLevel(logging.INFO)
if not script_logger.handlers:
    handler = logging.StreamHandler(sys.stderr)
    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    handler.setFormatter(formatter)
    script_logger.addHandler(handler)


def pilot_means(generator: Generator, seeds: list) -> tuple:
    params = settings.VERIFICATION['empirical']
    means, closed = [], None
    for seed in seeds:
        summary = EmpiricalExperiment(params['cov_a'], params['cov_b'], generator, n=int(params['n']),
                                      seed=seed, trials=int(params['trials'])).run()
        closed = summary.closed_form
        means.append(summary.mean)
        script_logger.info(f"{generator.label} seed {seed}: mean={summary.mean:.6f} "
                           f"({(summary.mean - closed) / closed:+.2%} vs closed form {closed:.6f})")
    return closed, means


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run pilot seeds and suggest empirical envelopes for verification.yaml.")
    parser.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    parser.add_argument("--margin", type=float, default=2.0, help="Multiple of the pilot spread added to each side.")
    args = parser.parse_args()

    params = settings.VERIFICATION['empirical']
    results = {}
    for key, generator in (('gaussian_envelope', Generator.gaussian()),
                           ('student_envelope', Generator.student_t(params['student_df']))):
        closed, means = pilot_means(generator, args.seeds)
        results[key] = {'seeds': args.seeds, 'means': means, 'closed_form': closed,
                        'suggested': suggest_envelope(closed, means, args.margin), 'configured': params[key]}
        script_logger.info(f"{key}: suggested {results[key]['suggested']}, configured {params[key]}")

    settings.REPORTS_DIR.mkdir(parents=True, exist_ok=True)
    out_path = settings.REPORTS_DIR / f"envelopes_{datetime.now().strftime('%Y%m%d_%H%M%S')}.json"
    with open(out_path, 'w') as f:
        json.dump(results, f, indent=2)
    script_logger.info(f"Pilot results saved to {out_path}")
