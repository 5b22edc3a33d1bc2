import copy
import logging # For logging issues during settings load
import os
from pathlib import Path

import yaml
from dotenv import load_dotenv

logger = logging.getLogger("settings_loader") # Specific logger for settings
logger.setLevel(logging.INFO)
handler = logging.StreamHandler() # stderr, stdout is reserved for JSON reports
formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
handler.setFormatter(formatter)
if not logger.handlers: # Avoid adding multiple handlers if reloaded
    logger.addHandler(handler)


BASE_DIR = Path(__file__).resolve().parent.parent
dotenv_path = BASE_DIR / ".env"
load_dotenv(dotenv_path=dotenv_path)

DESK_SCALE_N_CAP = 2048

DEFAULT_VERIFICATION = {
    'quick_divisor': 10,
    'corpus': {
        'symmetric_matrices': 500,
        'symmetric_max_dim': 8,
        'pd_matrices': 200,
        'pd_min_dim': 2,
        'pd_max_dim': 6,
        'condition_cap': 1.0e4,
        'diagonal_every': 5,
        'pairs': 200,
        'equality_trials': 100,
        'cost_matrices': 100,
        'cost_max_n': 7,
        'sample_sets': 50,
        'sample_set_size': 24,
    },
    'powers': [0.1, 0.25, 0.5, 0.75, 0.9],
    'independent_coupling': {'trials': 200, 'variance_low': 0.1, 'variance_high': 2.0, 'correlation_cap': 50.0},
    'covariance_matching': {
        'seeds': 10,
        'n': 100000,
        'max_dim': 4,
        'student_df': 6.0,
        'gaussian_tolerance': 0.05,
        'student_tolerance': 0.10,
    },
    'empirical': {
        'n': 512,
        'trials': 20,
        'cov_a': [[1.0, 0.0], [0.0, 4.0]],
        'cov_b': [[4.0, 0.0], [0.0, 1.0]],
        'gaussian_envelope': {'lower': 0.03, 'upper': 0.07},
        'student_df': 6.0,
        'student_envelope': {'lower': 0.05, 'upper': 0.15},
        'mixture_spread': 0.5,
    },
}


def capped_int(name: str, default: int, cap: int) -> int:
    """Integer env override that may lower ``cap`` but never raise it."""
    value = int(os.getenv(name, default))
    if value > cap:
        logger.warning(f"{name}={value} exceeds the cap of {cap}; using {cap}")
    return min(value, cap)


def _load_verification(path: Path) -> dict:
    merged = copy.deepcopy(DEFAULT_VERIFICATION)
    try:
        with open(path, 'r') as f:
            loaded = yaml.safe_load(f) or {}
        logger.debug(f"Successfully loaded verification config from {path}")
    except FileNotFoundError:
        logger.critical(f"Verification config not found at {path}. Using built-in defaults.")
        return merged
    except yaml.YAMLError as e:
        logger.critical(f"Error parsing verification config {path}: {e}. Using built-in defaults.")
        return merged
    for key, value in loaded.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key].update(value)
        else:
            merged[key] = value
    return merged


class Settings:
    BASE_DIR: Path = BASE_DIR
    CONFIG_DIR: Path = BASE_DIR / "config"
    DATA_DIR: Path = BASE_DIR / "data"
    REPORTS_DIR: Path = BASE_DIR / "reports"

    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO").upper()
    DEFAULT_SEED: int = int(os.getenv("BOUNDS_DEFAULT_SEED", 42))
    EMPIRICAL_N_CAP: int = capped_int("BOUNDS_EMPIRICAL_N_CAP", DESK_SCALE_N_CAP, DESK_SCALE_N_CAP)

    VERIFICATION_FILE_PATH: Path = CONFIG_DIR / "verification.yaml"
    VERIFICATION: dict = _load_verification(VERIFICATION_FILE_PATH)


settings = Settings()
