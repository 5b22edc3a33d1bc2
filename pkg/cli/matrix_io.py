"""Headerless CSV matrix files: one matrix row per line, comma-separated."""
import logging
from pathlib import Path
from typing import List, Union

import numpy as np
import pandas as pd

from models.symmat import MatrixLike, SymMatrix, as_symmat

logger = logging.getLogger("matrix_io_logger")
logger.setLevel(logging.INFO)
handler = logging.StreamHandler()
formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
handler.setFormatter(formatter)
if not logger.handlers:
    logger.addHandler(handler)

PathLike = Union[str, Path]


class InputFormatError(ValueError):
    """Input that cannot be parsed at all, as opposed to parsed input violating a precondition."""


class MatrixFileError(InputFormatError):
    pass


class TargetListError(InputFormatError):
    pass


def read_matrix_csv(file_path: PathLike) -> np.ndarray:
    f_path = Path(file_path)
    if not f_path.exists():
        raise MatrixFileError(f"Matrix file not found: {f_path}")
    try:
        df = pd.read_csv(f_path, header=None, dtype=float, float_precision="round_trip", skip_blank_lines=True)
    except pd.errors.EmptyDataError as e:
        raise MatrixFileError(f"Matrix file {f_path} is empty") from e
    except (pd.errors.ParserError, ValueError) as e:
        raise MatrixFileError(f"Could not parse {f_path} as a numeric CSV matrix: {e}") from e
    values = df.to_numpy(dtype=float)
    if values.size == 0:
        raise MatrixFileError(f"Matrix file {f_path} is empty")
    if np.any(np.isnan(values)):
        # Short rows are padded with NaN by the parser.
        raise MatrixFileError(f"Matrix file {f_path} is not rectangular or has empty fields")
    if not np.all(np.isfinite(values)):
        raise MatrixFileError(f"Matrix file {f_path} contains infinite entries")
    logger.debug(f"Read {values.shape[0]}x{values.shape[1]} matrix from {f_path}")
    return values


def read_covariance_csv(file_path: PathLike) -> SymMatrix:
    """Read and validate a symmetric matrix; shape/symmetry violations raise the model errors."""
    return as_symmat(read_matrix_csv(file_path))


def write_matrix_csv(matrix: MatrixLike, file_path: PathLike) -> Path:
    values = matrix.values if isinstance(matrix, SymMatrix) else np.asarray(matrix, dtype=float)
    f_path = Path(file_path)
    f_path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(np.atleast_2d(values)).to_csv(f_path, header=False, index=False, float_format="%.17g")
    logger.info(f"Matrix ({values.shape[0]}x{values.shape[-1]}) saved to {f_path}")
    return f_path


def parse_target_list(raw: str) -> List[float]:
    """'1,4' -> [1.0, 4.0]; sign and length are checked downstream."""
    parts = [p.strip() for p in str(raw).split(",")]
    if not parts or any(p == "" for p in parts):
        raise TargetListError(f"Malformed target list '{raw}'")
    try:
        values = [float(p) for p in parts]
    except ValueError as e:
        raise TargetListError(f"Malformed target list '{raw}': {e}") from e
    if not all(np.isfinite(values)):
        raise TargetListError(f"Target list '{raw}' has non-finite entries")
    return values
