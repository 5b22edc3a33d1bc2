import numpy as np
import pytest

import sys
from pathlib import Path
project_root_path = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root_path))

from cli.matrix_io import (
    MatrixFileError,
    TargetListError,
    parse_target_list,
    read_covariance_csv,
    read_matrix_csv,
    write_matrix_csv,
)
from config.settings import settings
from models.elliptical import random_pd
from models.errors import AsymmetricInput, NotSquare


@pytest.fixture
def write_csv(tmp_path):
    def _write(name, text):
        f_path = tmp_path / name
        f_path.write_text(text)
        return f_path
    return _write


def test_read_bundled_files():
    sigma = read_covariance_csv(settings.DATA_DIR / "pair_2_1.csv")
    np.testing.assert_array_equal(sigma.values, [[2.0, 1.0], [1.0, 2.0]])
    assert read_covariance_csv(settings.DATA_DIR / "identity3.csv").dim == 3


def test_missing_and_empty_files(tmp_path, write_csv):
    with pytest.raises(MatrixFileError):
        read_matrix_csv(tmp_path / "nope.csv")
    with pytest.raises(MatrixFileError):
        read_matrix_csv(write_csv("empty.csv", ""))


@pytest.mark.parametrize("text", ["1,2\n3\n", "1,abc\n3,4\n", "1,2\n3,4,5\n", "1,inf\ninf,1\n"])
def test_malformed_files(write_csv, text):
    with pytest.raises(MatrixFileError):
        read_matrix_csv(write_csv("bad.csv", text))


def test_shape_violations_are_model_errors(write_csv):
    with pytest.raises(NotSquare):
        read_covariance_csv(write_csv("rect.csv", "1,2,3\n4,5,6\n"))
    with pytest.raises(AsymmetricInput):
        read_covariance_csv(write_csv("asym.csv", "1,2\n0,1\n"))


@pytest.mark.parametrize("seed", [0, 1, 12345])
def test_csv_round_trip_is_bit_exact(tmp_path, seed):
    sigma = random_pd(4, seed, 1e4)
    f_path = write_matrix_csv(sigma, tmp_path / "nested" / f"m{seed}.csv")
    np.testing.assert_array_equal(read_covariance_csv(f_path).values, sigma.values)


def test_parse_target_list():
    assert parse_target_list("1,4") == [1.0, 4.0]
    assert parse_target_list(" 0.5 , 2e1 ") == [0.5, 20.0]
    assert parse_target_list("-1,4") == [-1.0, 4.0]
    for raw in ("", "1,,2", "1,x", "1,nan"):
        with pytest.raises(TargetListError):
            parse_target_list(raw)
