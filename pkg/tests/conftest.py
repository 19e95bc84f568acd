import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qksvm.data import make_blob_table, write_pixel_table


@pytest.fixture(scope="session")
def blob_table():
    """Small synthetic table used by data-pipeline tests."""
    return make_blob_table(n_pixels=600, n_patches=2, seed=123)


@pytest.fixture(scope="session")
def blob_csv(tmp_path_factory, blob_table):
    path = tmp_path_factory.mktemp("data") / "blobs.csv"
    write_pixel_table(blob_table, path)
    return str(path)


@pytest.fixture()
def rng():
    return np.random.default_rng(42)
