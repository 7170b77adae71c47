import numpy as np
import pytest

from taskcurriculum.dataset import LabelMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_labels(columns, names=None):
    values = np.column_stack(columns).astype(np.int64)
    k = [int(values[:, j].max()) + 1 for j in range(values.shape[1])]
    names = names or [f"t{j}" for j in range(values.shape[1])]
    return LabelMatrix(values, k, names)
