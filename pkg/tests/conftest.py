import numpy as np
import pytest

from fsmeta.core_data import Dataset


def make_label_copy_dataset(seed: int, s: int = 200, n_noise: int = 9,
                            scale: float = 2.0) -> Dataset:
    """Balanced dataset whose feature 0 encodes the label exactly (+-scale)
    and whose remaining features are standard Gaussian noise."""
    rng = np.random.default_rng(seed)
    y = rng.permutation(np.repeat([0, 1], s // 2))
    informative = (2.0 * y - 1.0) * scale
    noise = rng.standard_normal((s, n_noise))
    return Dataset(np.column_stack([informative, noise]), y)


def random_dataset(rng: np.random.Generator, s: int, n: int) -> Dataset:
    """Random dataset with both classes guaranteed present."""
    values = rng.normal(loc=rng.uniform(-3, 3, n), scale=rng.uniform(0.5, 2.0, n),
                        size=(s, n))
    labels = rng.integers(0, 2, s)
    labels[0], labels[1] = 0, 1
    return Dataset(values, labels)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
