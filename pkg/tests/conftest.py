import numpy as np
import pytest

from src.core.linalg import hermitize
from src.splitting.toeplitz_split import dense_of_toeplitz, make_toeplitz, split
from src.utils.config import load_reference, reference_covariance


@pytest.fixture(autouse=True)
def isolated_environment(monkeypatch):
    """Keeps a developer's .env or ICC_* variables out of the tests."""
    for name in ("ICC_SEED", "ICC_TRIALS", "ICC_OUTPUT_DIR", "ICC_FORMATS", "ICC_VARIANT"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr("src.utils.config.load_dotenv", lambda *args, **kwargs: False)


@pytest.fixture(scope="session")
def reference():
    return load_reference()


@pytest.fixture(scope="session")
def ref_cov():
    return reference_covariance()


@pytest.fixture(scope="session")
def ref_dense(ref_cov):
    return dense_of_toeplitz(ref_cov)


@pytest.fixture(scope="session")
def ref_hermitian(ref_dense):
    # the printed covariance is not exactly Hermitian (corner entries); consumers use its Hermitian part
    return hermitize(ref_dense)


@pytest.fixture(scope="session")
def ref_pair(ref_cov):
    return split(ref_cov)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def random_complex(rng):
    def make(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return make


@pytest.fixture
def random_toeplitz(rng):
    """Random Toeplitz covariance; Hermitian ones are made diagonally dominant (positive definite)."""
    def make(n, hermitian=False):
        column = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        if hermitian:
            column[0] = 2.0 * np.sum(np.abs(column[1:])) + 1.0
            tail = np.conj(column[1:])
        else:
            tail = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
        return make_toeplitz(column, tail, hermitian=hermitian)
    return make
