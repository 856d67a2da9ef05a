import numpy as np
import pytest

from rtiac.langmodel import Alphabet, NGramModel

DATA = "data"


@pytest.fixture(scope="session")
def flat_abc_model() -> NGramModel:
    """Terminator 0.5, a 0.3, b 0.2 in every context: counts (4,2,1), alpha 1."""
    alpha = Alphabet(("a", "b"))
    counts = {"": {"\n": 4, "a": 2, "b": 1}}
    return NGramModel(alpha, order=0, alpha=1.0, counts=counts)


@pytest.fixture(scope="session")
def uniform27_model() -> NGramModel:
    alpha = Alphabet(tuple("abcdefghijklmnopqrstuvwxyz "))
    return NGramModel(alpha, order=0, alpha=1.0)


@pytest.fixture(scope="session")
def corpus_model() -> NGramModel:
    return NGramModel.load("data/model.json")


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
