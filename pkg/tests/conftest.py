import pytest

from zetalattice.corpus import random_corpus
from zetalattice.numeric import eval_mzv

CORPUS_SEED = 20260815


@pytest.fixture(scope="session")
def corpus200():
    return random_corpus(seed=CORPUS_SEED, count=200)


@pytest.fixture(scope="session")
def mzv_value():
    cache = {}

    def value(comb):
        total = 0.0
        for w, c in comb.items():
            if w not in cache:
                cache[w] = eval_mzv(w).value
            total += float(c) * cache[w]
        return total

    return value
