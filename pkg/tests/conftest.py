import random

import pytest
from hypothesis import settings, strategies as st

from hoca.algebra import FGModule, Ring
from hoca.randomgen import random_chain_map, random_complex

settings.register_profile("hoca", max_examples=40, deadline=None)
settings.load_profile("hoca")

Z = Ring.integers()
F2 = Ring("Zmod", 2)
RINGS = [Z, F2, Ring("Zmod", 4)]


@pytest.fixture
def Zring():
    return Z


@pytest.fixture
def unit_free():
    return FGModule.free(Z, 1)


def complexes(rings=(Z, F2), **kw):
    """Hypothesis strategy: a random bounded complex driven by a drawn seed."""
    return st.builds(lambda seed, k: random_complex(random.Random(seed), rings[k % len(rings)], **kw),
                     st.integers(0, 2 ** 32), st.integers(0, len(rings) - 1))


def complex_pairs_with_map(rings=(Z, F2), **kw):
    def build(seed, k):
        r = random.Random(seed)
        ring = rings[k % len(rings)]
        X = random_complex(r, ring, **kw)
        Y = random_complex(r, ring, **kw)
        return X, Y, random_chain_map(r, X, Y)
    return st.builds(build, st.integers(0, 2 ** 32), st.integers(0, len(rings) - 1))
