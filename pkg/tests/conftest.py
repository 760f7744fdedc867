import itertools

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def all_inputs(n):
    return range(1 << n)


def brute_mobius(values, n):
    """a_S = sum over T subset of S of (-1)^{|S|-|T|} f(T), straight from the definition."""
    out = {}
    for s in range(1 << n):
        members = [i for i in range(n) if s >> i & 1]
        total = 0
        for r in range(len(members) + 1):
            for sub in itertools.combinations(members, r):
                t = sum(1 << i for i in sub)
                total += (-1) ** (len(members) - r) * values[t]
        if total:
            out[s] = total
    return out


def brute_sensitive(values, n, x):
    return {i for i in range(n) if values[x] != values[x ^ (1 << i)]}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
