import functools

import numpy as np
import pytest

from treelcs import make_logtail_law, make_standard_law, parse
from treelcs._rng import Rng
from treelcs.samplers import enumerate_plane_trees


@pytest.fixture(scope="session")
def binary():
    return make_standard_law("binary_half")


@pytest.fixture(scope="session")
def geometric():
    return make_standard_law("geometric_half")


@pytest.fixture(scope="session")
def poisson():
    return make_standard_law("poisson_one")


@pytest.fixture(scope="session")
def logtail():
    return make_logtail_law(1.5)


@functools.lru_cache(maxsize=None)
def trees_up_to(n_max):
    """All plane trees with at most n_max vertices, parsed."""
    out = []
    for n in range(1, n_max + 1):
        out.extend(parse(s) for s in enumerate_plane_trees(n))
    return out


def uniform_tree(n, seed):
    """A uniform plane tree on n vertices (conditioned geometric law)."""
    from treelcs import sample_conditioned
    law = make_standard_law("geometric_half")
    return sample_conditioned(law, n, Rng(seed, ("uniform-tree", n)))


def rng(*path, seed=20250810):
    return Rng(seed, path)


def three_sigma_binomial(p_hat, p_exact, n):
    """|p_hat - p| measured in binomial standard errors."""
    se = np.sqrt(max(p_exact * (1 - p_exact), 1e-300) / n)
    return abs(p_hat - p_exact) / se
