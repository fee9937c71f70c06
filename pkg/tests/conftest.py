from fractions import Fraction

import numpy as np
from hypothesis import settings
from hypothesis import strategies as st

from plcurrents.chain import PLChain

settings.register_profile("default", max_examples=40, deadline=None, derandomize=True)
settings.load_profile("default")

small_q = st.fractions(min_value=-4, max_value=4, max_denominator=6)


def points(dim):
    return st.tuples(*[small_q] * dim)


def chains(k, dim, max_terms=3):
    term = st.tuples(st.tuples(*[points(dim)] * (k + 1)), st.integers(-3, 3).filter(bool))
    return st.lists(term, min_size=1, max_size=max_terms).map(lambda ts: PLChain(k, dim, ts))


def random_chain(rng: np.random.Generator, k: int, dim: int, n_terms: int = 3, den: int = 5) -> PLChain:
    terms = []
    for _ in range(n_terms):
        verts = [tuple(Fraction(int(rng.integers(-3 * den, 3 * den + 1)), den) for _ in range(dim))
                 for _ in range(k + 1)]
        terms.append((verts, int(rng.choice([-2, -1, 1, 2]))))
    return PLChain(k, dim, terms)
