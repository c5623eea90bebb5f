import math
import random

import pytest
from hypothesis import settings

from fiberatlas.words import QuadraticWord

settings.register_profile("ci", deadline=None, derandomize=True, max_examples=60)
settings.load_profile("ci")


def all_words(n):
    """Every quadratic word on letters 1..n, as QuadraticWord objects."""
    symbols = [(k, s) for k in range(1, n + 1) for s in (1, -1)]

    def rec(prefix, remaining):
        if not remaining:
            yield QuadraticWord.from_letters(prefix)
            return
        seen = set()
        for i, sym in enumerate(remaining):
            if sym in seen:
                continue
            seen.add(sym)
            yield from rec(prefix + [sym], remaining[:i] + remaining[i + 1 :])

    yield from rec([], symbols)


def random_word(rng: random.Random, n: int) -> QuadraticWord:
    symbols = [(k, s) for k in range(1, n + 1) for s in (1, -1)]
    rng.shuffle(symbols)
    return QuadraticWord.from_letters(symbols)


def phi_by_separation(word: QuadraticWord):
    """Independent intersection-form oracle from boundary cyclic order.

    The connecting curves of letters l and k cross exactly when their
    edge-midpoint positions interleave on the boundary circle; the sign
    comes from which endpoint of k's curve is met first going around
    from l's start.
    """
    n = word.n
    m = 2 * n
    phi = [[0] * n for _ in range(n)]
    for l in range(1, n + 1):
        a, b = word.tau[2 * l - 2], word.tau[2 * l - 1]
        for k in range(1, n + 1):
            if k == l:
                continue
            c, d = word.tau[2 * k - 2], word.tau[2 * k - 1]
            pos = lambda x: (x - a) % m
            pb, pc, pd = pos(b), pos(c), pos(d)
            if (pc < pb) != (pd < pb):
                phi[l - 1][k - 1] = 1 if pd < pb else -1
    return phi


def elliptic_real_period_oracle(xi: float) -> float:
    """AGM value of the cycle around the two smallest real roots of z^3 - z + xi.

    Legendre reduction: int_{e3}^{e2} dz / sqrt((e1-z)(e2-z)(z-e3))
    = 2 K(k) / sqrt(e1-e3) with k^2 = (e2-e3)/(e1-e3).
    """
    import numpy as np

    roots = sorted(r.real for r in np.roots([1.0, 0.0, -1.0, xi]))
    e3, e2, e1 = roots
    k2 = (e2 - e3) / (e1 - e3)
    a, b = 1.0, math.sqrt(1.0 - k2)
    while abs(a - b) > 1e-15 * a:
        a, b = (a + b) / 2.0, math.sqrt(a * b)
    K = math.pi / (2.0 * a)
    return 2.0 * K / math.sqrt(e1 - e3)


@pytest.fixture
def rng():
    return random.Random(20260809)
