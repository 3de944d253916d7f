"""Shared fixtures and brute-force oracles.

The oracles here never call the package's membership, optimisation or
tabulation code: they enumerate subsets with itertools and evaluate ``f``
one set at a time through its scalar path.
"""

from __future__ import annotations

from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

from submodkit.core import (
    FAMILIES,
    ConcaveOverModular,
    MatroidRank,
    SumFunction,
    random_function,
)

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"
EPS = 1e-9


def all_subsets(n):
    """Every subset of range(n) as a sorted tuple, grouped by size."""
    for r in range(n + 1):
        yield from combinations(range(n), r)


def to_mask(S):
    m = 0
    for j in S:
        m |= 1 << j
    return m


class Oracle:
    """Exhaustive table of ``f`` plus naive inequality checks."""

    def __init__(self, f):
        self.f = f
        self.n = f.n
        self.sets = list(all_subsets(self.n))
        self.masks = np.array([to_mask(S) for S in self.sets], dtype=np.int64)
        self.value = {to_mask(S): f(list(S)) for S in self.sets}
        self.bits = np.array([[1.0 if j in S else 0.0 for j in range(self.n)] for S in self.sets])
        self.fvals = np.array([self.value[m] for m in self.masks])

    def xs(self, x):
        return self.bits @ np.asarray(x, dtype=float)

    def in_lower(self, x):
        return bool(np.all(self.xs(x) <= self.fvals + EPS))

    def in_upper(self, x):
        return bool(np.all(self.xs(x) >= self.fvals - EPS))

    def _restricted(self, X, family):
        if family == "sub":
            return (self.masks & ~X) == 0
        if family == "super":
            return (self.masks & X) == X
        return np.ones(len(self.masks), dtype=bool)

    def in_subdiff(self, X, x, family="all"):
        d = self.fvals - self.xs(x)
        at = self.value[X] - sum(x[j] for j in range(self.n) if X >> j & 1)
        sel = self._restricted(X, family)
        return bool(np.all(at <= d[sel] + EPS))

    def in_superdiff(self, X, x, family="all"):
        d = self.fvals - self.xs(x)
        at = self.value[X] - sum(x[j] for j in range(self.n) if X >> j & 1)
        sel = self._restricted(X, family)
        return bool(np.all(d[sel] <= at + EPS))

    def in_super_outer(self, X, x, k, l):
        """Subset and superset families in full, plus crossing sets within (k-1, l-1)."""
        d = self.fvals - self.xs(x)
        at = self.value[X] - sum(x[j] for j in range(self.n) if X >> j & 1)
        for m, dv in zip(self.masks, d):
            m = int(m)
            add, rem = bin(m & ~X).count("1"), bin(X & ~m).count("1")
            comparable = add == 0 or rem == 0
            if comparable or (add <= k - 1 and rem <= l - 1):
                if dv > at + EPS:
                    return False
        return True

    def minimum(self):
        return float(self.fvals.min())

    def maximum(self):
        return float(self.fvals.max())


def random_instances(count, n_min, n_max, seed, families=FAMILIES, signed=False):
    """``count`` random normalized instances cycling through ``families``.

    ``signed=True`` adds a modular term of either sign so minimisers and
    maximisers are not trivially the empty or full set.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        f = random_function(families[i % len(families)], n, rng)
        if signed:
            f = SumFunction((f, random_function("modular", n, rng, nonneg=False)))
        out.append(f)
    return out


def m_natural_instances(count, n_min, n_max, seed):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        if i % 3 == 0:
            out.append(MatroidRank.uniform(n, int(rng.integers(1, n + 1))))
        elif i % 3 == 1:
            out.append(random_function("matroid_rank", n, rng))
        else:
            out.append(ConcaveOverModular("capped_linear", (1.0,) * n, float(rng.integers(1, n + 1))))
    return out


@pytest.fixture
def fixtures_dir():
    return FIXTURES
