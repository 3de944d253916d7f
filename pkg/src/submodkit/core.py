"""Set functions over a finite ground set.

Subsets are plain Python ints used as bitmasks: element ``j`` belongs to the
subset ``S`` when ``S >> j & 1``.  Every public entry point also accepts an
iterable of element indices and converts it with :func:`as_mask`.

The zoo families (``Modular``, ``Coverage``, ``GraphCut``,
``ConcaveOverModular``, ``MatroidRank``) are frozen dataclasses with a scalar
evaluator and a vectorised one; both must agree to rounding.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

TOL = 1e-9
DEFAULT_CAP = 20
CAP_ENV = "SUBMODKIT_EXHAUSTIVE_CAP"


class SubmodError(Exception):
    """Base error; ``code`` is the machine-readable tag used by the CLI."""

    code = "error"


class SubsetError(SubmodError, IndexError):
    code = "index-out-of-range"


class CapExceededError(SubmodError):
    code = "cap-exceeded"


class PreconditionError(SubmodError, ValueError):
    code = "precondition"


class PermutationError(PreconditionError):
    code = "permutation-inconsistent"


# ---------------------------------------------------------------------------
# ground set and subsets


def exhaustive_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    if raw is None:
        return DEFAULT_CAP
    try:
        return int(raw)
    except ValueError:
        raise SubmodError(f"{CAP_ENV} must be an integer, got {raw!r}") from None


def require_enumerable(n: int, cap: int | None = None, what: str = "enumeration") -> None:
    """Fail loudly if ``2**n`` enumeration exceeds the cap."""
    limit = exhaustive_cap() if cap is None else cap
    if n > limit:
        raise CapExceededError(f"{what} over 2^{n} subsets exceeds the exhaustive cap of {limit} elements")


@dataclass(frozen=True)
class GroundSet:
    n: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise SubmodError(f"ground set size must be a positive integer, got {self.n!r}")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
            if len(self.labels) != self.n:
                raise SubmodError(f"expected {self.n} labels, got {len(self.labels)}")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1


def full_mask(n: int) -> int:
    return (1 << n) - 1


def as_mask(S, n: int) -> int:
    """Normalise a subset given as a bitmask or an iterable of indices."""
    if isinstance(S, (int, np.integer)) and not isinstance(S, bool):
        mask = int(S)
        if mask < 0 or mask >> n:
            raise SubsetError(f"mask {mask:#x} has bits outside a ground set of size {n}")
        return mask
    mask = 0
    for j in S:
        j = int(j)
        if not 0 <= j < n:
            raise SubsetError(f"element {j} outside ground set 0..{n - 1}")
        mask |= 1 << j
    return mask


def elements(mask: int) -> list[int]:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@lru_cache(maxsize=32)
def bit_table(n: int) -> np.ndarray:
    """Row ``S`` is the 0/1 indicator vector of mask ``S`` (shape ``2^n x n``)."""
    masks = np.arange(1 << n, dtype=np.int64)
    table = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    table.flags.writeable = False
    return table


def mask_bits(masks: np.ndarray, n: int) -> np.ndarray:
    masks = np.asarray(masks, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(float)


def submasks(X: int) -> np.ndarray:
    """All subsets of ``X`` in ascending mask order."""
    out = np.zeros(1, dtype=np.int64)
    for j in elements(X):
        out = np.concatenate([out, out | (1 << j)])
    return np.sort(out)


def supermasks(X: int, n: int) -> np.ndarray:
    return np.sort(X | submasks(full_mask(n) & ~X))


def modular_values(x: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """``x(S)`` for every mask in ``masks``."""
    x = np.asarray(x, dtype=float)
    return mask_bits(masks, len(x)) @ x


def modular_value(x: Sequence[float], S: int) -> float:
    return float(sum(x[j] for j in elements(S)))


# ---------------------------------------------------------------------------
# set functions


@dataclass(frozen=True)
class Flags:
    submodular: bool = False
    monotone: bool = False
    normalized: bool = False
    m_natural_concave: bool = False

    def to_dict(self) -> dict:
        return {
            "submodular": self.submodular,
            "monotone": self.monotone,
            "normalized": self.normalized,
            "m_natural_concave": self.m_natural_concave,
        }


class SetFunction:
    """Evaluable set function on ``{0, ..., n-1}``.

    Subclasses provide ``n``, ``flags`` and ``_value(mask)``; overriding
    ``_values(masks)`` with a vectorised version is optional.
    """

    n: int
    family = "custom"

    @property
    def flags(self) -> Flags:
        return Flags()

    def _value(self, mask: int) -> float:
        raise NotImplementedError

    def _values(self, masks: np.ndarray) -> np.ndarray:
        return np.array([self._value(int(m)) for m in masks], dtype=float)

    def __call__(self, S) -> float:
        return self._value(as_mask(S, self.n))

    def gain(self, j: int, S) -> float:
        """Marginal gain ``f(S + j) - f(S)``; zero when ``j`` is already in ``S``."""
        mask = as_mask(S, self.n)
        if not 0 <= j < self.n:
            raise SubsetError(f"element {j} outside ground set 0..{self.n - 1}")
        if mask >> j & 1:
            return 0.0
        return self._value(mask | (1 << j)) - self._value(mask)

    def values(self, masks) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        if masks.size and (masks.min() < 0 or masks.max() >> self.n):
            raise SubsetError(f"masks outside a ground set of size {self.n}")
        return self._values(masks)

    @cached_property
    def _table(self) -> np.ndarray:
        t = self._values(np.arange(1 << self.n, dtype=np.int64))
        t.flags.writeable = False
        return t

    def table(self, cap: int | None = None) -> np.ndarray:
        """Values on all ``2^n`` subsets, indexed by mask.  Cached."""
        require_enumerable(self.n, cap, "tabulation")
        return self._table

    @property
    def full(self) -> int:
        return full_mask(self.n)


def _check_weights(weights, nonneg: bool, name: str) -> tuple[float, ...]:
    w = tuple(float(v) for v in weights)
    if not w:
        raise SubmodError(f"{name}: ground set must be nonempty")
    if any(not math.isfinite(v) for v in w):
        raise SubmodError(f"{name}: weights must be finite")
    if nonneg and any(v < 0 for v in w):
        raise SubmodError(f"{name}: weights must be nonnegative")
    return w


@dataclass(frozen=True)
class Modular(SetFunction):
    weights: tuple[float, ...]
    offset: float = 0.0
    declared: Flags | None = None
    family = "modular"

    def __post_init__(self):
        object.__setattr__(self, "weights", _check_weights(self.weights, False, "modular"))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def flags(self) -> Flags:
        if self.declared is not None:
            return self.declared
        return Flags(True, all(w >= 0 for w in self.weights), self.offset == 0.0, True)

    def _value(self, mask):
        w = self.weights
        return self.offset + sum(w[j] for j in elements(mask))

    def _values(self, masks):
        return self.offset + mask_bits(masks, self.n) @ np.array(self.weights)


@dataclass(frozen=True)
class Coverage(SetFunction):
    """Weighted coverage: ``f(S)`` is the weight of items covered by ``S``.

    ``covers[j]`` lists the item ids element ``j`` covers.  Item weights
    default to one per item.
    """

    covers: tuple[tuple[int, ...], ...]
    item_weights: tuple[float, ...] | None = None
    offset: float = 0.0
    declared: Flags | None = None
    family = "coverage"

    def __post_init__(self):
        covers = tuple(tuple(sorted({int(i) for i in c})) for c in self.covers)
        if not covers:
            raise SubmodError("coverage: ground set must be nonempty")
        if any(i < 0 for c in covers for i in c):
            raise SubmodError("coverage: item ids must be nonnegative")
        m = 1 + max((i for c in covers for i in c), default=-1)
        if self.item_weights is None:
            iw = (1.0,) * m
        else:
            iw = tuple(float(v) for v in self.item_weights)
            if any(v < 0 or not math.isfinite(v) for v in iw):
                raise SubmodError("coverage: item weights must be finite and nonnegative")
            if len(iw) < m:
                raise SubmodError(f"coverage: {m} items referenced but {len(iw)} item weights given")
        object.__setattr__(self, "covers", covers)
        object.__setattr__(self, "item_weights", iw)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self) -> int:
        return len(self.covers)

    @property
    def flags(self) -> Flags:
        if self.declared is not None:
            return self.declared
        return Flags(True, True, self.offset == 0.0, False)

    def _value(self, mask):
        items = set()
        for j in elements(mask):
            items.update(self.covers[j])
        return self.offset + sum(self.item_weights[i] for i in sorted(items))

    @cached_property
    def _incidence(self) -> np.ndarray:
        inc = np.zeros((self.n, len(self.item_weights)))
        for j, c in enumerate(self.covers):
            inc[j, list(c)] = 1.0
        return inc

    def _values(self, masks):
        covered = (mask_bits(masks, self.n) @ self._incidence) > 0
        return self.offset + covered.astype(float) @ np.array(self.item_weights, dtype=float)


@dataclass(frozen=True)
class GraphCut(SetFunction):
    """Undirected cut: total weight of edges with exactly one end in ``S``."""

    n_nodes: int
    edges: tuple[tuple[int, int, float], ...]
    offset: float = 0.0
    declared: Flags | None = None
    family = "graph_cut"

    def __post_init__(self):
        if self.n_nodes < 1:
            raise SubmodError("graph_cut: need at least one node")
        edges = []
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if u == v or not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise SubmodError(f"graph_cut: bad edge {tuple(e)!r}")
            if w < 0 or not math.isfinite(w):
                raise SubmodError("graph_cut: edge weights must be finite and nonnegative")
            edges.append((u, v, w))
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self) -> int:
        return self.n_nodes

    @property
    def flags(self) -> Flags:
        if self.declared is not None:
            return self.declared
        no_cut = all(w == 0 for _, _, w in self.edges)
        return Flags(True, no_cut, self.offset == 0.0, no_cut)

    def _value(self, mask):
        return self.offset + sum(w for u, v, w in self.edges if (mask >> u & 1) != (mask >> v & 1))

    def _values(self, masks):
        bits = mask_bits(masks, self.n)
        out = np.full(len(bits), self.offset)
        for u, v, w in self.edges:
            out += w * (bits[:, u] != bits[:, v])
        return out


SHAPES = ("sqrt", "log1p", "capped_linear")


@dataclass(frozen=True)
class ConcaveOverModular(SetFunction):
    """``phi(w(S))`` for a nondecreasing concave ``phi`` and ``w >= 0``.

    ``capped_linear`` is ``min(t, budget)``.
    """

    shape: str
    weights: tuple[float, ...]
    budget: float | None = None
    offset: float = 0.0
    declared: Flags | None = None
    family = "concave_over_modular"

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise SubmodError(f"concave_over_modular: unknown shape {self.shape!r}, expected one of {SHAPES}")
        object.__setattr__(self, "weights", _check_weights(self.weights, True, "concave_over_modular"))
        if self.shape == "capped_linear":
            if self.budget is None or not self.budget >= 0:
                raise SubmodError("concave_over_modular: capped_linear needs a nonnegative budget")
            object.__setattr__(self, "budget", float(self.budget))
        elif self.budget is not None:
            raise SubmodError(f"concave_over_modular: budget only applies to capped_linear, not {self.shape}")
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def flags(self) -> Flags:
        if self.declared is not None:
            return self.declared
        # concave of cardinality is M-natural concave; general weights are not
        uniform = len(set(self.weights)) == 1
        return Flags(True, True, self.offset == 0.0, uniform)

    def _phi(self, t):
        if self.shape == "sqrt":
            return np.sqrt(t)
        if self.shape == "log1p":
            return np.log1p(t)
        return np.minimum(t, self.budget)

    def _value(self, mask):
        t = sum(self.weights[j] for j in elements(mask))
        return self.offset + float(self._phi(t))

    def _values(self, masks):
        return self.offset + self._phi(mask_bits(masks, self.n) @ np.array(self.weights))


@dataclass(frozen=True)
class MatroidRank(SetFunction):
    """Rank of a uniform or partition matroid.

    ``kind="uniform"``: ``min(|S|, rank)``.
    ``kind="partition"``: ``sum_b min(|S & block_b|, capacity_b)``; the
    blocks must partition the ground set.
    """

    n_elements: int
    kind: str = "uniform"
    rank: int | None = None
    blocks: tuple[tuple[int, ...], ...] | None = None
    capacities: tuple[int, ...] | None = None
    offset: float = 0.0
    declared: Flags | None = None
    family = "matroid_rank"

    def __post_init__(self):
        n = self.n_elements
        if n < 1:
            raise SubmodError("matroid_rank: ground set must be nonempty")
        if self.kind == "uniform":
            if self.rank is None or not 0 <= int(self.rank):
                raise SubmodError("matroid_rank: uniform matroid needs rank >= 0")
            object.__setattr__(self, "rank", int(self.rank))
        elif self.kind == "partition":
            if self.blocks is None or self.capacities is None:
                raise SubmodError("matroid_rank: partition matroid needs blocks and capacities")
            blocks = tuple(tuple(sorted(int(j) for j in b)) for b in self.blocks)
            caps = tuple(int(c) for c in self.capacities)
            if len(caps) != len(blocks) or any(c < 0 for c in caps):
                raise SubmodError("matroid_rank: one nonnegative capacity per block required")
            seen = sorted(j for b in blocks for j in b)
            if seen != list(range(n)):
                raise SubmodError("matroid_rank: blocks must partition the ground set")
            object.__setattr__(self, "blocks", blocks)
            object.__setattr__(self, "capacities", caps)
        else:
            raise SubmodError(f"matroid_rank: unknown kind {self.kind!r}")
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def uniform(cls, n: int, rank: int, **kw) -> MatroidRank:
        return cls(n, "uniform", rank=rank, **kw)

    @classmethod
    def partition(cls, n: int, blocks, capacities, **kw) -> MatroidRank:
        return cls(n, "partition", blocks=tuple(map(tuple, blocks)), capacities=tuple(capacities), **kw)

    @property
    def n(self) -> int:
        return self.n_elements

    @property
    def flags(self) -> Flags:
        if self.declared is not None:
            return self.declared
        return Flags(True, True, self.offset == 0.0, True)

    def _value(self, mask):
        if self.kind == "uniform":
            return self.offset + float(min(popcount(mask), self.rank))
        return self.offset + float(
            sum(min(sum(mask >> j & 1 for j in b), c) for b, c in zip(self.blocks, self.capacities))
        )

    def _values(self, masks):
        bits = mask_bits(masks, self.n)
        if self.kind == "uniform":
            return self.offset + np.minimum(bits.sum(axis=1), self.rank)
        out = np.full(len(bits), self.offset)
        for b, c in zip(self.blocks, self.capacities):
            out += np.minimum(bits[:, list(b)].sum(axis=1), c)
        return out


@dataclass(frozen=True)
class SquaredCardinality(SetFunction):
    """``|S|^2``: a supermodular fixture for exercising the validators."""

    n_elements: int
    offset: float = 0.0
    declared: Flags | None = None
    family = "squared_cardinality"

    def __post_init__(self):
        if self.n_elements < 1:
            raise SubmodError("squared_cardinality: ground set must be nonempty")
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self) -> int:
        return self.n_elements

    @property
    def flags(self) -> Flags:
        if self.declared is not None:
            return self.declared
        return Flags(False, True, self.offset == 0.0, False)

    def _value(self, mask):
        return self.offset + float(popcount(mask) ** 2)

    def _values(self, masks):
        return self.offset + mask_bits(masks, self.n).sum(axis=1) ** 2


ZOO = (Modular, Coverage, GraphCut, ConcaveOverModular, MatroidRank)


# ---------------------------------------------------------------------------
# derived functions


@dataclass(frozen=True)
class Dual(SetFunction):
    """``g(X) = f(V) - f(V \\ X)``."""

    base: SetFunction
    family = "dual"

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def flags(self) -> Flags:
        return Flags(False, self.base.flags.monotone, True, False)

    def _value(self, mask):
        full = full_mask(self.n)
        return self.base._value(full) - self.base._value(full & ~mask)

    def _values(self, masks):
        full = full_mask(self.n)
        masks = np.asarray(masks, dtype=np.int64)
        return self.base._value(full) - self.base._values(full & ~masks)


@dataclass(frozen=True)
class Normalized(SetFunction):
    base: SetFunction
    family = "normalized"

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def flags(self) -> Flags:
        return replace(self.base.flags, normalized=True)

    def _value(self, mask):
        return self.base._value(mask) - self.base._value(0)

    def _values(self, masks):
        return self.base._values(masks) - self.base._value(0)


@dataclass(frozen=True)
class Tilted(SetFunction):
    """``f(S) - x(S)`` for a fixed vector ``x``."""

    base: SetFunction
    x: tuple[float, ...]
    family = "tilted"

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        if len(x) != self.base.n:
            raise SubmodError(f"point has {len(x)} coordinates, ground set has {self.base.n}")
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def flags(self) -> Flags:
        b = self.base.flags
        return Flags(b.submodular, False, b.normalized, b.m_natural_concave)

    def _value(self, mask):
        return self.base._value(mask) - modular_value(self.x, mask)

    def _values(self, masks):
        return self.base._values(masks) - modular_values(np.array(self.x), masks)


@dataclass(frozen=True)
class SumFunction(SetFunction):
    """Pointwise sum of set functions on one ground set."""

    terms: tuple[SetFunction, ...]
    family = "sum"

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms or len({t.n for t in terms}) != 1:
            raise SubmodError("sum: need at least one term, all on the same ground set")
        object.__setattr__(self, "terms", terms)

    @property
    def n(self) -> int:
        return self.terms[0].n

    @property
    def flags(self) -> Flags:
        fl = [t.flags for t in self.terms]
        return Flags(
            all(f.submodular for f in fl),
            all(f.monotone for f in fl),
            all(f.normalized for f in fl),
            False,
        )

    def _value(self, mask):
        return sum(t._value(mask) for t in self.terms)

    def _values(self, masks):
        return sum(t._values(masks) for t in self.terms)


@dataclass(frozen=True, eq=False)
class CallableSetFunction(SetFunction):
    """Wrap any ``fn(mask) -> float``.  Flags are taken on trust."""

    n_elements: int
    fn: Callable[[int], float]
    declared: Flags = field(default_factory=Flags)
    family = "callable"

    @property
    def n(self) -> int:
        return self.n_elements

    @property
    def flags(self) -> Flags:
        return self.declared

    def _value(self, mask):
        return float(self.fn(mask))


def evaluate(f: SetFunction, S) -> float:
    return f(S)


def gain(f: SetFunction, j: int, S) -> float:
    return f.gain(j, S)


def dual(f: SetFunction) -> SetFunction:
    """Submodular dual.  Modular functions map to themselves (offset dropped)."""
    if isinstance(f, Modular):
        return Modular(f.weights)
    return Dual(f)


def normalize(f: SetFunction) -> SetFunction:
    if isinstance(f, ZOO + (SquaredCardinality,)):
        declared = None if f.declared is None else replace(f.declared, normalized=True)
        return replace(f, offset=0.0, declared=declared)
    return Normalized(f)


# ---------------------------------------------------------------------------
# marginal-gain vectors shared by polyhedra and bounds


def singleton_gains(f: SetFunction) -> np.ndarray:
    """``f(j | empty)`` for every ``j``."""
    return np.array([f.gain(j, 0) for j in range(f.n)])


def top_gains(f: SetFunction) -> np.ndarray:
    """``f(j | V - j)`` for every ``j``."""
    full = f.full
    return np.array([f.gain(j, full & ~(1 << j)) for j in range(f.n)])


def local_gains(f: SetFunction, X: int) -> np.ndarray:
    """``f(j | X - j)`` inside ``X`` and ``f(j | X)`` outside."""
    return np.array([f.gain(j, X & ~(1 << j)) for j in range(f.n)])


# ---------------------------------------------------------------------------
# validators


@dataclass(frozen=True)
class Counterexample:
    """Violated inequality ``lhs >= rhs`` (``lhs < rhs - TOL`` holds)."""

    S: int
    T: int | None
    j: int | None
    lhs: float
    rhs: float
    inequality: str

    def to_dict(self) -> dict:
        out = {"S": elements(self.S), "lhs": self.lhs, "rhs": self.rhs, "inequality": self.inequality}
        if self.T is not None:
            out["T"] = elements(self.T)
        if self.j is not None:
            out["j"] = self.j
        return out


@dataclass(frozen=True)
class ValidationReport:
    property: str
    holds: bool
    counterexample: Counterexample | None = None

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "holds": self.holds,
            "counterexample": None if self.counterexample is None else self.counterexample.to_dict(),
        }


PROPERTIES = ("submodularity", "supermodularity", "monotonicity", "normalization", "m_natural_concavity")
M_NATURAL_CAP = 10


def _pair_violation(f: SetFunction, t: np.ndarray, tol: float, sign: float):
    n = f.n
    masks = np.arange(1 << n, dtype=np.int64)
    for j, k in combinations(range(n), 2):
        S = masks[((masks >> j) & 1 == 0) & ((masks >> k) & 1 == 0)]
        bj, bk = 1 << j, 1 << k
        diff = sign * (t[S | bj] + t[S | bk] - t[S | bj | bk] - t[S])
        bad = np.flatnonzero(diff < -tol)
        if bad.size:
            s = int(S[bad[0]])
            return s | bj, s | bk
    return None


def validate(f: SetFunction, prop: str, tol: float = TOL, cap: int | None = None) -> ValidationReport:
    """Exhaustively check one property of ``f``.

    Submodularity uses the two-element form
    ``f(S+j) + f(S+k) >= f(S+j+k) + f(S)`` over all ``S`` avoiding ``j, k``.
    """
    if prop not in PROPERTIES:
        raise SubmodError(f"unknown property {prop!r}, expected one of {PROPERTIES}")
    if prop == "normalization":
        v = f(0)
        if abs(v) <= tol:
            return ValidationReport(prop, True)
        lhs, rhs = (0.0, v) if v > 0 else (v, 0.0)
        return ValidationReport(prop, False, Counterexample(0, None, None, lhs, rhs, "f(empty) = 0"))

    if prop == "m_natural_concavity":
        require_enumerable(f.n, M_NATURAL_CAP if cap is None else cap, "M-natural exchange check")
        return _validate_m_natural(f, tol)

    require_enumerable(f.n, cap, f"{prop} check")
    t = f.table(cap)
    if prop in ("submodularity", "supermodularity"):
        sign = 1.0 if prop == "submodularity" else -1.0
        hit = _pair_violation(f, t, tol, sign)
        if hit is None:
            return ValidationReport(prop, True)
        S, T = hit
        lhs, rhs = f(S) + f(T), f(S | T) + f(S & T)
        rel = "f(S)+f(T) >= f(S|T)+f(S&T)"
        if sign < 0:
            lhs, rhs = rhs, lhs
            rel = "f(S|T)+f(S&T) >= f(S)+f(T)"
        return ValidationReport(prop, False, Counterexample(S, T, None, lhs, rhs, rel))

    # monotonicity
    masks = np.arange(1 << f.n, dtype=np.int64)
    for j in range(f.n):
        S = masks[(masks >> j) & 1 == 0]
        bad = np.flatnonzero(t[S | (1 << j)] < t[S] - tol)
        if bad.size:
            s = int(S[bad[0]])
            cx = Counterexample(s, None, j, f(s | (1 << j)), f(s), "f(S+j) >= f(S)")
            return ValidationReport(prop, False, cx)
    return ValidationReport(prop, True)


def _validate_m_natural(f: SetFunction, tol: float) -> ValidationReport:
    # exchange axiom: for i in X-Y,
    # f(X)+f(Y) <= max(f(X-i)+f(Y+i), max_{j in Y-X} f(X-i+j)+f(Y+i-j))
    t = f.table(M_NATURAL_CAP)
    size = 1 << f.n
    for X in range(size):
        for Y in range(size):
            for i in elements(X & ~Y):
                bi = 1 << i
                best = t[X ^ bi] + t[Y | bi]
                for j in elements(Y & ~X):
                    bj = 1 << j
                    best = max(best, t[(X ^ bi) | bj] + t[(Y | bi) ^ bj])
                if t[X] + t[Y] > best + tol:
                    cx = Counterexample(X, Y, i, float(best), float(t[X] + t[Y]), "M-natural exchange at element j")
                    return ValidationReport("m_natural_concavity", False, cx)
    return ValidationReport("m_natural_concavity", True)


def check_declared_flags(f: SetFunction, cap: int | None = None) -> list[ValidationReport]:
    """Validate every flag ``f`` declares as true; return the failing reports."""
    fl = f.flags
    props = []
    if fl.normalized:
        props.append("normalization")
    if fl.submodular:
        props.append("submodularity")
    if fl.monotone:
        props.append("monotonicity")
    return [r for r in (validate(f, p, cap=cap) for p in props) if not r.holds]


# ---------------------------------------------------------------------------
# random instances for sweeps and tests


FAMILIES = ("modular", "coverage", "graph_cut", "concave_over_modular", "matroid_rank")


def random_function(family: str, n: int, rng: np.random.Generator, nonneg: bool = True) -> SetFunction:
    """Draw a random normalized member of a zoo family.

    ``nonneg=False`` lets modular weights take either sign.
    """
    if family == "modular":
        w = rng.uniform(0.0, 2.0, n) if nonneg else rng.normal(0.0, 1.0, n)
        return Modular(tuple(np.round(w, 6)))
    if family == "coverage":
        m = 2 * n
        covers = []
        for _ in range(n):
            items = np.flatnonzero(rng.random(m) < 0.3)
            covers.append(tuple(int(i) for i in items))
        return Coverage(tuple(covers), tuple(np.round(rng.uniform(0.5, 2.0, m), 6)))
    if family == "graph_cut":
        edges = [
            (u, v, float(np.round(rng.uniform(0.1, 2.0), 6)))
            for u, v in combinations(range(n), 2)
            if rng.random() < 0.5
        ]
        return GraphCut(n, tuple(edges))
    if family == "concave_over_modular":
        shape = SHAPES[int(rng.integers(len(SHAPES)))]
        w = tuple(np.round(rng.uniform(0.0, 2.0, n), 6))
        budget = float(np.round(rng.uniform(0.3, 0.8) * sum(w), 6)) if shape == "capped_linear" else None
        return ConcaveOverModular(shape, w, budget)
    if family == "matroid_rank":
        if rng.random() < 0.5:
            return MatroidRank.uniform(n, int(rng.integers(1, n + 1)))
        perm = rng.permutation(n)
        cuts = sorted(rng.choice(np.arange(1, n), size=min(n - 1, int(rng.integers(0, 3))), replace=False)) if n > 1 else []
        blocks = [tuple(int(j) for j in b) for b in np.split(perm, cuts)]
        caps = [int(rng.integers(0, len(b) + 1)) for b in blocks]
        return MatroidRank.partition(n, blocks, caps)
    raise SubmodError(f"unknown family {family!r}, expected one of {FAMILIES}")
