"""Extreme points and membership oracles for the polyhedra of a set function.

Every polyhedron here is a set of points ``x`` satisfying inequalities indexed
by subsets ``Y``.  Membership returns a :class:`MembershipVerdict`; when the
point is outside, the witness names one violated inequality ``lhs <= rhs``
together with both side values.  Among enumerated inequalities the witness is
the first violated ``Y`` in ascending mask order.

The reductions that shrink the inequality families (subsets/supersets for the
subdifferential, singletons for the upper polyhedron and for the subset and
superset parts of the superdifferential) rely on submodularity, so they are
used only for functions whose flags declare it.  Other functions are checked
against their full families.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Sequence

import numpy as np

from . import optimize
from .core import (
    TOL,
    PermutationError,
    PreconditionError,
    SetFunction,
    SubmodError,
    Tilted,
    as_mask,
    bit_table,
    elements,
    local_gains,
    mask_bits,
    modular_value,
    require_enumerable,
    singleton_gains,
    submasks,
    supermasks,
    top_gains,
)


class Kind(str, Enum):
    LOWER = "lower"
    BASE = "base"
    UPPER = "upper"
    SUBDIFF = "subdiff"
    SUPERDIFF = "superdiff"
    SUB_OUTER11 = "sub-outer11"
    SUPER_OUTER = "super-outer"
    INNER_BOX = "inner-box"
    INNER_CONV = "inner-conv"


INNER_BOXES = ("grow", "shrink", "bar")


@dataclass(frozen=True)
class Polyhedron:
    """Which polyhedron a membership query targets.

    ``X`` is the anchor set (bitmask) for the semidifferential kinds; ``k``
    and ``l`` parametrise ``super-outer``; ``which`` picks an inner box.
    """

    kind: Kind
    X: int = 0
    k: int = 1
    l: int = 1
    which: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.SUPER_OUTER and (self.k < 1 or self.l < 1):
            raise SubmodError(f"super-outer needs k, l >= 1, got k={self.k}, l={self.l}")
        if self.kind is Kind.INNER_BOX and self.which not in INNER_BOXES:
            raise SubmodError(f"inner-box needs which in {INNER_BOXES}, got {self.which!r}")


def lower_polyhedron() -> Polyhedron:
    return Polyhedron(Kind.LOWER)


def base_polytope() -> Polyhedron:
    return Polyhedron(Kind.BASE)


def upper_polyhedron() -> Polyhedron:
    return Polyhedron(Kind.UPPER)


def subdifferential(X) -> Polyhedron:
    return Polyhedron(Kind.SUBDIFF, _raw_mask(X))


def superdifferential(X) -> Polyhedron:
    return Polyhedron(Kind.SUPERDIFF, _raw_mask(X))


def sub_outer11(X) -> Polyhedron:
    return Polyhedron(Kind.SUB_OUTER11, _raw_mask(X))


def super_outer(X, k: int, l: int) -> Polyhedron:
    return Polyhedron(Kind.SUPER_OUTER, _raw_mask(X), k, l)


def inner_box(X, which: str) -> Polyhedron:
    return Polyhedron(Kind.INNER_BOX, _raw_mask(X), which=which)


def inner_conv(X) -> Polyhedron:
    return Polyhedron(Kind.INNER_CONV, _raw_mask(X))


def _raw_mask(X) -> int:
    if isinstance(X, (int, np.integer)):
        return int(X)
    m = 0
    for j in X:
        m |= 1 << int(j)
    return m


@dataclass(frozen=True)
class Witness:
    """A violated inequality ``lhs <= rhs``; ``subset`` is its index set."""

    subset: int
    lhs: float
    rhs: float
    inequality: str

    @property
    def violation(self) -> float:
        return self.lhs - self.rhs

    def to_dict(self) -> dict:
        return {
            "subset": elements(self.subset),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "inequality": self.inequality,
        }


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    witness: Witness | None
    method: str
    interval: tuple[float, float] | None = None

    def __bool__(self) -> bool:
        return self.member

    def to_dict(self) -> dict:
        out = {
            "member": self.member,
            "method": self.method,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }
        if self.interval is not None:
            out["interval"] = list(self.interval)
        return out


# ---------------------------------------------------------------------------
# extreme points


def check_permutation(order: Sequence[int], n: int) -> tuple[int, ...]:
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(n)):
        raise PermutationError(f"{list(order)} is not a permutation of 0..{n - 1}")
    return order


def _chain_gains(f: SetFunction, order: tuple[int, ...]) -> np.ndarray:
    h = np.empty(f.n)
    S = 0
    prev = f(0)
    for j in order:
        S |= 1 << j
        cur = f(S)
        h[j] = cur - prev
        prev = cur
    return h


def greedy_vertex(f: SetFunction, order: Sequence[int], tol: float = TOL) -> np.ndarray:
    """Extreme point of the base polytope generated by the chain of ``order``.

    ``h[order[i]] = f(S_i) - f(S_{i-1})`` with ``S_i`` the first ``i``
    elements of the order, so ``h`` is tight on every chain set.
    """
    order = check_permutation(order, f.n)
    if abs(f(0)) > tol:
        raise PreconditionError(f"greedy vertex needs f(empty) = 0, got {f(0)!r}")
    return _chain_gains(f, order)


def subdiff_vertex(f: SetFunction, X, order: Sequence[int]) -> np.ndarray:
    """Extreme subgradient at ``X``; ``order`` must list ``X`` first."""
    X = as_mask(X, f.n)
    order = check_permutation(order, f.n)
    size = bin(X).count("1")
    for pos, j in enumerate(order):
        if (pos < size) != bool(X >> j & 1):
            where = "inside" if pos < size else "after"
            raise PermutationError(
                f"element {j} at position {pos} breaks the prefix condition: "
                f"positions {where} the first {size} must {'' if pos < size else 'not '}belong to X"
            )
    return _chain_gains(f, order)


def positive_max_exists(f: SetFunction, tol: float = TOL) -> bool:
    """Whether ``max_X f(X) > 0``, decided from singletons alone.

    Valid for normalized submodular ``f``.
    """
    if abs(f(0)) > tol:
        raise PreconditionError(f"positive_max_exists needs f(empty) = 0, got {f(0)!r}")
    return bool(np.any(singleton_gains(f) > tol))


# ---------------------------------------------------------------------------
# inequality checks


def _point(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise SubmodError(f"point has shape {x.shape}, ground set has {n} elements")
    return x


def _first(masks: np.ndarray, lhs: np.ndarray, rhs: np.ndarray, tol: float, rel: str) -> Witness | None:
    """First mask (ascending) with ``lhs > rhs + tol``."""
    lhs = np.broadcast_to(lhs, masks.shape)
    rhs = np.broadcast_to(rhs, masks.shape)
    bad = np.flatnonzero(lhs > rhs + tol)
    if not bad.size:
        return None
    i = bad[np.argmin(masks[bad])]
    return Witness(int(masks[i]), float(lhs[i]), float(rhs[i]), rel)


def _verdict(witness: Witness | None, method: str) -> MembershipVerdict:
    return MembershipVerdict(witness is None, witness, method)


def _semidiff_check(f, X, x, masks, sense, tol):
    """Semidifferential inequalities at ``X`` for the given index sets ``Y``.

    ``sense="sub"``:   f(X) - x(X) <= f(Y) - x(Y)
    ``sense="super"``: f(Y) - x(Y) <= f(X) - x(X)
    """
    masks = np.unique(np.asarray(masks, dtype=np.int64))
    at_X = f(X) - modular_value(x, X)
    at_Y = f.values(masks) - mask_bits(masks, f.n) @ x
    if sense == "sub":
        return _first(masks, np.asarray(at_X), at_Y, tol, "f(X)-x(X) <= f(Y)-x(Y)")
    return _first(masks, at_Y, np.asarray(at_X), tol, "f(Y)-x(Y) <= f(X)-x(X)")


def _neighbours(X: int, n: int) -> np.ndarray:
    """Sets at Hamming distance one from ``X``."""
    return np.array([X ^ (1 << j) for j in range(n)], dtype=np.int64)


def subdiff_subsets(f: SetFunction, X, x, tol: float = TOL) -> MembershipVerdict:
    """Inequalities of the subdifferential for ``Y`` inside ``X``."""
    X = as_mask(X, f.n)
    x = _point(x, f.n)
    return _verdict(_semidiff_check(f, X, x, submasks(X), "sub", tol), "restricted_enumeration")


def subdiff_supersets(f: SetFunction, X, x, tol: float = TOL) -> MembershipVerdict:
    """Inequalities of the subdifferential for ``Y`` containing ``X``."""
    X = as_mask(X, f.n)
    x = _point(x, f.n)
    return _verdict(_semidiff_check(f, X, x, supermasks(X, f.n), "sub", tol), "restricted_enumeration")


def superdiff_subsets(f: SetFunction, X, x, tol: float = TOL) -> MembershipVerdict:
    """Subset part of the superdifferential: ``x(j) <= f(j | X - j)`` for ``j`` in ``X``.

    For submodular ``f`` only the ``|X|`` sets ``X - j`` matter; otherwise
    every ``Y`` inside ``X`` is checked.
    """
    X = as_mask(X, f.n)
    x = _point(x, f.n)
    if f.flags.submodular:
        masks = np.array([X & ~(1 << j) for j in elements(X)], dtype=np.int64)
        return _verdict(_semidiff_check(f, X, x, masks, "super", tol), "closed_form")
    return _verdict(_semidiff_check(f, X, x, submasks(X), "super", tol), "restricted_enumeration")


def superdiff_supersets(f: SetFunction, X, x, tol: float = TOL) -> MembershipVerdict:
    """Superset part of the superdifferential: ``x(j) >= f(j | X)`` for ``j`` outside ``X``."""
    X = as_mask(X, f.n)
    x = _point(x, f.n)
    if f.flags.submodular:
        masks = np.array([X | (1 << j) for j in range(f.n) if not X >> j & 1], dtype=np.int64)
        return _verdict(_semidiff_check(f, X, x, masks, "super", tol), "closed_form")
    return _verdict(_semidiff_check(f, X, x, supermasks(X, f.n), "super", tol), "restricted_enumeration")


def crossing_sets(X: int, n: int, k: int, l: int) -> np.ndarray:
    """Sets ``Y`` neither inside nor containing ``X`` with
    ``1 <= |Y - X| <= k - 1`` and ``1 <= |X - Y| <= l - 1``.

    Generated layer by layer, so the count is ``O(n^(k+l))`` rather than
    ``2^n``.
    """
    inside = elements(X)
    outside = [j for j in range(n) if not X >> j & 1]
    out = []
    for a in range(1, min(k - 1, len(outside)) + 1):
        adds = [sum(1 << j for j in A) for A in combinations(outside, a)]
        for b in range(1, min(l - 1, len(inside)) + 1):
            for B in combinations(inside, b):
                base = X & ~sum(1 << j for j in B)
                out.extend(base | add for add in adds)
    return np.array(sorted(out), dtype=np.int64)


def _merge(*verdicts: MembershipVerdict, method: str) -> MembershipVerdict:
    wits = [v.witness for v in verdicts if v.witness is not None]
    if not wits:
        return MembershipVerdict(True, None, method)
    return MembershipVerdict(False, min(wits, key=lambda w: w.subset), method)


def inner_box_bounds(f: SetFunction, X, which: str) -> np.ndarray:
    """Corner of an inner box.

    The box is ``x(j) <= b(j)`` for ``j`` in ``X`` and ``x(j) >= b(j)``
    outside, where ``b`` is

    * ``grow``:   ``f(j | X - j)`` inside, ``f(j)`` outside;
    * ``shrink``: ``f(j | V - j)`` inside, ``f(j | X)`` outside;
    * ``bar``:    ``f(j | V - j)`` inside, ``f(j)`` outside.
    """
    X = as_mask(X, f.n)
    inside = np.array([bool(X >> j & 1) for j in range(f.n)])
    if which == "grow":
        return np.where(inside, local_gains(f, X), singleton_gains(f))
    if which == "shrink":
        return np.where(inside, top_gains(f), local_gains(f, X))
    if which == "bar":
        return np.where(inside, top_gains(f), singleton_gains(f))
    raise SubmodError(f"unknown inner box {which!r}, expected one of {INNER_BOXES}")


def _box_check(X: int, x: np.ndarray, b: np.ndarray, tol: float) -> MembershipVerdict:
    for j in range(len(x)):
        if X >> j & 1:
            if x[j] > b[j] + tol:
                return MembershipVerdict(False, Witness(1 << j, float(x[j]), float(b[j]), "x(j) <= bound(j)"), "closed_form")
        elif b[j] > x[j] + tol:
            return MembershipVerdict(False, Witness(1 << j, float(b[j]), float(x[j]), "bound(j) <= x(j)"), "closed_form")
    return MembershipVerdict(True, None, "closed_form")


def _lambda_interval(f: SetFunction, X: int, x: np.ndarray, tol: float) -> MembershipVerdict:
    """Membership in the convex hull of the grow and shrink boxes.

    Both boxes share their recession cone, so ``x`` is in the hull iff for
    some ``lam`` in ``[0, 1]`` it lies in the box cornered at
    ``c(lam) = lam * grow + (1 - lam) * shrink``.  Each coordinate cuts
    ``[0, 1]`` to an interval; the point is a member iff they intersect.
    """
    grow = inner_box_bounds(f, X, "grow")
    shrink = inner_box_bounds(f, X, "shrink")
    lo = np.zeros(f.n)
    hi = np.ones(f.n)
    for j in range(f.n):
        # slack(lam) >= 0 is the coordinate constraint; it is linear in lam
        if X >> j & 1:
            s0, s1 = shrink[j] + tol - x[j], grow[j] + tol - x[j]
        else:
            s0, s1 = x[j] + tol - shrink[j], x[j] + tol - grow[j]
        if s0 < 0 and s1 < 0:
            if X >> j & 1:
                wit = Witness(1 << j, float(x[j]), float(max(grow[j], shrink[j])), "x(j) <= max corner(j)")
            else:
                wit = Witness(1 << j, float(min(grow[j], shrink[j])), float(x[j]), "min corner(j) <= x(j)")
            return MembershipVerdict(False, wit, "lambda_interval")
        if s0 < 0:
            lo[j] = s0 / (s0 - s1)
        elif s1 < 0:
            hi[j] = s0 / (s0 - s1)
    a, b = int(np.argmax(lo)), int(np.argmin(hi))
    if lo[a] > hi[b]:
        wit = Witness((1 << a) | (1 << b), float(lo[a]), float(hi[b]), "lambda lower bound <= lambda upper bound")
        return MembershipVerdict(False, wit, "lambda_interval")
    return MembershipVerdict(True, None, "lambda_interval", (float(lo[a]), float(hi[b])))


def membership(f: SetFunction, poly: Polyhedron, x, tol: float = TOL, cap: int | None = None) -> MembershipVerdict:
    """Decide whether ``x`` lies in ``poly`` (boundary points are members)."""
    x = _point(x, f.n)
    X = as_mask(poly.X, f.n)
    kind = poly.kind
    n = f.n

    if kind in (Kind.LOWER, Kind.BASE):
        # x in P_f  iff  min_Y f(Y) - x(Y) >= 0
        best = optimize.brute_force_optimize(Tilted(f, tuple(x)), "min", cap=cap)
        if best.value < -tol:
            Y = best.argset
            wit = Witness(Y, modular_value(x, Y), f(Y), "x(Y) <= f(Y)")
            return MembershipVerdict(False, wit, "enumeration")
        if kind is Kind.BASE:
            xv, fv = float(x.sum()), f(f.full)
            if abs(xv - fv) > tol:
                lhs, rhs = (xv, fv) if xv > fv else (fv, xv)
                rel = "x(V) <= f(V)" if xv > fv else "f(V) <= x(V)"
                return MembershipVerdict(False, Witness(f.full, lhs, rhs, rel), "enumeration")
        return MembershipVerdict(True, None, "enumeration")

    if kind is Kind.UPPER:
        if f.flags.submodular and abs(f(0)) <= tol:
            masks = np.array([1 << j for j in range(n)], dtype=np.int64)
            method = "closed_form"
        else:
            require_enumerable(n, cap)
            masks = np.arange(1 << n, dtype=np.int64)
            method = "enumeration"
        wit = _first(masks, f.values(masks), mask_bits(masks, n) @ x, tol, "f(Y) <= x(Y)")
        return _verdict(wit, method)

    if kind is Kind.SUBDIFF:
        if f.flags.submodular:
            require_enumerable(max(bin(X).count("1"), n - bin(X).count("1")), cap)
            return _merge(subdiff_subsets(f, X, x, tol), subdiff_supersets(f, X, x, tol), method="restricted_enumeration")
        require_enumerable(n, cap)
        return _verdict(_semidiff_check(f, X, x, np.arange(1 << n), "sub", tol), "enumeration")

    if kind is Kind.SUPERDIFF:
        require_enumerable(n, cap)
        t = f.table(cap)
        xs = bit_table(n) @ x
        masks = np.arange(1 << n, dtype=np.int64)
        wit = _first(masks, t - xs, np.asarray(t[X] - xs[X]), tol, "f(Y)-x(Y) <= f(X)-x(X)")
        return _verdict(wit, "enumeration")

    if kind is Kind.SUB_OUTER11:
        return _verdict(_semidiff_check(f, X, x, _neighbours(X, n), "sub", tol), "closed_form")

    if kind is Kind.SUPER_OUTER:
        parts = [superdiff_subsets(f, X, x, tol), superdiff_supersets(f, X, x, tol)]
        cross = crossing_sets(X, n, poly.k, poly.l)
        if cross.size:
            parts.append(_verdict(_semidiff_check(f, X, x, cross, "super", tol), "restricted_enumeration"))
        method = "closed_form" if all(p.method == "closed_form" for p in parts) else "restricted_enumeration"
        return _merge(*parts, method=method)

    if kind is Kind.INNER_BOX:
        return _box_check(X, x, inner_box_bounds(f, X, poly.which), tol)

    if kind is Kind.INNER_CONV:
        return _lambda_interval(f, X, x, tol)

    raise SubmodError(f"unhandled polyhedron kind {kind!r}")
