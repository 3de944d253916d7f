"""Supergradients and the modular / Nemhauser bounds built from them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    PreconditionError,
    SetFunction,
    SubmodError,
    as_mask,
    elements,
    local_gains,
    mask_bits,
    modular_value,
    singleton_gains,
    top_gains,
)
from .polyhedra import subdiff_vertex

SUPERGRADIENT_KINDS = ("grow", "shrink", "bar", "tilde")


def supergradient(f: SetFunction, X, kind: str) -> np.ndarray:
    """Closed-form supergradient of ``f`` at ``X``.

    ======  =================  ==============
    kind    j in X             j not in X
    ======  =================  ==============
    grow    f(j | X - j)       f(j)
    shrink  f(j | V - j)       f(j | X)
    bar     f(j | V - j)       f(j)
    tilde   f(j | X - j)       f(j | X)
    ======  =================  ==============

    Singletons are read as ``f(j | empty)``.  ``tilde`` is the shared corner
    of the two Hamming-one outer bounds and is generally *not* a
    supergradient.
    """
    X = as_mask(X, f.n)
    inside = np.array([bool(X >> j & 1) for j in range(f.n)])
    if kind == "grow":
        return np.where(inside, local_gains(f, X), singleton_gains(f))
    if kind == "shrink":
        return np.where(inside, top_gains(f), local_gains(f, X))
    if kind == "bar":
        return np.where(inside, top_gains(f), singleton_gains(f))
    if kind == "tilde":
        return local_gains(f, X)
    raise SubmodError(f"unknown supergradient kind {kind!r}, expected one of {SUPERGRADIENT_KINDS}")


@dataclass(frozen=True)
class ModularBound:
    """``bound(Y) = anchor_value + base(Y) - base(anchor)``."""

    base: tuple[float, ...]
    anchor: int
    anchor_value: float
    direction: str

    @property
    def n(self) -> int:
        return len(self.base)

    @property
    def constant(self) -> float:
        return self.anchor_value - modular_value(self.base, self.anchor)

    def __call__(self, Y) -> float:
        Y = as_mask(Y, self.n)
        return self.constant + modular_value(self.base, Y)

    def values(self, masks) -> np.ndarray:
        return self.constant + mask_bits(masks, self.n) @ np.array(self.base)

    def to_dict(self) -> dict:
        return {
            "base": list(self.base),
            "anchor": elements(self.anchor),
            "anchor_value": self.anchor_value,
            "direction": self.direction,
        }


def modular_upper_bound(f: SetFunction, X, kind: str) -> ModularBound:
    """Tight modular upper bound at ``X`` from a closed-form supergradient."""
    if kind not in ("grow", "shrink", "bar"):
        raise PreconditionError(f"modular upper bounds need kind grow, shrink or bar, got {kind!r}")
    X = as_mask(X, f.n)
    g = supergradient(f, X, kind)
    return ModularBound(tuple(float(v) for v in g), X, f(X), "upper")


def modular_lower_bound(f: SetFunction, X, order: Sequence[int]) -> ModularBound:
    """Tight modular lower bound at ``X`` from the extreme subgradient of ``order``."""
    X = as_mask(X, f.n)
    h = subdiff_vertex(f, X, order)
    return ModularBound(tuple(float(v) for v in h), X, f(X), "lower")


@dataclass(frozen=True, eq=False)
class NemhauserBound:
    """Non-modular upper bounds on ``f(Y)`` anchored at ``X``.

    ``one``: f(X) - sum_{j in X-Y} f(j | X - j) + sum_{j in Y-X} f(j | X & Y)

    ``two``: f(X) - sum_{j in X-Y} f(j | X | Y - j) + sum_{j in Y-X} f(j | X)
    """

    f: SetFunction
    anchor: int
    which: str

    def __post_init__(self):
        if self.which not in ("one", "two"):
            raise SubmodError(f"nemhauser bound must be 'one' or 'two', got {self.which!r}")

    @property
    def n(self) -> int:
        return self.f.n

    def __call__(self, Y) -> float:
        f, X = self.f, self.anchor
        Y = as_mask(Y, f.n)
        total = f(X)
        if self.which == "one":
            total -= sum(f.gain(j, X & ~(1 << j)) for j in elements(X & ~Y))
            total += sum(f.gain(j, X & Y) for j in elements(Y & ~X))
        else:
            union = X | Y
            total -= sum(f.gain(j, union & ~(1 << j)) for j in elements(X & ~Y))
            total += sum(f.gain(j, X) for j in elements(Y & ~X))
        return total

    def values(self, masks) -> np.ndarray:
        f, X = self.f, self.anchor
        masks = np.asarray(masks, dtype=np.int64)
        t = f.table()
        total = np.full(len(masks), t[X], dtype=float)
        for j in range(f.n):
            bit = 1 << j
            has = (masks & bit) != 0
            if X & bit:
                base = (X | masks) & ~bit if self.which == "two" else np.full_like(masks, X & ~bit)
                total -= np.where(has, 0.0, t[base | bit] - t[base])
            else:
                base = X & masks if self.which == "one" else np.full_like(masks, X)
                total += np.where(has, t[base | bit] - t[base], 0.0)
        return total


def nemhauser_bound(f: SetFunction, X, which: str) -> NemhauserBound:
    return NemhauserBound(f, as_mask(X, f.n), which)
