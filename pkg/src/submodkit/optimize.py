"""Exhaustive and local optimisation, and optimality certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import polyhedra
from .core import TOL, SetFunction, SubmodError, as_mask, elements, full_mask

DIRECTIONS = ("min", "max")


@dataclass(frozen=True)
class OptResult:
    argset: int
    value: float
    evaluations: int
    trace: tuple[tuple[int, float], ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "argset": elements(self.argset),
            "value": self.value,
            "evaluations": self.evaluations,
            "trace": [{"set": elements(s), "value": v} for s, v in self.trace],
        }


def _direction(direction: str) -> float:
    if direction not in DIRECTIONS:
        raise SubmodError(f"direction must be 'min' or 'max', got {direction!r}")
    return 1.0 if direction == "max" else -1.0


def brute_force_optimize(f: SetFunction, direction: str, cap: int | None = None, tol: float = TOL) -> OptResult:
    """Optimum over all ``2^n`` subsets.

    Values within ``tol`` of the optimum count as ties; the smallest mask
    among them wins.
    """
    sign = _direction(direction)
    t = sign * f.table(cap)
    best = t.max()
    arg = int(np.flatnonzero(t >= best - tol)[0])
    return OptResult(arg, f(arg), len(t))


def local_search(f: SetFunction, direction: str, start=0, tol: float = TOL) -> OptResult:
    """First-improvement search over single-element additions and deletions.

    Elements are scanned cyclically in ascending index order; a move is
    taken only if it improves by more than ``tol``.  The search stops after
    ``n`` consecutive non-improving checks, so the result is a Hamming-one
    local optimum.  ``evaluations`` counts calls to ``f``.
    """
    sign = _direction(direction)
    S = as_mask(start, f.n)
    cur = f(S)
    evals = 1
    trace = [(S, cur)]
    idle = 0
    j = 0
    while idle < f.n:
        cand = S ^ (1 << j)
        val = f(cand)
        evals += 1
        if sign * (val - cur) > tol:
            S, cur = cand, val
            trace.append((S, cur))
            idle = 0
        else:
            idle += 1
        j = (j + 1) % f.n
    return OptResult(S, cur, evals, tuple(trace))


def one_third_max(f: SetFunction, start=0, tol: float = TOL) -> OptResult:
    """Local maximum ``A``, then the better of ``A`` and its complement.

    For nonnegative submodular ``f`` the value is at least a third of the
    optimum.
    """
    local = local_search(f, "max", start, tol)
    A = local.argset
    comp = full_mask(f.n) & ~A
    fc = f(comp)
    if fc > local.value:
        return OptResult(comp, fc, local.evaluations + 1, local.trace + ((comp, fc),))
    return OptResult(A, local.value, local.evaluations + 1, local.trace)


class CertificateKind(str, Enum):
    GLOBAL_MIN = "global-min"
    LOCAL_MIN = "local-min"
    LOCAL_MAX = "local-max"
    GLOBAL_MAX_EXACT = "global-max-exact"
    GLOBAL_MAX_SUFFICIENT = "global-max-sufficient"


@dataclass(frozen=True)
class Certificate:
    kind: CertificateKind
    holds: bool
    witness: polyhedra.Witness | None
    method: str

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "holds": self.holds,
            "method": self.method,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def _poly_for(kind: CertificateKind, A: int) -> polyhedra.Polyhedron:
    if kind is CertificateKind.GLOBAL_MIN:
        return polyhedra.subdifferential(A)
    if kind is CertificateKind.LOCAL_MIN:
        return polyhedra.sub_outer11(A)
    if kind is CertificateKind.LOCAL_MAX:
        return polyhedra.super_outer(A, 1, 1)
    if kind is CertificateKind.GLOBAL_MAX_EXACT:
        return polyhedra.superdifferential(A)
    return polyhedra.inner_conv(A)


def certificate(f: SetFunction, A, kind, tol: float = TOL, cap: int | None = None) -> Certificate:
    """Check an optimality condition at ``A`` by testing whether 0 lies in
    the matching polyhedron.

    * global-min: subdifferential (subsets and supersets of ``A``)
    * local-min: Hamming-one outer bound of the subdifferential
    * local-max: Hamming-one outer bound of the superdifferential
    * global-max-exact: superdifferential, by exhaustive enumeration
    * global-max-sufficient: hull of the grow and shrink inner boxes
    """
    kind = CertificateKind(kind)
    A = as_mask(A, f.n)
    v = polyhedra.membership(f, _poly_for(kind, A), np.zeros(f.n), tol=tol, cap=cap)
    return Certificate(kind, v.member, v.witness, v.method)
