"""Seeded randomized sweeps over instance families.

A sweep config is a mapping::

    suite: third-max | hierarchy | m-natural | fujishige | supergradients
    family: coverage | graph_cut | ... | all
    n_min: 3
    n_max: 8
    seed: 0
    repetitions: 100
    points: 20        # hierarchy / m-natural only

Each trial draws from ``numpy.random.default_rng([seed, trial])`` so a trial
is reproducible on its own and the aggregate is independent of run order.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from . import bounds, optimize, polyhedra
from .core import (
    FAMILIES,
    TOL,
    ConcaveOverModular,
    MatroidRank,
    SetFunction,
    SubmodError,
    SumFunction,
    elements,
    random_function,
)

SUITES = ("third-max", "hierarchy", "m-natural", "fujishige", "supergradients")


def sample_points(f: SetFunction, X: int, rng: np.random.Generator, count: int) -> list[np.ndarray]:
    """Points clustered around the superdifferential of ``f`` at ``X``.

    Mixes the closed-form corners, convex combinations of them, jittered
    copies, and pushes of the shared Hamming-one corner in the directions
    that keep it inside the outer bounds.  This yields members and
    non-members of every polyhedron in roughly even measure.
    """
    corners = [bounds.supergradient(f, X, k) for k in ("grow", "shrink", "bar", "tilde")]
    scale = max(1.0, float(np.abs(np.concatenate(corners)).max()))
    inside = np.array([bool(X >> j & 1) for j in range(f.n)])
    outward = np.where(inside, -1.0, 1.0)
    pts = []
    for i in range(count):
        r = i % 5
        if r == 0:
            p = corners[int(rng.integers(4))].copy()
        elif r == 1:
            lam = rng.random()
            p = lam * corners[0] + (1 - lam) * corners[1]
        elif r == 2:
            p = corners[int(rng.integers(4))] + rng.normal(0.0, 0.25 * scale, f.n)
        elif r == 3:
            p = corners[3] + outward * rng.exponential(0.3 * scale, f.n) * (rng.random(f.n) < 0.5)
        else:
            p = rng.uniform(-scale, 2 * scale, f.n)
        pts.append(p)
    return pts


def _family(config: dict, trial: int) -> str:
    fam = config.get("family", "all")
    if fam == "all":
        return FAMILIES[trial % len(FAMILIES)]
    if fam not in FAMILIES:
        raise SubmodError(f"unknown family {fam!r}, expected one of {FAMILIES} or 'all'")
    return fam


def _m_natural_instance(n: int, rng: np.random.Generator, trial: int) -> SetFunction:
    if trial % 2 == 0:
        return random_function("matroid_rank", n, rng)
    return ConcaveOverModular("capped_linear", (1.0,) * n, float(rng.integers(1, n + 1)))


def _trial_third_max(f, rng, config):
    start = int(rng.integers(1 << f.n))
    res = optimize.one_third_max(f, start)
    opt = optimize.brute_force_optimize(f, "max").value
    ratio = 1.0 if opt <= TOL else res.value / opt
    return {
        "start": elements(start),
        "argset": elements(res.argset),
        "value": res.value,
        "opt": opt,
        "ratio": ratio,
        "violations": int(res.value < opt / 3 - TOL),
    }


def _trial_hierarchy(f, rng, config):
    n = f.n
    X = int(rng.integers(1 << n))
    pts = sample_points(f, X, rng, int(config.get("points", 20)))
    grid = np.zeros((n, n), dtype=int)
    violations = 0
    for x in pts:
        exact = polyhedra.membership(f, polyhedra.superdifferential(X), x).member
        cell = np.array(
            [[polyhedra.membership(f, polyhedra.super_outer(X, k, l), x).member for l in range(1, n + 1)] for k in range(1, n + 1)]
        )
        grid += cell
        # nesting: member at (k, l) implies member at every (k', l') below it
        for k in range(n):
            for l in range(n):
                if cell[k, l] and not cell[: k + 1, : l + 1].all():
                    violations += 1
        if exact and not cell.all():
            violations += 1
        if cell[n - 1, n - 1] != exact:
            violations += 1
    return {"set": elements(X), "points": len(pts), "member_counts": grid.tolist(), "violations": violations}


def _trial_m_natural(f, rng, config):
    n = f.n
    mismatches = members = 0
    for _ in range(int(config.get("sets", 4))):
        X = int(rng.integers(1 << n))
        for x in sample_points(f, X, rng, int(config.get("points", 20))):
            exact = polyhedra.membership(f, polyhedra.superdifferential(X), x).member
            outer = polyhedra.membership(f, polyhedra.super_outer(X, 2, 2), x).member
            members += exact
            mismatches += exact != outer
    return {"members": members, "violations": mismatches}


def _trial_fujishige(f, rng, config):
    g = SumFunction((f, random_function("modular", f.n, rng, nonneg=False)))
    best = optimize.brute_force_optimize(g, "min").value
    t = g.table()
    bad = 0
    for A in range(1 << g.n):
        holds = optimize.certificate(g, A, "global-min").holds
        bad += holds != bool(t[A] <= best + TOL)
    return {"minimum": best, "violations": bad}


def _trial_supergradients(f, rng, config):
    bad = 0
    for X in range(1 << f.n):
        for kind in ("grow", "shrink", "bar"):
            g = bounds.supergradient(f, X, kind)
            bad += not polyhedra.membership(f, polyhedra.superdifferential(X), g).member
    return {"violations": bad}


_TRIALS = {
    "third-max": _trial_third_max,
    "hierarchy": _trial_hierarchy,
    "m-natural": _trial_m_natural,
    "fujishige": _trial_fujishige,
    "supergradients": _trial_supergradients,
}


def run_sweep(config: dict) -> Iterator[dict]:
    """Yield one record per trial, then a summary record."""
    suite = config.get("suite")
    if suite not in SUITES:
        raise SubmodError(f"unknown suite {suite!r}, expected one of {SUITES}")
    n_min, n_max = int(config.get("n_min", 3)), int(config.get("n_max", 8))
    if not 1 <= n_min <= n_max:
        raise SubmodError(f"invalid size range [{n_min}, {n_max}]")
    seed = int(config.get("seed", 0))
    reps = int(config.get("repetitions", 10))
    if reps < 0:
        raise SubmodError("repetitions must be nonnegative")
    if suite != "m-natural":
        _family(config, 0)

    ratios, violations = [], 0
    for trial in range(reps):
        rng = np.random.default_rng([seed, trial])
        n = int(rng.integers(n_min, n_max + 1))
        if suite == "m-natural":
            f = _m_natural_instance(n, rng, trial)
            fam = f.family
        else:
            fam = _family(config, trial)
            f = random_function(fam, n, rng)
        out = _TRIALS[suite](f, rng, config)
        violations += out["violations"]
        if "ratio" in out:
            ratios.append(out["ratio"])
        yield {"record": "trial", "suite": suite, "trial": trial, "family": fam, "n": n, **out}

    summary = {"record": "summary", "suite": suite, "seed": seed, "count": reps, "violations": violations}
    if suite == "third-max":
        summary["min_ratio"] = min(ratios) if ratios else None
        summary["mean_ratio"] = float(np.mean(ratios)) if ratios else None
    yield summary
