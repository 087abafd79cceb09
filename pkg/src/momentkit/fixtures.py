"""Seeded generators for measures, polynomials and fixture bundles."""

from __future__ import annotations

import math

import numpy as np

from .moments import AtomicMeasure, moments_from_measure, uniform_interval_moments
from .poly import Polynomial, monomials_upto

FIXTURE_KINDS = ("random-ball-atoms", "uniform-interval", "paper-examples")


def _weights(rng: np.random.Generator, k: int, min_weight: float) -> np.ndarray:
    # floor plus a Dirichlet share of the remaining mass; sums to 1 exactly up to rounding
    w = min_weight + (1.0 - k * min_weight) * rng.dirichlet(np.ones(k))
    return w / w.sum()


def random_interval_measure(rng: np.random.Generator, max_atoms: int = 5, min_sep: float = 0.05,
                            min_weight: float = 0.05, bound: float = 1.0) -> AtomicMeasure:
    """Atoms in ``[-bound, bound]`` with pairwise gaps >= ``min_sep`` and weights >= ``min_weight``."""
    k = int(rng.integers(1, max_atoms + 1))
    while True:
        x = np.sort(rng.uniform(-bound, bound, k))
        if k == 1 or np.min(np.diff(x)) >= min_sep:
            break
    w = _weights(rng, k, min_weight)
    return AtomicMeasure(1, tuple(((float(xi),), float(wi)) for xi, wi in zip(x, w)))


def random_ball_points(rng: np.random.Generator, n: int, s: int, radius: float = 1.0) -> np.ndarray:
    d = rng.standard_normal((n, s))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * (radius * rng.uniform(size=n) ** (1.0 / s))[:, None]


def random_ball_measure(rng: np.random.Generator, s: int, max_atoms: int = 5,
                        min_weight: float = 0.05) -> AtomicMeasure:
    k = int(rng.integers(1, max_atoms + 1))
    pts = random_ball_points(rng, k, s)
    w = _weights(rng, k, min_weight)
    return AtomicMeasure(s, tuple((tuple(p.tolist()), float(wi)) for p, wi in zip(pts, w)))


def random_polynomial(rng: np.random.Generator, s: int, max_degree: int = 3, max_terms: int = 4,
                      coef_range: float = 2.0, integer: bool = False) -> Polynomial:
    """Random nonzero polynomial with a handful of terms of total degree in [1, max_degree]."""
    pool = [e for e in monomials_upto(s, max_degree)]
    while True:
        k = int(rng.integers(1, min(max_terms, len(pool)) + 1))
        picks = rng.choice(len(pool), size=k, replace=False)
        if integer:
            coefs = rng.integers(-int(coef_range), int(coef_range) + 1, size=k).astype(float)
        else:
            coefs = rng.uniform(-coef_range, coef_range, size=k)
        p = Polynomial(s, {pool[i]: c for i, c in zip(picks, coefs)})
        if p.degree >= 1:
            return p


def random_ball_bundle(seed: int, num_vars: int = 2, max_degree: int = 6) -> dict:
    rng = np.random.default_rng(seed)
    mu = random_ball_measure(rng, num_vars)
    L = moments_from_measure(mu, max_degree)
    max_sq = max(math.fsum(v * v for v in p) for p, _ in mu.atoms)
    return {"kind": "random-ball-atoms", "seed": seed, "measure": mu.to_json(), "moments": L.to_json(),
            "expected": {"inside_unit_ball": max_sq <= 1.0, "total_mass": mu.total_mass,
                         "max_squared_norm": max_sq, "ball_criterion_budget": max_degree}}


def uniform_interval_bundle(max_degree: int = 10) -> dict:
    L = uniform_interval_moments(max_degree)
    B = (max_degree - 2) // 2
    return {"kind": "uniform-interval", "seed": None, "measure": None,
            "density": "uniform probability on [-1, 1]", "moments": L.to_json(),
            "expected": {"vnorm_ratio_budget": B,
                         "vnorm_ratio_x": math.sqrt((2 * B + 1) / (2 * B + 3)),
                         "interval_bound": math.sqrt((max_degree - 1) / (max_degree + 1))}}


def worked_examples() -> list[dict]:
    """Small cases with known answers.  ``check`` is "exact" for hand-checkable
    values and "oracle" where the value comes from an independent computation."""
    third = 1.0 / 3.0
    return [
        {"name": "dirac-moments", "operation": "gen-moments", "check": "exact",
         "input": {"measure": {"num_vars": 1, "atoms": [{"point": [0.5], "weight": 1.0}]}, "max_degree": 4},
         "expected": [1.0, 0.5, 0.25, 0.125, 0.0625]},
        {"name": "symmetric-pair-moments", "operation": "gen-moments", "check": "exact",
         "input": {"measure": {"num_vars": 1, "atoms": [{"point": [-1.0], "weight": 0.5},
                                                        {"point": [1.0], "weight": 0.5}]}, "max_degree": 4},
         "expected": [1.0, 0.0, 1.0, 0.0, 1.0]},
        {"name": "uniform-second-moment", "operation": "eval", "check": "oracle",
         "input": {"moments": "uniform-interval", "polynomial": "x1^2"}, "expected": third},
        {"name": "dirac-moment-matrix", "operation": "moment-matrix", "check": "exact",
         "input": {"measure": "dirac 0.5", "d": 1}, "expected": [[1.0, 0.5], [0.5, 0.25]]},
        {"name": "binomial-cone-violation", "operation": "check-cone", "check": "exact",
         "input": {"measure": "dirac 2", "element": "x1", "T": 1.0, "budget": 2},
         "expected": {"passed": False, "violation": {"p": 1, "q": 0, "value": -1.0}}},
        {"name": "ball-criterion-violation", "operation": "check-ball", "check": "exact",
         "input": {"measure": "dirac (2, 0)"}, "expected": {"passed": False, "value": -3.0}},
        {"name": "vnorm-dirac", "operation": "vnorm", "check": "exact",
         "input": {"measure": "dirac 0.5", "element": "x1"}, "expected": 0.5},
        {"name": "support-radius-uniform", "operation": "support-bound", "check": "oracle",
         "input": {"moments": "uniform-interval", "generators": ["x1"], "budget": 4}, "expected": 9.0 / 11.0},
        {"name": "two-atom-recovery", "operation": "solve-1d", "check": "oracle",
         "input": {"values": [0.3 * (-0.5) ** n + 0.7 * 0.5 ** n for n in range(7)]},
         "expected": [{"location": -0.5, "weight": 0.3}, {"location": 0.5, "weight": 0.7}]},
        {"name": "certificate-1-plus-x2", "operation": "certify", "check": "exact",
         "input": {"target": "1 + x1^2", "region": "ball", "vars": 1, "max_degree": 2},
         "expected": {"eps=0;m=2;n=0": 0.5, "eps=0;m=0;n=2": 0.5}},
        {"name": "certificate-x2-infeasible", "operation": "certify", "check": "oracle",
         "input": {"target": "x1^2", "region": "ball", "vars": 1, "max_degree": 2},
         "expected": {"status": "infeasible"}},
    ]


def generate_fixture(kind: str, seed: int = 0, num_vars: int = 2, max_degree: int | None = None) -> dict:
    if kind == "random-ball-atoms":
        return random_ball_bundle(seed, num_vars, 6 if max_degree is None else max_degree)
    if kind == "uniform-interval":
        return uniform_interval_bundle(10 if max_degree is None else max_degree)
    if kind == "paper-examples":
        return {"kind": kind, "seed": None, "cases": worked_examples()}
    raise ValueError(f"unknown fixture kind {kind!r}; expected one of {', '.join(FIXTURE_KINDS)}")
