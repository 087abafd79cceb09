"""Cone generators, Positivstellensatz certificates and their verification.

Cones are generated by products of simple nonnegative factors:

* ``ball``:     (1 - |x|^2)^eps * prod_i (1 - x_i)^m_i (1 + x_i)^n_i,  eps in {0, 1}
* ``box``:      prod_i (1 - x_i)^m_i (1 + x_i)^n_i
* ``binomial``: prod_a (T_a - a)^p_a (T_a + a)^q_a  for listed pairs (a, T_a)

A certificate for ``p`` is a list of nonnegative coefficients ``c_t`` with
``sum_t c_t * term_t == p`` coefficient-wise.  At a fixed degree cap the search
is a linear feasibility problem, solved by :func:`momentkit.simplex.phase_one`.
Failure at one degree says nothing about positivity of ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import CertificateError, CombinatorialOverflowError, DegreeOverflowError
from .poly import Exponent, Polynomial, monomials_upto, parse_polynomial
from .simplex import phase_one

MAX_TERMS = 10 ** 6
DEFAULT_CERT_TOL = 1e-9
DEFAULT_MAX_DEGREE = 8


@dataclass(frozen=True)
class GeneratorBasis:
    kind: str
    num_vars: int
    degree: int
    terms: tuple[tuple[str, Polynomial], ...]
    generators: tuple[tuple[Polynomial, float], ...] = ()

    def __len__(self) -> int:
        return len(self.terms)

    def labels(self) -> list[str]:
        return [label for label, _ in self.terms]

    def term(self, label: str) -> Polynomial:
        return dict(self.terms)[label]


def _count_bounded(length: int, total: int) -> int:
    return math.comb(total + length, length) if total >= 0 else 0


def _label(parts: dict[str, Sequence[int] | int]) -> str:
    out = []
    for k, v in parts.items():
        out.append(f"{k}={v}" if isinstance(v, int) else f"{k}=" + ",".join(map(str, v)))
    return ";".join(out)


@lru_cache(maxsize=256)
def _factor_power(base: Polynomial, k: int) -> Polynomial:
    return base ** k


def _box_factors(num_vars: int, mn: tuple[int, ...]) -> Polynomial:
    out = Polynomial.one(num_vars)
    one = Polynomial.one(num_vars)
    for i in range(num_vars):
        m, n = mn[2 * i], mn[2 * i + 1]
        xi = Polynomial.variable(num_vars, i)
        if m:
            out = out * _factor_power(one - xi, m)
        if n:
            out = out * _factor_power(one + xi, n)
    return out


def enumerate_basis(kind: str, num_vars: int, degree: int,
                    generators: Sequence[tuple[Polynomial, float]] = ()) -> GeneratorBasis:
    """All cone generators of expanded total degree <= ``degree``.

    Duplicate polynomials under distinct labels (for example ``(1-x)(1+x)``
    and ``1 - x^2``) are kept.
    """
    return _enumerate(kind, num_vars, degree, tuple((a, float(T)) for a, T in generators))


@lru_cache(maxsize=64)
def _enumerate(kind: str, num_vars: int, degree: int,
               generators: tuple[tuple[Polynomial, float], ...]) -> GeneratorBasis:
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if num_vars < 1:
        raise ValueError("num_vars must be >= 1")
    terms: list[tuple[str, Polynomial]] = []
    if kind in ("ball", "box"):
        eps_values = (0, 1) if kind == "ball" else (0,)
        count = sum(_count_bounded(2 * num_vars, degree - 2 * e) for e in eps_values)
        if count > MAX_TERMS:
            raise CombinatorialOverflowError(f"{count} generators exceed the guard of {MAX_TERMS}")
        ball = Polynomial.one(num_vars) - sum(
            (Polynomial.variable(num_vars, i) ** 2 for i in range(num_vars)), Polynomial.zero(num_vars))
        entries = []
        for eps in eps_values:
            for mn in monomials_upto(2 * num_vars, degree - 2 * eps):
                entries.append((2 * eps + sum(mn), eps, mn))
        entries.sort(key=lambda t: (t[0], t[1]))
        for _, eps, mn in entries:
            poly = _box_factors(num_vars, mn)
            if eps:
                poly = ball * poly
            parts = {"m": mn[0::2], "n": mn[1::2]}
            if kind == "ball":
                parts = {"eps": eps, **parts}
            terms.append((_label(parts), poly))
    elif kind == "binomial":
        if not generators:
            raise ValueError("binomial basis needs at least one (a, T) generator")
        gens = tuple((a, float(T)) for a, T in generators)
        for a, T in gens:
            if a.num_vars != num_vars:
                raise ValueError("generator has the wrong number of variables")
            if not T > 0:
                raise ValueError(f"T must be positive, got {T}")
        degs = [max(a.degree, 1) for a, _ in gens]
        # (p_a, q_a) pairs flattened; weighted degree sum(deg_a * (p_a + q_a)) <= degree
        pq_all = _weighted_tuples(degs, degree)
        if len(pq_all) > MAX_TERMS:
            raise CombinatorialOverflowError(f"{len(pq_all)} generators exceed the guard of {MAX_TERMS}")
        for pq in pq_all:
            poly = Polynomial.one(num_vars)
            for j, (a, T) in enumerate(gens):
                p, q = pq[2 * j], pq[2 * j + 1]
                if p:
                    poly = poly * _factor_power(T - a, p)
                if q:
                    poly = poly * _factor_power(T + a, q)
            terms.append((_label({"p": pq[0::2], "q": pq[1::2]}), poly))
        return GeneratorBasis(kind, num_vars, degree, tuple(terms), gens)
    else:
        raise ValueError(f"unknown basis kind {kind!r}; expected ball, box or binomial")
    return GeneratorBasis(kind, num_vars, degree, tuple(terms))


def _weighted_tuples(degs: Sequence[int], cap: int) -> list[tuple[int, ...]]:
    width = 2 * len(degs)
    weights = [d for d in degs for _ in range(2)]
    top = cap // min(weights)
    out = []
    for t in monomials_upto(width, top):
        w = sum(x * y for x, y in zip(t, weights))
        if w <= cap:
            out.append((w, t))
    out.sort(key=lambda e: e[0])
    return [t for _, t in out]


@dataclass(frozen=True)
class Certificate:
    target: Polynomial
    kind: str
    degree: int
    coefficients: dict[str, float]
    terms: dict[str, Polynomial]
    residual: float = math.inf
    status: str = "unverified"

    def combination(self) -> Polynomial:
        out = Polynomial.zero(self.target.num_vars)
        for label, c in self.coefficients.items():
            out = out + self.terms[label] * c
        return out

    def to_json(self) -> dict:
        return {"status": self.status, "kind": self.kind, "degree": self.degree,
                "num_vars": self.target.num_vars, "target": str(self.target),
                "coefficients": [{"label": k, "value": v, "term": str(self.terms[k])}
                                 for k, v in self.coefficients.items()],
                "residual": self.residual}

    @classmethod
    def from_json(cls, data) -> Certificate:
        s = int(data["num_vars"])
        coefs = {e["label"]: float(e["value"]) for e in data["coefficients"]}
        terms = {e["label"]: parse_polynomial(e["term"], s) for e in data["coefficients"]}
        return cls(parse_polynomial(data["target"], s), data.get("kind", "ball"), int(data["degree"]),
                   coefs, terms, float(data.get("residual", math.inf)), data.get("status", "unverified"))


@dataclass(frozen=True)
class InfeasibleReport:
    target: Polynomial
    kind: str
    degree: int
    objective: float
    status: str = "infeasible"

    @property
    def message(self) -> str:
        return f"no certificate at degree <= {self.degree}"

    def to_json(self) -> dict:
        return {"status": self.status, "kind": self.kind, "degree": self.degree,
                "target": str(self.target), "message": self.message,
                "phase_one_objective": self.objective}


def verify_certificate(cert: Certificate, tol: float = DEFAULT_CERT_TOL) -> tuple[float, str]:
    """Re-expand ``sum c_t term_t`` and compare coefficient-wise with the target.

    Returns ``(residual, status)`` with status ``"verified"``, ``"mismatch"``
    or ``"invalid"`` (negative coefficient or unknown label).
    """
    if any(c < 0 for c in cert.coefficients.values()) or any(k not in cert.terms for k in cert.coefficients):
        residual = math.inf
        if all(k in cert.terms for k in cert.coefficients):
            residual = (cert.combination() - cert.target).max_abs_coefficient()
        return residual, "invalid"
    residual = (cert.combination() - cert.target).max_abs_coefficient()
    return residual, "verified" if residual <= tol else "mismatch"


def _system(p: Polynomial, basis: GeneratorBasis) -> tuple[list[Exponent], np.ndarray, np.ndarray]:
    rows = list(monomials_upto(p.num_vars, basis.degree))
    index = {e: i for i, e in enumerate(rows)}
    A = np.zeros((len(rows), len(basis.terms)))
    for j, (_, term) in enumerate(basis.terms):
        for e, c in term.items():
            A[index[e], j] = c
    b = np.array([p.coefficient(e) for e in rows])
    return rows, A, b


def find_certificate(p: Polynomial, basis: GeneratorBasis,
                     tol: float = DEFAULT_CERT_TOL) -> Certificate | InfeasibleReport:
    """Nonnegative combination of ``basis`` terms equal to ``p``, or an infeasibility report."""
    if p.num_vars != basis.num_vars:
        raise ValueError(f"target has {p.num_vars} variables, basis has {basis.num_vars}")
    if p.degree > basis.degree:
        raise DegreeOverflowError(p.degree, basis.degree, "find_certificate")
    _, A, b = _system(p, basis)
    res = phase_one(A, b)
    if not res.feasible:
        return InfeasibleReport(p, basis.kind, basis.degree, res.objective)
    x = _polish(A, b, res.x)
    labels = basis.labels()
    coefs = {labels[j]: float(x[j]) for j in np.flatnonzero(x > 0)}
    terms = {labels[j]: basis.terms[j][1] for j in np.flatnonzero(x > 0)}
    cert = Certificate(p, basis.kind, basis.degree, coefs, terms)
    residual, status = verify_certificate(cert, tol)
    if status != "verified":
        raise CertificateError(f"certificate failed re-expansion: residual {residual:.3g} > {tol:.3g}")
    return Certificate(p, basis.kind, basis.degree, coefs, terms, residual, status)


def _polish(A: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Least-squares cleanup on the support of the simplex solution."""
    support = np.flatnonzero(x > 0)
    if support.size == 0:
        return x
    best = x
    best_err = np.max(np.abs(A @ x - b))
    y = x.copy()
    for _ in range(3):
        delta, *_ = np.linalg.lstsq(A[:, support], b - A @ y, rcond=None)
        cand = y.copy()
        cand[support] += delta
        if np.any(cand[support] < 0):
            break
        err = np.max(np.abs(A @ cand - b))
        if err >= best_err:
            break
        best, best_err, y = cand, err, cand
    return best


def region_basis(region: str, num_vars: int, degree: int) -> GeneratorBasis:
    if region not in ("ball", "box"):
        raise ValueError(f"unknown region {region!r}")
    return enumerate_basis(region, num_vars, degree)


def search_certificate(p: Polynomial, region: str = "ball", max_degree: int = DEFAULT_MAX_DEGREE,
                       min_degree: int | None = None,
                       tol: float = DEFAULT_CERT_TOL) -> Certificate | InfeasibleReport:
    """Degree escalation: try ``D = max(deg p, min_degree), ..., max_degree``; first success wins."""
    start = max(p.degree, min_degree or 0)
    if start > max_degree:
        raise DegreeOverflowError(start, max_degree, "search_certificate")
    report = None
    for D in range(start, max_degree + 1):
        report = find_certificate(p, region_basis(region, p.num_vars, D), tol)
        if isinstance(report, Certificate):
            return report
    return report


@dataclass(frozen=True)
class CounterExample:
    point: tuple[float, ...]
    value: float

    def to_json(self) -> dict:
        return {"point": list(self.point), "value": self.value}


def _eval_many(p: Polynomial, X: np.ndarray) -> np.ndarray:
    out = np.zeros(X.shape[0])
    for exp, c in p.items():
        t = np.full(X.shape[0], c)
        for i, e in enumerate(exp):
            if e:
                t = t * X[:, i] ** e
        out += t
    return out


def _structured_points(region: str, s: int) -> np.ndarray:
    pts = [np.zeros(s)]
    for i in range(s):
        for sign in (-1.0, 1.0):
            e = np.zeros(s)
            e[i] = sign
            pts.append(e)
    if s <= 3:
        axis = np.linspace(-1.0, 1.0, 41 if s == 1 else (21 if s == 2 else 11))
        grid = np.stack(np.meshgrid(*([axis] * s), indexing="ij"), axis=-1).reshape(-1, s)
        if region == "ball":
            grid = grid[np.sum(grid ** 2, axis=1) <= 1.0]
        pts.extend(grid)
    return np.array(pts)


def counterexample_search(p: Polynomial, region: str = "ball", samples: int = 100_000,
                          seed: int = 0) -> CounterExample | None:
    """Sample ``region`` for a point with ``p(point) <= 0``; returns the minimizing sample or None."""
    if region not in ("ball", "box"):
        raise ValueError(f"unknown region {region!r}")
    s = p.num_vars
    rng = np.random.default_rng(seed)
    n_in = samples // 2
    n_bd = samples - n_in
    if region == "ball":
        d = rng.standard_normal((n_in + n_bd, s))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        radii = rng.uniform(size=n_in) ** (1.0 / s)
        inner = d[:n_in] * radii[:, None]
        boundary = d[n_in:]
    else:
        inner = rng.uniform(-1.0, 1.0, (n_in, s))
        boundary = rng.uniform(-1.0, 1.0, (n_bd, s))
        face = rng.integers(0, s, n_bd)
        boundary[np.arange(n_bd), face] = rng.choice([-1.0, 1.0], n_bd)
    X = np.vstack([_structured_points(region, s), inner, boundary])
    vals = _eval_many(p, X)
    k = int(np.argmin(vals))
    if vals[k] > 0:
        return None
    point = tuple(float(v) + 0.0 for v in X[k])
    return CounterExample(point, p(point))
