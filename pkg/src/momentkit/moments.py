"""Truncated moment sequences, atomic measures and moment/localizing matrices.

A :class:`MomentSequence` stores ``L(x^alpha)`` for every exponent of total
degree <= ``max_degree`` and stands for the linear functional ``L`` on
polynomials.  Conditions that are quantified over all powers are only ever
checked up to a finite budget; results carry the degree they were verified to.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DegreeOverflowError, NormalizationError, VariableCountError
from .poly import Exponent, Polynomial, binomial_product, exact_dot, monomials_upto

DEFAULT_PSD_TOL = 1e-9
NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite positive combination of point masses in R^s."""

    num_vars: int
    atoms: tuple[tuple[tuple[float, ...], float], ...]

    def __post_init__(self):
        if self.num_vars < 1:
            raise VariableCountError("num_vars must be >= 1")
        atoms = []
        for point, weight in self.atoms:
            point = tuple(float(v) for v in point)
            if len(point) != self.num_vars:
                raise VariableCountError(f"atom {point} does not have {self.num_vars} coordinates")
            if not all(math.isfinite(v) for v in point):
                raise ValueError(f"non-finite atom location {point}")
            weight = float(weight)
            if not weight > 0 or not math.isfinite(weight):
                raise ValueError(f"atom weights must be positive, got {weight}")
            atoms.append((point, weight))
        if not atoms:
            raise ValueError("a measure needs at least one atom")
        object.__setattr__(self, "atoms", tuple(atoms))

    @classmethod
    def from_points(cls, points: Sequence[Sequence[float]], weights: Sequence[float]) -> AtomicMeasure:
        points = [tuple(np.atleast_1d(np.asarray(p, dtype=float)).tolist()) for p in points]
        return cls(len(points[0]), tuple(zip(points, weights)))

    @classmethod
    def dirac(cls, point: Sequence[float] | float) -> AtomicMeasure:
        point = tuple(np.atleast_1d(np.asarray(point, dtype=float)).tolist())
        return cls(len(point), ((point, 1.0),))

    @property
    def total_mass(self) -> float:
        return math.fsum(w for _, w in self.atoms)

    @property
    def points(self) -> np.ndarray:
        return np.array([p for p, _ in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=float)

    def is_normalized(self) -> bool:
        return abs(self.total_mass - 1.0) <= NORMALIZATION_TOL

    def normalized(self) -> AtomicMeasure:
        m = self.total_mass
        return AtomicMeasure(self.num_vars, tuple((p, w / m) for p, w in self.atoms))

    def integrate(self, p: Polynomial) -> float:
        return math.fsum(w * p(pt) for pt, w in self.atoms)

    def to_json(self) -> dict:
        return {"num_vars": self.num_vars,
                "atoms": [{"point": list(p), "weight": w} for p, w in self.atoms]}

    @classmethod
    def from_json(cls, data: Mapping) -> AtomicMeasure:
        return cls(int(data["num_vars"]),
                   tuple((tuple(a["point"]), a["weight"]) for a in data["atoms"]))


class MomentSequence:
    """Complete truncated moment data ``{alpha: L(x^alpha) : |alpha| <= max_degree}``."""

    __slots__ = ("num_vars", "max_degree", "_values")

    def __init__(self, num_vars: int, max_degree: int, values: Mapping[Sequence[int], float], *,
                 normalize: bool = False):
        if num_vars < 1:
            raise VariableCountError("num_vars must be >= 1")
        if max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        vals = {tuple(int(e) for e in k): float(v) for k, v in values.items()}
        basis = monomials_upto(num_vars, max_degree)
        missing = [e for e in basis if e not in vals]
        if missing:
            raise ValueError(f"incomplete truncation: {len(missing)} moments missing, e.g. {missing[0]}")
        extra = [e for e in vals if len(e) != num_vars or sum(e) > max_degree]
        if extra:
            raise ValueError(f"moment exponent {extra[0]} outside the truncation")
        if not all(math.isfinite(v) for v in vals.values()):
            raise ValueError("non-finite moment value")
        mass = vals[(0,) * num_vars]
        if normalize:
            if not mass > 0:
                raise NormalizationError(f"cannot normalize: L(1) = {mass}")
            vals = {e: v / mass for e, v in vals.items()}
        elif abs(mass - 1.0) > NORMALIZATION_TOL:
            raise NormalizationError(f"L(1) = {mass!r}, expected 1 (pass normalize=True to rescale)")
        self.num_vars = num_vars
        self.max_degree = max_degree
        self._values = {e: vals[e] for e in basis}

    @classmethod
    def from_1d(cls, values: Sequence[float], *, normalize: bool = False) -> MomentSequence:
        return cls(1, len(values) - 1, {(k,): v for k, v in enumerate(values)}, normalize=normalize)

    def __getitem__(self, exponent: Sequence[int]) -> float:
        exponent = tuple(exponent)
        if sum(exponent) > self.max_degree:
            raise DegreeOverflowError(sum(exponent), self.max_degree)
        return self._values[exponent]

    def items(self):
        return self._values.items()

    def __eq__(self, other) -> bool:
        if not isinstance(other, MomentSequence):
            return NotImplemented
        return (self.num_vars, self.max_degree, self._values) == (other.num_vars, other.max_degree, other._values)

    def __repr__(self) -> str:
        return f"MomentSequence(num_vars={self.num_vars}, max_degree={self.max_degree})"

    def max_abs_moment(self) -> float:
        return max(abs(v) for v in self._values.values())

    def __call__(self, p: Polynomial) -> float:
        return eval_functional(self, p)

    def to_json(self) -> dict:
        return {"num_vars": self.num_vars, "max_degree": self.max_degree,
                "moments": [{"exponent": list(e), "value": v} for e, v in self._values.items()]}

    @classmethod
    def from_json(cls, data: Mapping, *, normalize: bool = False) -> MomentSequence:
        vals = {tuple(m["exponent"]): m["value"] for m in data["moments"]}
        return cls(int(data["num_vars"]), int(data["max_degree"]), vals, normalize=normalize)


def _powers(x: Fraction, top: int) -> list[Fraction]:
    out = [Fraction(1)]
    for _ in range(top):
        out.append(out[-1] * x)
    return out


def moments_from_measure(mu: AtomicMeasure, max_degree: int, *, normalize: bool = False) -> MomentSequence:
    """``L(x^alpha) = sum_i w_i * point_i^alpha`` for all ``|alpha| <= max_degree``."""
    if not mu.is_normalized():
        if not normalize:
            raise NormalizationError(f"measure has total mass {mu.total_mass!r}; pass normalize=True")
        mu = mu.normalized()
    # exact rational accumulation, rounded once per moment
    atoms = [([Fraction(x) for x in pt], Fraction(w)) for pt, w in mu.atoms]
    powers = [[_powers(xi, max_degree) for xi in pt] for pt, _ in atoms]
    values = {}
    for exp in monomials_upto(mu.num_vars, max_degree):
        total = Fraction(0)
        for (_, w), pw in zip(atoms, powers):
            term = w
            for i, e in enumerate(exp):
                if e:
                    term *= pw[i][e]
            total += term
        values[exp] = float(total)
    values[(0,) * mu.num_vars] = 1.0
    return MomentSequence(mu.num_vars, max_degree, values)


def uniform_interval_moments(max_degree: int) -> MomentSequence:
    """Moments of the normalized Lebesgue measure on [-1, 1]: 1/(k+1) for even k, 0 for odd."""
    return MomentSequence.from_1d([1.0 / (k + 1) if k % 2 == 0 else 0.0 for k in range(max_degree + 1)])


def gauss_legendre_measure(num_nodes: int) -> AtomicMeasure:
    """Atomic measure matching the uniform probability on [-1, 1] up to degree 2*num_nodes - 1."""
    nodes, weights = np.polynomial.legendre.leggauss(num_nodes)
    return AtomicMeasure(1, tuple(((float(x),), float(w) / 2.0) for x, w in zip(nodes, weights)))


def eval_functional(L: MomentSequence, p: Polynomial) -> float:
    if p.num_vars != L.num_vars:
        raise VariableCountError(f"polynomial has {p.num_vars} variables, moments have {L.num_vars}")
    if p.degree > L.max_degree:
        raise DegreeOverflowError(p.degree, L.max_degree, "eval_functional")
    values = L._values
    return exact_dot((c, values[e]) for e, c in p.items())


@dataclass(frozen=True)
class MomentMatrix:
    basis: tuple[Exponent, ...]
    entries: np.ndarray
    shift: Polynomial

    @property
    def size(self) -> int:
        return len(self.basis)


def moment_matrix(L: MomentSequence, d: int, q: Polynomial | None = None) -> MomentMatrix:
    """Matrix ``[L(q * x^(alpha+beta))]`` over the graded-lex basis of degree <= d.

    ``q = 1`` (the default) gives the plain moment matrix; any other ``q`` gives
    the localizing matrix of ``q``.
    """
    if q is None:
        q = Polynomial.one(L.num_vars)
    if q.num_vars != L.num_vars:
        raise VariableCountError(f"shift has {q.num_vars} variables, moments have {L.num_vars}")
    need = 2 * d + q.degree
    if need > L.max_degree:
        raise DegreeOverflowError(need, L.max_degree, "moment_matrix")
    basis = monomials_upto(L.num_vars, d)
    n = len(basis)
    M = np.empty((n, n))
    vals = L._values
    qterms = list(q.items())
    for i, a in enumerate(basis):
        for j in range(i, n):
            b = basis[j]
            ab = tuple(x + y for x, y in zip(a, b))
            v = math.fsum(c * vals[tuple(x + y for x, y in zip(ab, g))] for g, c in qterms)
            M[i, j] = M[j, i] = v
    return MomentMatrix(basis, M, q)


@dataclass(frozen=True)
class PsdResult:
    is_psd: bool
    min_eigenvalue: float
    max_abs_eigenvalue: float
    threshold: float
    witness_vector: np.ndarray | None = None
    witness: Polynomial | None = None

    def __bool__(self) -> bool:
        return self.is_psd

    def to_json(self) -> dict:
        return {"psd": self.is_psd, "min_eigenvalue": self.min_eigenvalue,
                "max_abs_eigenvalue": self.max_abs_eigenvalue, "threshold": self.threshold,
                "witness": None if self.witness is None else str(self.witness)}


def is_psd(M: MomentMatrix | np.ndarray, tol: float = DEFAULT_PSD_TOL) -> PsdResult:
    """PSD test by symmetric eigendecomposition.

    Passes iff ``lambda_min >= -tol * max(1, max |lambda|)``.  On failure the
    eigenvector of ``lambda_min`` is returned, and for a :class:`MomentMatrix`
    also as the polynomial ``sum_alpha v_alpha x^alpha``.
    """
    A = M.entries if isinstance(M, MomentMatrix) else np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("square matrix required")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if A.size == 0:
        return PsdResult(True, 0.0, 0.0, 0.0)
    A = 0.5 * (A + A.T)
    evals, evecs = np.linalg.eigh(A)
    lam_min = float(evals[0])
    scale = float(np.max(np.abs(evals)))
    threshold = -tol * max(1.0, scale)
    if lam_min >= threshold:
        return PsdResult(True, lam_min, scale, threshold)
    v = evecs[:, 0]
    k = int(np.argmax(np.abs(v)))
    if v[k] < 0:
        v = -v
    # scrub eigensolver noise so the witness polynomial reads cleanly
    v = np.where(np.abs(v) < 1e-14, 0.0, v)
    witness = None
    if isinstance(M, MomentMatrix):
        witness = Polynomial(M.shift.num_vars, {e: c for e, c in zip(M.basis, v)})
    return PsdResult(False, lam_min, scale, threshold, v, witness)


@dataclass(frozen=True)
class Violation:
    label: str
    value: float
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"label": self.label, "value": self.value, **self.params}


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a finitely truncated positivity check ("verified to degree N")."""

    passed: bool
    verified_degree: int
    checked: int
    violations: tuple[Violation, ...] = ()

    def __bool__(self) -> bool:
        return self.passed

    @property
    def summary(self) -> str:
        if self.passed:
            return f"verified to degree {self.verified_degree} ({self.checked} conditions)"
        return f"failed: {len(self.violations)} of {self.checked} conditions violated"

    def to_json(self) -> dict:
        return {"passed": self.passed, "verified_degree": self.verified_degree,
                "checked": self.checked, "summary": self.summary,
                "violations": [v.to_json() for v in self.violations]}


def check_binomial_cone(L: MomentSequence, a: Polynomial, T: float, budget: int,
                        tol: float = DEFAULT_PSD_TOL) -> CheckResult:
    """Check ``L((T - a)^p (T + a)^q) >= -tol`` for all ``(p + q) * deg(a) <= budget``.

    For constant ``a`` the exponents are capped at ``p + q <= budget``.
    """
    if budget > L.max_degree:
        raise DegreeOverflowError(budget, L.max_degree, "check_binomial_cone")
    step = max(a.degree, 1)
    top = budget // step
    violations = []
    checked = 0
    for total in range(top + 1):
        for p in range(total, -1, -1):
            q = total - p
            value = eval_functional(L, binomial_product(T, a, p, q))
            checked += 1
            if value < -tol:
                violations.append(Violation(f"p={p},q={q}", value, {"p": p, "q": q}))
    return CheckResult(not violations, budget, checked, tuple(violations))


def check_ball_criterion(L: MomentSequence, budget: int, tol: float = DEFAULT_PSD_TOL) -> CheckResult:
    """Evaluate ``L`` on every unit-ball cone generator of degree <= budget."""
    from .certify import enumerate_basis

    if budget > L.max_degree:
        raise DegreeOverflowError(budget, L.max_degree, "check_ball_criterion")
    basis = enumerate_basis("ball", L.num_vars, budget)
    violations = []
    for label, term in basis.terms:
        value = eval_functional(L, term)
        if value < -tol:
            violations.append(Violation(label, value, {"term": str(term)}))
    return CheckResult(not violations, budget, len(basis.terms), tuple(violations))
