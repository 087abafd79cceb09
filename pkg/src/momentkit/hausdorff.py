"""One-dimensional compact moment problems for the marginals ``n -> L(a^n)``.

``recover_atoms`` reconstructs a finitely atomic measure from its power
moments.  The work is done in the Chebyshev basis after rescaling the data to
[-1, 1]: Gram matrices ``[L(T_j T_k)]`` are far better conditioned than the
raw Hankel matrices ``[f(j+k)]`` once atoms get close together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .errors import DegreeOverflowError, NotAMomentSequenceError, RankDetectionError, RecoveryError
from .moments import DEFAULT_PSD_TOL, MomentSequence, PsdResult, eval_functional, is_psd
from .poly import Polynomial
from .vnorm import ratio_unresolved

DEFAULT_RANK_TOL = 1e-8
IMAG_TOL = 1e-8


class Sequence1D:
    """Values ``f(0), ..., f(N)`` of a candidate moment function on N0, with ``f(0) = 1``.

    ``scales`` optionally carries, per index, the magnitude that cancellation
    errors in ``f(n)`` are relative to (set by :func:`marginal`).  It is
    metadata: not serialized and not part of equality.
    """

    __slots__ = ("values", "scales")

    def __init__(self, values: Sequence[float], *, normalize: bool = False,
                 scales: Sequence[float] | None = None):
        vals = [float(v) for v in values]
        if len(vals) < 3:
            raise ValueError(f"need at least 3 values, got {len(vals)}")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("non-finite sequence value")
        if normalize:
            if not vals[0] > 0:
                raise NotAMomentSequenceError(f"cannot normalize: f(0) = {vals[0]}")
            vals = [v / vals[0] for v in vals]
        elif abs(vals[0] - 1.0) > 1e-12:
            raise ValueError(f"f(0) = {vals[0]!r}, expected 1")
        self.values = tuple(vals)
        if scales is not None and len(scales) != len(vals):
            raise ValueError("scales must match values in length")
        self.scales = None if scales is None else tuple(float(v) for v in scales)

    @property
    def N(self) -> int:
        return len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    def __eq__(self, other) -> bool:
        return isinstance(other, Sequence1D) and self.values == other.values

    def __repr__(self) -> str:
        return f"Sequence1D({list(self.values)})"

    def to_json(self) -> dict:
        return {"values": list(self.values)}

    @classmethod
    def from_json(cls, data) -> Sequence1D:
        return cls(data["values"])


def marginal(L: MomentSequence, a: Polynomial, N: int) -> Sequence1D:
    """``[L(a^0), ..., L(a^N)]``."""
    if N * a.degree > L.max_degree:
        raise DegreeOverflowError(N * a.degree, L.max_degree, "marginal")
    out, scales = [], []
    cur = Polynomial.one(a.num_vars)
    for n in range(N + 1):
        if n:
            cur = cur * a
        out.append(eval_functional(L, cur))
        scales.append(math.fsum(abs(c * L[e]) for e, c in cur.items()))
    return Sequence1D(out, scales=scales)


def hankel(f: Sequence1D | Sequence[float], d: int) -> np.ndarray:
    vals = np.asarray(f.values if isinstance(f, Sequence1D) else f, dtype=float)
    if 2 * d >= len(vals):
        raise DegreeOverflowError(2 * d, len(vals) - 1, "hankel")
    idx = np.arange(d + 1)
    return vals[idx[:, None] + idx[None, :]]


@dataclass(frozen=True)
class HankelCheck:
    passed: bool
    verified_degree: int
    failing_d: int | None = None
    result: PsdResult | None = None

    def __bool__(self) -> bool:
        return self.passed

    @property
    def witness(self) -> np.ndarray | None:
        """Coefficients ``c`` with ``sum c_j c_k f(j+k) < 0`` when the check failed."""
        return None if self.result is None else self.result.witness_vector

    def to_json(self) -> dict:
        w = self.witness
        return {"passed": self.passed, "verified_degree": self.verified_degree, "failing_d": self.failing_d,
                "min_eigenvalue": None if self.result is None else self.result.min_eigenvalue,
                "witness": None if w is None else w.tolist()}


def is_psd_on_N0(f: Sequence1D, tol: float = DEFAULT_PSD_TOL) -> HankelCheck:
    """PSD test of every Hankel matrix ``[f(j+k)]_{0<=j,k<=d}`` with ``2d <= N``."""
    for d in range(f.N // 2 + 1):
        res = is_psd(hankel(f, d), tol)
        if not res:
            return HankelCheck(False, f.N, d, res)
    return HankelCheck(True, f.N)


def _ratio_bound(vals: Sequence[float], scales: Sequence[float] | None = None) -> float:
    floor = 1e-13 * max(abs(v) for v in vals)
    best = 0.0
    for n in range((len(vals) - 1) // 2):
        den, num = vals[2 * n], vals[2 * n + 2]
        if den <= floor:
            continue
        # same resolution rule as vnorm_ratio when the cancellation scales are known
        if scales is not None and n > 0 and ratio_unresolved(num, den, scales[2 * n + 2], scales[2 * n]):
            continue
        best = max(best, num / den)
    return math.sqrt(max(best, 0.0))


def interval_bound(f: Sequence1D, tol: float = DEFAULT_PSD_TOL) -> float:
    """Smallest ``b`` with ``f(2n+2) <= b^2 f(2n)`` for every available ``n``."""
    check = is_psd_on_N0(f, tol)
    if not check:
        raise NotAMomentSequenceError(
            f"sequence is not positive semidefinite on N0 (Hankel size {check.failing_d + 1})")
    return _ratio_bound(f.values, f.scales)


@dataclass(frozen=True)
class Recovered1D:
    atoms: tuple[tuple[float, float], ...]  # (location, weight), sorted by location
    residual: float
    rank: int
    condition: float = 1.0

    @property
    def locations(self) -> np.ndarray:
        return np.array([x for x, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])

    def moments(self, N: int) -> np.ndarray:
        x, w = self.locations, self.weights
        return np.array([math.fsum(w * x ** n) for n in range(N + 1)])

    def to_json(self) -> dict:
        return {"atoms": [{"location": x, "weight": w} for x, w in self.atoms],
                "residual": self.residual, "rank": self.rank, "condition": self.condition}


def _cheb_moments(g: np.ndarray) -> np.ndarray:
    # tau_k = L(T_k) as combinations of the power moments g
    n = len(g)
    tau = np.empty(n)
    for k in range(n):
        coef = cheb.cheb2poly(np.eye(k + 1)[k])
        tau[k] = math.fsum(coef * g[: k + 1])
    return tau


def _cheb_gram(tau: np.ndarray, m: int) -> np.ndarray:
    # T_j T_k = (T_{j+k} + T_{|j-k|}) / 2
    j = np.arange(m + 1)
    return 0.5 * (tau[j[:, None] + j[None, :]] + tau[np.abs(j[:, None] - j[None, :])])


def _cheb_vandermonde(x: np.ndarray, N: int) -> np.ndarray:
    return cheb.chebvander(x, N).T  # rows k, columns atoms


def _refine(x: np.ndarray, w: np.ndarray, tau: np.ndarray, iters: int = 8):
    """Gauss-Newton on ``sum_i w_i T_k(x_i) = tau_k``; keeps the best iterate."""
    N = len(tau) - 1
    r = len(x)

    def resid(x, w):
        return _cheb_vandermonde(x, N) @ w - tau

    derivs = [cheb.chebder(np.eye(N + 1)[k]) for k in range(N + 1)]
    best = (np.max(np.abs(resid(x, w))), x, w)
    for _ in range(iters):
        V = _cheb_vandermonde(x, N)
        dV = np.array([cheb.chebval(x, d) * np.ones(r) for d in derivs])
        J = np.hstack([dV * w[None, :], V])
        step, *_ = np.linalg.lstsq(J, -resid(x, w), rcond=None)
        x = x + step[:r]
        w = w + step[r:]
        err = np.max(np.abs(resid(x, w)))
        if err < best[0]:
            best = (err, x, w)
        else:
            break
    return best[1], best[2]


def _scale(vals: Sequence[float]) -> float:
    s = _ratio_bound(vals)
    for n in range(1, len(vals)):
        s = max(s, abs(vals[n]) ** (1.0 / n))
    return s if s > 1e-300 else 1.0


def recover_atoms(f: Sequence1D, rank_tol: float = DEFAULT_RANK_TOL) -> Recovered1D:
    """Finitely atomic representing measure of ``f``.

    Steps: rescale to [-1, 1]; detect the rank ``r`` of the Chebyshev Gram
    matrix by a singular-value threshold ``rank_tol * sigma_max``; take the
    kernel polynomial of the leading ``(r+1) x (r+1)`` block; its roots
    (colleague-matrix eigenvalues) are the atom locations; weights by least
    squares over all ``N+1`` moments; a short Gauss-Newton polish.
    """
    vals = np.asarray(f.values, dtype=float)
    N = len(vals) - 1
    scale = _scale(vals)
    g = vals / scale ** np.arange(N + 1)
    tau = _cheb_moments(g)
    m = N // 2
    G = _cheb_gram(tau, m)
    sv = np.linalg.svd(G, compute_uv=False)
    if not sv[0] > 0:
        raise RankDetectionError("Gram matrix vanishes")
    big = sv >= rank_tol * sv[0]
    r = int(np.count_nonzero(big))
    if not np.all(big[:r]):
        raise RankDetectionError("singular values are not separated by the rank threshold")
    if r > m or 2 * r > N:
        raise RankDetectionError(
            f"detected rank {r} needs at least {2 * r} moments beyond f(0); have N = {N} "
            "(sequence may not be finitely atomic)")
    if r < len(sv):
        gap = sv[r] / sv[r - 1]
        if gap > math.sqrt(rank_tol):
            raise RankDetectionError(
                f"ambiguous rank: sigma_{r + 1}/sigma_{r} = {gap:.3g} exceeds sqrt(rank_tol)")
    # kernel vector of the (r+1)x(r+1) block: coefficients of a degree-r polynomial vanishing on the atoms
    evals, evecs = np.linalg.eigh(G[: r + 1, : r + 1])
    kernel = evecs[:, 0]
    roots = cheb.chebroots(kernel)
    if np.max(np.abs(np.imag(roots)), initial=0.0) > IMAG_TOL:
        raise RecoveryError(f"kernel polynomial has complex roots {roots}")
    x = np.sort(np.real(roots))
    V = _cheb_vandermonde(x, N)
    condition = float(np.linalg.cond(V))
    w, *_ = np.linalg.lstsq(V, tau, rcond=None)
    x, w = _refine(x, w, tau)
    order = np.argsort(x)
    x, w = x[order] * scale + 0.0, w[order]
    if np.any(w <= 0):
        raise RecoveryError(f"non-positive recovered weight {w.min()!r} (condition {condition:.3g})")
    rec = Recovered1D(tuple(zip(x.tolist(), w.tolist())), 0.0, r, condition)
    residual = float(np.max(np.abs(rec.moments(N) - vals)))
    return Recovered1D(rec.atoms, residual, r, condition)


@dataclass(frozen=True)
class RecoveryReport:
    max_error: float
    errors: tuple[float, ...]

    def to_json(self) -> dict:
        return {"max_error": self.max_error, "errors": list(self.errors)}


def verify_recovery(f: Sequence1D, r: Recovered1D) -> RecoveryReport:
    """Per-index absolute moment mismatch of the recovered atoms against ``f``."""
    got = r.moments(f.N)
    errs = tuple(float(abs(a - b)) for a, b in zip(got, f.values))
    return RecoveryReport(max(errs), errs)
