"""Truncated estimates of the submultiplicative function v_L.

For a normalized positive semidefinite functional ``L`` and an element ``a``::

    v_L(a)^2 = sup_{n >= 0, L(a^{2n}) != 0}  L(a^{2n+2}) / L(a^{2n})

and the same value is the supremum of the root form ``L(a^{2n})^{1/(2n)}``.
From finitely many moments only lower estimates are available; every estimate
carries the budget it was computed with.  When ``L`` comes from a known atomic
measure the exact value is ``max_atoms |a(point)|`` (:func:`atomic_vnorm`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DegreeOverflowError, NotAMomentSequenceError
from .moments import AtomicMeasure, MomentSequence, eval_functional
from .poly import Polynomial, sum_of_squares

FLOOR_FACTOR = 1e-13
NEGATIVE_TOL = 1e-9
ROUNDING_FACTOR = 1e-13
# rounding per unit of sum |c_e L(x^e)| (moments and products are correctly rounded)
UNIT_ERROR = 4 * 2.0 ** -53
VNORM_RESOLUTION = 1e-10
UNBOUNDED_WINDOW = 5
UNBOUNDED_LEVEL = 1e6


@dataclass(frozen=True)
class VnormEstimate:
    value: float
    kind: str  # "ratio" or "root"
    level: int
    budget: int
    denominator_floor: float
    # per-level values; None where a level was skipped (zero denominator)
    sequence: tuple[float | None, ...] = ()
    unbounded_suspect: bool = False
    # levels dropped because rounding swamps the ratio (see _unresolved)
    unresolved: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {"kind": self.kind, "value": self.value, "level": self.level, "budget": self.budget,
                "sequence": list(self.sequence), "denominator_floor": self.denominator_floor,
                "unbounded_suspect": self.unbounded_suspect, "unresolved_levels": list(self.unresolved)}


def denominator_floor(L: MomentSequence) -> float:
    return FLOOR_FACTOR * L.max_abs_moment()


def _even_power_moments(L: MomentSequence, a: Polynomial, top: int) -> tuple[list[float], list[float]]:
    """``[L(a^0), L(a^2), ..., L(a^{2*top})]`` and ``sum_e |c_e L(x^e)|`` for each power.

    Powers are built one factor of ``a`` at a time, the same way as the 1D
    marginal sequence, so both code paths see bit-identical moments.  The
    absolute sums are the scale that cancellation errors are relative to.
    """
    cur = Polynomial.one(a.num_vars)
    out = [eval_functional(L, cur)]
    mags = [abs(out[0])]
    for _ in range(top):
        cur = cur * a * a
        out.append(eval_functional(L, cur))
        mags.append(_abs_functional(L, cur))
    return out, mags


def _abs_functional(L: MomentSequence, p: Polynomial) -> float:
    return math.fsum(abs(c * L[e]) for e, c in p.items())


def ratio_unresolved(num: float, den: float, mag_num: float, mag_den: float) -> bool:
    """True when rounding can move ``sqrt(num/den)`` by more than ``VNORM_RESOLUTION``
    times the magnitude scale ``sqrt(mag_num/mag_den)`` of the element."""
    if mag_num == 0.0:
        return False
    r = max(num, 0.0) / den
    err = UNIT_ERROR * (mag_num + r * mag_den) / den
    spread = math.sqrt(r + err) - math.sqrt(max(r - err, 0.0))
    return spread > VNORM_RESOLUTION * math.sqrt(mag_num / mag_den)


def _unbounded(values: Sequence[float | None]) -> bool:
    tail = [v for v in values if v is not None][-UNBOUNDED_WINDOW:]
    if len(tail) < UNBOUNDED_WINDOW:
        return False
    increasing = all(x < y for x, y in zip(tail, tail[1:]))
    return increasing and tail[-1] > UNBOUNDED_LEVEL


def _ratio_sup(moments: Sequence[float], floor: float, tol: float, what: str,
               mags: Sequence[float] | None = None, resolve: bool = False):
    """Largest consecutive ratio ``m[n+1]/m[n]`` over levels with ``m[n] > floor``.

    ``mags`` are the cancellation scales of the moments.  A ratio below
    ``-tol`` is an error unless its numerator lies within the rounding scale
    ``ROUNDING_FACTOR * mags[n+1]`` of zero, where it counts as 0.  With
    ``resolve`` set, levels ``n >= 1`` whose ratio is swamped by rounding are
    skipped like zero denominators; dropping a level never raises the
    estimate.  Level 0 is always kept: its denominator ``L(1)`` is exact.
    """
    mags = [0.0] * len(moments) if mags is None else mags
    best, best_level = 0.0, 0
    per_level: list[float | None] = []
    unresolved: list[int] = []
    for n in range(len(moments) - 1):
        den, num = moments[n], moments[n + 1]
        if den < -max(floor, ROUNDING_FACTOR * mags[n]):
            raise NotAMomentSequenceError(f"{what}: negative moment {den!r} at level {n}")
        if den <= floor:
            per_level.append(None)
            continue
        ratio = num / den
        if ratio < -tol and num < -ROUNDING_FACTOR * mags[n + 1]:
            raise NotAMomentSequenceError(f"{what}: negative ratio {ratio!r} at level {n}")
        if resolve and n > 0 and ratio_unresolved(num, den, mags[n + 1], mags[n]):
            per_level.append(None)
            unresolved.append(n)
            continue
        ratio = max(ratio, 0.0)
        per_level.append(ratio)
        if ratio > best:
            best, best_level = ratio, n
    return best, best_level, per_level, tuple(unresolved)


def vnorm_ratio(L: MomentSequence, a: Polynomial, budget: int, tol: float = NEGATIVE_TOL) -> VnormEstimate:
    """``sqrt(max_{n <= budget} L(a^{2n+2}) / L(a^{2n}))`` over levels with a nonzero denominator."""
    if budget < 0:
        raise ValueError("budget must be >= 0")
    need = (2 * budget + 2) * a.degree
    if need > L.max_degree:
        raise DegreeOverflowError(need, L.max_degree, "vnorm_ratio")
    floor = denominator_floor(L)
    moments, mags = _even_power_moments(L, a, budget + 1)
    best, level, ratios, skipped = _ratio_sup(moments, floor, tol, "vnorm_ratio", mags, resolve=True)
    seq = tuple(None if r is None else math.sqrt(r) for r in ratios)
    return VnormEstimate(math.sqrt(best), "ratio", level, budget, floor, seq, _unbounded(ratios), skipped)


def vnorm_root(L: MomentSequence, a: Polynomial, budget: int, tol: float = NEGATIVE_TOL) -> VnormEstimate:
    """``max_{1 <= n <= budget} L(a^{2n})^{1/(2n)}``."""
    if budget < 1:
        raise ValueError("root estimator needs budget >= 1")
    need = 2 * budget * a.degree
    if need > L.max_degree:
        raise DegreeOverflowError(need, L.max_degree, "vnorm_root")
    floor = denominator_floor(L)
    moments, mags = _even_power_moments(L, a, budget)
    best, level = 0.0, 1
    seq = []
    for n in range(1, budget + 1):
        m = moments[n]
        if m < -max(floor, tol, ROUNDING_FACTOR * mags[n]):
            raise NotAMomentSequenceError(f"vnorm_root: negative even moment {m!r} at level {n}")
        r = max(m, 0.0) ** (1.0 / (2 * n))
        seq.append(r)
        if r > best:
            best, level = r, n
    return VnormEstimate(best, "root", level, budget, floor, tuple(seq), _unbounded(seq))


def atomic_vnorm(mu: AtomicMeasure, a: Polynomial) -> float:
    """Exact v_L(a) for L integrating against ``mu``: the sup of |a| over the atoms."""
    return max(abs(a(pt)) for pt, _ in mu.atoms)


def power_bound_violations(L: MomentSequence, a: Polynomial, c: float, max_power: int,
                           eps: float = 1e-9) -> list[tuple[int, float]]:
    """Powers ``n <= max_power`` with ``|L(a^n)| > (c + eps)^n``."""
    if max_power * a.degree > L.max_degree:
        raise DegreeOverflowError(max_power * a.degree, L.max_degree, "power_bound_violations")
    bad = []
    cur = Polynomial.one(a.num_vars)
    for n in range(max_power + 1):
        if n:
            cur = cur * a
        v = eval_functional(L, cur)
        if abs(v) > (c + eps) ** n:
            bad.append((n, v))
    return bad


@dataclass(frozen=True)
class LawCheck:
    a: Polynomial
    b: Polynomial
    v_a: float
    v_b: float
    v_sum: float
    v_prod: float
    triangle_ok: bool
    submultiplicative_ok: bool

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "v_a": self.v_a, "v_b": self.v_b,
                "v_sum": self.v_sum, "v_prod": self.v_prod, "triangle_ok": self.triangle_ok,
                "submultiplicative_ok": self.submultiplicative_ok}


@dataclass(frozen=True)
class SeminormReport:
    mode: str  # "atomic" (exact values) or "truncated"
    checks: tuple[LawCheck, ...]
    caveat: str = ""

    @property
    def passed(self) -> bool:
        return all(c.triangle_ok and c.submultiplicative_ok for c in self.checks)

    def to_json(self) -> dict:
        return {"mode": self.mode, "passed": self.passed, "caveat": self.caveat,
                "checks": [c.to_json() for c in self.checks]}


def check_seminorm_laws(L: MomentSequence, samples: Sequence[tuple[Polynomial, Polynomial]],
                        budget: int, tol: float = 1e-9,
                        measure: AtomicMeasure | None = None) -> SeminormReport:
    """Check ``v(a+b) <= v(a)+v(b)`` and ``v(ab) <= v(a)v(b)`` on sample pairs.

    With ``measure`` given, exact atomic values are used.  Otherwise each side
    is a truncated lower estimate at ``budget``, so a reported violation may be
    an artifact of truncation rather than a genuine failure.
    """
    if measure is not None:
        v = lambda p: atomic_vnorm(measure, p)  # noqa: E731
        mode, caveat = "atomic", ""
    else:
        for a, b in samples:
            deg = max((a * b).degree, (a + b).degree)
            need = (2 * budget + 2) * deg
            if need > L.max_degree:
                raise DegreeOverflowError(need, L.max_degree, "check_seminorm_laws")
        v = lambda p: vnorm_ratio(L, p, budget).value  # noqa: E731
        mode = "truncated"
        caveat = (f"values are lower estimates at budget {budget}; "
                  "a violation may be an artifact of truncation")
    checks = []
    for a, b in samples:
        va, vb, vs, vp = v(a), v(b), v(a + b), v(a * b)
        checks.append(LawCheck(a, b, va, vb, vs, vp, vs <= va + vb + tol, vp <= va * vb + tol))
    return SeminormReport(mode, tuple(checks), caveat)


def support_bound(L: MomentSequence, generators: Sequence[Polynomial], budget: int,
                  tol: float = NEGATIVE_TOL) -> VnormEstimate:
    """Estimate of ``v_L(g_1^2 + ... + g_m^2)`` from consecutive power ratios.

    ``b = sum g_i^2`` is nonnegative at every real point, so ``n -> L(b^n)`` is
    log-convex for a moment functional and ``L(b^{n+1}) / L(b^n)`` increases to
    ``max_supp b``.  Uses ``L(b^0), ..., L(b^{budget+1})``.
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    b = sum_of_squares(generators)
    need = (budget + 1) * b.degree
    if need > L.max_degree:
        raise DegreeOverflowError(need, L.max_degree, "support_radius")
    floor = denominator_floor(L)
    moments = [eval_functional(L, Polynomial.one(b.num_vars))]
    mags = [abs(moments[0])]
    cur = Polynomial.one(b.num_vars)
    for _ in range(budget + 1):
        cur = cur * b
        moments.append(eval_functional(L, cur))
        mags.append(_abs_functional(L, cur))
    best, level, ratios, skipped = _ratio_sup(moments, floor, tol, "support_radius", mags, resolve=True)
    return VnormEstimate(best, "ratio", level, budget, floor, tuple(ratios), _unbounded(ratios), skipped)


def support_radius(L: MomentSequence, generators: Sequence[Polynomial], budget: int) -> float:
    """Squared radius ``R2`` with ``supp mu`` inside ``{sum g_i(x)^2 <= R2}`` (lower estimate)."""
    return support_bound(L, generators, budget).value


def generator_bounds(L: MomentSequence, generators: Sequence[Polynomial], budget: int) -> list[float]:
    """Per-generator bounds ``v_L(g_j) <= sqrt(v_L(sum g_i^2))``, from the truncated estimate."""
    r2 = support_radius(L, generators, budget)
    return [math.sqrt(r2)] * len(generators)


@dataclass(frozen=True)
class AgreementReport:
    root: tuple[float, ...]        # root(n) for n = 1..budget
    ratio_sup: tuple[float, ...]   # sqrt of the max ratio over levels 0..n-1
    gaps: tuple[float, ...]
    max_gap: float
    passed: bool

    def to_json(self) -> dict:
        return {"root": list(self.root), "ratio_sup": list(self.ratio_sup), "gaps": list(self.gaps),
                "max_gap": self.max_gap, "passed": self.passed}


def check_ratio_root_agreement(L: MomentSequence, a: Polynomial, budget: int,
                               tol: float = 1e-9) -> AgreementReport:
    """Compare both estimators at matched truncation, i.e. using moments up to ``L(a^{2n})``.

    ``root(n) <= ratio_sup(n)`` holds exactly since ``L(a^{2n})`` is the product
    of the first ``n`` ratios.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    need = 2 * budget * a.degree
    if need > L.max_degree:
        raise DegreeOverflowError(need, L.max_degree, "check_ratio_root_agreement")
    floor = denominator_floor(L)
    moments, mags = _even_power_moments(L, a, budget)
    # no resolution filter: the identity root(n) <= ratio_sup(n) is about the same computed numbers
    _, _, ratios, _ = _ratio_sup(moments, floor, NEGATIVE_TOL, "check_ratio_root_agreement", mags)
    root, ratio_sup, gaps = [], [], []
    best = 0.0
    for n in range(1, budget + 1):
        r = ratios[n - 1]
        if r is not None:
            best = max(best, r)
        rt = max(moments[n], 0.0) ** (1.0 / (2 * n))
        root.append(rt)
        ratio_sup.append(math.sqrt(best))
        gaps.append(rt - math.sqrt(best))
    max_gap = max(gaps)
    return AgreementReport(tuple(root), tuple(ratio_sup), tuple(gaps), max_gap, max_gap <= tol)
