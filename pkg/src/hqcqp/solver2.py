"""Exact solver for one- and two-constraint reduced problems.

For two constraints the minimum of max(c1(u), c2(u)) over unit u falls in
one of three regimes, decided from the minimum eigenpairs x1, x2 of the two
constraint matrices:

  case 1: c1(x1) > c2(x1)  ->  the optimum is lambda_min(C1) at u = x1;
  case 2: c2(x2) > c1(x2)  ->  symmetric, lambda_min(C2) at u = x2;
  case 3: otherwise the two forms are equal at the optimum, and the value is
          max over real t of lambda_min(C1 + t (C1 - C2)), a concave scalar
          maximization handled by dichotomous search.

The case-3 search finishes with two sharpening steps. A Newton-style kink
polish solves for the crossing of the eigenvalue branches that meet at the
maximizer, using per-branch slopes v^H (C1 - C2) v. Then, because the
minimum eigenvalue is typically degenerate exactly at the kink, the returned
direction is rotated inside the near-degenerate eigenspace so that both
constraint forms agree: with B the difference form restricted to the
eigenspace, mixing the extreme eigenvectors of B with tan^2(theta) =
-lambda_min(B)/lambda_max(B) zeroes the restricted form exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import hermitian, oracle
from .hermitian import hermitian_eigh, min_eigenpair, quadratic_form
from .problem import BINDING_TOL
from .search import SearchConfig, dichotomous_max, initial_interval

# Eigenvalues within this many interval-thresholds (scaled by the direction
# matrix norm) of the minimum are treated as one crossing cluster.
CLUSTER_FACTOR = 10.0


@dataclass
class SolveFragment:
    """Reduced-problem optimum before recovery to the original variables."""

    c_star: float
    u: np.ndarray
    case_tag: str
    multipliers: tuple
    trace: tuple
    flags: tuple = field(default_factory=tuple)


def solve_one(c1) -> SolveFragment:
    """One constraint: the optimum is the minimum eigenpair of C1."""
    c1 = hermitian.require_hermitian(c1, "C1")
    pair = min_eigenpair(c1)
    value = quadratic_form(c1, pair.vector)
    return SolveFragment(value, pair.vector, "one_constraint", (), ((0, value),))


def _classify(c1, c2):
    e1 = min_eigenpair(c1)
    e2 = min_eigenpair(c2)
    # both sides evaluated through the same code path so that coincident
    # constraints compare as exactly equal; knife-edge ties go to case 3,
    # whose machinery returns the shared eigenvector unchanged
    tie = 1e-12 * (1.0 + max(hermitian.frobenius(c1), hermitian.frobenius(c2)))
    c1_at_x1 = quadratic_form(c1, e1.vector)
    c2_at_x1 = quadratic_form(c2, e1.vector)
    c2_at_x2 = quadratic_form(c2, e2.vector)
    c1_at_x2 = quadratic_form(c1, e2.vector)
    if c1_at_x1 > c2_at_x1 + tie:
        return "case1", e1, e2
    if c2_at_x2 > c1_at_x2 + tie:
        return "case2", e1, e2
    return "case3", e1, e2


def classify_case(c1, c2) -> str:
    """Which of the three two-constraint regimes applies ('case1'..'case3').

    Equality in both comparisons routes to case 3, where the equalizing
    machinery returns the same eigenvector unchanged.
    """
    c1 = hermitian.require_hermitian(c1, "C1")
    c2 = hermitian.require_hermitian(c2, "C2")
    if c1.shape != c2.shape:
        raise hermitian.DimensionError("C1 and C2 must share a dimension")
    return _classify(c1, c2)[0]


def lambda_of_t(a1, a2, t: float):
    """Minimum eigenpair of a1 + t * a2."""
    w, v = hermitian_eigh(np.asarray(a1) + t * np.asarray(a2))
    return float(w[0]), v[:, 0].copy()


def _cluster_size(w: np.ndarray, ctol: float) -> int:
    k = 1
    while k < w.shape[0] and w[k] - w[0] <= ctol:
        k += 1
    return k


def _kink_polish_1d(a1, a2, t, w, v, cfg: SearchConfig, dir_scale: float):
    """Move t to the crossing of the eigenvalue branches meeting at the kink.

    Branch i behaves like w[i] + slope_i * dt with slope_i = v_i^H a2 v_i,
    so the crossing with the lowest branch sits at dt = (w[j] - w[0]) /
    (slope_0 - slope_j). Steps are clamped to the search resolution and only
    kept when the minimum eigenvalue does not decrease.
    """
    thr = cfg.interval_threshold
    ctol = CLUSTER_FACTOR * thr * (1.0 + dir_scale)
    for _ in range(4):
        k = _cluster_size(w, ctol)
        if k < 2:
            break
        slopes = [quadratic_form(a2, v[:, i]) for i in range(k)]
        s0 = slopes[0]
        best_j = 0
        best_den = 0.0
        for j in range(1, k):
            den = s0 - slopes[j]
            opposite = slopes[j] * s0 < 0.0
            score = abs(den) * (2.0 if opposite else 1.0)
            if score > best_den:
                best_den = score
                best_j = j
        if best_j == 0 or abs(s0 - slopes[best_j]) <= 1e-9 * (1.0 + dir_scale):
            break
        delta = (w[best_j] - w[0]) / (s0 - slopes[best_j])
        cap = 10.0 * thr
        delta = max(-cap, min(cap, delta))
        if delta == 0.0:
            break
        w2, v2 = hermitian_eigh(np.asarray(a1) + (t + delta) * np.asarray(a2))
        if w2[0] >= w[0]:
            t, w, v = t + delta, w2, v2
        else:
            break
    return t, w, v


def _equalize_single_form(vc: np.ndarray, a2, gscale: float):
    """Unit vector in span(vc) with vanishing a2-form, or (first column, False).

    Tries growing prefixes of the (eigenvalue-ordered) cluster basis so the
    amount of mixing stays minimal.
    """
    b = vc.conj().T @ np.asarray(a2) @ vc
    b = hermitian.hermitianize(b)
    k = b.shape[0]
    tol0 = 1e-11 * (1.0 + gscale)
    for ksub in range(2, k + 1):
        wb, vb = hermitian_eigh(b[:ksub, :ksub])
        lo, hi = wb[0], wb[-1]
        if lo > tol0 or hi < -tol0:
            continue
        if abs(lo) <= tol0:
            c = vb[:, 0]
        elif abs(hi) <= tol0:
            c = vb[:, -1]
        else:
            theta = math.atan2(math.sqrt(-lo), math.sqrt(hi))
            c = math.cos(theta) * vb[:, 0] + math.sin(theta) * vb[:, -1]
        u = vc[:, :ksub] @ c
        u = u / np.linalg.norm(u)
        if abs(quadratic_form(a2, u)) <= 1e-8 * (1.0 + gscale):
            return u, True
    return vc[:, 0].copy(), False


def pair_equality_search(c1, c2, cfg: SearchConfig):
    """Case-3 machinery: maximize lambda_min(C1 + t (C1 - C2)) over t and
    return a unit u with (near-)equal constraint forms at the maximizer.

    Returns (u, t_star, trace, flags); t_star is None when the search was
    bypassed (coincident constraints or an empty equality set).
    """
    a1 = np.asarray(c1, dtype=np.complex128)
    a2 = hermitian.hermitianize(a1 - np.asarray(c2, dtype=np.complex128))
    dir_scale = hermitian.frobenius(a2)
    base_scale = hermitian.frobenius(c1) + hermitian.frobenius(c2) + 1.0
    if dir_scale <= 1e-13 * base_scale:
        pair = min_eigenpair(c1)
        return pair.vector, None, ((0, pair.value),), ("coincident_constraints",)
    wa2, _ = hermitian_eigh(a2)
    gtol = 1e-12 * (1.0 + dir_scale)
    if wa2[0] > gtol or wa2[-1] < -gtol:
        # the difference form never vanishes: no direction equalizes the
        # two constraints, so this branch cannot host the optimum
        pair = min_eigenpair(c1)
        return pair.vector, None, ((0, pair.value),), ("pair_equality_empty",)

    interval = initial_interval(a1, cfg)
    flags = ("degenerate_interval",) if interval.degenerate else ()

    def lam(t: float) -> float:
        return lambda_of_t(a1, a2, t)[0]

    res = dichotomous_max(lam, (interval.lo, interval.hi), cfg)
    t = float(res.t_star)
    w, v = hermitian_eigh(a1 + t * a2)
    t, w, v = _kink_polish_1d(a1, a2, t, w, v, cfg, dir_scale)
    ctol = CLUSTER_FACTOR * cfg.interval_threshold * (1.0 + dir_scale)
    k = _cluster_size(w, ctol)
    if k > 2:
        flags = flags + ("eigen_multiplicity",)
    if k >= 2:
        u, ok = _equalize_single_form(v[:, :k], a2, dir_scale)
        if not ok:
            flags = flags + ("equalization_failed",)
    else:
        u = v[:, 0].copy()
    return u, t, res.trace, flags


def solve_two(c1, c2, cfg: SearchConfig | None = None) -> SolveFragment:
    """Two-constraint optimum of max(c1(u), c2(u)) over unit u."""
    cfg = cfg or SearchConfig()
    c1 = hermitian.require_hermitian(c1, "C1")
    c2 = hermitian.require_hermitian(c2, "C2")
    if c1.shape != c2.shape:
        raise hermitian.DimensionError("C1 and C2 must share a dimension")
    tag, e1, e2 = _classify(c1, c2)
    if tag == "case1":
        u = e1.vector
        value = max(quadratic_form(c1, u), quadratic_form(c2, u))
        return SolveFragment(value, u, "two_case1", (), ((0, value),))
    if tag == "case2":
        u = e2.vector
        value = max(quadratic_form(c1, u), quadratic_form(c2, u))
        return SolveFragment(value, u, "two_case2", (), ((0, value),))

    u, t_star, trace, flags = pair_equality_search(c1, c2, cfg)
    q1 = quadratic_form(c1, u)
    q2 = quadratic_form(c2, u)
    if abs(q1 - q2) > BINDING_TOL and t_star is not None:
        # eigenspace rotation could not equalize the forms; fall back to a
        # direct local descent of the max form from the best point found
        stack = np.stack([c1, c2]).astype(np.complex128)
        u, _, _ = oracle.refine_on_sphere(stack, u)
        q1 = quadratic_form(c1, u)
        q2 = quadratic_form(c2, u)
        flags = flags + ("binding_refined",)
    value = max(q1, q2)
    u = hermitian.phase_normalize(u)
    trace = tuple(trace)
    if trace and value > trace[-1][1]:
        trace = trace + ((trace[-1][0] + 1, value),)
    multipliers = (float(t_star),) if t_star is not None else ()
    return SolveFragment(value, u, "two_case3", multipliers, trace, flags)
