"""Three-constraint solver by candidate enumeration.

At the optimum of min over unit u of max(c1, c2, c3) at least one constraint
is binding, which leaves seven geometric possibilities: all three forms
equal (one point), one of three pairs equal with the third below, or a
single form at its own minimum dominating the others. Each candidate yields
a direction u and the value max_k c_k(u); every such value is an upper bound
on the optimum, so the smallest of the seven is the answer.

The all-binding candidate maximizes lambda_min(C1 + t1 (C1-C2) + t2 (C1-C3))
over (t1, t2) with the alternating direction driver, then polishes the kink
(branch crossing solved from per-branch slopes) and rotates inside the
near-degenerate eigenspace to zero both difference forms at once. Pair
candidates reuse the two-constraint equality search verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels, hermitian, oracle
from .hermitian import hermitian_eigh, min_eigenpair, quadratic_form
from .problem import BINDING_TOL
from .search import SearchConfig, SearchError, alternating_max
from .solver2 import (
    CLUSTER_FACTOR,
    SolveFragment,
    _cluster_size,
    pair_equality_search,
)


@dataclass
class Candidate3:
    kind: str  # "single", "pair", "all"
    indices: tuple
    u: np.ndarray
    value: float
    multipliers: tuple
    trace: tuple
    flags: tuple = field(default_factory=tuple)


def _max_form(cs, u) -> float:
    return max(quadratic_form(c, u) for c in cs)


def candidate_single(cs, i: int) -> Candidate3:
    """Constraint i at its own minimum; the other forms just get evaluated."""
    pair = min_eigenpair(cs[i])
    u = pair.vector
    value = _max_form(cs, u)
    return Candidate3("single", (i,), u, value, (), ((0, value),))


def candidate_pair(cs, i: int, j: int, cfg: SearchConfig) -> Candidate3:
    """Constraints i and j equalized via the two-constraint search; the value
    includes the remaining form at the returned direction."""
    u, t_star, trace, flags = pair_equality_search(cs[i], cs[j], cfg)
    qi = quadratic_form(cs[i], u)
    qj = quadratic_form(cs[j], u)
    if abs(qi - qj) > BINDING_TOL and t_star is not None:
        stack = np.ascontiguousarray(np.stack([cs[i], cs[j]]), dtype=np.complex128)
        u, _, _ = oracle.refine_on_sphere(stack, u)
        flags = flags + ("binding_refined",)
    value = _max_form(cs, u)
    trace = tuple(trace)
    if trace and value > trace[-1][1]:
        trace = trace + ((trace[-1][0] + 1, value),)
    multipliers = (float(t_star),) if t_star is not None else ()
    return Candidate3("pair", (i, j), u, value, multipliers, trace, flags)


def _zero_mix_start(b: np.ndarray):
    """Coefficient vector zeroing the small Hermitian form b, if its extreme
    eigenvalues straddle zero."""
    wb, vb = hermitian_eigh(b)
    lo, hi = wb[0], wb[-1]
    if lo > 0.0 or hi < 0.0:
        return None
    theta = np.arctan2(np.sqrt(max(-lo, 0.0)), np.sqrt(max(hi, 1e-300)))
    return np.cos(theta) * vb[:, 0] + np.sin(theta) * vb[:, -1]


def _equalize_two_forms_subspace(vc: np.ndarray, a2, a3, gscale: float):
    """Unit vector in span(vc) zeroing both difference forms, or a fallback.

    Works on growing prefixes of the cluster basis; per prefix a compass
    descent of g2^2 + g3^2 runs from a handful of deterministic starts.
    """
    b2 = hermitian.hermitianize(vc.conj().T @ np.asarray(a2) @ vc)
    b3 = hermitian.hermitianize(vc.conj().T @ np.asarray(a3) @ vc)
    k = b2.shape[0]
    target = 1e-8 * (1.0 + gscale)
    best_u = None
    best_res = np.inf
    for ksub in range(2, k + 1):
        b2p = np.ascontiguousarray(b2[:ksub, :ksub])
        b3p = np.ascontiguousarray(b3[:ksub, :ksub])
        starts = []
        for b in (b2p, b3p):
            c = _zero_mix_start(b)
            if c is not None:
                starts.append(c)
        starts.append(np.ones(ksub, dtype=np.complex128) / np.sqrt(ksub))
        e0 = np.zeros(ksub, dtype=np.complex128)
        e0[0] = 1.0
        starts.append(e0)
        for c0 in starts:
            c = np.ascontiguousarray(c0, dtype=np.complex128)
            c = c / np.linalg.norm(c)
            _kernels.equalize_two_forms(b2p, b3p, c, 1e-10)
            u = vc[:, :ksub] @ c
            u = u / np.linalg.norm(u)
            res = max(abs(quadratic_form(a2, u)), abs(quadratic_form(a3, u)))
            if res < best_res:
                best_res = res
                best_u = u
            if res <= target:
                return u, True
    if best_u is None:
        best_u = vc[:, 0].copy()
    return best_u, best_res <= 100.0 * target


def _kink_polish_2d(a1, a2, a3, t, cfg: SearchConfig, dir_scale: float):
    """Solve the local crossing of the eigenvalue branches meeting at the
    2-D maximizer from their first-order model, clamped to the search
    resolution and kept only when the minimum eigenvalue does not drop."""
    a1 = np.asarray(a1)
    a2 = np.asarray(a2)
    a3 = np.asarray(a3)
    thr = cfg.interval_threshold
    ctol = CLUSTER_FACTOR * thr * (1.0 + dir_scale)
    t = np.array(t, dtype=float)
    w, v = hermitian_eigh(a1 + t[0] * a2 + t[1] * a3)
    for _ in range(5):
        k = _cluster_size(w, ctol)
        if k < 2:
            break
        grads = [
            np.array([quadratic_form(a2, v[:, i]), quadratic_form(a3, v[:, i])])
            for i in range(k)
        ]
        rows = []
        rhs = []
        for i in range(1, k):
            rows.append(grads[0] - grads[i])
            rhs.append(w[i] - w[0])
        rows = np.array(rows)
        rhs = np.array(rhs)
        if np.linalg.norm(rows) <= 1e-9 * (1.0 + dir_scale):
            break
        delta, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
        norm = np.linalg.norm(delta)
        cap = 10.0 * thr
        if norm > cap:
            delta *= cap / norm
        if norm == 0.0:
            break
        w2, v2 = hermitian_eigh(a1 + (t[0] + delta[0]) * a2 + (t[1] + delta[1]) * a3)
        if w2[0] >= w[0]:
            t = t + delta
            w, v = w2, v2
        else:
            break
    return t, w, v


def candidate_all(cs, cfg: SearchConfig) -> Candidate3:
    """All three constraints equalized: alternating 2-D eigenvalue
    maximization, kink polish, then a two-form eigenspace equalization."""
    a1 = np.asarray(cs[0], dtype=np.complex128)
    a2 = hermitian.hermitianize(a1 - np.asarray(cs[1], dtype=np.complex128))
    a3 = hermitian.hermitianize(a1 - np.asarray(cs[2], dtype=np.complex128))
    dir_scale = hermitian.frobenius(a2) + hermitian.frobenius(a3)

    def lam(t1: float, t2: float) -> float:
        w, _ = hermitian_eigh(a1 + t1 * a2 + t2 * a3)
        return float(w[0])

    flags = ()
    try:
        res = alternating_max(lam, cfg)
        t_star = res.t_star
        trace = res.trace
    except SearchError as err:
        flags = ("alternating_rounds_exhausted",)
        t_star = err.best_t
        trace = tuple(err.trace)

    t, w, v = _kink_polish_2d(a1, a2, a3, t_star, cfg, dir_scale)
    ctol = CLUSTER_FACTOR * cfg.interval_threshold * (1.0 + dir_scale)
    k = _cluster_size(w, ctol)
    if k > 2:
        flags = flags + ("eigen_multiplicity",)
    if k >= 2:
        u, ok = _equalize_two_forms_subspace(v[:, :k], a2, a3, dir_scale)
        if not ok:
            flags = flags + ("equalization_failed",)
    else:
        u = v[:, 0].copy()
    q = [quadratic_form(c, u) for c in cs]
    if max(q) - min(q) > 10.0 * BINDING_TOL:
        stack = np.ascontiguousarray(np.stack(cs), dtype=np.complex128)
        u, _, _ = oracle.refine_on_sphere(stack, u)
        flags = flags + ("binding_refined",)
    value = _max_form(cs, u)
    trace = tuple(trace)
    if trace and value > trace[-1][1]:
        trace = trace + ((trace[-1][0] + 1, value),)
    multipliers = (float(t[0]), float(t[1]))
    return Candidate3("all", (0, 1, 2), u, value, multipliers, trace, flags)


def solve_three(cs, cfg: SearchConfig | None = None) -> SolveFragment:
    """Minimum of max(c1, c2, c3) over unit u via the seven candidates.

    All seven are always evaluated; the winner is the smallest value, with
    ties broken toward fewer binding constraints.
    """
    cfg = cfg or SearchConfig()
    cs = [hermitian.require_hermitian(c, f"C[{i}]") for i, c in enumerate(cs)]
    if len(cs) != 3:
        raise ValueError("solve_three expects exactly 3 constraint matrices")
    n = cs[0].shape[0]
    if any(c.shape != (n, n) for c in cs):
        raise hermitian.DimensionError("constraint matrices must share a dimension")
    if n < 3:
        raise ValueError("three constraints require dimension at least 3")

    candidates = [candidate_single(cs, i) for i in range(3)]
    candidates += [
        candidate_pair(cs, i, j, cfg) for i, j in ((0, 1), (0, 2), (1, 2))
    ]
    candidates.append(candidate_all(cs, cfg))

    winner = candidates[0]
    for cand in candidates[1:]:
        if cand.value < winner.value:
            winner = cand

    if winner.kind == "single":
        tag = f"three_single({winner.indices[0]})"
    elif winner.kind == "pair":
        tag = f"three_pair({winner.indices[0]},{winner.indices[1]})"
    else:
        tag = "three_all"
    all_flags = []
    for cand in candidates:
        for flag in cand.flags:
            if flag not in all_flags:
                all_flags.append(flag)
    u = hermitian.phase_normalize(winner.u)
    return SolveFragment(
        winner.value, u, tag, winner.multipliers, tuple(winner.trace), tuple(all_flags)
    )
