"""Independent ground-truth estimation by sphere sampling plus refinement.

The sampler draws unit vectors from normalized complex Gaussians, scores
them by the max of the constraint forms, and polishes the best few by a
derivative-free coordinate descent on the sphere. The estimate is always an
upper bound on the true minimum of the max form, since every sampled point
is feasible. A constrained variant handles the equality-restricted minimum
of one form along the zero set of another, and a joint-range sampler backs
the numerical-range geometry checks and CSV exports.
"""

from __future__ import annotations

import io as _io
from dataclasses import dataclass

import numpy as np

from . import _kernels, hermitian
from .hermitian import min_eigenpair, quadratic_form
from .search import SearchConfig

DEFAULT_SEED = 0x5EED
REFINE_STEP_INIT = 0.5
REFINE_STEP_MIN = 1e-6


@dataclass
class OracleEstimate:
    c_hat: float
    u_hat: np.ndarray
    samples_used: int
    refine_steps: int


@dataclass
class RangeSample:
    """Sampled joint-range points, one row per unit vector; rows carrying a
    distinguished tag ('leftmost', 'bottommost') are eigen-derived."""

    points: np.ndarray
    tags: tuple


def sample_unit_sphere(n: int, count: int, seed: int) -> np.ndarray:
    """count unit complex n-vectors from normalized standard Gaussians."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    return z / norms


def batch_quad_forms(c, u_rows: np.ndarray) -> np.ndarray:
    """u^H c u for every row of u_rows."""
    c = np.asarray(c, dtype=np.complex128)
    return np.einsum("sj,sj->s", u_rows.conj(), u_rows @ c.T).real


def refine_on_sphere(c_stack: np.ndarray, u0, step_init=REFINE_STEP_INIT,
                     step_min=REFINE_STEP_MIN):
    """Greedy descent of max_i u^H C_i u from u0; returns (u, value, steps)."""
    u = np.array(u0, dtype=np.complex128)
    u /= np.linalg.norm(u)
    stack = np.ascontiguousarray(c_stack, dtype=np.complex128)
    value, steps = _kernels.refine_minmax(stack, u, step_init, step_min)
    u /= np.linalg.norm(u)
    return u, float(value), int(steps)


def oracle_cstar(cs, cfg: SearchConfig | None = None, seed: int | None = None) -> OracleEstimate:
    """Estimate min over unit u of max_i u^H C_i u.

    Sampling scores cfg.oracle_samples directions; the cfg.oracle_restarts
    best become starting points for coordinate-descent refinement. The
    reported c_hat is the max form recomputed exactly at the winner.
    """
    cfg = cfg or SearchConfig()
    if seed is None:
        seed = cfg.oracle_seed
    cs = [np.asarray(c, dtype=np.complex128) for c in cs]
    if not 1 <= len(cs) <= 3:
        raise ValueError("oracle expects 1 to 3 constraint matrices")
    n = cs[0].shape[0]
    samples = sample_unit_sphere(n, cfg.oracle_samples, seed)
    vals = batch_quad_forms(cs[0], samples)
    for c in cs[1:]:
        np.maximum(vals, batch_quad_forms(c, samples), out=vals)
    order = np.argsort(vals, kind="stable")[: cfg.oracle_restarts]
    stack = np.ascontiguousarray(np.stack(cs))
    best_u = None
    best_val = np.inf
    total_steps = 0
    for idx in order:
        u, val, steps = refine_on_sphere(stack, samples[idx])
        total_steps += steps
        if val < best_val:
            best_val = val
            best_u = u
    c_hat = max(quadratic_form(c, best_u) for c in cs)
    return OracleEstimate(c_hat, best_u, cfg.oracle_samples, total_steps)


def _project_to_zero_form(y: np.ndarray, d: np.ndarray):
    """Rescale the positive- and negative-form parts of coefficients y so the
    weighted sum sum_i d_i |y_i|^2 vanishes; None when one side has no mass."""
    pos = d > 0.0
    neg = d < 0.0
    qpos = float(np.sum(d[pos] * np.abs(y[pos]) ** 2))
    qneg = float(-np.sum(d[neg] * np.abs(y[neg]) ** 2))
    if qpos <= 1e-30 or qneg <= 1e-30:
        return None
    alpha = np.sqrt(qneg)
    beta = np.sqrt(qpos)
    out = y.copy()
    out[pos] *= alpha
    out[~pos] *= beta
    nrm = np.linalg.norm(out)
    if nrm == 0.0:
        return None
    return out / nrm


def oracle_equality_min(a1, a2, cfg: SearchConfig | None = None,
                        seed: int | None = None) -> OracleEstimate:
    """Estimate min of u^H a1 u over unit u restricted to u^H a2 u = 0.

    Samples are projected onto the zero set of the a2 form by rescaling
    their components in the a2 eigenbasis, then refined by coordinate
    descent with re-projection after every trial move.
    """
    cfg = cfg or SearchConfig()
    if seed is None:
        seed = cfg.oracle_seed
    a1 = np.asarray(a1, dtype=np.complex128)
    a2 = np.asarray(a2, dtype=np.complex128)
    n = a1.shape[0]
    d, wbasis = hermitian.hermitian_eigh(a2)
    samples = sample_unit_sphere(n, max(cfg.oracle_samples // 10, 256), seed)
    ys = samples @ wbasis.conj()  # coefficients in the a2 eigenbasis
    pos = d > 0.0
    neg = d < 0.0
    abs2 = np.abs(ys) ** 2
    qpos = abs2[:, pos] @ d[pos] if pos.any() else np.zeros(len(ys))
    qneg = -(abs2[:, neg] @ d[neg]) if neg.any() else np.zeros(len(ys))
    ok = (qpos > 1e-30) & (qneg > 1e-30)
    if not ok.any():
        raise ValueError("equality set appears empty: the form never changes sign")
    proj = ys[ok].copy()
    proj[:, pos] *= np.sqrt(qneg[ok])[:, None]
    proj[:, ~pos] *= np.sqrt(qpos[ok])[:, None]
    proj /= np.linalg.norm(proj, axis=1, keepdims=True)
    b1 = hermitian.hermitianize(wbasis.conj().T @ a1 @ wbasis)
    vals = batch_quad_forms(b1, proj)
    order = np.argsort(vals, kind="stable")[: cfg.oracle_restarts]

    def value_of(y):
        return float(np.vdot(y, b1 @ y).real)

    best_y = proj[order[0]].copy()
    best_val = value_of(best_y)
    total_steps = 0
    for idx in order:
        y = proj[idx].copy()
        val = value_of(y)
        step = REFINE_STEP_INIT
        while step >= REFINE_STEP_MIN:
            accept_tol = (1e-9 * step + 1e-13) * (1.0 + abs(val))
            improved = False
            for k in range(n):
                for delta in (step, -step, 1j * step, -1j * step):
                    trial = y.copy()
                    trial[k] += delta
                    trial = _project_to_zero_form(trial, d)
                    if trial is None:
                        continue
                    tval = value_of(trial)
                    if tval < val - accept_tol:
                        y, val = trial, tval
                        improved = True
                        total_steps += 1
            if not improved:
                step *= 0.5
        if val < best_val:
            best_val = val
            best_y = y
    u = wbasis @ best_y
    u /= np.linalg.norm(u)
    return OracleEstimate(float(np.vdot(u, a1 @ u).real), u, len(proj), total_steps)


def sample_numerical_range(cs, count: int, seed: int) -> RangeSample:
    """Joint-range tuples (c_1(u), ..., c_m(u)) for sampled unit u.

    For two matrices the eigen-derived extreme points are appended and
    tagged: the leftmost point (lambda_min(C1), c2(x1)) and the bottommost
    point (c1(x2), lambda_min(C2)).
    """
    cs = [np.asarray(c, dtype=np.complex128) for c in cs]
    m = len(cs)
    if m not in (2, 3):
        raise ValueError("numerical-range sampling expects 2 or 3 matrices")
    n = cs[0].shape[0]
    samples = sample_unit_sphere(n, count, seed)
    cols = [batch_quad_forms(c, samples) for c in cs]
    points = np.column_stack(cols)
    tags = ["sample"] * count
    if m == 2:
        e1 = min_eigenpair(cs[0])
        e2 = min_eigenpair(cs[1])
        leftmost = [e1.value, quadratic_form(cs[1], e1.vector)]
        bottommost = [quadratic_form(cs[0], e2.vector), e2.value]
        points = np.vstack([points, leftmost, bottommost])
        tags += ["leftmost", "bottommost"]
    return RangeSample(points, tuple(tags))


def range_to_csv(sample: RangeSample) -> str:
    """CSV text with one row per range point and a trailing tag column."""
    m = sample.points.shape[1]
    buf = _io.StringIO()
    buf.write(",".join(f"c{i + 1}" for i in range(m)) + ",tag\n")
    for row, tag in zip(sample.points, sample.tags):
        buf.write(",".join(repr(float(x)) for x in row) + f",{tag}\n")
    return buf.getvalue()
