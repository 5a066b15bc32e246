"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The backend is picked once at import time from the HQCQP_BACKEND environment
variable: "numba" forces JIT compilation (raises if numba is missing),
"numpy" forces the plain interpreted path, and "auto" (or unset) uses numba
when it is importable. Everything here is deterministic; the two backends
agree to floating-point roundoff.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_VAR = "HQCQP_BACKEND"


def _pick_backend() -> str:
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice in ("numpy", "python"):
        return "numpy"
    if choice == "numba":
        import numba  # noqa: F401  (fail loudly if forced but missing)

        return "numba"
    if choice in ("auto", ""):
        try:
            import numba  # noqa: F401

            return "numba"
        except ImportError:
            return "numpy"
    raise ValueError(
        f"{_ENV_VAR} must be 'numba', 'numpy' or 'auto', got {choice!r}"
    )


BACKEND = _pick_backend()


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigendecomposition for complex Hermitian matrices.
#
# One rotation zeroes a[p, q]: write a[p, q] = r * phase, reduce the 2x2 block
# to a real symmetric one with the unitary diag(1, conj(phase)), then apply
# the classical real rotation (c, s) with t the stable root of
# t^2 + 2*tau*t - 1 = 0, tau = (a_qq - a_pp) / (2 r).
# ---------------------------------------------------------------------------


def _jacobi_cycle_loops(a, v, tol, max_sweeps):
    # In-place on a (Hermitian, complex128) and v (starts as identity).
    # Returns the number of sweeps used, or -1 if the off-diagonal mass
    # never dropped below tol * ||a||_F within max_sweeps.
    n = a.shape[0]
    scale = 0.0
    for i in range(n):
        for j in range(n):
            m = abs(a[i, j])
            scale += m * m
    scale = np.sqrt(scale)
    if scale == 0.0:
        return 0
    thresh = tol * scale
    skip = 0.01 * thresh / n
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                m = abs(a[i, j])
                off += 2.0 * m * m
        if np.sqrt(off) <= thresh:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= skip:
                    continue
                phase = apq / r
                pc = np.conj(phase)
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * pc * akq
                    a[k, q] = s * akp + c * pc * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * phase * aqk
                    a[q, k] = s * apk + c * phase * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * pc * vkq
                    v[k, q] = s * vkp + c * pc * vkq
    return -1


def _jacobi_cycle_numpy(a, v, tol, max_sweeps):
    # Same algorithm with the inner k-loops vectorised; used when numba is
    # unavailable or disabled.
    n = a.shape[0]
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return 0
    thresh = tol * scale
    skip = 0.01 * thresh / n
    for sweep in range(max_sweeps):
        upper = np.triu(a, 1)
        if np.sqrt(2.0) * float(np.linalg.norm(upper)) <= thresh:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= skip:
                    continue
                phase = apq / r
                pc = np.conj(phase)
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * pc * cq
                a[:, q] = s * cp + c * pc * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * phase * rq
                a[q, :] = s * rp + c * phase * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * pc * vq
                v[:, q] = s * vp + c * pc * vq
    return -1


# ---------------------------------------------------------------------------
# Greedy descent of max_i (u^H C_i u) over the complex unit sphere.
#
# Two move types alternate at each step size. Coordinate moves perturb one
# complex coordinate at a time (four directions: +/-step on the real and
# imaginary parts) and keep the renormalised vector when the max form
# strictly decreases; cached products w_i = C_i u make each probe O(m).
# When a full sweep stalls, a ridge move follows the steepest-descent
# direction of the max function: the negated minimum-norm convex combination
# of the tangent-projected gradients 2 (w_i - c_i u) of the near-binding
# forms. Coordinate moves alone wedge on the valley where two forms are
# equal; the combined direction walks along it.
# ---------------------------------------------------------------------------


def _refresh_caches(cs, u, w, c):
    m = cs.shape[0]
    n = cs.shape[1]
    norm = 0.0
    for j in range(n):
        norm += (np.conj(u[j]) * u[j]).real
    norm = np.sqrt(norm)
    for j in range(n):
        u[j] = u[j] / norm
    fbest = -np.inf
    for i in range(m):
        for j in range(n):
            acc = 0.0 + 0.0j
            for k in range(n):
                acc += cs[i, j, k] * u[k]
            w[i, j] = acc
        cv = 0.0
        for j in range(n):
            cv += (np.conj(u[j]) * w[i, j]).real
        c[i] = cv
        if cv > fbest:
            fbest = cv
    return fbest


def _minnorm_two(g, i0, i1, combo):
    # weights minimizing |t g_i0 + (1 - t) g_i1| over t in [0, 1]
    n = g.shape[1]
    a = 0.0
    b = 0.0
    cc = 0.0
    for j in range(n):
        a += (np.conj(g[i0, j]) * g[i0, j]).real
        b += (np.conj(g[i0, j]) * g[i1, j]).real
        cc += (np.conj(g[i1, j]) * g[i1, j]).real
    den = a - 2.0 * b + cc
    if den <= 1e-300:
        t = 0.0
    else:
        t = (cc - b) / den
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    for j in range(n):
        combo[j] = t * g[i0, j] + (1.0 - t) * g[i1, j]


def _ridge_move(cs, u, w, c, fbest, step):
    m = cs.shape[0]
    n = cs.shape[1]
    # tangent-projected gradients of every form
    g = np.zeros((m, n), dtype=np.complex128)
    gmax = 0.0
    for i in range(m):
        nrm = 0.0
        for j in range(n):
            g[i, j] = 2.0 * (w[i, j] - c[i] * u[j])
            nrm += (np.conj(g[i, j]) * g[i, j]).real
        nrm = np.sqrt(nrm)
        if nrm > gmax:
            gmax = nrm
    act_tol = step * gmax + 1e-13 * (1.0 + abs(fbest))
    idx = np.empty(m, dtype=np.int64)
    k = 0
    for i in range(m):
        if c[i] >= fbest - act_tol:
            idx[k] = i
            k += 1
    combo = np.zeros(n, dtype=np.complex128)
    if k == 1:
        for j in range(n):
            combo[j] = g[idx[0], j]
    elif k == 2:
        _minnorm_two(g, idx[0], idx[1], combo)
    else:
        # interior stationary point of |a g0 + b g1 + (1-a-b) g2|^2, else the
        # best of the three edges
        d0 = np.zeros(n, dtype=np.complex128)
        d1 = np.zeros(n, dtype=np.complex128)
        for j in range(n):
            d0[j] = g[idx[0], j] - g[idx[2], j]
            d1[j] = g[idx[1], j] - g[idx[2], j]
        a00 = 0.0
        a01 = 0.0
        a11 = 0.0
        b0 = 0.0
        b1 = 0.0
        for j in range(n):
            a00 += (np.conj(d0[j]) * d0[j]).real
            a01 += (np.conj(d0[j]) * d1[j]).real
            a11 += (np.conj(d1[j]) * d1[j]).real
            b0 += (np.conj(d0[j]) * g[idx[2], j]).real
            b1 += (np.conj(d1[j]) * g[idx[2], j]).real
        det = a00 * a11 - a01 * a01
        alpha = -1.0
        beta = -1.0
        if det > 1e-300:
            alpha = (-b0 * a11 + b1 * a01) / det
            beta = (-b1 * a00 + b0 * a01) / det
        if alpha >= 0.0 and beta >= 0.0 and alpha + beta <= 1.0:
            for j in range(n):
                combo[j] = (
                    alpha * g[idx[0], j]
                    + beta * g[idx[1], j]
                    + (1.0 - alpha - beta) * g[idx[2], j]
                )
        else:
            tmp = np.zeros(n, dtype=np.complex128)
            bestq = np.inf
            for e0 in range(3):
                for e1 in range(e0 + 1, 3):
                    _minnorm_two(g, idx[e0], idx[e1], tmp)
                    q = 0.0
                    for j in range(n):
                        q += (np.conj(tmp[j]) * tmp[j]).real
                    if q < bestq:
                        bestq = q
                        for j in range(n):
                            combo[j] = tmp[j]
    cnorm = 0.0
    for j in range(n):
        cnorm += (np.conj(combo[j]) * combo[j]).real
    cnorm = np.sqrt(cnorm)
    if cnorm <= 1e-12 * (1.0 + gmax):
        return False, fbest
    trial = np.zeros(n, dtype=np.complex128)
    accept_tol = (1e-9 * step + 1e-13) * (1.0 + abs(fbest))
    tau = step
    for _ in range(3):
        nrm = 0.0
        for j in range(n):
            trial[j] = u[j] - (tau / cnorm) * combo[j]
            nrm += (np.conj(trial[j]) * trial[j]).real
        nrm = np.sqrt(nrm)
        ftrial = -np.inf
        for i in range(m):
            acc = 0.0
            for j in range(n):
                wij = 0.0 + 0.0j
                for kk in range(n):
                    wij += cs[i, j, kk] * trial[kk]
                acc += (np.conj(trial[j]) * wij).real
            acc /= nrm * nrm
            if acc > ftrial:
                ftrial = acc
        if ftrial < fbest - accept_tol:
            for j in range(n):
                u[j] = trial[j] / nrm
            fnew = _refresh_caches(cs, u, w, c)
            return True, fnew
        tau *= 0.25
    return False, fbest


def _refine_minmax_impl(cs, u, step_init, step_min):
    m = cs.shape[0]
    n = cs.shape[1]
    w = np.zeros((m, n), dtype=np.complex128)
    c = np.zeros(m)
    cn = np.zeros(m)
    fbest = _refresh_caches(cs, u, w, c)
    steps = 0
    step = step_init
    max_steps = 50_000
    while step >= step_min and steps < max_steps:
        # demanding progress proportional to the step size stops nano-sized
        # accept loops without hurting the achievable accuracy
        accept_tol = (1e-9 * step + 1e-13) * (1.0 + abs(fbest))
        improved = False
        for k in range(n):
            for d_idx in range(4):
                if d_idx == 0:
                    d = step + 0.0j
                elif d_idx == 1:
                    d = -step + 0.0j
                elif d_idx == 2:
                    d = 1j * step
                else:
                    d = -1j * step
                nu2 = 1.0 + 2.0 * (np.conj(u[k]) * d).real + step * step
                fn = -np.inf
                for i in range(m):
                    cn[i] = (
                        c[i]
                        + 2.0 * (np.conj(d) * w[i, k]).real
                        + step * step * cs[i, k, k].real
                    ) / nu2
                    if cn[i] > fn:
                        fn = cn[i]
                if fn < fbest - accept_tol:
                    nu = np.sqrt(nu2)
                    for j in range(n):
                        u[j] = u[j] / nu
                    u[k] = u[k] + d / nu
                    for i in range(m):
                        for j in range(n):
                            w[i, j] = (w[i, j] + d * cs[i, j, k]) / nu
                        c[i] = cn[i]
                    fbest = fn
                    steps += 1
                    improved = True
        if not improved and m > 1:
            moved, fbest = _ridge_move(cs, u, w, c, fbest, step)
            if moved:
                steps += 1
                improved = True
        if not improved:
            step *= 0.5
            fbest = _refresh_caches(cs, u, w, c)
    return fbest, steps


# ---------------------------------------------------------------------------
# Compass descent of (c^H B2 c)^2 + (c^H B3 c)^2 over the unit sphere of a
# small subspace. Used to pick a vector in a near-degenerate eigenspace that
# zeroes two constraint-difference forms at once.
# ---------------------------------------------------------------------------


def _equalize_two_forms_impl(b2, b3, c, step_min):
    k = b2.shape[0]
    step = 0.5
    g2 = 0.0
    g3 = 0.0
    for i in range(k):
        for j in range(k):
            g2 += (np.conj(c[i]) * b2[i, j] * c[j]).real
            g3 += (np.conj(c[i]) * b3[i, j] * c[j]).real
    h = g2 * g2 + g3 * g3
    while step >= step_min:
        improved = False
        for idx in range(k):
            for d_idx in range(4):
                if d_idx == 0:
                    d = step + 0.0j
                elif d_idx == 1:
                    d = -step + 0.0j
                elif d_idx == 2:
                    d = 1j * step
                else:
                    d = -1j * step
                # trial vector, renormalised
                norm = 0.0
                for j in range(k):
                    cj = c[j]
                    if j == idx:
                        cj = cj + d
                    norm += (np.conj(cj) * cj).real
                norm = np.sqrt(norm)
                t2 = 0.0
                t3 = 0.0
                for i in range(k):
                    ci = c[i]
                    if i == idx:
                        ci = ci + d
                    for j in range(k):
                        cj = c[j]
                        if j == idx:
                            cj = cj + d
                        t2 += (np.conj(ci) * b2[i, j] * cj).real
                        t3 += (np.conj(ci) * b3[i, j] * cj).real
                t2 /= norm * norm
                t3 /= norm * norm
                ht = t2 * t2 + t3 * t3
                if ht < h * (1.0 - 1e-12) - 1e-300:
                    c[idx] = c[idx] + d
                    nrm = 0.0
                    for j in range(k):
                        nrm += (np.conj(c[j]) * c[j]).real
                    nrm = np.sqrt(nrm)
                    for j in range(k):
                        c[j] = c[j] / nrm
                    h = ht
                    improved = True
        if not improved:
            step *= 0.5
    return h


if BACKEND == "numba":
    from numba import njit

    _jit = njit(cache=True, nogil=True)
    # helpers must be jitted before the kernels that call them are compiled
    _refresh_caches = _jit(_refresh_caches)
    _minnorm_two = _jit(_minnorm_two)
    _ridge_move = _jit(_ridge_move)
    jacobi_cycle = _jit(_jacobi_cycle_loops)
    refine_minmax = _jit(_refine_minmax_impl)
    equalize_two_forms = _jit(_equalize_two_forms_impl)
else:
    jacobi_cycle = _jacobi_cycle_numpy
    refine_minmax = _refine_minmax_impl
    equalize_two_forms = _equalize_two_forms_impl


def warmup() -> None:
    """Trigger JIT compilation of all kernels on tiny inputs."""
    a = np.array([[2.0, 1.0 + 1.0j], [1.0 - 1.0j, 3.0]], dtype=np.complex128)
    v = np.eye(2, dtype=np.complex128)
    jacobi_cycle(a, v, 1e-12, 30)
    cs = np.array([[[1.0 + 0.0j, 0.0], [0.0, -1.0]]], dtype=np.complex128)
    u = np.array([1.0 + 0.0j, 0.0], dtype=np.complex128)
    refine_minmax(cs, u, 0.5, 1e-3)
    b = np.array([[1.0 + 0.0j, 0.0], [0.0, -1.0]], dtype=np.complex128)
    c = np.array([1.0 + 0.0j, 0.0], dtype=np.complex128)
    equalize_two_forms(b, -b, c, 1e-3)
