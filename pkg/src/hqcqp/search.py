"""Scalar concave maximization by dichotomous interval search.

The 1-D routine probes symmetrically around the interval midpoint and keeps
the half that must contain the maximizer; equal probes shrink both ends.
The 2-D driver alternates 1-D searches along a fixed direction pattern
(both axes plus the two diagonals) until a full round stops improving.
Diagonal sweeps matter: plain coordinate alternation can lock onto a
coordinate-wise maximizer of a kinked min-eigenvalue surface that is not the
global one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import hermitian

INTERVAL_SCALING_TRIGGER = 1e3
MAX_EXPANSIONS = 10


class SearchError(RuntimeError):
    """Search failed to meet its contract; carries the best point found."""

    def __init__(self, message: str, best_t=None, best_value=None, trace=()):
        self.best_t = best_t
        self.best_value = best_value
        self.trace = tuple(trace)
        super().__init__(message)


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the interval searches and the sampling oracle.

    interval_threshold is the final-interval stopping size; delta_fraction
    sets the probe offset as a fraction of the current interval width.
    """

    interval_threshold: float = 1e-4
    max_iterations: int = 200
    scale_factor: float = 2.0
    delta_fraction: float = 0.01
    outer_rounds_2d: int = 50
    outer_tol_2d: float = 1e-6
    oracle_samples: int = 100_000
    oracle_restarts: int = 10
    oracle_seed: int = 0x5EED

    def __post_init__(self):
        if self.interval_threshold <= 0:
            raise ValueError("interval_threshold must be positive")
        if self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")
        if self.scale_factor <= 1.0:
            raise ValueError("scale_factor must exceed 1")
        if not 0.0 < self.delta_fraction < 0.5:
            raise ValueError("delta_fraction must lie in (0, 0.5)")
        if self.outer_rounds_2d <= 0 or self.outer_tol_2d <= 0:
            raise ValueError("2-D driver settings must be positive")
        if self.oracle_samples < 1 or self.oracle_restarts < 1:
            raise ValueError("oracle settings must be positive")


@dataclass
class SearchResult:
    t_star: object  # float for 1-D, (float, float) for 2-D
    value: float
    iterations: int
    trace: tuple = field(default_factory=tuple)


class IntervalInit(NamedTuple):
    lo: float
    hi: float
    degenerate: bool
    scaled: bool


def initial_interval(m0, cfg: SearchConfig) -> IntervalInit:
    """Search interval [lambda_min(m0), 0], halved down while its width
    exceeds 1e3. A nonnegative minimum eigenvalue leaves no natural bracket;
    [-1, 0] is returned and flagged degenerate."""
    lam = hermitian.min_eigenpair(m0).value
    if lam >= 0.0:
        return IntervalInit(-1.0, 0.0, True, False)
    lo = lam
    scaled = False
    while abs(lo) > INTERVAL_SCALING_TRIGGER:
        lo /= cfg.scale_factor
        scaled = True
    return IntervalInit(lo, 0.0, False, scaled)


def _dichotomous_core(f, lo: float, hi: float, cfg: SearchConfig):
    trace = []
    incumbent = -math.inf
    best_t = 0.5 * (lo + hi)
    fm = f(best_t)
    if math.isnan(fm):
        raise SearchError("objective returned NaN", best_t, fm)
    incumbent = fm
    trace.append((0, incumbent))
    iterations = 0
    while hi - lo > cfg.interval_threshold:
        if iterations >= cfg.max_iterations:
            raise SearchError(
                f"dichotomous search exceeded {cfg.max_iterations} iterations",
                best_t,
                incumbent,
                trace,
            )
        iterations += 1
        mid = 0.5 * (lo + hi)
        delta = cfg.delta_fraction * (hi - lo)
        fl = f(mid - delta)
        fr = f(mid + delta)
        if math.isnan(fl) or math.isnan(fr):
            raise SearchError("objective returned NaN", best_t, incumbent, trace)
        if fl > incumbent:
            incumbent = fl
            best_t = mid - delta
        if fr > incumbent:
            incumbent = fr
            best_t = mid + delta
        if fl > fr:
            hi = mid + delta
        elif fr > fl:
            lo = mid - delta
        else:
            # equal probes: a concave function attains its max between them
            lo, hi = mid - delta, mid + delta
        trace.append((iterations, incumbent))
    t_star = 0.5 * (lo + hi)
    value = f(t_star)
    if value > incumbent:
        incumbent = value
        trace[-1] = (trace[-1][0], incumbent)
    return t_star, value, iterations, trace, lo, hi


def dichotomous_max(
    f: Callable[[float], float], interval, cfg: SearchConfig
) -> SearchResult:
    """Maximize a concave f over [lo, hi] down to the interval threshold.

    If the maximizer lands on an endpoint the interval is grown outward on
    that side (scale_factor per attempt, 10 attempts) before giving up.
    t_star is the final midpoint and value = f(t_star).
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError(f"invalid interval [{lo}, {hi}]")
    full_trace = []
    t_star = value = None
    offset = 0
    running = -math.inf
    for _ in range(MAX_EXPANSIONS + 1):
        width = hi - lo
        t_star, value, iterations, trace, _, _ = _dichotomous_core(f, lo, hi, cfg)
        for i, val in trace:
            running = max(running, val)
            full_trace.append((offset + i, running))
        offset = full_trace[-1][0] + 1
        edge = max(cfg.interval_threshold, 2.0 * cfg.delta_fraction * width)
        if t_star - lo <= edge:
            lo = hi - width * cfg.scale_factor
            continue
        if hi - t_star <= edge:
            hi = lo + width * cfg.scale_factor
            continue
        return SearchResult(t_star, value, iterations, tuple(full_trace))
    raise SearchError(
        "maximizer stayed on the interval boundary after repeated expansions",
        t_star,
        value,
        full_trace,
    )


_DIRECTIONS_2D = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0))


def _default_interval_fn(point, value, direction, cfg):
    # slice steps can go either way from an interior point, so the bracket is
    # symmetric, sized by the current eigenvalue like the 1-D anchor interval
    w = max(abs(value), 1.0)
    return (-w, w)


def alternating_max(
    f: Callable[[float, float], float],
    cfg: SearchConfig,
    init=(0.0, 0.0),
    directions: Sequence = _DIRECTIONS_2D,
    interval_fn=None,
) -> SearchResult:
    """Maximize a jointly concave f(t1, t2) by repeated 1-D searches.

    Each outer round sweeps the direction pattern; a move is kept when it
    does not lower the incumbent, so the incumbent trace is non-decreasing.
    interval_fn(point, value, direction, cfg) supplies the bracket for each
    1-D slice; the default uses [min(value, -1), 0], which for min-eigenvalue
    objectives is the interval anchored at the current eigenvalue.
    Raises SearchError when the round budget runs out before the improvement
    drops below outer_tol_2d.
    """
    if interval_fn is None:
        interval_fn = _default_interval_fn
    t = np.array(init, dtype=float)
    incumbent = f(t[0], t[1])
    trace = [(0, incumbent)]
    tie_tol = 1e-12
    rounds = 0
    for rounds in range(1, cfg.outer_rounds_2d + 1):
        round_start = incumbent
        for direction in directions:
            d = np.asarray(direction, dtype=float)

            def slice_obj(s, _d=d):
                return f(t[0] + s * _d[0], t[1] + s * _d[1])

            interval = interval_fn(tuple(t), incumbent, tuple(d), cfg)
            try:
                res = dichotomous_max(slice_obj, interval, cfg)
            except SearchError:
                continue
            if res.value >= incumbent - tie_tol * (1.0 + abs(incumbent)):
                t = t + res.t_star * d
                if res.value > incumbent:
                    incumbent = res.value
        trace.append((rounds, incumbent))
        if incumbent - round_start < cfg.outer_tol_2d:
            return SearchResult((float(t[0]), float(t[1])), incumbent, rounds, tuple(trace))
    raise SearchError(
        f"alternating driver did not converge in {cfg.outer_rounds_2d} rounds",
        (float(t[0]), float(t[1])),
        incumbent,
        trace,
    )
