"""Top-level solve: reduce, dispatch on constraint count, recover."""

from __future__ import annotations

import numpy as np

from . import solver2, solver3
from .hermitian import phase_normalize, quadratic_form
from .problem import (
    BINDING_TOL,
    HqcqpProblem,
    InfeasibleError,
    ReducedProblem,
    Solution,
    recover,
    reduce_problem,
)
from .search import SearchConfig
from .solver2 import SolveFragment


def solve_reduced(red, cfg: SearchConfig | None = None) -> SolveFragment:
    """Minimize max_i u^H C_i u over unit u for a reduced problem (or a bare
    list of constraint matrices); no feasibility interpretation applied."""
    cfg = cfg or SearchConfig()
    cs = red.C if isinstance(red, ReducedProblem) else tuple(red)
    m = len(cs)
    if m == 1:
        return solver2.solve_one(cs[0])
    if m == 2:
        return solver2.solve_two(cs[0], cs[1], cfg)
    if m == 3:
        return solver3.solve_three(cs, cfg)
    raise ValueError("between 1 and 3 constraints are supported")


def solve(problem: HqcqpProblem, cfg: SearchConfig | None = None) -> Solution:
    """Solve the original problem; raises InfeasibleError when no direction
    makes every constraint form negative (the min-max value is >= 0)."""
    cfg = cfg or SearchConfig()
    red = reduce_problem(problem)
    frag = solve_reduced(red, cfg)
    if frag.c_star >= 0.0:
        flags = frag.flags
        if frag.c_star <= 1e-9:
            # feasible only in the limit of unbounded power; reported as
            # infeasible at tolerance rather than guessing a scale
            flags = flags + ("boundary_of_feasibility",)
        raise InfeasibleError(frag.c_star, frag.u, flags)
    p_star = -1.0 / frag.c_star
    u = phase_normalize(np.asarray(frag.u, dtype=np.complex128))
    x = recover(p_star, u, red)
    binding = tuple(
        i
        for i, c in enumerate(red.C)
        if abs(p_star * quadratic_form(c, u) + 1.0) <= BINDING_TOL
    )
    return Solution(
        p_star=p_star,
        c_star=frag.c_star,
        u=u,
        x=x,
        case_tag=frag.case_tag,
        binding=binding,
        multipliers=frag.multipliers,
        trace=frag.trace,
        flags=frag.flags,
    )
