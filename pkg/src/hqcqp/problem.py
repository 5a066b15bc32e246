"""Problem containers, whitening reduction and solution recovery.

The original instance minimizes x^H T x over complex x subject to
x^H P_i x + 1 <= 0 for one to three indefinite Hermitian P_i, with T
positive definite. Whitening with the inverse lower Cholesky factor of T
turns the objective into a plain squared norm, leaving constraint matrices
C_i = F^{-1} P_i F^{-H}; a solution is recovered as x = F^{-H} sqrt(p) u.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import hermitian

FEASIBILITY_TOL = 1e-6
BINDING_TOL = 1e-4


class InfeasibleError(Exception):
    """No unit direction makes every constraint form negative (c* >= 0)."""

    def __init__(self, c_star: float, u=None, flags=()):
        self.c_star = c_star
        self.u = u
        self.flags = tuple(flags)
        super().__init__(f"infeasible: c* >= 0 (c* = {c_star:.6g})")


@dataclass(frozen=True)
class HqcqpProblem:
    """Validated instance of the original minimization problem."""

    T: np.ndarray
    P: tuple

    def __post_init__(self):
        t = hermitian.require_hermitian(self.T, "T")
        n = t.shape[0]
        if n < 2:
            raise ValueError("dimension must be at least 2")
        ps = tuple(hermitian.require_hermitian(p, f"P[{i}]") for i, p in enumerate(self.P))
        if not 1 <= len(ps) <= 3:
            raise ValueError("between 1 and 3 constraints are supported")
        if len(ps) == 3 and n < 3:
            raise ValueError("three constraints require dimension at least 3")
        for i, p in enumerate(ps):
            if p.shape != t.shape:
                raise hermitian.DimensionError(
                    f"P[{i}] has shape {p.shape}, expected {t.shape}"
                )
        hermitian.cholesky_lower(t)  # raises if T is not positive definite
        object.__setattr__(self, "T", t)
        object.__setattr__(self, "P", ps)

    @property
    def dim(self) -> int:
        return self.T.shape[0]

    @property
    def num_constraints(self) -> int:
        return len(self.P)


@dataclass(frozen=True)
class ReducedProblem:
    """Whitened instance: constraints C_i and the factor used to whiten."""

    C: tuple
    f_inv: np.ndarray

    @property
    def dim(self) -> int:
        return self.f_inv.shape[0]

    @property
    def num_constraints(self) -> int:
        return len(self.C)


@dataclass
class Solution:
    p_star: float
    c_star: float
    u: np.ndarray
    x: np.ndarray
    case_tag: str
    binding: tuple
    multipliers: tuple
    trace: tuple
    flags: tuple = field(default_factory=tuple)


def reduce_problem(prob: HqcqpProblem) -> ReducedProblem:
    """Whiten: C_i = F^{-1} P_i F^{-H} for the lower Cholesky factor F of T."""
    f_inv = hermitian.inverse_sqrt_factor(prob.T)
    f_inv_h = f_inv.conj().T
    cs = tuple(hermitian.hermitianize(f_inv @ p @ f_inv_h) for p in prob.P)
    return ReducedProblem(cs, f_inv)


def recover(p: float, u, red: ReducedProblem) -> np.ndarray:
    """Map a unit direction u and scale p back to the original variable."""
    if p <= 0:
        raise ValueError("scale p must be positive")
    u = np.asarray(u, dtype=np.complex128)
    return red.f_inv.conj().T @ (np.sqrt(p) * u)


def check_feasible(red: ReducedProblem, cfg=None):
    """Whether some unit u has every constraint form negative.

    Returns (True, witness) or (False, None); the witness is the minimizing
    direction found by the solver, whose max form value is the certificate.
    """
    from . import driver
    from .search import SearchConfig

    frag = driver.solve_reduced(red, cfg or SearchConfig())
    if frag.c_star < 0.0:
        return True, frag.u
    return False, None
