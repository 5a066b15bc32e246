"""Random feasibility-guaranteed instance generation.

Instances are built around a planted direction u0: each constraint matrix is
a random Hermitian draw shifted along u0 u0^H so its form at u0 equals
-margin. Scaling u0 then satisfies every constraint of the original problem
strictly, so generated instances are always feasible. The objective matrix
is a well-conditioned Gram matrix plus identity. Sizes of interest mirror
relay-style problems where the variable count is the square of an antenna
count (N = 9, 16, 25).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hermitian
from .problem import HqcqpProblem

DEFAULT_SEED = 0x5EED
MAX_REDRAWS = 10


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    dim: int
    num_constraints: int
    margin: float = 0.5
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dimension must be at least 2")
        if not 1 <= self.num_constraints <= 3:
            raise ValueError("between 1 and 3 constraints are supported")
        if self.num_constraints == 3 and self.dim < 3:
            raise ValueError("three constraints require dimension at least 3")
        if self.margin <= 0:
            raise ValueError("margin must be positive")


def _complex_gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(n: int, seed: int) -> np.ndarray:
    """(G + G^H) / 2 for G with independent standard-normal real and
    imaginary parts in every entry."""
    if n < 1:
        raise ValueError("dimension must be positive")
    rng = np.random.default_rng(seed)
    return _random_hermitian(rng, n)


def _random_hermitian(rng, n: int) -> np.ndarray:
    g = _complex_gaussian(rng, (n, n))
    return (g + g.conj().T) / 2.0


def random_feasible_problem_with_witness(spec: GeneratorSpec):
    """Generate a feasible instance along with its planted unit direction."""
    rng = np.random.default_rng(spec.seed)
    n = spec.dim
    g = _complex_gaussian(rng, (n, n))
    t = g @ g.conj().T + np.eye(n)
    t = hermitian.hermitianize(t)
    u0 = _complex_gaussian(rng, n)
    u0 /= np.linalg.norm(u0)
    constraints = []
    for _ in range(spec.num_constraints):
        for attempt in range(MAX_REDRAWS + 1):
            h = _random_hermitian(rng, n)
            shift = hermitian.quadratic_form(h, u0) + spec.margin
            p = hermitian.hermitianize(h - shift * np.outer(u0, u0.conj()))
            w, _ = hermitian.hermitian_eigh(p)
            if w[0] < -1e-9 and w[-1] > 1e-9:
                constraints.append(p)
                break
        else:
            raise GenerationError(
                f"could not draw an indefinite constraint in {MAX_REDRAWS} redraws"
            )
    return HqcqpProblem(t, tuple(constraints)), u0


def random_feasible_problem(spec: GeneratorSpec) -> HqcqpProblem:
    """Feasible random instance; see random_feasible_problem_with_witness."""
    prob, _ = random_feasible_problem_with_witness(spec)
    return prob
