import time

import numpy as np
import pytest

from hqcqp import driver
from hqcqp.generator import (
    GeneratorSpec,
    random_feasible_problem,
    random_feasible_problem_with_witness,
    random_hermitian,
)
from hqcqp.hermitian import hermitian_eigh, validate_hermitian
from hqcqp.problem import check_feasible, reduce_problem
from hqcqp.search import SearchConfig

CFG = SearchConfig(oracle_samples=2000, oracle_restarts=3)


class TestRandomHermitian:
    def test_is_hermitian(self):
        for seed in range(5):
            assert validate_hermitian(random_hermitian(6, seed))

    def test_deterministic(self):
        assert np.array_equal(random_hermitian(5, 3), random_hermitian(5, 3))

    def test_semicircle_scale(self):
        # per-entry variance 1 puts the top eigenvalue near 2 sqrt(N)
        for n in (8, 16):
            tops = []
            for seed in range(100):
                w, _ = hermitian_eigh(random_hermitian(n, 10_000 + seed))
                tops.append(w[-1])
            mean_top = np.mean(tops)
            assert 0.7 * 2 * np.sqrt(n) <= mean_top <= 1.3 * 2 * np.sqrt(n)


class TestGeneratorSpec:
    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            GeneratorSpec(1, 1)
        with pytest.raises(ValueError):
            GeneratorSpec(2, 3)
        with pytest.raises(ValueError):
            GeneratorSpec(4, 0)
        with pytest.raises(ValueError):
            GeneratorSpec(4, 2, margin=0.0)


class TestRandomFeasibleProblem:
    def test_every_instance_feasible(self):
        for seed in range(10):
            m = 1 + seed % 3
            n = max(3, 3 + seed % 5)
            prob = random_feasible_problem(GeneratorSpec(n, m, seed=seed))
            ok, _ = check_feasible(reduce_problem(prob), CFG)
            assert ok

    def test_planted_direction_strictly_feasible(self):
        for seed in range(10):
            spec = GeneratorSpec(5, 3, seed=seed)
            prob, u0 = random_feasible_problem_with_witness(spec)
            for p in prob.P:
                assert np.vdot(u0, p @ u0).real == pytest.approx(-spec.margin, abs=1e-9)

    def test_constraints_indefinite(self):
        for seed in range(10):
            prob = random_feasible_problem(GeneratorSpec(6, 2, seed=100 + seed))
            for p in prob.P:
                w, _ = hermitian_eigh(p)
                assert w[0] < 0 < w[-1]

    def test_margin_bound_on_optimum(self):
        # the whitened planted point certifies c* <= -margin / |F^H u0|^2
        spec = GeneratorSpec(4, 2, margin=3.0, seed=5)
        prob, u0 = random_feasible_problem_with_witness(spec)
        red = reduce_problem(prob)
        z0 = np.linalg.inv(red.f_inv).conj().T @ u0
        bound = -spec.margin / float(np.vdot(z0, z0).real)
        sol = driver.solve(prob, CFG)
        assert sol.c_star <= bound + 1e-9

    def test_deterministic(self):
        a = random_feasible_problem(GeneratorSpec(5, 2, seed=11))
        b = random_feasible_problem(GeneratorSpec(5, 2, seed=11))
        assert np.array_equal(a.T, b.T)
        for pa, pb in zip(a.P, b.P):
            assert np.array_equal(pa, pb)

    def test_relay_size_is_quick(self):
        t0 = time.perf_counter()
        random_feasible_problem(GeneratorSpec(9, 3, seed=0))
        assert time.perf_counter() - t0 < 0.1

    def test_objective_well_conditioned(self):
        prob = random_feasible_problem(GeneratorSpec(8, 1, seed=2))
        w, _ = hermitian_eigh(prob.T)
        assert w[0] >= 1.0 - 1e-9
