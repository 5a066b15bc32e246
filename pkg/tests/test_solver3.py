import numpy as np
import pytest

from conftest import random_hermitian
from hqcqp import BACKEND, oracle
from hqcqp.hermitian import min_eigenpair, quadratic_form
from hqcqp.search import SearchConfig
from hqcqp.solver3 import (
    candidate_all,
    candidate_pair,
    candidate_single,
    solve_three,
)

CFG = SearchConfig(oracle_samples=20000, oracle_restarts=6)
HEAVY = BACKEND == "numba"  # shrink oracle sweeps on the interpreted fallback

SYM_TRIPLE = (
    np.diag([-3.0, -1.0, -1.0]).astype(complex),
    np.diag([-1.0, -3.0, -1.0]).astype(complex),
    np.diag([-1.0, -1.0, -3.0]).astype(complex),
)
SINGLE_TRIPLE = (
    np.diag([-1.0, 9.0, 9.0]).astype(complex),
    np.diag([-3.0, 9.0, 9.0]).astype(complex),
    np.diag([-2.0, 9.0, 9.0]).astype(complex),
)


def _random_triple(rng, n):
    return [random_hermitian(rng, n) for _ in range(3)]


class TestCandidateSingle:
    def test_dominant_first_constraint(self):
        cand = candidate_single(SINGLE_TRIPLE, 0)
        assert abs(cand.u[0]) == pytest.approx(1.0, abs=1e-10)
        assert cand.value == pytest.approx(-1.0, abs=1e-12)

    def test_symmetric_triple_not_optimal(self):
        cand = candidate_single(SYM_TRIPLE, 0)
        assert cand.value == pytest.approx(-1.0, abs=1e-12)  # max(-3,-1,-1)

    def test_value_at_least_own_minimum(self):
        rng = np.random.default_rng(20)
        for _ in range(20):
            cs = _random_triple(rng, int(rng.integers(3, 8)))
            i = int(rng.integers(0, 3))
            cand = candidate_single(cs, i)
            assert cand.value >= min_eigenpair(cs[i]).value - 1e-12


class TestCandidatePair:
    def test_symmetric_triple_pair(self):
        # equalizing the first two forms lands on max(-2, -2, -1) = -1
        cand = candidate_pair(SYM_TRIPLE, 0, 1, CFG)
        assert cand.value >= -5.0 / 3.0 - 1e-9
        assert cand.value == pytest.approx(-1.0, abs=1e-3)

    def test_coincident_pair_reduces_to_single(self):
        rng = np.random.default_rng(21)
        c = random_hermitian(rng, 4)
        cs = [c, c.copy(), random_hermitian(rng, 4)]
        cand = candidate_pair(cs, 0, 1, CFG)
        assert "coincident_constraints" in cand.flags
        single = candidate_single(cs, 0)
        assert cand.value == pytest.approx(single.value, abs=1e-9)

    def test_pair_binding(self):
        rng = np.random.default_rng(22)
        for _ in range(10):
            cs = _random_triple(rng, int(rng.integers(3, 7)))
            cand = candidate_pair(cs, 0, 1, CFG)
            if "pair_equality_empty" in cand.flags:
                continue
            qi = quadratic_form(cs[0], cand.u)
            qj = quadratic_form(cs[1], cand.u)
            assert abs(qi - qj) <= 1e-4


class TestCandidateAll:
    def test_symmetric_triple(self):
        cand = candidate_all(SYM_TRIPLE, CFG)
        assert cand.value == pytest.approx(-5.0 / 3.0, abs=1e-6)
        assert cand.multipliers[0] == pytest.approx(-1.0 / 3.0, abs=1e-3)
        assert cand.multipliers[1] == pytest.approx(-1.0 / 3.0, abs=1e-3)
        assert np.allclose(np.abs(cand.u), 1.0 / np.sqrt(3), atol=1e-5)

    def test_degenerate_all_equal(self):
        rng = np.random.default_rng(23)
        c = random_hermitian(rng, 4)
        cand = candidate_all([c, c.copy(), c.copy()], CFG)
        assert cand.value == pytest.approx(min_eigenpair(c).value, abs=1e-6)

    def test_all_binding_residuals(self):
        rng = np.random.default_rng(24)
        checked = 0
        for _ in range(10):
            cs = _random_triple(rng, int(rng.integers(3, 7)))
            cand = candidate_all(cs, CFG)
            if any("equalization" in f or "empty" in f for f in cand.flags):
                continue
            q = [quadratic_form(c, cand.u) for c in cs]
            checked += 1
            assert abs(q[0] - q[1]) <= 1e-3
            assert abs(q[0] - q[2]) <= 1e-3
        assert checked >= 5


class TestSolveThree:
    def test_symmetric_triple_via_all_binding(self):
        frag = solve_three(SYM_TRIPLE, CFG)
        assert frag.case_tag == "three_all"
        assert frag.c_star == pytest.approx(-5.0 / 3.0, abs=1e-6)
        assert -1.0 / frag.c_star == pytest.approx(3.0 / 5.0, abs=1e-6)

    def test_single_binding_triple(self):
        frag = solve_three(SINGLE_TRIPLE, CFG)
        assert frag.case_tag == "three_single(0)"
        assert frag.c_star == pytest.approx(-1.0, abs=1e-6)

    def test_dimension_two_rejected(self):
        cs = [np.diag([-1.0, 1.0])] * 3
        with pytest.raises(ValueError):
            solve_three(cs, CFG)

    def test_candidate_soundness(self):
        # every candidate value upper-bounds the reported optimum
        rng = np.random.default_rng(25)
        for _ in range(8):
            cs = _random_triple(rng, int(rng.integers(3, 7)))
            frag = solve_three(cs, CFG)
            for i in range(3):
                assert frag.c_star <= candidate_single(cs, i).value + 1e-9
            for i, j in ((0, 1), (0, 2), (1, 2)):
                assert frag.c_star <= candidate_pair(cs, i, j, CFG).value + 1e-9

    def test_oracle_dominance(self):
        rng = np.random.default_rng(26)
        for k in range(5 if HEAVY else 2):
            cs = _random_triple(rng, 5)
            frag = solve_three(cs, CFG)
            samples = oracle.sample_unit_sphere(5, 20000, 100 + k)
            vals = oracle.batch_quad_forms(cs[0], samples)
            for c in cs[1:]:
                np.maximum(vals, oracle.batch_quad_forms(c, samples), out=vals)
            assert frag.c_star <= float(vals.min()) + 1e-6

    def test_matches_oracle_on_random_triples(self):
        rng = np.random.default_rng(27)
        for k in range(25 if HEAVY else 3):
            n = 3 + k % 6
            cs = _random_triple(rng, n)
            frag = solve_three(cs, CFG)
            est = oracle.oracle_cstar(cs, CFG, seed=3000 + k)
            scale = max(1.0, abs(est.c_hat))
            assert abs(frag.c_star - est.c_hat) <= 2e-2 * scale

    def test_two_dim_concavity(self):
        rng = np.random.default_rng(28)
        for _ in range(100):
            n = int(rng.integers(3, 6))
            a1, a2, a3 = (random_hermitian(rng, n) for _ in range(3))

            def lam(t1, t2):
                w = np.linalg.eigvalsh(a1 + t1 * a2 + t2 * a3)
                return w[0]

            pa = rng.uniform(-2, 2, size=2)
            pb = rng.uniform(-2, 2, size=2)
            mid = 0.5 * (pa + pb)
            assert lam(*mid) >= 0.5 * (lam(*pa) + lam(*pb)) - 1e-9

    def test_trace_rounds_monotone(self):
        frag = solve_three(SYM_TRIPLE, CFG)
        vals = [v for _, v in frag.trace]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
