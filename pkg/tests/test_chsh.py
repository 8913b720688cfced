import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bellsweep.chsh import (
    PAULIS,
    chsh_operator,
    correlation_matrix,
    evaluate_bell,
    horodecki_max_violation,
    seesaw_optimize,
)
from bellsweep.concurrence import pure_bipartite_concurrence
from bellsweep.generators import MeasurementSetting
from bellsweep.linalg import DimensionError, NotHermitianError
from bellsweep.states import haar_random_pure, make_named_state

from conftest import random_density

R2 = 1 / math.sqrt(2)
TSIRELSON = 2 * math.sqrt(2)
PHI = make_named_state("bell").density().matrix


def trace_oracle_T(rho):
    return np.array([[np.trace(rho @ np.kron(a, b)).real for b in PAULIS] for a in PAULIS])


def bloch(v):
    r = np.outer(v, v.conj())
    return np.array([np.trace(r @ s).real for s in PAULIS])


class TestCorrelation:
    def test_phi_plus(self):
        assert_allclose(correlation_matrix(PHI), np.diag([1, -1, 1]), atol=1e-15)
        assert_allclose(trace_oracle_T(PHI), np.diag([1, -1, 1]), atol=1e-15)

    def test_maximally_mixed(self):
        assert not np.any(correlation_matrix(np.eye(4) / 4))

    def test_product_pure(self, rng):
        a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
        v = np.kron(a, b)
        T = correlation_matrix(np.outer(v, v.conj()))
        assert_allclose(T, np.outer(bloch(a), bloch(b)), atol=1e-14)
        assert np.linalg.matrix_rank(T, tol=1e-10) == 1

    def test_random_against_trace_oracle(self, rng):
        for _ in range(20):
            rho = random_density((2, 2), rng).matrix
            T = correlation_matrix(rho)
            assert_allclose(T, trace_oracle_T(rho), atol=1e-14)
            assert np.abs(T).max() <= 1 + 1e-12

    def test_wrong_size(self):
        with pytest.raises(DimensionError):
            correlation_matrix(np.eye(3))


class TestHorodecki:
    def test_phi_plus(self):
        assert abs(horodecki_max_violation(correlation_matrix(PHI)) - TSIRELSON) <= 1e-14

    @pytest.mark.parametrize("p", np.linspace(0, 1, 11))
    def test_werner(self, p):
        rho = make_named_state("werner", {"p": p})
        T = correlation_matrix(rho)
        assert_allclose(T, p * np.diag([1, -1, 1]), atol=1e-15)
        assert abs(horodecki_max_violation(T) - TSIRELSON * p) <= 1e-12

    def test_pure_states_follow_concurrence(self):
        for seed in range(100):
            s = haar_random_pure((2, 2), seed)
            c = pure_bipartite_concurrence(s)
            v = horodecki_max_violation(correlation_matrix(s.density()))
            assert abs(v - 2 * math.sqrt(1 + c * c)) <= 1e-10

    def test_batched(self, rng):
        rhos = np.stack([random_density((2, 2), rng).matrix for _ in range(7)])
        batch = horodecki_max_violation(correlation_matrix(rhos))
        single = [horodecki_max_violation(correlation_matrix(r)) for r in rhos]
        assert_allclose(batch, single, rtol=0, atol=1e-14)

    def test_dense_search_never_exceeds(self, rng):
        # random settings can only approach the closed-form maximum from below
        rho = random_density((2, 2), rng, rank=1)
        top = horodecki_max_violation(correlation_matrix(rho))
        for _ in range(500):
            vs = rng.standard_normal((4, 3))
            vs /= np.linalg.norm(vs, axis=1, keepdims=True)
            s = MeasurementSetting(*map(tuple, vs))
            assert evaluate_bell(rho, chsh_operator(s)) <= top + 1e-12


class TestSeesaw:
    def test_phi_plus(self):
        res = seesaw_optimize(PHI)
        assert abs(res.value - TSIRELSON) <= 1e-12
        s = res.settings
        # optimal CHSH geometry: orthogonal pairs on both sides
        assert abs(np.dot(s.a1, s.a2)) <= 1e-9
        assert abs(np.dot(s.b1, s.b2)) <= 1e-9

    def test_separable_diagonal(self):
        rho = np.diag([0.4, 0.1, 0.2, 0.3]).astype(complex)
        res = seesaw_optimize(rho)
        assert res.value <= 2 + 1e-9
        assert abs(res.value - horodecki_max_violation(correlation_matrix(rho))) <= 1e-8

    def test_maximally_mixed(self):
        res = seesaw_optimize(np.eye(4) / 4)
        assert res.value == 0.0

    def test_haar_pure(self):
        for seed in range(200):
            rho = haar_random_pure((2, 2), seed).density().matrix
            res = seesaw_optimize(rho)
            closed = horodecki_max_violation(correlation_matrix(rho))
            assert abs(res.value - closed) <= 1e-8
            assert abs(res.value - evaluate_bell(rho, chsh_operator(res.settings))) <= 1e-12

    def test_monotone_history(self, rng):
        for _ in range(30):
            rho = random_density((2, 2), rng, rank=2).matrix
            hist = seesaw_optimize(rho).history
            assert all(b >= a - 1e-13 for a, b in zip(hist, hist[1:]))

    def test_random_restart_path(self, rng):
        # starting far from the optimum still climbs to the closed form
        from bellsweep.chsh import _FRAME, _run_seesaw

        rho = random_density((2, 2), rng, rank=1).matrix
        T = correlation_matrix(rho)
        Tf = _FRAME @ T @ _FRAME
        b = rng.standard_normal((2, 3))
        b /= np.linalg.norm(b, axis=1, keepdims=True)
        *_, hist, its, ok = _run_seesaw(Tf, b[0], b[1], 500, 1e-15)
        assert ok
        assert abs(hist[-1] - horodecki_max_violation(T)) <= 1e-8


class TestEvaluate:
    canonical = MeasurementSetting((1, 0, 0), (0, 0, 1), (R2, 0, R2), (R2, 0, -R2))

    def test_phi_plus_canonical(self):
        phi = np.array([1, 0, 0, 1]) / math.sqrt(2)
        op = chsh_operator(self.canonical)
        assert abs(evaluate_bell(PHI, op) - TSIRELSON) <= 1e-12
        assert abs((phi @ op @ phi).real - TSIRELSON) <= 1e-12

    def test_equal_a_settings(self, rng):
        from bellsweep.generators import block_observable

        for _ in range(50):
            rho = random_density((2, 2), rng)
            vs = rng.standard_normal((3, 3))
            vs /= np.linalg.norm(vs, axis=1, keepdims=True)
            s = MeasurementSetting(tuple(vs[0]), tuple(vs[0]), tuple(vs[1]), tuple(vs[2]))
            val = evaluate_bell(rho, chsh_operator(s))
            a1b1 = evaluate_bell(rho, np.kron(block_observable(s.a1), block_observable(s.b1)))
            assert abs(val - 2 * a1b1) <= 1e-12
            assert abs(val) <= 2 + 1e-12

    def test_linear(self, rng):
        r1, r2 = random_density((2, 2), rng).matrix, random_density((2, 2), rng).matrix
        op = chsh_operator(self.canonical)
        p = 0.37
        mix = evaluate_bell(p * r1 + (1 - p) * r2, op)
        assert abs(mix - (p * evaluate_bell(r1, op) + (1 - p) * evaluate_bell(r2, op))) <= 1e-12

    def test_errors(self):
        with pytest.raises(DimensionError):
            evaluate_bell(np.eye(4) / 4, np.eye(9))
        with pytest.raises(NotHermitianError):
            evaluate_bell(np.eye(4) / 4, np.triu(np.ones((4, 4))))
