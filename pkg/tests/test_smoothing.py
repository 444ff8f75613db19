import math

import numpy as np
import pytest

from poslp import (
    EpsilonOutOfRange,
    NumericalOverflow,
    derive_params,
    gradient,
    initial_point,
    objective,
    penalties,
    simplex_packing,
)
from conftest import pack_inst, random_packing, random_packing_bounded
from refsolve import dense_gradient, dense_penalties


class TestDeriveParams:
    def test_reference_values_10x10(self):
        # frozen from a 40-digit evaluation of the closed forms
        p = derive_params(10, 10, 0.1)
        assert p.mu == pytest.approx(0.0036191206825270986, rel=1e-15)
        assert p.alpha == pytest.approx(0.00018095603412635493, rel=1e-15)
        assert p.num_buckets == 4
        assert abs(p.iterations - 6_622_012) <= 1  # ceiling of a float64 quantity
        assert p.n == 10 and p.m == 10

    def test_epsilon_too_large(self):
        with pytest.raises(EpsilonOutOfRange):
            derive_params(10, 10, 0.6)

    def test_epsilon_nonpositive(self):
        with pytest.raises(EpsilonOutOfRange):
            derive_params(10, 10, 0.0)

    def test_one_bucket_at_half(self):
        assert derive_params(4, 4, 0.5).num_buckets == 1

    @pytest.mark.parametrize("eps,expected_w", [(0.5, 1), (0.25, 2), (0.2, 3), (0.1, 4), (0.05, 5)])
    def test_bucket_count(self, eps, expected_w):
        assert derive_params(8, 8, eps).num_buckets == expected_w

    def test_all_fields_finite_positive(self):
        for n, m, eps in [(1, 1, 0.5), (3, 50, 0.01), (200, 2, 0.3)]:
            p = derive_params(n, m, eps)
            assert p.mu > 0 and p.alpha > 0 and p.num_buckets >= 1 and p.iterations >= 1
            assert math.isfinite(p.mu) and math.isfinite(p.alpha)
            assert p.alpha == p.mu / 20.0
            assert p.num_buckets == math.ceil(math.log2(1.0 / eps))


class TestPenalties:
    def test_zero_exponent(self):
        inst = pack_inst([[1.0]])
        np.testing.assert_array_equal(penalties(inst, np.array([1.0]), 0.7), [1.0])

    def test_direct_evaluation(self):
        inst = pack_inst([[1.0]])
        p = penalties(inst, np.array([0.0]), 0.5)
        assert p[0] == pytest.approx(0.13533528323661269, rel=1e-15)  # exp(-2)

    def test_matches_dense_reference(self):
        for seed in range(10):
            inst = random_packing(5, 5, 0.6, seed)
            dense = inst.matrix.to_dense()
            rng = np.random.Generator(np.random.Philox(seed))
            x = rng.random(5)
            got = penalties(inst, x, 0.3)
            want = dense_penalties(dense, x, 0.3)
            np.testing.assert_allclose(got, want, rtol=1e-14)

    def test_overflow_guard(self):
        inst = pack_inst([[1.0]])
        with pytest.raises(NumericalOverflow):
            penalties(inst, np.array([1e6]), 0.001)

    def test_bounded_when_nearly_feasible(self):
        # p_j <= (nm/eps)^4 whenever max activity <= 1 + eps
        eps = 0.1
        for seed in range(10):
            inst = random_packing(6, 6, 0.5, seed)
            params = derive_params(inst.n, inst.m, eps)
            x = np.full(inst.n, (1.0 + eps) / inst.matrix.column_inf_norms().max() / inst.n)
            act = inst.matrix.row_activity(x)
            assert act.max() <= 1.0 + eps
            p = penalties(inst, x, params.mu)
            bound = (inst.n * inst.m / eps) ** 4
            assert p.max() <= bound * (1 + 1e-12)


class TestObjective:
    def test_direct_evaluation(self):
        inst = pack_inst([[1.0]])
        f = objective(inst, np.array([0.0]), 0.5)
        assert f == pytest.approx(0.06766764161830635, rel=1e-15)  # 0.5 * exp(-2)

    def test_initial_point_value_bound(self):
        # f(x0) <= -(1 - eps)/n on random instances
        eps = 0.1
        for seed in range(50):
            inst = random_packing(5 + seed % 8, 4 + seed % 7, 0.4, seed)
            params = derive_params(inst.n, inst.m, eps)
            x0 = initial_point(inst, eps)
            assert objective(inst, x0, params.mu) <= -(1.0 - eps) / inst.n

    def test_lower_bound_vs_oracle(self):
        # f(x) >= -(1 + eps) * OPT for any x >= 0
        eps = 0.1
        rng = np.random.Generator(np.random.Philox(99))
        for seed in range(10):
            inst = random_packing(6, 5, 0.5, seed)
            params = derive_params(inst.n, inst.m, eps)
            opt = simplex_packing(inst).opt_value
            norms = inst.matrix.column_inf_norms()
            for _ in range(10):
                x = rng.random(inst.n) * (1.2 / norms) / inst.n
                assert objective(inst, x, params.mu) >= -(1.0 + eps) * opt - 1e-9


class TestGradient:
    def test_stationary_single_constraint(self):
        inst = pack_inst([[1.0]])
        g, p = gradient(inst, np.array([1.0]), 0.5)
        np.testing.assert_array_equal(g, [0.0])
        np.testing.assert_array_equal(p, [1.0])

    def test_direct_evaluation(self):
        inst = pack_inst([[1.0]])
        g, _ = gradient(inst, np.array([0.0]), 0.5)
        assert g[0] == pytest.approx(-0.8646647167633873, rel=1e-15)  # -1 + exp(-2)

    def test_matches_dense_reference(self):
        for seed in range(10):
            inst = random_packing(5, 5, 0.6, seed)
            rng = np.random.Generator(np.random.Philox(1000 + seed))
            x = rng.random(5) * 0.5
            g, p = gradient(inst, x, 0.3)
            g_ref, p_ref = dense_gradient(inst.matrix.to_dense(), x, 0.3)
            np.testing.assert_allclose(g, g_ref, rtol=1e-13, atol=1e-15)
            np.testing.assert_allclose(p, p_ref, rtol=1e-14)

    def test_finite_differences(self):
        # central differences with h = 1e-6 * max(1, |x_i|), relative error <= 1e-6;
        # bounded-entry instances keep the difference quotient in its regime
        eps = 0.1
        rng = np.random.Generator(np.random.Philox(7))
        checked = 0
        for seed in range(20):
            inst = random_packing_bounded(5 + seed % 6, 4 + seed % 6, 0.5, seed)
            params = derive_params(inst.n, inst.m, eps)
            x = rng.random(inst.n) + 0.05
            x *= (1.0 + eps / 2) / inst.matrix.row_activity(x).max()
            g, _ = gradient(inst, x, params.mu)
            for i in range(inst.n):
                h = 1e-6 * max(1.0, abs(x[i]))
                xp, xm = x.copy(), x.copy()
                xp[i] += h
                xm[i] -= h
                fd = (objective(inst, xp, params.mu) - objective(inst, xm, params.mu)) / (2 * h)
                assert abs(fd - g[i]) <= 1e-6 * max(1.0, abs(g[i]))
                checked += 1
        assert checked >= 20

    def test_lower_bound(self):
        rng = np.random.Generator(np.random.Philox(8))
        for seed in range(20):
            inst = random_packing(7, 6, 0.4, seed)
            params = derive_params(inst.n, inst.m, 0.2)
            norms = inst.matrix.column_inf_norms()
            x = rng.random(inst.n) * (1.1 / norms) / inst.n
            g, _ = gradient(inst, x, params.mu)
            assert g.min() >= -1.0


class TestInitialPoint:
    def test_single_variable(self):
        inst = pack_inst([[1.0]])
        np.testing.assert_allclose(initial_point(inst, 0.1), [0.95], rtol=0)

    def test_two_variables_unit_norms(self):
        inst = pack_inst([[0.5, 1.0], [1.0, 0.5]])
        np.testing.assert_allclose(initial_point(inst, 0.1), [0.475, 0.475], rtol=0)

    def test_strictly_feasible(self):
        for seed in range(20):
            inst = random_packing(8, 7, 0.4, seed)
            x0 = initial_point(inst, 0.2)
            act = inst.matrix.row_activity(x0)
            assert act.max() <= 1.0 - 0.2 / 2 + 1e-12
