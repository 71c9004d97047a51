import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import svr_oracle
from trigsvm.datasets import philox
from trigsvm.errors import DataError, EmptyInputError, InvalidParameterError, ShapeError
from trigsvm.kernels import KernelSpec, gram
from trigsvm.svc import SolverConfig
from trigsvm.svr import SvrModel, fit_svr, predict_svr, svr_dual_objective, svr_kkt_violation, svr_rmse

TIGHT = SolverConfig(kkt_tol=1e-9)


def zero_model(bias):
    return SvrModel(np.array([], dtype=int), np.array([]), bias, 0.1, KernelSpec.trig(1.0), np.empty((0, 1)), 1.0)


def random_problem(seed, n_max=5):
    rng = philox(seed, 4)
    n = int(rng.integers(2, n_max + 1))
    X = rng.standard_normal((n, 2))
    y = rng.standard_normal(n)
    return X, y


class TestExamples:
    def test_constant_targets(self):
        X = np.linspace(0, 5, 12)[:, None]
        y = np.full(12, 3.25)
        m = fit_svr(X, y, KernelSpec.mixed(1.0), C=10, epsilon=0.1)
        assert m.n_support == 0
        assert m.bias == 3.25
        assert np.array_equal(predict_svr(m, np.array([[0.5], [100.0]])), [3.25, 3.25])

    @pytest.mark.parametrize("spec", [KernelSpec.trig(1.0), KernelSpec.gaussian(1.0)])
    def test_two_point_interpolation(self, spec):
        X = np.array([[0.0], [1.0]])
        m = fit_svr(X, [0.0, 1.0], spec, C=1e6, epsilon=0.0, config=TIGHT)
        assert predict_svr(m, X[0]) == pytest.approx(0.0, abs=1e-6)
        assert predict_svr(m, X[1]) == pytest.approx(1.0, abs=1e-6)

    def test_mirror_symmetry(self):
        x, y = np.linspace(0.1, 3, 15), np.sin(np.linspace(0.1, 3, 15))
        spec = KernelSpec.gaussian(0.7)
        right = fit_svr(x[:, None], y, spec, C=5, config=TIGHT)
        left = fit_svr(-x[:, None], y, spec, C=5, config=TIGHT)
        probes = np.linspace(-1, 4, 21)[:, None]
        assert predict_svr(left, -probes) == pytest.approx(predict_svr(right, probes), abs=1e-6)

    def test_zero_model_predicts_bias(self):
        assert predict_svr(zero_model(-0.5), [2.0]) == -0.5
        with pytest.raises(ShapeError):
            predict_svr(zero_model(0.0), [1.0, 2.0])


class TestRmse:
    def test_exact(self):
        m = zero_model(0.0)
        assert svr_rmse(m, np.zeros((2, 1)), [0.0, 0.0]) == 0.0

    def test_constant_model(self):
        assert svr_rmse(zero_model(0.0), np.zeros((2, 1)), [1.0, -1.0]) == 1.0

    def test_errors(self):
        with pytest.raises(EmptyInputError):
            svr_rmse(zero_model(0.0), np.zeros((0, 1)), [])
        with pytest.raises(ShapeError):
            svr_rmse(zero_model(0.0), np.zeros((3, 1)), [1.0, 2.0])


class TestFitErrors:
    def test_negative_epsilon(self):
        with pytest.raises(InvalidParameterError):
            fit_svr([[0.0], [1.0]], [0.0, 1.0], KernelSpec.trig(1.0), epsilon=-0.1)

    def test_non_finite_target(self):
        with pytest.raises(DataError):
            fit_svr([[0.0], [1.0]], [0.0, np.inf], KernelSpec.trig(1.0))

    def test_too_few(self):
        with pytest.raises(EmptyInputError):
            fit_svr([[0.0]], [1.0], KernelSpec.trig(1.0))

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            fit_svr([[0.0], [1.0]], [1.0], KernelSpec.trig(1.0))


class TestInvariants:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from([1.0, 10.0]), st.sampled_from(["trig", "gaussian", "mixed"]))
    def test_oracle_and_model_invariants(self, seed, C, kind):
        X, y = random_problem(seed)
        spec = KernelSpec(kind, sigma=1.0, beta=0.5 if kind == "mixed" else None)
        eps = 0.1
        K = gram(spec, X).values
        m = fit_svr(X, y, spec, C=C, epsilon=eps, config=TIGHT)
        a, a_star = m.meta["alpha"], m.meta["alpha_star"]
        best, _, _ = svr_oracle(K, y, C, eps)
        obj = svr_dual_objective(a, a_star, y, K, eps)
        if np.linalg.eigvalsh(K)[0] >= 0:
            assert obj == pytest.approx(best, abs=1e-6)
        else:
            assert obj >= best - 1e-9
        assert svr_kkt_violation(m, X, y) <= 1e-3
        assert np.all(a * a_star <= 1e-10)
        assert np.all(np.abs(m.dual_coef) <= C)
        assert abs(m.dual_coef.sum()) <= 1e-8
        inner = np.abs(m.dual_coef) < C
        if inner.any():
            r = y[m.support_indices[inner]] - predict_svr(m, X[m.support_indices[inner]])
            assert np.all(np.abs(np.abs(r) - eps) <= 1e-3)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 5), st.integers(0, 10_000), st.sampled_from(["trig", "gaussian"]))
    def test_interpolation_limit(self, n, seed, kind):
        rng = philox(seed, 5)
        x = np.sort(rng.uniform(-2, 2, n))
        if np.min(np.diff(x)) < 0.2:
            x = np.linspace(-2, 2, n)
        y = np.cos(x)
        spec = KernelSpec(kind, sigma=1.0)
        # with eps = 0 the dual is bounded only if K is positive definite on sum(beta) = 0
        P = np.eye(n) - 1.0 / n
        assume(np.linalg.eigvalsh(P @ gram(spec, x[:, None]).values @ P)[1] > 1e-8)
        m = fit_svr(x[:, None], y, spec, C=1e4, epsilon=0.0, config=TIGHT)
        assert np.max(np.abs(predict_svr(m, x[:, None]) - y)) <= 1e-4

    def test_default_tolerance_kkt(self):
        X, y = random_problem(11)
        m = fit_svr(X, y, KernelSpec.gaussian(1.0), C=10)
        assert svr_kkt_violation(m, X, y) <= 1e-3
