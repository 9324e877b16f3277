"""Variable-order backward differentiation: formulas, tables, adaptation."""

from math import comb
from types import SimpleNamespace

import numpy as np
import pytest
from scipy import sparse
from scipy.linalg import expm

from conftest import equilibrium_state
from dcnetsim.solvers.bdf import (
    ALPHA,
    ERROR_CONST,
    GAMMA,
    KAPPA,
    MAX_ORDER,
    BdfStepper,
    advance_difference_table,
    bdf_step,
    change_difference_table,
    rescale_matrix,
)
from dcnetsim.solvers.integrate import RunBuilder, SolverConfig, integrate


def scalar_system(coef, offset=0.0):
    return SimpleNamespace(
        a=sparse.csr_array(np.array([[float(coef)]])),
        b=np.array([float(offset)]),
    )


def dense_affine(seed=11, dim=3):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(dim, dim))
    m = m - (np.abs(m).sum() + 1.0) * np.eye(dim)
    b = rng.normal(size=dim)
    x0 = rng.normal(size=dim)
    return m, b, x0


def affine_exact(m, b, x0, t):
    dim = m.shape[0]
    aug = np.zeros((dim + 1, dim + 1))
    aug[:dim, :dim] = m
    aug[:dim, dim] = b
    return (expm(aug * t) @ np.concatenate([x0, [1.0]]))[:dim]


def seeded_table(order, dim, y_of_t, t0, h):
    """Difference table rows 0..order from exact solution samples."""
    d = np.zeros((MAX_ORDER + 3, dim))
    for j in range(order + 1):
        acc = np.zeros(dim)
        for i in range(j + 1):
            acc += (-1.0) ** i * comb(j, i) * y_of_t(t0 - i * h)
        d[j] = acc
    return d


class TestCoefficients:
    def test_order_one_is_plain_implicit_euler(self):
        assert KAPPA[1] == 0.0
        assert ALPHA[1] == 1.0
        assert ERROR_CONST[1] == 0.5

    def test_order_two_constants(self):
        assert KAPPA[2] == pytest.approx(-1.0 / 9.0)
        assert ALPHA[2] == pytest.approx((1 + 1.0 / 9.0) * 1.5)
        assert ERROR_CONST[2] == pytest.approx(1.0 / 6.0)

    def test_gamma_is_harmonic_cumsum(self):
        assert GAMMA[0] == 0.0
        assert GAMMA[3] == pytest.approx(1.0 + 0.5 + 1.0 / 3.0)


class TestDifferenceTable:
    def test_rescale_factor_one_is_identity(self):
        rng = np.random.default_rng(0)
        for order in range(1, MAX_ORDER + 1):
            d = rng.normal(size=(MAX_ORDER + 3, 4))
            before = d.copy()
            change_difference_table(d, order, 1.0)
            np.testing.assert_allclose(d, before, rtol=0, atol=1e-12)

    def test_rescale_matches_polynomial_resampling(self):
        # table of y = t^2 at spacing 1 rescaled to spacing 1/2 must equal
        # the directly sampled table
        y = lambda t: np.array([t * t])
        d = seeded_table(2, 1, y, t0=0.0, h=1.0)
        np.testing.assert_allclose(d[:3].ravel(), [0.0, -1.0, 2.0])
        change_difference_table(d, 2, 0.5)
        expected = seeded_table(2, 1, y, t0=0.0, h=0.5)
        np.testing.assert_allclose(d[:3], expected[:3], atol=1e-12)

    def test_rescale_matrix_shape_and_first_row(self):
        r = rescale_matrix(3, 0.7)
        assert r.shape == (4, 4)
        np.testing.assert_allclose(r[0], 1.0)

    def test_advance_keeps_polynomial_structure(self):
        # quadratic: predictor is exact, increment zero, differences shift
        y = lambda t: np.array([t * t])
        d = seeded_table(2, 1, y, t0=0.0, h=1.0)
        y_pred = d[:3].sum(axis=0)
        assert y_pred[0] == pytest.approx(1.0)  # y(1) predicted exactly
        advance_difference_table(d, 2, np.zeros(1))
        np.testing.assert_allclose(d[0], [1.0])
        np.testing.assert_allclose(d[1], [1.0])  # y(1) - y(0)
        np.testing.assert_allclose(d[2], [2.0])  # constant curvature


class TestSingleStep:
    def test_order_one_pins_backward_euler_value(self):
        # y' = -y, h = 0.1 from y = 1: the corrector must solve
        # (1 + h) y1 = y0 giving exactly 1/1.1
        sys1 = scalar_system(-1.0)
        d = np.zeros((MAX_ORDER + 3, 1))
        d[0] = 1.0
        d[1] = 0.1 * -1.0  # h * f(y0)
        y1, err, inc = bdf_step(sys1, d, h=0.1, order=1)
        assert y1[0] == pytest.approx(1.0 / 1.1, abs=1e-14)
        assert err[0] == pytest.approx(0.5 * inc[0])

    def test_rejects_bad_order(self):
        sys1 = scalar_system(-1.0)
        d = np.zeros((MAX_ORDER + 3, 1))
        with pytest.raises(ValueError, match="order"):
            bdf_step(sys1, d, h=0.1, order=0)
        with pytest.raises(ValueError, match="order"):
            bdf_step(sys1, d, h=0.1, order=6)

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_fixed_order_convergence(self, order):
        m, b, x0 = dense_affine()
        sysd = SimpleNamespace(a=sparse.csr_array(m), b=b)
        exact_of = lambda t: affine_exact(m, b, x0, t)
        t_end = 0.5

        def march(n_steps):
            h = t_end / n_steps
            d = seeded_table(order, m.shape[0], exact_of, 0.0, h)
            t = 0.0
            for _ in range(n_steps):
                _, _, inc = bdf_step(sysd, d, h=h, order=order)
                advance_difference_table(d, order, inc)
                t += h
            return np.linalg.norm(d[0] - exact_of(t_end))

        e1, e2 = march(40), march(80)
        slope = np.log2(e1 / e2)
        assert abs(slope - order) < 0.3, f"order {order}: slope {slope:.2f}"


class TestStepperRun:
    def run(self, system, x0, t_end=5.0, rtol=1e-6, atol=1e-9, h_init=None,
            h_max=np.inf):
        stepper = BdfStepper(system, rtol, atol, h_max)
        builder = RunBuilder()
        status, t, x, h = stepper.run_segment(
            0.0, t_end, x0, system.b, (), np.zeros((0, x0.shape[0])),
            h_init, 1, t_end, builder,
        )
        return stepper, builder, status, t, x

    def test_order_climbs_on_smooth_problem(self):
        sys1 = scalar_system(-1.0)
        stepper, builder, status, t, x = self.run(sys1, np.array([1.0]))
        assert status == "ok"
        assert stepper.order >= 2
        assert x[0] == pytest.approx(np.exp(-5.0), abs=1e-4)
        # step grows as the order climbs
        assert builder.trace_h[-1] > 10 * builder.trace_h[0]

    def test_rhs_count_is_one_per_attempt(self):
        sys1 = scalar_system(-1.0)
        stepper, builder, *_ = self.run(sys1, np.array([1.0]), h_init=1e-3)
        attempts = builder.n_acc + builder.n_rej
        assert builder.n_rhs == 1 + attempts

    def test_factorizations_only_on_step_or_order_change(self):
        sys1 = scalar_system(-1.0)
        stepper, builder, *_ = self.run(sys1, np.array([1.0]))
        # quasi-constant policy: far fewer factorizations than accepts
        assert builder.n_fact < builder.n_acc
        assert builder.n_fact >= 1

    def test_accepted_iff_error_at_most_one(self, sys4, x0_4):
        stepper, builder, *_ = self.run(sys4, x0_4, t_end=1.0, h_max=1e-2)
        acc = np.asarray(builder.trace_acc)
        err = np.asarray(builder.trace_err)
        np.testing.assert_array_equal(acc, err <= 1.0)

    def test_equilibrium_is_fixed_point(self, scn4, sys4):
        x_eq = equilibrium_state(scn4)
        run = integrate(
            sys4, x_eq, (0.0, 1.0),
            config=SolverConfig(method="bdf", rtol=1e-6, atol=1e-8),
        )
        np.testing.assert_allclose(run.x_final, x_eq, rtol=0, atol=1e-8)


class TestAgainstReference:
    def test_network_endpoint_matches_tight_explicit_run(self, sys4, x0_4):
        bdf_run = integrate(
            sys4, x0_4, (0.0, 1.0),
            config=SolverConfig(method="bdf", rtol=1e-6, atol=1e-8),
        )
        ref = integrate(
            sys4, x0_4, (0.0, 1.0),
            config=SolverConfig(method="dop853", rtol=1e-10, atol=1e-12),
        )
        rel = np.linalg.norm(bdf_run.x_final - ref.x_final)
        rel /= np.linalg.norm(ref.x_final)
        assert rel < 1e-4
