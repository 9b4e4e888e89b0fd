import math

import numpy as np
import pytest

from emdenlab import (
    InvalidParameterError,
    ProblemParams,
    RadialFunction,
    RadialGrid,
    SchrodingerParams,
    derive,
    dual_apply,
    dual_params,
    kelvin_apply,
    kelvin_params,
    residual,
    sigma_inverse,
    sigma_params,
    v_infinity,
)


def test_kelvin_params_beta():
    t = kelvin_params(ProblemParams(5, 0.0, 0.0, 3.0))
    assert t.params.l == 2.0  # (N-2+theta)(p-1) - (4+l-2 theta)
    assert t.params.theta == 0.0
    assert t.params.N == 5


def test_kelvin_params_serrin_boundary():
    # at p = serrin the image tau equals -2 exactly
    params = ProblemParams(5, 0.5, 0.25, (5.5 - 0.25) / 3.5)
    ind = derive(params)
    assert params.p == ind.serrin
    image = kelvin_params(params).params
    assert image.l - image.theta == pytest.approx(-2.0, abs=1e-14)


def test_kelvin_params_tau_sign():
    rng = np.random.default_rng(2)
    for _ in range(50):
        N = int(rng.integers(3, 10))
        theta = rng.uniform(-1.0, 2.0)
        l = rng.uniform(-1.0, 2.0)
        p = rng.uniform(1.05, 6.0)
        params = ProblemParams(N, theta, l, p)
        if not params.standard_regime:
            continue
        ind = derive(params)
        image = kelvin_params(params).params
        assert (image.l - image.theta > -2.0) == (p > ind.serrin)


def test_kelvin_params_involution():
    params = ProblemParams(7, 0.5, 1.25, 2.5)
    twice = kelvin_params(kelvin_params(params).params).params
    assert twice.l == pytest.approx(params.l, abs=1e-12)
    assert twice.theta == params.theta


def test_dual_params_identities():
    t = dual_params(ProblemParams(5, 0.0, 0.0, 3.0))
    assert t.params.theta == -6.0
    assert t.params.l == -10.0
    assert t.params.n_prime == -1.0
    assert t.params.n_prime + 5.0 == 4.0
    assert t.params.tau + 0.0 == -4.0


def test_dual_params_involution_and_mirror():
    rng = np.random.default_rng(4)
    for _ in range(50):
        params = ProblemParams(
            int(rng.integers(2, 10)),
            float(rng.uniform(-8.0, 8.0)),
            float(rng.uniform(-8.0, 8.0)),
            float(rng.uniform(1.1, 5.0)),
        )
        image = dual_params(params).params
        # derived indices carry one rounding each; identities hold to epsilon
        assert image.n_prime + params.n_prime == pytest.approx(4.0, abs=1e-12)
        assert image.tau + params.tau == pytest.approx(-4.0, abs=1e-12)
        back = dual_params(image).params
        assert back.theta == pytest.approx(params.theta, abs=1e-13)
        assert back.l == pytest.approx(params.l, abs=1e-13)
        # mirror regime: N' > 2, tau > -2 maps to N' < 2, tau < -2
        if params.standard_regime:
            assert image.n_prime < 2.0 and image.tau < -2.0


def test_sigma_params_examples():
    sp = SchrodingerParams(5, 0.0, 0.0, 3.0)
    image = sigma_params(sp).params
    assert image.theta == 0.0 and image.l == 0.0  # ell = 0 is the identity
    sp = SchrodingerParams(5, 0.0, 2.0, 3.0)
    image = sigma_params(sp).params
    assert image.theta == pytest.approx(-2.0, abs=1e-14)
    assert image.l == pytest.approx(-4.0, abs=1e-14)


def test_sigma_roundtrip():
    rng = np.random.default_rng(9)
    for _ in range(50):
        N = int(rng.integers(3, 12))
        sp = SchrodingerParams(
            N,
            float(rng.uniform(-3.0, 3.0)),
            float(rng.uniform(-4.0, (N - 2.0) ** 2 / 4.0 - 1e-6)),
            float(rng.uniform(1.1, 6.0)),
        )
        back = sigma_inverse(sigma_params(sp).params)
        assert back.alpha == pytest.approx(sp.alpha, abs=1e-12)
        assert back.ell == pytest.approx(sp.ell, abs=1e-12)
        assert back.p == sp.p


def test_grid_reflect():
    grid = RadialGrid.logspaced(0.25, 16.0, 41)
    refl = grid.reflect()
    assert refl.r_min == pytest.approx(1.0 / 16.0, rel=1e-15)
    assert refl.r_max == pytest.approx(4.0, rel=1e-15)
    twice = refl.reflect()
    assert np.max(np.abs(twice.points - grid.points) / grid.points) < 1e-15


def test_kelvin_apply_maps_singular_to_image_singular():
    params = ProblemParams(5, 0.0, 0.0, 3.0)
    grid = RadialGrid.logspaced(0.1, 10.0, 4001)
    v = v_infinity(params, grid)
    image_params = kelvin_params(params).params
    w = kelvin_apply(v, params)
    ref = v_infinity(image_params, w.grid)
    assert np.max(np.abs(w.values - ref.values) / ref.values) < 1e-13
    # residual oracle on the image equation
    assert residual(w, image_params) < 1e-5


def test_kelvin_apply_involution():
    params = ProblemParams(6, 0.5, 1.0, 2.0)
    grid = RadialGrid.logspaced(0.5, 8.0, 101)
    rng = np.random.default_rng(1)
    v = RadialFunction(grid, rng.uniform(0.5, 2.0, size=101))
    back = kelvin_apply(kelvin_apply(v, params), params)
    assert np.max(np.abs(back.values - v.values) / np.abs(v.values)) < 1e-13
    assert np.max(np.abs(back.grid.points - grid.points) / grid.points) < 1e-15


def test_kelvin_apply_fast_decay_becomes_bounded():
    # a fast-decay tail r^(2-N') maps to a function with a finite limit
    params = ProblemParams(5, 0.0, 0.0, 3.0)
    grid = RadialGrid.logspaced(10.0, 1e4, 301)
    gamma = 1.7
    v = RadialFunction(grid, gamma * grid.points ** (2.0 - 5.0))
    w = kelvin_apply(v, params)
    assert np.allclose(w.values, gamma, rtol=1e-12)


def test_dual_apply_involution_and_endpoints():
    grid = RadialGrid.logspaced(0.2, 5.0, 64)
    rng = np.random.default_rng(8)
    v = RadialFunction(grid, rng.normal(size=64))
    z = dual_apply(v)
    assert z.grid.r_min == pytest.approx(0.2, rel=1e-15)
    assert z.grid.r_max == pytest.approx(5.0, rel=1e-15)
    back = dual_apply(z)
    assert np.array_equal(back.values, v.values)


def test_dual_apply_singular_solution():
    # the dual image of c0 r^(-m) is c0 s^(+m), a solution of the dual equation
    params = ProblemParams(5, 0.0, 0.0, 3.0)
    ind = derive(params)
    grid = RadialGrid.logspaced(0.1, 10.0, 2001)
    v = v_infinity(params, grid)
    z = dual_apply(v)
    expect = ind.c0 * z.grid.points**ind.m_exp
    assert np.max(np.abs(z.values - expect) / expect) < 1e-13
    image_params = dual_params(params).params
    assert residual(z, image_params) < 1e-5


def test_transform_parameter_identities_are_exact():
    # affine maps beyond machine epsilon would break the involution exactness
    params = ProblemParams(9, -1.5, 2.25, 2.0)
    image = dual_params(params).params
    assert image.theta == 4.0 - 18.0 + 1.5
    assert image.l == -18.0 - 2.25
