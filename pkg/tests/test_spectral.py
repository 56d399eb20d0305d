"""Truncated-operator oracles: spectra, determinants, time-stepping."""

import math

import numpy as np
import pytest

from instab import (
    DispersionSpec,
    NoConvergence,
    NoSignChange,
    build_K,
    build_L,
    det_I_plus_K,
    det_root,
    dominant_mode,
    find_root,
    growth_rate,
    max_real_eig,
    rho,
)
from conftest import LAM_STAR, make_params


@pytest.fixture(scope="module")
def fig():
    pr = make_params()
    lam = find_root(DispersionSpec(pr), tol=1e-12).lam
    return pr, lam


# ---------------------------------------------------------------------------
# operator assembly
# ---------------------------------------------------------------------------

def test_three_by_three_entries(fig_params):
    nu = fig_params.nu
    got = build_L(fig_params, 1).dense()
    expect = np.array([
        [-17 * nu, 1.0, 0.0],          # row n=-1: sup is -rho_0 = +1
        [7.0 / 17.0, -5 * nu, -3.0 / 13.0],
        [0.0, -1.0, -13 * nu],         # row n=+1: sub is rho_0 = -1
    ])
    np.testing.assert_allclose(got, expect, rtol=1e-14, atol=0)


def test_indices_and_matvec(fig_params):
    op = build_L(fig_params, 4)
    assert list(op.indices) == list(range(-4, 5))
    rng = np.random.default_rng(7)
    v = rng.standard_normal(9)
    np.testing.assert_allclose(op.matvec(v), op.dense() @ v, rtol=1e-13,
                               atol=1e-13)


def test_window_must_be_positive(fig_params):
    with pytest.raises(ValueError):
        build_L(fig_params, 0)


def test_parallel_orbit_decouples():
    pr = make_params(q=(6, 2), gamma=3.0)
    op = build_L(pr, 3)
    assert not np.any(op.sub) and not np.any(op.sup)
    # c_n = 10 n^2 on the decoupled orbit, so the top of the spectrum is 0
    assert max_real_eig(pr, 3) == pytest.approx(0.0, abs=1e-15)


def test_alpha_to_zero_entrywise(fig_params):
    from instab import ModelKind
    alpha = 1e-4
    pr = make_params(model=ModelKind.NS_ALPHA, alpha=alpha)
    gap = np.max(np.abs(build_L(pr, 8).dense() - build_L(fig_params, 8).dense()))
    assert gap <= 1e4 * alpha ** 2


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def test_max_real_eig_matches_dispersion_root(fig):
    pr, lam = fig
    assert max_real_eig(pr, 128) == pytest.approx(lam, abs=1e-9)


def test_max_real_eig_doubling_mode(fig):
    pr, lam = fig
    got = max_real_eig(pr, 8, tol=1e-10)
    assert got == pytest.approx(max_real_eig(pr, 256), abs=1e-9)


def test_max_real_eig_reports_nonconvergence(fig_params):
    with pytest.raises(NoConvergence):
        max_real_eig(fig_params, 40, tol=1e-30, dense_cap=64)


def test_max_real_eig_respects_dense_cap(fig_params):
    with pytest.raises(ValueError):
        max_real_eig(fig_params, 1024, dense_cap=512)


def test_dominant_mode_consistency(fig):
    pr, lam = fig
    val, vec = dominant_mode(pr, 64)
    assert val == pytest.approx(max_real_eig(pr, 64), rel=1e-12)
    assert vec.shape == (129,)
    assert np.all(np.isreal(vec))
    op = build_L(pr, 64)
    defect = np.max(np.abs(op.matvec(vec) - val * vec)) / np.max(np.abs(vec))
    assert defect <= 1e-10


# ---------------------------------------------------------------------------
# determinant of I + K
# ---------------------------------------------------------------------------

def test_det_matches_dense_determinant(fig_params):
    lam = 0.3
    for N in (1, 2, 5):
        K = build_K(lam, fig_params, N)
        dense = np.eye(2 * N + 1) + K.dense()
        got = det_I_plus_K(lam, fig_params, N)
        assert got.value == pytest.approx(float(np.linalg.det(dense)),
                                          rel=1e-12)
        assert got.lam == lam and got.N == N


def test_det_depth_zero_and_one(fig_params):
    lam = 0.3
    nu = fig_params.nu
    k = {n: 1.0 / (-nu * (5 if n == 0 else 13 if n == 1 else 17) - lam)
         for n in (-1, 0, 1)}
    r = {n: rho(n, fig_params) for n in (-1, 0, 1)}
    expect = (1.0
              + k[0] * k[1] * r[0] * r[1]
              + k[-1] * k[0] * r[-1] * r[0])
    got = det_I_plus_K(lam, fig_params, 1)
    assert got.value == pytest.approx(expect, rel=1e-13)


def test_det_requires_positive_lambda(fig_params):
    with pytest.raises(ValueError):
        det_I_plus_K(0.0, fig_params, 4)


def test_det_vanishes_at_root(fig):
    pr, lam = fig
    assert abs(det_I_plus_K(lam, pr, 128).value) <= 1e-6
    # truncation is already converged: doubling the window moves nothing
    d32 = det_I_plus_K(lam, pr, 32).value
    d128 = det_I_plus_K(lam, pr, 128).value
    assert abs(d32 - d128) <= 1e-6


def test_det_window_convergence(fig_params):
    lam = 0.2
    gaps = []
    for N in (8, 16, 32, 64):
        gaps.append(abs(det_I_plus_K(lam, fig_params, 2 * N).value
                        - det_I_plus_K(lam, fig_params, N).value))
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] <= 1e-5


def test_k_entries_decay_quadratically(fig_params):
    K = build_K(0.25, fig_params, 64)
    n = np.arange(-64, 65)
    scaled = np.abs(K.k) * np.maximum(1, n * n)
    assert np.max(scaled) <= 10.0


def test_det_root_agrees_with_dispersion(fig):
    pr, lam = fig
    got = det_root(pr, 128, (0.9 * lam, 1.1 * lam), tol=1e-10)
    assert got == pytest.approx(lam, abs=1e-8)


def test_det_root_needs_a_sign_change():
    pr = make_params(q=(6, 2), gamma=3.0)  # decoupled: det is identically 1
    with pytest.raises(NoSignChange):
        det_root(pr, 16, (0.1, 1.0), tol=1e-8)


def test_det_root_validates_bracket(fig_params):
    with pytest.raises(ValueError):
        det_root(fig_params, 16, (0.3, 0.1), tol=1e-8)
    with pytest.raises(ValueError):
        det_root(fig_params, 16, (0.1, 0.3), tol=0.0)


# ---------------------------------------------------------------------------
# time-stepped growth rate
# ---------------------------------------------------------------------------

def stable_dt(params, N):
    op = build_L(params, N)
    return 1.0 / (4.0 * float(np.max(np.abs(op.diag))) + 4.0)


def test_growth_rate_matches_root(fig):
    pr, lam = fig
    dt = stable_dt(pr, 16)
    slope = growth_rate(pr, 16, t_final=40.0, dt=dt)
    assert slope == pytest.approx(lam, rel=1e-6)


def test_growth_rate_negative_when_stable():
    pr = make_params(nu=10.0)
    slope = growth_rate(pr, 16, t_final=5.0, dt=stable_dt(pr, 16))
    assert slope < 0.0


def test_growth_rate_seed_reproducible(fig_params):
    dt = stable_dt(fig_params, 8)
    a = growth_rate(fig_params, 8, t_final=10.0, dt=dt, seed=3)
    b = growth_rate(fig_params, 8, t_final=10.0, dt=dt, seed=3)
    c = growth_rate(fig_params, 8, t_final=10.0, dt=dt, seed=4)
    assert a == b
    assert a != c


def test_growth_rate_accepts_explicit_start(fig):
    pr, lam = fig
    _, vec = dominant_mode(pr, 16)
    slope = growth_rate(pr, 16, t_final=20.0, dt=stable_dt(pr, 16), w0=vec)
    assert slope == pytest.approx(lam, rel=1e-8)


def test_growth_rate_input_validation(fig_params):
    dt = stable_dt(fig_params, 8)
    with pytest.raises(ValueError):
        growth_rate(fig_params, 8, t_final=10.0, dt=1.0)  # unstable step
    with pytest.raises(ValueError):
        growth_rate(fig_params, 8, t_final=0.0, dt=dt)
    with pytest.raises(ValueError):
        growth_rate(fig_params, 8, t_final=10.0, dt=dt,
                    w0=np.zeros(17))
    with pytest.raises(ValueError):
        growth_rate(fig_params, 8, t_final=10.0, dt=dt, w0=np.ones(5))
