"""Shared fixtures: the reference instance and its frozen certified values.

The reference instance (p=(3,1), q=(-1,2), NavierStokes, nu=0.06) is the
workhorse TypeI0 example used throughout the suite; its growth rate and
viscosity threshold below were certified by cross-validating the
continued-fraction root against the truncated-operator spectrum, the
determinant zero, and a time-stepped growth rate (all agreeing to ~1e-11).
"""

import pytest

from instab import FlowParams, LatticeVector, ModelKind

# Certified positive root of the reference instance (bisection to 1e-12,
# matrix oracle at N=128 agrees to 2.4e-12).
LAM_STAR = 0.22315363431475005

# Certified viscosity threshold of the reference orbit (scan + bisection to
# 1e-8; the dispersion value at lambda=0 changes sign across it).
NU_STAR = 0.089645395

P = LatticeVector(3, 1)


def make_params(model=ModelKind.NAVIER_STOKES, q=(-1, 2), nu=0.06,
                alpha=None, gamma=None, p=(3, 1)):
    return FlowParams(model=model, p=LatticeVector(*p), q=LatticeVector(*q),
                      nu=nu, alpha=alpha, gamma=gamma)


@pytest.fixture
def fig_params():
    """Reference TypeI0 NavierStokes instance."""
    return make_params()


@pytest.fixture
def plus_params():
    """TypeIPlus companion on the same p: q=(0,-2), nu=0.05."""
    return make_params(q=(0, -2), nu=0.05)


@pytest.fixture
def minus_params():
    """TypeIMinus companion on the same p: q=(0,2), nu=0.05."""
    return make_params(q=(0, 2), nu=0.05)
