"""Shared corpora and model builders.

Simulation seeds are fixed; heavy-tailed Euler paths can legitimately
explode (a large jump puts the cubic-drift update outside its stability
region), so the chosen seeds are ones whose paths survive.
"""

import math

import numpy as np
import pytest

from levysde.models import (
    ConstantNoise,
    LotkaVolterraDrift,
    ModelSpec,
    PolynomialDrift,
    PolynomialNoise,
    SplineDrift,
    SplineNoise,
)
from levysde.simulate import SimConfig, simulate_path
from levysde.stable import StableParams

LANDAU_SEED = 4
LANDAU_TRUTH = {"drift.c1": 1.0, "drift.c3": -1.0, "sigma": 0.3, "alpha": 1.6, "beta": 0.0}

LV_SEED = 2
LV_R = np.array([1.0, 2.0, 3.0])
LV_A = np.array([[0.06, 0.02, 0.04], [0.02, 0.08, 0.02], [0.02, 0.04, 0.10]])
LV_SIGMA = np.array([0.3, 0.3, 0.3])
LV_ALPHA = np.array([1.7, 1.8, 1.9])
LV_BETA = np.array([-0.1, 0.1, 0.3])

LOOKALIKE_SEED = 21


def landau_model(a=1.0, b=1.0, sigma=0.3, alpha=1.6, beta=0.0,
                 alpha_free=True, beta_free=True, sigma_free=True):
    return ModelSpec(
        drift=[PolynomialDrift([0.0, a, 0.0, -b], free=[False, True, False, True])],
        noise=[ConstantNoise.from_sigma(sigma, free=sigma_free)],
        stable=[StableParams(alpha, beta)],
        alpha_free=[alpha_free],
        beta_free=[beta_free],
    )


def lv_model():
    return ModelSpec(
        drift=[LotkaVolterraDrift(LV_R[i], LV_A[i]) for i in range(3)],
        noise=[ConstantNoise.from_sigma(LV_SIGMA[i]) for i in range(3)],
        stable=[StableParams(LV_ALPHA[i], LV_BETA[i]) for i in range(3)],
    )


def lookalike_model():
    # double-well drift -(x+1)(x-0.7)(x-2.4) with mildly multiplicative noise
    return ModelSpec(
        drift=[PolynomialDrift([-1.68, 1.42, 2.1, -1.0])],
        noise=[PolynomialNoise([math.log(0.35), 0.15])],
        stable=[StableParams(1.58, -0.2)],
    )


def spline_template(ts, n_knots=6, quantiles=(0.005, 0.995)):
    lo, hi = np.quantile(ts.values[:, 0], quantiles)
    knots = np.linspace(lo, hi, n_knots)
    return ModelSpec(
        drift=[SplineDrift(knots, np.zeros(n_knots))],
        noise=[SplineNoise(knots, np.full(n_knots, math.log(0.25)))],
        stable=[StableParams(1.8, 0.0)],
    )


@pytest.fixture(scope="session")
def landau_fast():
    """N = 2e4 corpus at the reference settings (fast mode)."""
    cfg = SimConfig(model=landau_model(), x0=[1.0], delta=0.01, n_steps=20000, seed=LANDAU_SEED)
    return simulate_path(cfg)


@pytest.fixture(scope="session")
def landau_full():
    """N = 1e5 corpus at the reference settings."""
    cfg = SimConfig(model=landau_model(), x0=[1.0], delta=0.01, n_steps=100000, seed=LANDAU_SEED)
    return simulate_path(cfg)


@pytest.fixture(scope="session")
def lv_corpus():
    xbar = np.linalg.solve(LV_A, np.ones(3))
    cfg = SimConfig(model=lv_model(), x0=xbar, delta=0.01, n_steps=20000, seed=LV_SEED)
    return simulate_path(cfg)


@pytest.fixture(scope="session")
def lookalike_corpus():
    cfg = SimConfig(model=lookalike_model(), x0=[-1.0], delta=0.01, n_steps=100000,
                    seed=LOOKALIKE_SEED)
    return simulate_path(cfg)
