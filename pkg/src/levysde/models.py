"""Drift and noise-intensity model families plus flat parameter packing.

Drift models: univariate polynomials, natural cubic splines on a knot
sequence (one-dimensional systems only), Lotka-Volterra competition rows,
and generic multivariate monomial sums. Noise-intensity models store
their coefficients on log scale so the evaluated intensity is positive by
construction.

A `ModelSpec` bundles one drift model, one noise model and one pair of
stable noise parameters per dimension, with per-parameter free/frozen
masks. `pack_params` / `unpack_params` map the free parameters to a flat
vector with bound-respecting transforms (identity, log, a logistic map
onto the index interval, tanh for skewness).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import expit, logit

from .errors import ConfigurationError
from .stable import ALPHA_FLOOR, StableParams

__all__ = [
    "NaturalSpline",
    "PolynomialDrift",
    "SplineDrift",
    "LotkaVolterraDrift",
    "MultinomialDrift",
    "ConstantNoise",
    "PolynomialNoise",
    "SplineNoise",
    "ModelSpec",
    "ParamVector",
    "spline_eval",
    "eval_drift",
    "eval_noise",
    "pack_params",
    "unpack_params",
    "to_unbounded",
    "from_unbounded",
]

_LOG_SIGMA_CAP = 300.0  # keeps exp() finite under extreme extrapolation


class NaturalSpline:
    """Natural cubic interpolant with linear extrapolation.

    Second derivative is zero at the end knots; outside the knot range the
    curve continues with the end slopes, which keeps evaluation finite on
    the whole real line.
    """

    def __init__(self, knots, values):
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        if knots.ndim != 1 or len(knots) < 4:
            raise ConfigurationError("spline needs at least 4 knots")
        if np.any(np.diff(knots) <= 0):
            raise ConfigurationError("spline knots must be strictly increasing")
        if len(values) != len(knots):
            raise ConfigurationError("one ordinate per knot required")
        self.knots = knots
        self.values = values
        self._cs = CubicSpline(knots, values, bc_type="natural")
        self._slope_lo = float(self._cs(knots[0], 1))
        self._slope_hi = float(self._cs(knots[-1], 1))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self._cs(np.clip(x, self.knots[0], self.knots[-1]))
        lo = x < self.knots[0]
        if np.any(lo):
            out = np.where(lo, self.values[0] + self._slope_lo * (x - self.knots[0]), out)
        hi = x > self.knots[-1]
        if np.any(hi):
            out = np.where(hi, self.values[-1] + self._slope_hi * (x - self.knots[-1]), out)
        return out


def spline_eval(knots, ordinates, x):
    """Natural cubic spline through (knot, ordinate) pairs at x."""
    return NaturalSpline(knots, ordinates)(x)


# ---------------------------------------------------------------------------
# Drift families. Each exposes flat natural-scale parameters, free masks
# and vectorized evaluation on states of shape (d,) or (n, d).


@dataclass
class PolynomialDrift:
    """mu_i(X) = sum_p coefficients[p] * x_i**p (own coordinate only)."""

    coefficients: np.ndarray
    free: np.ndarray = None

    kind = "polynomial"

    def __post_init__(self):
        self.coefficients = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        if self.free is None:
            self.free = np.ones(len(self.coefficients), dtype=bool)
        self.free = np.asarray(self.free, dtype=bool)
        if len(self.free) != len(self.coefficients):
            raise ConfigurationError("free mask length must match coefficients")

    def evaluate(self, X, dim):
        x = np.asarray(X, dtype=float)[..., dim]
        return np.polynomial.polynomial.polyval(x, self.coefficients)

    def get_params(self):
        return self.coefficients.copy()

    def set_params(self, values):
        self.coefficients = np.asarray(values, dtype=float).copy()

    def param_names(self):
        return [f"drift.c{p}" for p in range(len(self.coefficients))]

    def param_transforms(self):
        return ["identity"] * len(self.coefficients)

    def linear_basis(self, X, dim):
        x = np.asarray(X, dtype=float)[..., dim]
        return np.vander(x, len(self.coefficients), increasing=True)


@dataclass
class SplineDrift:
    """Natural cubic spline drift on a knot sequence (univariate systems)."""

    knots: np.ndarray
    ordinates: np.ndarray
    free: np.ndarray = None

    kind = "spline"

    def __post_init__(self):
        self.knots = np.asarray(self.knots, dtype=float)
        self.ordinates = np.asarray(self.ordinates, dtype=float)
        if self.free is None:
            self.free = np.ones(len(self.knots), dtype=bool)
        self.free = np.asarray(self.free, dtype=bool)
        NaturalSpline(self.knots, self.ordinates)  # validates

    def evaluate(self, X, dim):
        x = np.asarray(X, dtype=float)[..., dim]
        return NaturalSpline(self.knots, self.ordinates)(x)

    def get_params(self):
        return self.ordinates.copy()

    def set_params(self, values):
        self.ordinates = np.asarray(values, dtype=float).copy()

    def param_names(self):
        return [f"mu@{k:g}" for k in self.knots]

    def param_transforms(self):
        return ["identity"] * len(self.knots)

    def linear_basis(self, X, dim):
        x = np.asarray(X, dtype=float)[..., dim]
        cols = []
        for j in range(len(self.knots)):
            unit = np.zeros(len(self.knots))
            unit[j] = 1.0
            cols.append(NaturalSpline(self.knots, unit)(x))
        return np.column_stack(cols)


@dataclass
class LotkaVolterraDrift:
    """mu_i(X) = r * x_i * (1 - sum_j interactions[j] * x_j)."""

    r: float
    interactions: np.ndarray
    free: np.ndarray = None

    kind = "lotka_volterra"

    def __post_init__(self):
        self.interactions = np.asarray(self.interactions, dtype=float)
        if self.free is None:
            self.free = np.ones(1 + len(self.interactions), dtype=bool)
        self.free = np.asarray(self.free, dtype=bool)

    def evaluate(self, X, dim):
        X = np.asarray(X, dtype=float)
        xi = X[..., dim]
        return self.r * xi * (1.0 - X @ self.interactions)

    def get_params(self):
        return np.concatenate(([self.r], self.interactions))

    def set_params(self, values):
        values = np.asarray(values, dtype=float)
        self.r = float(values[0])
        self.interactions = values[1:].copy()

    def param_names(self):
        return ["r"] + [f"a{j + 1}" for j in range(len(self.interactions))]

    def param_transforms(self):
        return ["identity"] * (1 + len(self.interactions))


@dataclass
class MultinomialDrift:
    """mu_i(X) = sum_k coefficients[k] * prod_j x_j**exponents[k, j]."""

    coefficients: np.ndarray
    exponents: np.ndarray  # (n_terms, d) nonnegative integers
    free: np.ndarray = None

    kind = "multinomial"

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        self.exponents = np.asarray(self.exponents, dtype=int)
        if self.exponents.ndim != 2 or len(self.exponents) != len(self.coefficients):
            raise ConfigurationError("one exponent row per coefficient required")
        if self.free is None:
            self.free = np.ones(len(self.coefficients), dtype=bool)
        self.free = np.asarray(self.free, dtype=bool)

    def evaluate(self, X, dim):
        X = np.asarray(X, dtype=float)
        monos = self._monomials(X)
        return monos @ self.coefficients

    def _monomials(self, X):
        cols = [np.prod(X[..., :] ** row, axis=-1) for row in self.exponents]
        return np.stack(cols, axis=-1)

    def get_params(self):
        return self.coefficients.copy()

    def set_params(self, values):
        self.coefficients = np.asarray(values, dtype=float).copy()

    def param_names(self):
        names = []
        for row in self.exponents:
            mono = "*".join(f"x{j + 1}^{e}" for j, e in enumerate(row) if e) or "1"
            names.append(f"drift[{mono}]")
        return names

    def param_transforms(self):
        return ["identity"] * len(self.coefficients)

    def linear_basis(self, X, dim):
        return self._monomials(np.asarray(X, dtype=float))


# ---------------------------------------------------------------------------
# Noise-intensity families (log-scale storage, reported on natural scale)


@dataclass
class ConstantNoise:
    """sigma(X) = constant > 0, stored as log sigma."""

    log_sigma: float
    free: np.ndarray = None

    kind = "constant"

    def __post_init__(self):
        if self.free is None:
            self.free = np.ones(1, dtype=bool)
        self.free = np.asarray(self.free, dtype=bool)

    @classmethod
    def from_sigma(cls, sigma, free=True):
        if sigma <= 0:
            raise ConfigurationError("noise intensity must be positive")
        return cls(log_sigma=math.log(sigma), free=np.array([free]))

    def evaluate(self, X, dim):
        x = np.asarray(X, dtype=float)[..., dim]
        return np.full(np.shape(x), math.exp(self.log_sigma))

    def get_params(self):
        return np.array([math.exp(self.log_sigma)])

    def set_params(self, values):
        v = float(np.asarray(values, dtype=float)[0])
        if not v > 0:
            raise ConfigurationError("noise intensity must stay positive")
        self.log_sigma = math.log(v)

    def param_names(self):
        return ["sigma"]

    def param_transforms(self):
        return ["log"]


@dataclass
class PolynomialNoise:
    """sigma(X) = exp(sum_p coefficients[p] * x_i**p)."""

    coefficients: np.ndarray
    free: np.ndarray = None

    kind = "polynomial"

    def __post_init__(self):
        self.coefficients = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        if self.free is None:
            self.free = np.ones(len(self.coefficients), dtype=bool)
        self.free = np.asarray(self.free, dtype=bool)

    def evaluate(self, X, dim):
        x = np.asarray(X, dtype=float)[..., dim]
        logs = np.polynomial.polynomial.polyval(x, self.coefficients)
        return np.exp(np.clip(logs, -_LOG_SIGMA_CAP, _LOG_SIGMA_CAP))

    def get_params(self):
        return self.coefficients.copy()

    def set_params(self, values):
        self.coefficients = np.asarray(values, dtype=float).copy()

    def param_names(self):
        return [f"noise.c{p}" for p in range(len(self.coefficients))]

    def param_transforms(self):
        return ["identity"] * len(self.coefficients)


@dataclass
class SplineNoise:
    """sigma(X) = exp(natural spline through log-ordinates at the knots)."""

    knots: np.ndarray
    log_ordinates: np.ndarray
    free: np.ndarray = None

    kind = "spline"

    def __post_init__(self):
        self.knots = np.asarray(self.knots, dtype=float)
        self.log_ordinates = np.asarray(self.log_ordinates, dtype=float)
        if self.free is None:
            self.free = np.ones(len(self.knots), dtype=bool)
        self.free = np.asarray(self.free, dtype=bool)
        NaturalSpline(self.knots, self.log_ordinates)  # validates

    def evaluate(self, X, dim):
        x = np.asarray(X, dtype=float)[..., dim]
        logs = NaturalSpline(self.knots, self.log_ordinates)(x)
        return np.exp(np.clip(logs, -_LOG_SIGMA_CAP, _LOG_SIGMA_CAP))

    def get_params(self):
        return np.exp(self.log_ordinates)

    def set_params(self, values):
        values = np.asarray(values, dtype=float)
        if np.any(values <= 0):
            raise ConfigurationError("noise ordinates must stay positive")
        self.log_ordinates = np.log(values)

    def param_names(self):
        return [f"sigma@{k:g}" for k in self.knots]

    def param_transforms(self):
        return ["log"] * len(self.knots)


# ---------------------------------------------------------------------------
# Model specification


@dataclass
class ModelSpec:
    """Per-dimension drift, noise intensity, and stable noise parameters.

    The noise-intensity matrix is diagonal by construction: dimension i is
    driven by its own independent standard stable source with (alpha_i,
    beta_i); scale and shift of each source are fixed at 1 and 0 for
    identifiability.
    """

    drift: list
    noise: list
    stable: list
    alpha_free: list = None
    beta_free: list = None

    def __post_init__(self):
        d = len(self.drift)
        if d < 1 or len(self.noise) != d or len(self.stable) != d:
            raise ConfigurationError(
                "drift, noise, and stable parameter lists must share one length >= 1"
            )
        for p in self.stable:
            if not (p.gamma == 1.0 and p.delta == 0.0):
                raise ConfigurationError(
                    "noise sources are standard: gamma = 1, delta = 0"
                )
        if self.alpha_free is None:
            self.alpha_free = [True] * d
        if self.beta_free is None:
            self.beta_free = [True] * d
        for i in range(d):
            if isinstance(self.drift[i], SplineDrift) and d > 1:
                raise ConfigurationError("spline drift is restricted to d = 1")
            if isinstance(self.noise[i], SplineNoise) and d > 1:
                raise ConfigurationError("spline noise is restricted to d = 1")

    @property
    def dimension(self):
        return len(self.drift)

    def copy(self):
        import copy

        return copy.deepcopy(self)

    def n_free(self):
        return len(pack_params(self).values)


def eval_drift(m: ModelSpec, X):
    """Drift vector M(X); X of shape (d,) or (n, d)."""
    X = np.asarray(X, dtype=float)
    out = [m.drift[i].evaluate(X, i) for i in range(m.dimension)]
    return np.stack(out, axis=-1)


def eval_noise(m: ModelSpec, X):
    """Diagonal of the noise-intensity matrix; entries strictly positive."""
    X = np.asarray(X, dtype=float)
    out = [m.noise[i].evaluate(X, i) for i in range(m.dimension)]
    return np.stack(out, axis=-1)


# ---------------------------------------------------------------------------
# Flat parameter vector with bound-respecting transforms

_ALPHA_LO = ALPHA_FLOOR
_ALPHA_SPAN = 2.0 - ALPHA_FLOOR
_EPS = 1e-12


def to_unbounded(value, transform):
    if transform == "identity":
        return float(value)
    if transform == "log":
        return math.log(value)
    if transform == "alpha_interval":
        frac = (value - _ALPHA_LO) / _ALPHA_SPAN
        return float(logit(np.clip(frac, _EPS, 1.0 - _EPS)))
    if transform == "tanh_pm1":
        return float(np.arctanh(np.clip(value, -1.0 + _EPS, 1.0 - _EPS)))
    raise ConfigurationError(f"unknown transform {transform!r}")


def from_unbounded(u, transform):
    if transform == "identity":
        return float(u)
    if transform == "log":
        return math.exp(np.clip(u, -_LOG_SIGMA_CAP, _LOG_SIGMA_CAP))
    if transform == "alpha_interval":
        return float(_ALPHA_LO + _ALPHA_SPAN * expit(u))
    if transform == "tanh_pm1":
        return float(np.tanh(u))
    raise ConfigurationError(f"unknown transform {transform!r}")


@dataclass
class ParamVector:
    """Ordered free parameters on their natural (reporting) scale."""

    values: np.ndarray
    transforms: list
    names: list

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.values) != len(self.transforms) or len(self.values) != len(self.names):
            raise ConfigurationError("values, transforms and names must align")

    def __len__(self):
        return len(self.values)

    def to_unbounded(self):
        return np.array(
            [to_unbounded(v, t) for v, t in zip(self.values, self.transforms)]
        )

    def from_unbounded(self, u):
        u = np.asarray(u, dtype=float)
        if len(u) != len(self.values):
            raise ConfigurationError("unbounded vector length mismatch")
        return np.array(
            [from_unbounded(ui, t) for ui, t in zip(u, self.transforms)]
        )

    def replace(self, values):
        return ParamVector(np.asarray(values, dtype=float), list(self.transforms), list(self.names))


def _dim_prefix(model, i):
    return f"x{i + 1}." if model.dimension > 1 else ""


def pack_params(m: ModelSpec) -> ParamVector:
    """Collect the free parameters, ordered per dimension as drift, noise,
    alpha, beta."""
    values, transforms, names = [], [], []
    for i in range(m.dimension):
        pre = _dim_prefix(m, i)
        for block in (m.drift[i], m.noise[i]):
            vals = block.get_params()
            trs = block.param_transforms()
            nms = block.param_names()
            for j, keep in enumerate(block.free):
                if keep:
                    values.append(vals[j])
                    transforms.append(trs[j])
                    names.append(pre + nms[j])
        if m.alpha_free[i]:
            values.append(m.stable[i].alpha)
            transforms.append("alpha_interval")
            names.append(pre + "alpha")
        if m.beta_free[i]:
            values.append(m.stable[i].beta)
            transforms.append("tanh_pm1")
            names.append(pre + "beta")
    return ParamVector(np.array(values), transforms, names)


def unpack_params(values, template: ModelSpec) -> ModelSpec:
    """Rebuild a ModelSpec from free-parameter values; frozen entries are
    carried over from the template untouched."""
    values = np.asarray(getattr(values, "values", values), dtype=float)
    m = template.copy()
    pos = 0
    for i in range(m.dimension):
        for block in (m.drift[i], m.noise[i]):
            current = block.get_params()
            n_take = int(np.sum(block.free))
            if n_take:
                if pos + n_take > len(values):
                    raise ConfigurationError("parameter vector too short for template")
                current[block.free] = values[pos : pos + n_take]
                pos += n_take
                block.set_params(current)
        alpha, beta = m.stable[i].alpha, m.stable[i].beta
        if m.alpha_free[i]:
            if pos >= len(values):
                raise ConfigurationError("parameter vector too short for template")
            alpha = float(values[pos])
            pos += 1
        if m.beta_free[i]:
            if pos >= len(values):
                raise ConfigurationError("parameter vector too short for template")
            beta = float(values[pos])
            pos += 1
        m.stable[i] = StableParams(alpha, beta)
    if pos != len(values):
        raise ConfigurationError(
            f"parameter vector has {len(values)} entries, template takes {pos}"
        )
    return m
