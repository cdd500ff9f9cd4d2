"""Maximum-likelihood fitting, observed information, and the two-pass
domain-truncated fit.

Optimization runs a derivative-free simplex search in unbounded
transformed coordinates (restarted until the objective stops improving),
so no constraint handling is needed: noise intensities are optimized on
log scale, the index through a logistic map onto its interval, the
skewness through tanh. Standard errors come from the central
finite-difference Hessian of the negative log-likelihood in the original
(natural) coordinates, symmetrized and inverted.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import (
    ConfigurationError,
    DataError,
    InitializationError,
    OptimizationError,
)
from .likelihood import TimeSeries, log_likelihood
from .models import (
    ConstantNoise,
    LotkaVolterraDrift,
    ModelSpec,
    ParamVector,
    PolynomialNoise,
    SplineNoise,
    pack_params,
    unpack_params,
)
from .stable import StableParams

__all__ = [
    "FitOptions",
    "FitResult",
    "initialize_params",
    "fit_mle",
    "observed_information",
    "standard_errors",
    "two_pass_fit",
]

ALPHA_INIT = 1.8
BETA_INIT = 0.0
_BIG = 1e15  # objective value for rejected trial points


@dataclass
class FitOptions:
    tolerance: float = 1e-8          # objective-change convergence tolerance
    max_iterations: int = None       # default 2000 * n_free
    multistart: int = 1
    seed: int = 0
    truncation: tuple = None         # (lo, hi) quantiles or explicit bounds
    truncation_bounds: np.ndarray = None  # (d, 2) explicit per-coordinate bounds
    hessian_step: float = 1e-4       # h_i = max(step, step * |theta_i|)
    init_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.truncation is not None:
            lo, hi = self.truncation
            if not (0.0 <= lo < hi <= 1.0):
                raise ConfigurationError("truncation quantiles need 0 <= lo < hi <= 1")
        if self.multistart < 1:
            raise ConfigurationError("multistart must be at least 1")


@dataclass
class FitResult:
    theta_hat: ParamVector
    std_errors: np.ndarray
    loglik: float
    observed_information: np.ndarray
    covariance: np.ndarray
    converged: bool
    n_objective_calls: int
    notes: list = field(default_factory=list)
    loglik_pass1: float = None
    loglik_pass2: float = None

    def parameter(self, name):
        return float(self.theta_hat.values[self.theta_hat.names.index(name)])

    def std_error(self, name):
        return float(self.std_errors[self.theta_hat.names.index(name)])


# ---------------------------------------------------------------------------
# Initialization


def initialize_params(ts: TimeSeries, template: ModelSpec) -> ModelSpec:
    """Data-driven starting values for the free parameters.

    Drift coefficients come from least squares of the increment rate on
    the drift basis; the noise level from a robust scale of the drift
    residuals; the stable index and skewness always start at 1.8 and 0.
    """
    model = template.copy()
    n_free = len(pack_params(template).values)
    n_trans = ts.n - 1
    if ts.n < 10 * max(n_free, 1):
        raise DataError(
            f"need at least {10 * n_free} observations for {n_free} free parameters"
        )
    origin = ts.values[:-1]
    rate = np.diff(ts.values, axis=0) / ts.delta

    for i in range(model.dimension):
        block = model.drift[i]
        free = block.free
        if isinstance(block, LotkaVolterraDrift):
            _init_lotka_volterra(block, origin, rate[:, i], i)
        elif hasattr(block, "linear_basis") and np.any(free):
            basis = block.linear_basis(origin, i)
            params = block.get_params()
            target = rate[:, i] - basis[:, ~free] @ params[~free]
            coef, _, rank, _ = np.linalg.lstsq(basis[:, free], target, rcond=None)
            if rank < int(np.sum(free)):
                raise InitializationError(
                    "drift basis is rank deficient; reduce the number of "
                    "drift parameters or refine the knot sequence"
                )
            params[free] = coef
            block.set_params(params)

    drift_fit = np.stack(
        [model.drift[i].evaluate(origin, i) for i in range(model.dimension)], axis=-1
    )
    resid = np.abs((rate - drift_fit) * ts.delta)
    for i in range(model.dimension):
        scale = float(np.median(resid[:, i])) / ts.delta ** (1.0 / ALPHA_INIT)
        scale = max(scale, 1e-12)
        block = model.noise[i]
        if isinstance(block, ConstantNoise) and block.free[0]:
            block.log_sigma = math.log(scale)
        elif isinstance(block, SplineNoise):
            vals = block.log_ordinates.copy()
            vals[block.free] = math.log(scale)
            block.log_ordinates = vals
        elif isinstance(block, PolynomialNoise) and block.free[0]:
            coefs = block.coefficients.copy()
            coefs[0] = math.log(scale)
            coefs[1:][block.free[1:]] = 0.0
            block.set_params(coefs)
        alpha = ALPHA_INIT if model.alpha_free[i] else model.stable[i].alpha
        beta = BETA_INIT if model.beta_free[i] else model.stable[i].beta
        model.stable[i] = StableParams(alpha, beta)
    return model


def _init_lotka_volterra(block, origin, rate_i, dim):
    """Linear least squares in (r, r*a_j) coordinates: the growth row is
    r x_i - sum_j (r a_j) x_i x_j."""
    xi = origin[:, dim]
    basis = np.column_stack([xi] + [-xi * origin[:, j] for j in range(origin.shape[1])])
    coef, _, rank, _ = np.linalg.lstsq(basis, rate_i, rcond=None)
    if rank < basis.shape[1]:
        raise InitializationError(
            "interaction basis is rank deficient; the corpus does not "
            "identify every Lotka-Volterra coefficient"
        )
    r = coef[0]
    if abs(r) < 1e-8:
        return  # keep template values; growth rate not identified
    new = np.concatenate(([r], coef[1:] / r))
    keep = block.get_params()
    keep[block.free] = new[block.free]
    block.set_params(keep)


# ---------------------------------------------------------------------------
# Simplex optimization in transformed coordinates


def _restarted_simplex(fun, u0, tol, budget):
    """Nelder-Mead with restarts at the best vertex until the objective
    stops improving by more than `tol` (or the budget is exhausted)."""
    best_u = np.asarray(u0, dtype=float)
    best_f = fun(best_u)
    used = 0
    success = False
    for _ in range(6):
        remaining = budget - used
        if remaining <= 10:
            break
        res = minimize(
            fun,
            best_u,
            method="Nelder-Mead",
            options={
                "maxiter": remaining,
                "fatol": tol,
                "xatol": 1e-7,
                "adaptive": len(best_u) > 6,
            },
        )
        used += res.nit
        improvement = best_f - res.fun
        if res.fun < best_f:
            best_u, best_f = res.x, res.fun
        if improvement <= max(tol, 1e-11 * abs(best_f)) and res.success:
            success = True
            break
        if res.success and improvement <= 10 * max(tol, 1e-12 * abs(best_f)):
            success = True
            break
    return best_u, best_f, used, success


def fit_mle(ts: TimeSeries, template: ModelSpec, opts: FitOptions = None, mask=None) -> FitResult:
    """Maximize the path log-likelihood over the template's free parameters.

    The reported optimum is the best of `opts.multistart` simplex runs
    (start 1 is the template itself, further starts are seeded jitters in
    transformed coordinates). Deterministic given identical inputs.
    """
    opts = opts or FitOptions()
    pv = pack_params(template)
    if len(pv) == 0:
        raise ConfigurationError("template marks no free parameter")
    u0 = pv.to_unbounded()
    calls = [0]
    any_finite = [False]

    def objective(u):
        calls[0] += 1
        try:
            model = unpack_params(pv.from_unbounded(u), template)
            ll = log_likelihood(ts, model, mask)
        except Exception:
            return _BIG
        if not np.isfinite(ll):
            return _BIG
        any_finite[0] = True
        return -ll

    budget = opts.max_iterations or 2000 * len(pv)
    rng = np.random.default_rng(opts.seed)
    starts = [u0]
    for _ in range(opts.multistart - 1):
        starts.append(u0 + rng.normal(scale=0.25, size=len(u0)))

    best = None
    converged = False
    for start in starts:
        u, f, _, success = _restarted_simplex(objective, start, opts.tolerance, budget)
        if best is None or f < best[1]:
            best = (u, f)
            converged = success
    if not any_finite[0] or best[1] >= _BIG:
        raise OptimizationError("every trial point was rejected by the objective")

    theta = pv.replace(pv.from_unbounded(best[0]))
    model_hat = unpack_params(theta.values, template)
    notes = []
    info = observed_information(ts, model_hat, mask=mask, opts=opts, notes=notes)
    ses, cov = standard_errors(info, notes=notes)
    return FitResult(
        theta_hat=theta,
        std_errors=ses,
        loglik=-best[1],
        observed_information=info,
        covariance=cov,
        converged=converged,
        n_objective_calls=calls[0],
        notes=notes,
    )


# ---------------------------------------------------------------------------
# Observed information and standard errors

_BOUNDS = {
    "identity": (-np.inf, np.inf),
    "log": (1e-300, np.inf),
    "alpha_interval": (0.1, 2.0),
    "tanh_pm1": (-1.0, 1.0),
}


def observed_information(
    ts: TimeSeries, model_at_theta_hat: ModelSpec, mask=None, opts: FitOptions = None, notes=None
):
    """Central finite-difference Hessian of the negative log-likelihood in
    the original coordinates, symmetrized."""
    opts = opts or FitOptions()
    notes = notes if notes is not None else []
    pv = pack_params(model_at_theta_hat)
    theta = pv.values.copy()
    step = opts.hessian_step
    h = np.maximum(step, step * np.abs(theta))

    center = theta.copy()
    for i, tr in enumerate(pv.transforms):
        lo, hi = _BOUNDS[tr]
        if center[i] + h[i] > hi:
            center[i] = hi - h[i]
            notes.append(
                f"{pv.names[i]} is at its upper bound; curvature evaluated "
                f"one step inside (one-sided uncertainty)"
            )
        if center[i] - h[i] < lo:
            center[i] = lo + h[i]
            notes.append(
                f"{pv.names[i]} is at its lower bound; curvature evaluated "
                f"one step inside (one-sided uncertainty)"
            )

    def neg_ll(vals):
        return -log_likelihood(ts, unpack_params(vals, model_at_theta_hat), mask)

    p = len(theta)
    f0 = neg_ll(center)
    H = np.empty((p, p))
    f_plus = np.empty(p)
    f_minus = np.empty(p)
    for i in range(p):
        e = np.zeros(p)
        e[i] = h[i]
        f_plus[i] = neg_ll(center + e)
        f_minus[i] = neg_ll(center - e)
        H[i, i] = (f_plus[i] - 2.0 * f0 + f_minus[i]) / h[i] ** 2
    for i in range(p):
        for j in range(i + 1, p):
            ei = np.zeros(p)
            ej = np.zeros(p)
            ei[i] = h[i]
            ej[j] = h[j]
            fpp = neg_ll(center + ei + ej)
            fpm = neg_ll(center + ei - ej)
            fmp = neg_ll(center - ei + ej)
            fmm = neg_ll(center - ei - ej)
            H[i, j] = H[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j])
    return 0.5 * (H + H.T)


def standard_errors(info, notes=None):
    """Square roots of the covariance diagonal; the covariance is the
    inverse of the observed information (pseudo-inverse fallback)."""
    notes = notes if notes is not None else []
    info = np.asarray(info, dtype=float)
    try:
        cov = np.linalg.inv(info)
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(info)
        notes.append("information matrix is singular; pseudo-inverse used")
    diag = np.diag(cov).copy()
    ses = np.full(len(diag), np.nan)
    ok = diag >= 0
    ses[ok] = np.sqrt(diag[ok])
    if not np.all(ok):
        bad = [i for i, good in enumerate(ok) if not good]
        notes.append(
            f"negative covariance diagonal at parameter index {bad}; "
            "those standard errors are undefined"
        )
        warnings.warn("negative covariance diagonal entries encountered")
    return ses, cov


# ---------------------------------------------------------------------------
# Two-pass fit with domain truncation


def _truncation_mask(ts: TimeSeries, opts: FitOptions):
    origin = ts.values[:-1]
    if opts.truncation_bounds is not None:
        bounds = np.asarray(opts.truncation_bounds, dtype=float)
        if bounds.shape != (ts.dimension, 2):
            raise ConfigurationError("truncation bounds must be (d, 2)")
    else:
        lo, hi = opts.truncation if opts.truncation is not None else (0.005, 0.995)
        bounds = np.quantile(origin, [lo, hi], axis=0).T
    mask = np.all((origin >= bounds[:, 0]) & (origin <= bounds[:, 1]), axis=1)
    return mask, bounds


def two_pass_fit(ts: TimeSeries, template: ModelSpec, opts: FitOptions = None) -> FitResult:
    """Domain-truncated fit in two passes.

    Pass 1 fits every free parameter using only transitions whose origin
    state lies inside the truncation domain. Pass 2 freezes the drift and
    noise-intensity parameters there and refits the stable index and
    skewness on all transitions, so the tail jumps that truncation removed
    still inform the noise law. Standard errors are evaluated on the
    full-data likelihood at the combined estimate.
    """
    opts = opts or FitOptions()
    mask, bounds = _truncation_mask(ts, opts)
    frac_removed = 1.0 - float(np.mean(mask))
    notes = [
        "two-pass fit: drift/noise on the truncated domain "
        f"[{', '.join('%.4g..%.4g' % (b[0], b[1]) for b in bounds)}], "
        "index/skewness on all transitions"
    ]
    if frac_removed > 0.95:
        raise ConfigurationError(
            f"truncation removes {100 * frac_removed:.1f}% of transitions"
        )
    if frac_removed > 0.5:
        notes.append(
            f"warning: truncation removes {100 * frac_removed:.1f}% of transitions"
        )
        warnings.warn("truncation removes more than half of the transitions")

    pass1 = fit_mle(ts, template, opts, mask=mask)
    model1 = unpack_params(pass1.theta_hat.values, template)

    pass2_template = model1.copy()
    for i in range(pass2_template.dimension):
        pass2_template.drift[i].free = np.zeros_like(pass2_template.drift[i].free)
        pass2_template.noise[i].free = np.zeros_like(pass2_template.noise[i].free)
    refit_noise = any(template.alpha_free) or any(template.beta_free)
    if refit_noise:
        pass2 = fit_mle(ts, pass2_template, opts)
        combined = unpack_params(pass2.theta_hat.values, pass2_template)
        loglik_pass2 = pass2.loglik
        converged = pass1.converged and pass2.converged
        calls = pass1.n_objective_calls + pass2.n_objective_calls
    else:
        combined = model1
        loglik_pass2 = log_likelihood(ts, combined)
        converged = pass1.converged
        calls = pass1.n_objective_calls
        notes.append("no free index/skewness parameter; second pass skipped")

    # report in the original template's parameter order, with uncertainties
    # from the full-data curvature at the combined estimate
    final_model = combined.copy()
    for i in range(final_model.dimension):
        final_model.drift[i].free = template.drift[i].free.copy()
        final_model.noise[i].free = template.noise[i].free.copy()
    theta = pack_params(final_model)
    info = observed_information(ts, final_model, opts=opts, notes=notes)
    ses, cov = standard_errors(info, notes=notes)
    return FitResult(
        theta_hat=theta,
        std_errors=ses,
        loglik=loglik_pass2,
        observed_information=info,
        covariance=cov,
        converged=converged,
        n_objective_calls=calls,
        notes=notes,
        loglik_pass1=pass1.loglik,
        loglik_pass2=loglik_pass2,
    )
