"""Post-fit diagnostics: effective potential, residual goodness of fit,
and structured model reports.

The effective potential is the negative log of a Gaussian kernel density
estimate of the stationary sample, shifted so its minimum is zero; local
minima of the curve mark alternative stochastic regimes. Residuals are
validated with a Kolmogorov-Smirnov comparison against the fitted
standard stable law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .likelihood import Residuals
from .stable import StableParams, cached_density_grid

__all__ = [
    "PotentialCurve",
    "effective_potential",
    "find_potential_minima",
    "ks_statistic",
    "ks_residual_test",
    "KsResult",
    "model_report",
    "render_report_text",
]


@dataclass
class PotentialCurve:
    abscissae: np.ndarray
    potential: np.ndarray  # -log density, shifted so min == 0
    bandwidth: float


def _silverman_bandwidth(x):
    """1.06 s n^(-1/5) with a robust scale when the interquartile range
    flags heavy tails."""
    n = len(x)
    s = float(np.std(x))
    q75, q25 = np.percentile(x, [75, 25])
    robust = (q75 - q25) / 1.349
    if 0.0 < robust < s:
        s = robust
    return 1.06 * s * n ** (-0.2)


def gaussian_kde(sample, grid, bandwidth):
    """Plain Gaussian kernel density estimate evaluated on `grid`."""
    sample = np.asarray(sample, dtype=float)
    out = np.zeros(len(grid))
    norm = 1.0 / (len(sample) * bandwidth * math.sqrt(2.0 * math.pi))
    # chunked over the sample to bound memory at ~8 MB
    step = max(1, 10_000_000 // max(len(grid), 1))
    for k in range(0, len(sample), step):
        z = (grid[:, None] - sample[None, k : k + step]) / bandwidth
        out += np.exp(-0.5 * z * z).sum(axis=1)
    return out * norm


def effective_potential(series, grid_size=512, bandwidth=None, trim=(0.001, 0.999)) -> PotentialCurve:
    """-log of the estimated stationary density, shifted to minimum zero.

    The evaluation grid spans the quantile range given by `trim` (pass
    None for the full data range): heavy-tailed samples put single
    excursions far from the bulk, and the log of a near-empty density
    estimate out there is jitter, not regime structure.
    """
    x = np.asarray(series, dtype=float).ravel()
    if len(x) < 100:
        raise DataError("need at least 100 points for the effective potential")
    if not np.all(np.isfinite(x)):
        raise DataError("sample contains non-finite values")
    if np.ptp(x) == 0.0:
        raise DataError("degenerate sample: zero variance")
    h = float(bandwidth) if bandwidth is not None else _silverman_bandwidth(x)
    if not h > 0:
        raise DataError("bandwidth must be positive")
    if trim is None:
        lo, hi = x.min(), x.max()
    else:
        lo, hi = np.quantile(x, trim)
    grid = np.linspace(lo, hi, grid_size)
    dens = gaussian_kde(x, grid, h)
    u = -np.log(np.clip(dens, 5e-324, None))
    u -= u.min()
    return PotentialCurve(abscissae=grid, potential=u, bandwidth=h)


def find_potential_minima(curve: PotentialCurve, min_separation=3):
    """Indices of strict interior local minima, at least `min_separation`
    grid cells apart (suppresses discretization jitter)."""
    u = curve.potential
    idx = [
        i
        for i in range(1, len(u) - 1)
        if u[i] < u[i - 1] and u[i] < u[i + 1]
    ]
    kept = []
    for i in sorted(idx, key=lambda j: u[j]):
        if all(abs(i - j) >= min_separation for j in kept):
            kept.append(i)
    return sorted(kept)


@dataclass
class KsResult:
    statistic: float
    cutoff: float
    level: float
    n: int
    passed: bool


def ks_statistic(sample, cdf_values=None, params: StableParams = None):
    """Kolmogorov-Smirnov distance between a sample and a stable law."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = len(x)
    if cdf_values is None:
        grid = cached_density_grid(params.alpha, params.beta)
        cdf_values = grid.cdf((x - params.delta) / params.gamma)
    up = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    return float(np.max(np.maximum(np.abs(cdf_values - up), np.abs(cdf_values - lo))))


def ks_residual_test(res: Residuals, p: StableParams, level=0.01) -> KsResult:
    """KS test of the included residuals against the standard stable law.

    Passes when the distance is below the asymptotic cutoff
    sqrt(-ln(level/2) / 2) / sqrt(n).
    """
    eta = res.eta[res.mask]
    eta = eta.ravel() if eta.ndim > 1 else eta
    if eta.size < 100:
        raise DataError("need at least 100 included residuals for the KS test")
    d = ks_statistic(eta, params=p)
    cutoff = math.sqrt(-0.5 * math.log(level / 2.0)) / math.sqrt(eta.size)
    return KsResult(statistic=d, cutoff=cutoff, level=level, n=int(eta.size), passed=d < cutoff)


# ---------------------------------------------------------------------------
# Reports


def model_report(fit, diagnostics=None) -> dict:
    """Structured, deterministic summary of a fit.

    `diagnostics` may carry KsResult objects or other serializable
    entries; ordering of the parameter table follows the packed vector.
    """
    rows = [
        {
            "name": n,
            "estimate": float(v),
            "std_error": float(s) if np.isfinite(s) else None,
        }
        for n, v, s in zip(fit.theta_hat.names, fit.theta_hat.values, fit.std_errors)
    ]
    report = {
        "parameters": rows,
        "log_likelihood": float(fit.loglik),
        "converged": bool(fit.converged),
        "n_objective_calls": int(fit.n_objective_calls),
        "notes": list(fit.notes),
    }
    if fit.loglik_pass1 is not None:
        report["log_likelihood_pass1"] = float(fit.loglik_pass1)
        report["log_likelihood_pass2"] = float(fit.loglik_pass2)
    if diagnostics:
        diag = {}
        for key, val in diagnostics.items():
            if isinstance(val, KsResult):
                diag[key] = {
                    "statistic": val.statistic,
                    "cutoff": val.cutoff,
                    "level": val.level,
                    "n": val.n,
                    "passed": val.passed,
                }
            else:
                diag[key] = val
        report["diagnostics"] = diag
    return report


def render_report_text(report: dict) -> str:
    """Human-readable rendering of a model report."""
    lines = []
    if not report.get("converged", True):
        lines.append("*** FIT DID NOT CONVERGE: estimates are best-so-far values ***")
    lines.append(f"{'parameter':<22s} {'estimate':>14s} {'std error':>12s}")
    for row in report["parameters"]:
        se = f"{row['std_error']:.6g}" if row["std_error"] is not None else "n/a"
        lines.append(f"{row['name']:<22s} {row['estimate']:>14.6g} {se:>12s}")
    lines.append(f"log-likelihood: {report['log_likelihood']:.6f}")
    if "log_likelihood_pass1" in report:
        lines.append(
            "pass 1 (truncated) log-likelihood: "
            f"{report['log_likelihood_pass1']:.6f}; "
            "pass 2 (full data) log-likelihood: "
            f"{report['log_likelihood_pass2']:.6f}"
        )
    lines.append(f"converged: {report['converged']}")
    for key, val in report.get("diagnostics", {}).items():
        if isinstance(val, dict) and "statistic" in val:
            lines.append(
                f"{key}: KS={val['statistic']:.5f} cutoff={val['cutoff']:.5f} "
                f"(level {val['level']:g}, n={val['n']}) -> "
                + ("pass" if val["passed"] else "FAIL")
            )
    for note in report.get("notes", []):
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"
