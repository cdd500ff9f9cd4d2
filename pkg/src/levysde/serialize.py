"""Model (de)serialization and deterministic JSON output.

Reports and metadata are emitted with every float rendered at 17
significant digits so identical runs produce byte-identical files; the
stdlib writer renders floats with shortest-roundtrip formatting, which is
also deterministic but harder to pin down in a contract, so a small
emitter is used instead.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigurationError
from .models import (
    ConstantNoise,
    LotkaVolterraDrift,
    ModelSpec,
    MultinomialDrift,
    PolynomialDrift,
    PolynomialNoise,
    SplineDrift,
    SplineNoise,
)
from .stable import StableParams

__all__ = ["model_to_dict", "model_from_dict", "dumps_json17", "write_json17"]


def _mask(arr):
    return [bool(v) for v in np.asarray(arr)]


def model_to_dict(m: ModelSpec) -> dict:
    drift = []
    for block in m.drift:
        if isinstance(block, PolynomialDrift):
            drift.append(
                {
                    "kind": "polynomial",
                    "coefficients": list(map(float, block.coefficients)),
                    "free": _mask(block.free),
                }
            )
        elif isinstance(block, SplineDrift):
            drift.append(
                {
                    "kind": "spline",
                    "knots": list(map(float, block.knots)),
                    "ordinates": list(map(float, block.ordinates)),
                    "free": _mask(block.free),
                }
            )
        elif isinstance(block, LotkaVolterraDrift):
            drift.append(
                {
                    "kind": "lotka_volterra",
                    "r": float(block.r),
                    "interactions": list(map(float, block.interactions)),
                    "free": _mask(block.free),
                }
            )
        elif isinstance(block, MultinomialDrift):
            drift.append(
                {
                    "kind": "multinomial",
                    "coefficients": list(map(float, block.coefficients)),
                    "exponents": [list(map(int, row)) for row in block.exponents],
                    "free": _mask(block.free),
                }
            )
        else:
            raise ConfigurationError(f"unknown drift model {type(block).__name__}")
    noise = []
    for block in m.noise:
        if isinstance(block, ConstantNoise):
            noise.append(
                {
                    "kind": "constant",
                    "sigma": float(math.exp(block.log_sigma)),
                    "free": _mask(block.free),
                }
            )
        elif isinstance(block, SplineNoise):
            noise.append(
                {
                    "kind": "spline",
                    "knots": list(map(float, block.knots)),
                    "sigma_ordinates": list(map(float, np.exp(block.log_ordinates))),
                    "free": _mask(block.free),
                }
            )
        elif isinstance(block, PolynomialNoise):
            noise.append(
                {
                    "kind": "polynomial",
                    "log_coefficients": list(map(float, block.coefficients)),
                    "free": _mask(block.free),
                }
            )
        else:
            raise ConfigurationError(f"unknown noise model {type(block).__name__}")
    stable = [
        {
            "alpha": float(p.alpha),
            "beta": float(p.beta),
            "alpha_free": bool(m.alpha_free[i]),
            "beta_free": bool(m.beta_free[i]),
        }
        for i, p in enumerate(m.stable)
    ]
    return {"dimension": m.dimension, "drift": drift, "noise": noise, "stable": stable}


def _drift_from_dict(d):
    kind = d["kind"]
    free = d.get("free")
    if kind == "polynomial":
        return PolynomialDrift(d["coefficients"], free=free)
    if kind == "spline":
        return SplineDrift(d["knots"], d["ordinates"], free=free)
    if kind == "lotka_volterra":
        return LotkaVolterraDrift(d["r"], d["interactions"], free=free)
    if kind == "multinomial":
        return MultinomialDrift(d["coefficients"], d["exponents"], free=free)
    raise ConfigurationError(f"unknown drift kind {kind!r}")


def _noise_from_dict(d):
    kind = d["kind"]
    free = d.get("free")
    if kind == "constant":
        if d["sigma"] <= 0:
            raise ConfigurationError("constant noise intensity must be positive")
        block = ConstantNoise(math.log(d["sigma"]), free=free)
        return block
    if kind == "spline":
        ords = np.asarray(d["sigma_ordinates"], dtype=float)
        if np.any(ords <= 0):
            raise ConfigurationError("spline noise ordinates must be positive")
        return SplineNoise(d["knots"], np.log(ords), free=free)
    if kind == "polynomial":
        return PolynomialNoise(d["log_coefficients"], free=free)
    raise ConfigurationError(f"unknown noise kind {kind!r}")


def model_from_dict(d: dict) -> ModelSpec:
    dim = int(d["dimension"])
    drift = [_drift_from_dict(b) for b in d["drift"]]
    noise = [_noise_from_dict(b) for b in d["noise"]]
    if len(drift) != dim or len(noise) != dim or len(d["stable"]) != dim:
        raise ConfigurationError("model blocks do not match the declared dimension")
    stable = [StableParams(s["alpha"], s["beta"]) for s in d["stable"]]
    alpha_free = [bool(s.get("alpha_free", True)) for s in d["stable"]]
    beta_free = [bool(s.get("beta_free", True)) for s in d["stable"]]
    return ModelSpec(
        drift=drift, noise=noise, stable=stable, alpha_free=alpha_free, beta_free=beta_free
    )


# ---------------------------------------------------------------------------
# Deterministic JSON emitter (17 significant digits for floats)


def _emit(obj, indent, out):
    pad = "  " * indent
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            out.append("null")
        elif math.isinf(v):
            out.append('"Infinity"' if v > 0 else '"-Infinity"')
        else:
            out.append(format(v, ".17g"))
    elif isinstance(obj, str):
        out.append(
            '"'
            + obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
            + '"'
        )
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f'{pad}  "{k}": ')
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(seq):
            out.append(pad + "  ")
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise ConfigurationError(f"cannot serialize {type(obj).__name__}")


def dumps_json17(obj) -> str:
    out = []
    _emit(obj, 0, out)
    return "".join(out) + "\n"


def write_json17(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_json17(obj))
