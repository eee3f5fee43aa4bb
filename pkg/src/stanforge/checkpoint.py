"""Self-describing JSON checkpoints for every model kind.

Floats serialize through ``repr`` (shortest round-trip form), so a saved
model reloads bit-identically at 64-bit and re-scoring a test set after a
round trip reproduces the exact RMSE.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .baselines import LinearNetwork, LinearRegressionModel, MlpNetwork
from .data import ScalerParams
from .stan_core import NetworkSpec, StanNetwork

__all__ = ["CheckpointError", "save_checkpoint", "load_checkpoint"]

FORMAT = "stanforge-checkpoint"
VERSION = 1


class CheckpointError(ValueError):
    """File is not a readable checkpoint of a known model kind."""


def _spec_dict(model) -> dict:
    if isinstance(model, (StanNetwork, MlpNetwork)):
        s = model.spec
        return {"lookback": s.lookback, "units": s.units, "depth": s.depth, "horizon": s.horizon}
    if isinstance(model, LinearNetwork):
        return {"lookback": model.lookback, "horizon": model.horizon}
    if isinstance(model, LinearRegressionModel):
        return {"lookback": model.lookback, "horizon": model.horizon}
    raise CheckpointError(f"cannot checkpoint object of type {type(model).__name__}")


def _params_dict(model) -> dict[str, np.ndarray]:
    if isinstance(model, LinearRegressionModel):
        return {"weights": model.weights}
    return model.params


def save_checkpoint(path, model, scaler: ScalerParams | None = None) -> Path:
    """Write ``model`` (and optionally its scaler) as JSON; returns the path."""
    path = Path(path)
    spec = _spec_dict(model)  # also rejects objects that are not checkpointable
    params = _params_dict(model)
    order = sorted(params)
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "kind": model.kind,
        "spec": spec,
        "param_order": order,
        "params": {
            name: {"shape": list(params[name].shape), "data": params[name].ravel().tolist()}
            for name in order
        },
        "scaler": None if scaler is None else {"mean": scaler.mean, "std": scaler.std},
    }
    with open(path, "w") as handle:
        json.dump(doc, handle)
        handle.write("\n")
    return path


def load_checkpoint(path):
    """Load a checkpoint; returns ``(model, scaler_or_None)``."""
    path = Path(path)
    try:
        with open(path) as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"{path.name}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise CheckpointError(f"{path.name}: not a {FORMAT} file")
    if doc.get("version") != VERSION:
        raise CheckpointError(f"{path.name}: unsupported version {doc.get('version')!r}")
    kind = doc.get("kind")
    spec = doc.get("spec", {})
    raw = doc.get("params", {})
    params = {}
    for name, entry in raw.items():
        arr = np.asarray(entry["data"], dtype=np.float64).reshape(entry["shape"])
        params[name] = arr
    if kind == "stan":
        model = StanNetwork(NetworkSpec(**spec), params=params)
    elif kind == "mlp":
        model = MlpNetwork(NetworkSpec(**spec), params=params)
    elif kind == "linear":
        model = LinearNetwork(spec["lookback"], spec["horizon"], params=params)
    elif kind == "linreg":
        model = LinearRegressionModel(weights=params["weights"])
    else:
        raise CheckpointError(f"{path.name}: unknown model kind {kind!r}")
    scaler_doc = doc.get("scaler")
    scaler = None if scaler_doc is None else ScalerParams(mean=scaler_doc["mean"], std=scaler_doc["std"])
    return model, scaler
