"""
JSON model files.

Layout (format_version 1)::

    {
      "format_version": 1,
      "model_type": "svc" | "svr",
      "kernel": {"variant": "trig", "params": {"sigma": 1.0}},
      "bias": ..., "C": ..., "epsilon": ... (svr only),
      "scaling": {"mean": [...], "std": [...], "constant": [...]} | null,
      "n_features": d,
      "support_indices": [...],
      "support_vectors": [[...], ...],
      "dual_coef": [...],
      "jitter": 0.0
    }

Floats are written with ``repr`` precision so a reload is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import FormatError, ParseError
from .kernels import KernelSpec
from .scaling import ScalingStats
from .svc import SvcModel
from .svr import SvrModel

FORMAT_VERSION = 1


def model_to_dict(model: SvcModel | SvrModel) -> dict:
    is_svr = isinstance(model, SvrModel)
    data = {
        "format_version": FORMAT_VERSION,
        "model_type": "svr" if is_svr else "svc",
        "kernel": model.spec.to_dict(),
        "bias": float(model.bias),
        "C": float(model.C),
    }
    if is_svr:
        data["epsilon"] = float(model.epsilon)
    data["scaling"] = model.scaling.to_dict() if model.scaling is not None else None
    data["n_features"] = int(model.dim)
    data["support_indices"] = [int(i) for i in model.support_indices]
    data["support_vectors"] = model.support_vectors.tolist()
    data["dual_coef"] = [float(c) for c in model.dual_coef]
    data["jitter"] = float(model.jitter)
    return data


def model_to_json(model: SvcModel | SvrModel) -> str:
    return json.dumps(model_to_dict(model), indent=1) + "\n"


def model_from_dict(data: dict) -> SvcModel | SvrModel:
    version = data.get("format_version") if isinstance(data, dict) else None
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported model format_version {version!r} (expected {FORMAT_VERSION})")
    try:
        spec = KernelSpec.from_dict(data["kernel"])
        scaling = ScalingStats.from_dict(data["scaling"]) if data.get("scaling") else None
        dual = np.asarray(data["dual_coef"], dtype=np.float64)
        sv = np.asarray(data["support_vectors"], dtype=np.float64)
        if sv.size == 0:
            sv = sv.reshape(0, int(data["n_features"]))
        common = dict(
            support_indices=np.asarray(data["support_indices"], dtype=np.intp),
            dual_coef=dual,
            bias=float(data["bias"]),
            spec=spec,
            support_vectors=sv,
            C=float(data["C"]),
            scaling=scaling,
            jitter=float(data.get("jitter", 0.0)),
        )
        kind = data["model_type"]
        if kind == "svc":
            return SvcModel(**common)
        if kind == "svr":
            return SvrModel(epsilon=float(data["epsilon"]), **common)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed model file: {exc}") from exc
    raise FormatError(f"unknown model_type {kind!r}")


def save_model(model: SvcModel | SvrModel, path) -> None:
    Path(path).write_text(model_to_json(model))


def load_model(path) -> SvcModel | SvrModel:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc.msg})", row=exc.lineno, column=exc.colno) from None
    return model_from_dict(data)
