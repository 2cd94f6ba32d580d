"""Versioned JSON persistence for tree models.

Floats are emitted via json's shortest-repr rule, which round-trips
float64 exactly, so load(save(m)) reproduces every threshold and leaf
value bit for bit. Output is canonical (sorted keys, fixed separators):
equal models serialize to equal bytes.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Union

import numpy as np

from .forest import ForestModel
from .gbt import GbtModel
from .tree import LearnerError, TreeModel

FORMAT = "examqc-learner-v1"

AnyModel = Union[TreeModel, ForestModel, GbtModel]


def _tree_dict(t: TreeModel) -> dict:
    return {
        "feature": t.feature.tolist(),
        "threshold": t.threshold.tolist(),
        "missing_left": t.missing_left.tolist(),
        "left": t.left.tolist(),
        "right": t.right.tolist(),
        "value": t.value.tolist(),
        "n_features": t.n_features,
    }


def _tree_from(d: dict) -> TreeModel:
    return TreeModel(
        feature=np.array(d["feature"], dtype=np.int32),
        threshold=np.array(d["threshold"], dtype=np.float64),
        missing_left=np.array(d["missing_left"], dtype=np.int8),
        left=np.array(d["left"], dtype=np.int32),
        right=np.array(d["right"], dtype=np.int32),
        value=np.array(d["value"], dtype=np.float64),
        n_features=int(d["n_features"]),
    )


def model_to_dict(model: AnyModel) -> dict:
    if isinstance(model, TreeModel):
        return {"format": FORMAT, "kind": "tree", "tree": _tree_dict(model)}
    if isinstance(model, ForestModel):
        return {
            "format": FORMAT, "kind": "forest",
            "trees": [_tree_dict(t) for t in model.trees],
            "n_features": model.n_features,
            "params": model.params,
        }
    if isinstance(model, GbtModel):
        return {
            "format": FORMAT, "kind": "gbt",
            "trees": [_tree_dict(t) for t in model.trees],
            "eta": model.eta, "base_margin": model.base_margin,
            "lam": model.lam, "gamma": model.gamma,
            "n_features": model.n_features,
            "loss_trace": list(model.loss_trace),
        }
    raise LearnerError(f"cannot serialize {type(model).__name__}")


def model_from_dict(d: dict) -> AnyModel:
    if d.get("format") != FORMAT:
        raise LearnerError(f"unsupported model format {d.get('format')!r}")
    kind = d.get("kind")
    if kind == "tree":
        return _tree_from(d["tree"])
    if kind == "forest":
        return ForestModel(
            trees=[_tree_from(t) for t in d["trees"]],
            n_features=int(d["n_features"]),
            params=dict(d.get("params", {})))
    if kind == "gbt":
        return GbtModel(
            trees=[_tree_from(t) for t in d["trees"]],
            eta=float(d["eta"]), base_margin=float(d["base_margin"]),
            lam=float(d["lam"]), gamma=float(d["gamma"]),
            n_features=int(d["n_features"]),
            loss_trace=[float(v) for v in d.get("loss_trace", [])])
    raise LearnerError(f"unknown model kind {kind!r}")


def model_to_json(model: AnyModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True,
                      separators=(",", ":"))


def save_model(model: AnyModel, path: Union[str, Path]) -> None:
    Path(path).write_text(model_to_json(model) + "\n", encoding="utf-8")


def load_model(path: Union[str, Path]) -> AnyModel:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
