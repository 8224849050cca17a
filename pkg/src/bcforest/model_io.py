"""JSON persistence for ensembles and corrected models.

Files carry a format version and a type tag; floats survive the
round trip bit for bit (shortest-repr encoding on both sides).
"""

from __future__ import annotations

import json

import numpy as np

from .correction import CorrectedModel
from .ensemble import Ensemble, ResampleScheme
from .errors import IngestionError
from .tree import SplitParams, Tree

FORMAT_VERSION = 1

_INT_FIELDS = ("feature", "left", "right", "n_sample")
_FLOAT_FIELDS = ("threshold", "value")


def tree_to_dict(tree: Tree) -> dict:
    out = {name: getattr(tree, name).tolist() for name in _INT_FIELDS + _FLOAT_FIELDS}
    out["n_features"] = tree.n_features
    out["in_bag"] = tree.in_bag.tolist()
    return out


def tree_from_dict(d: dict) -> Tree:
    try:
        return Tree(
            feature=np.asarray(d["feature"], dtype=np.int32),
            threshold=np.asarray(d["threshold"], dtype=np.float64),
            left=np.asarray(d["left"], dtype=np.int32),
            right=np.asarray(d["right"], dtype=np.int32),
            value=np.asarray(d["value"], dtype=np.float64),
            n_sample=np.asarray(d["n_sample"], dtype=np.int32),
            n_features=int(d["n_features"]),
            in_bag=np.asarray(d["in_bag"], dtype=np.intp),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IngestionError(f"malformed tree record: {exc}") from exc


def ensemble_to_dict(ens: Ensemble) -> dict:
    return {
        "type": "ensemble",
        "format_version": FORMAT_VERSION,
        "scheme": {"m": ens.scheme.m, "replacement": ens.scheme.replacement},
        "split_params": {
            "min_leaf": ens.split_params.min_leaf,
            "mtry": ens.split_params.mtry,
            "max_depth": ens.split_params.max_depth,
        },
        "n_train": ens.n_train,
        "n_features": ens.n_features,
        "binary_responses": ens.binary_responses,
        "trees": [tree_to_dict(t) for t in ens.trees],
    }


def ensemble_from_dict(d: dict) -> Ensemble:
    _check_header(d, "ensemble")
    try:
        scheme = ResampleScheme(int(d["scheme"]["m"]), bool(d["scheme"]["replacement"]))
        sp = d["split_params"]
        params = SplitParams(
            min_leaf=int(sp["min_leaf"]),
            mtry=None if sp["mtry"] is None else int(sp["mtry"]),
            max_depth=None if sp["max_depth"] is None else int(sp["max_depth"]),
        )
        return Ensemble(
            trees=tuple(tree_from_dict(t) for t in d["trees"]),
            scheme=scheme,
            split_params=params,
            n_train=int(d["n_train"]),
            n_features=int(d["n_features"]),
            binary_responses=bool(d["binary_responses"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IngestionError(f"malformed ensemble record: {exc}") from exc


def corrected_to_dict(model: CorrectedModel) -> dict:
    return {
        "type": "corrected",
        "format_version": FORMAT_VERSION,
        "base": ensemble_to_dict(model.base),
        "shadow": ensemble_to_dict(model.shadow),
        "residual_pool": model.residual_pool.tolist(),
        "fitted_values": model.fitted_values.tolist(),
        "B_o": model.B_o,
        "parametric": model.parametric,
    }


def corrected_from_dict(d: dict) -> CorrectedModel:
    _check_header(d, "corrected")
    try:
        return CorrectedModel(
            base=ensemble_from_dict(d["base"]),
            shadow=ensemble_from_dict(d["shadow"]),
            residual_pool=np.asarray(d["residual_pool"], dtype=np.float64),
            fitted_values=np.asarray(d["fitted_values"], dtype=np.float64),
            B_o=int(d["B_o"]),
            parametric=bool(d["parametric"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IngestionError(f"malformed corrected-model record: {exc}") from exc


def _check_header(d: dict, expected_type: str) -> None:
    if not isinstance(d, dict):
        raise IngestionError("model record must be a JSON object")
    kind = d.get("type")
    if kind != expected_type:
        raise IngestionError(f"expected a {expected_type!r} record, found {kind!r}")
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise IngestionError(f"unsupported model format version: {version!r}")


def save_model(model: Ensemble | CorrectedModel, path: str) -> None:
    if isinstance(model, CorrectedModel):
        payload = corrected_to_dict(model)
    elif isinstance(model, Ensemble):
        payload = ensemble_to_dict(model)
    else:
        raise IngestionError(f"cannot serialize {type(model).__name__}")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def load_model(path: str) -> Ensemble | CorrectedModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            d = json.load(fh)
    except OSError as exc:
        raise IngestionError(f"cannot read model file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IngestionError(f"model file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(d, dict):
        raise IngestionError("model record must be a JSON object")
    if d.get("type") == "corrected":
        return corrected_from_dict(d)
    return ensemble_from_dict(d)
