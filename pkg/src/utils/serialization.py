# src/utils/serialization.py

"""
Canonical JSON for mixtures and run records.

Mixtures use {"k", "d", "components": [{"w", "mu", "sigma"}]} with sigma as a
full row-major matrix. Keys are sorted and floats use the shortest repr that
round-trips, so equal values always serialize to equal bytes.
"""

import json
from typing import Any, Dict, Optional

import numpy as np

from src import __version__
from src.models.mixture import Component, Gmm
from src.utils.errors import DatasetFormatError, PrivGmmError

TOOL_VERSION = __version__


def dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True)


def gmm_to_dict(g: Gmm) -> Dict[str, Any]:
    return {
        "k": g.k,
        "d": g.d,
        "components": [
            {"w": float(c.w), "mu": c.mu.tolist(), "sigma": c.sigma.tolist()}
            for c in g.components
        ],
    }


def gmm_to_json(g: Gmm) -> str:
    return dumps(gmm_to_dict(g))


def _field(data: Dict[str, Any], key: str, where: str) -> Any:
    try:
        return data[key]
    except (KeyError, TypeError):
        raise DatasetFormatError(f"{where}: missing field '{key}'") from None


def gmm_from_dict(data: Dict[str, Any], source: str = "mixture") -> Gmm:
    k = _field(data, "k", source)
    d = _field(data, "d", source)
    entries = _field(data, "components", source)
    if not isinstance(entries, list) or len(entries) != k:
        raise DatasetFormatError(f"{source}: field 'components' must list k = {k} components")
    components = []
    for i, entry in enumerate(entries):
        where = f"{source}: components[{i}]"
        try:
            mu = np.asarray(_field(entry, "mu", where), dtype=np.float64)
            sigma = np.asarray(_field(entry, "sigma", where), dtype=np.float64)
            w = float(_field(entry, "w", where))
        except (TypeError, ValueError) as e:
            raise DatasetFormatError(f"{where}: {e}") from e
        if mu.shape != (d,) or sigma.shape != (d, d):
            raise DatasetFormatError(
                f"{where}: expected mu of length {d} and a {d}x{d} sigma, "
                f"got {mu.shape} and {sigma.shape}"
            )
        try:
            components.append(Component.build(w, mu, sigma))
        except (PrivGmmError, ValueError) as e:
            raise DatasetFormatError(f"{where}: {e}") from e
    try:
        return Gmm.from_components(components)
    except PrivGmmError as e:
        raise DatasetFormatError(f"{source}: {e}") from e


def gmm_from_json(text: str, source: str = "mixture") -> Gmm:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DatasetFormatError(f"{source}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    return gmm_from_dict(data, source)


def run_record_to_dict(
    record,
    seed: int,
    params: Optional[Dict[str, Any]] = None,
    diagnostics: bool = False,
    timings: bool = False,
) -> Dict[str, Any]:
    """
    Public view of a RunRecord. The q statistics, the selected chunk and the
    failed chunks appear only with `diagnostics`; timings only with `timings`.
    """
    outcome = record.outcome
    data: Dict[str, Any] = {
        "version": TOOL_VERSION,
        "config": {
            "seed": seed,
            "epsilon": record.epsilon,
            "delta": record.delta,
            "t": record.t,
            "r": record.r,
            "z": record.z,
            "gamma": record.gamma,
            "eta_w": record.mask.eta_w,
            "eta_mean": record.mask.eta_mean,
            "eta_cov": record.mask.eta_cov,
            **(params or {}),
        },
        "guarantee": {"epsilon": record.guarantee[0], "delta": record.guarantee[1]},
        "certified": record.certified,
        "outcome": "released" if record.released is not None else "bot",
        "released": gmm_to_dict(record.released) if record.released is not None else None,
    }
    if diagnostics:
        data["diagnostics"] = {
            "threshold": outcome.threshold,
            "q_mean": outcome.q_mean,
            "q_noised": outcome.q_noised,
            "scores": outcome.scores.tolist(),
            "selected_index": outcome.selected_index,
            "failure": outcome.failure,
            "failed_chunks": list(outcome.failed_chunks),
        }
    if timings:
        data["timings"] = dict(record.timings)
    return data


def error_record(message: str, seed: Optional[int] = None) -> Dict[str, Any]:
    return {"version": TOOL_VERSION, "outcome": "error", "error": message, "seed": seed}
