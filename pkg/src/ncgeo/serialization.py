"""JSON schemas and (de)serialization for every wire format of the package.

Formats (documented in docs/schemas/):

  matrix    {"n": int, "re": [[...]], "im": [[...]]}, row-major
  algebra   {"blocks": [int, ...], "weights": [float, ...], "tensor_m2": bool}
  subspace  {"ambient": <algebra>, "kind": str, "basis": [<matrix>, ...],
             "aux": <matrix>?}
  curve     {"grid_n": int, "target": "unitary"|"orbit"|"algebra",
             "nodes": [<matrix>, ...], "velocities": [<matrix>, ...]?}
  modelspec {"kind": str, "blocks": [int, ...], "weights": [float, ...]?,
             "e": <matrix>?, "v0": <matrix>?, "p_list": [int, ...]}
  config    see SuiteConfig in ncgeo.suites

Schema violations raise SchemaError with the offending path.  Canonical
dumps sort keys and use a fixed separator so equal objects serialize to
identical bytes.
"""

from __future__ import annotations

import json

import numpy as np

from .core import TracialAlgebra
from .geometry import SampledCurve
from .models import MODEL_KINDS, ModelSpec
from .projection import SkewSubspace

__all__ = [
    "SchemaError",
    "matrix_to_json",
    "matrix_from_json",
    "algebra_to_json",
    "algebra_from_json",
    "subspace_to_json",
    "subspace_from_json",
    "curve_to_json",
    "curve_from_json",
    "modelspec_from_json",
    "modelspec_to_json",
    "canonical_dumps",
    "load_json_file",
]


class SchemaError(ValueError):
    """An input document does not match its schema."""


def _need(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    if key not in obj:
        raise SchemaError(f"{where}: missing required key {key!r}")
    return obj[key]


def matrix_to_json(x: np.ndarray) -> dict:
    x = np.asarray(x, dtype=complex)
    return {"n": int(x.shape[0]), "re": x.real.tolist(), "im": x.imag.tolist()}


def matrix_from_json(obj, where: str = "matrix") -> np.ndarray:
    n = _need(obj, "n", where)
    re = np.asarray(_need(obj, "re", where), dtype=float)
    im = np.asarray(_need(obj, "im", where), dtype=float)
    if re.shape != (n, n) or im.shape != (n, n):
        raise SchemaError(f"{where}: re/im must be {n}x{n} row-major arrays")
    x = re + 1j * im
    if not np.all(np.isfinite(re)) or not np.all(np.isfinite(im)):
        raise SchemaError(f"{where}: entries must be finite")
    return x


def algebra_to_json(alg: TracialAlgebra) -> dict:
    return {
        "blocks": list(alg.block_dims),
        "weights": list(alg.trace_weights),
        "tensor_m2": bool(alg.tensor_m2),
    }


def algebra_from_json(obj, where: str = "algebra") -> TracialAlgebra:
    blocks = _need(obj, "blocks", where)
    weights = _need(obj, "weights", where)
    try:
        return TracialAlgebra(tuple(int(b) for b in blocks), tuple(float(w) for w in weights),
                              bool(obj.get("tensor_m2", False)))
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def subspace_to_json(S: SkewSubspace) -> dict:
    out = {
        "ambient": algebra_to_json(S.ambient),
        "kind": S.kind,
        "basis": [matrix_to_json(b) for b in S.basis],
    }
    if S.aux is not None:
        out["aux"] = matrix_to_json(S.aux)
    return out


def subspace_from_json(obj, where: str = "subspace") -> SkewSubspace:
    alg = algebra_from_json(_need(obj, "ambient", where), f"{where}.ambient")
    basis = [matrix_from_json(m, f"{where}.basis[{i}]") for i, m in enumerate(obj.get("basis", []))]
    aux = matrix_from_json(obj["aux"], f"{where}.aux") if "aux" in obj else None
    try:
        return SkewSubspace(alg, basis, kind=obj.get("kind", "basis"), aux=aux)
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def curve_to_json(curve: SampledCurve) -> dict:
    out = {
        "grid_n": int(curve.n_intervals),
        "target": curve.target,
        "nodes": [matrix_to_json(u) for u in curve.nodes],
    }
    if curve.velocities is not None:
        out["velocities"] = [matrix_to_json(v) for v in curve.velocities]
    return out


def curve_from_json(obj, where: str = "curve") -> SampledCurve:
    n = _need(obj, "grid_n", where)
    nodes = [matrix_from_json(m, f"{where}.nodes[{i}]") for i, m in enumerate(_need(obj, "nodes", where))]
    if len(nodes) != n + 1:
        raise SchemaError(f"{where}: expected grid_n + 1 = {n + 1} nodes, got {len(nodes)}")
    vel = None
    if "velocities" in obj:
        vel = [matrix_from_json(m, f"{where}.velocities[{i}]") for i, m in enumerate(obj["velocities"])]
        if len(vel) != len(nodes):
            raise SchemaError(f"{where}: velocities must align with nodes")
    try:
        return SampledCurve(
            np.linspace(0.0, 1.0, n + 1),
            np.array(nodes),
            target=obj.get("target", "unitary"),
            velocities=np.array(vel) if vel is not None else None,
        )
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def modelspec_to_json(spec: ModelSpec) -> dict:
    out = {"kind": spec.kind, "blocks": list(spec.blocks), "p_list": list(spec.p_list)}
    if spec.weights is not None:
        out["weights"] = list(spec.weights)
    if spec.e is not None:
        out["e"] = matrix_to_json(spec.e)
    if spec.v0 is not None:
        out["v0"] = matrix_to_json(spec.v0)
    return out


def modelspec_from_json(obj, where: str = "modelspec") -> ModelSpec:
    kind = _need(obj, "kind", where)
    if kind not in MODEL_KINDS:
        raise SchemaError(f"{where}: kind must be one of {MODEL_KINDS}")
    try:
        return ModelSpec(
            kind=kind,
            blocks=tuple(int(b) for b in obj.get("blocks", (2,))),
            weights=tuple(float(w) for w in obj["weights"]) if "weights" in obj else None,
            e=matrix_from_json(obj["e"], f"{where}.e") if "e" in obj else None,
            v0=matrix_from_json(obj["v0"], f"{where}.v0") if "v0" in obj else None,
            p_list=tuple(int(p) for p in obj.get("p_list", (2, 4))),
        )
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def canonical_dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def load_json_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
