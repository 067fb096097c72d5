"""JSON state and unitary files.

State format: {"dim_a": 2, "dim_b": d, "matrix": [[[re, im], ...], ...]} with
the matrix row-major in the |a> ⊗ |b> basis. Unitary files carry only the
"matrix" key. Floats are written with repr, which round-trips exactly.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import DiscordBoundsError
from .qstate import DensityMatrix, validate_state, validate_unitary


def _matrix_to_json(arr: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in arr]


def _matrix_from_json(data) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DiscordBoundsError(f"malformed matrix payload: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise DiscordBoundsError(
            f"matrix payload must be square with [re, im] entries, got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def write_state(rho: DensityMatrix, path) -> None:
    payload = {
        "dim_a": rho.dim_a,
        "dim_b": rho.dim_b,
        "matrix": _matrix_to_json(rho.entries),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def read_state(path) -> DensityMatrix:
    with open(path) as fh:
        payload = json.load(fh)
    for key in ("dim_a", "dim_b", "matrix"):
        if key not in payload:
            raise DiscordBoundsError(f"state file is missing the '{key}' field")
    return validate_state(
        _matrix_from_json(payload["matrix"]),
        dim_b=int(payload["dim_b"]),
        dim_a=int(payload["dim_a"]),
    )


def write_unitary(u: np.ndarray, path) -> None:
    with open(path, "w") as fh:
        json.dump({"matrix": _matrix_to_json(np.asarray(u, dtype=complex))}, fh)
        fh.write("\n")


def read_unitary(path) -> np.ndarray:
    with open(path) as fh:
        payload = json.load(fh)
    if "matrix" not in payload:
        raise DiscordBoundsError("unitary file is missing the 'matrix' field")
    return validate_unitary(_matrix_from_json(payload["matrix"]))
