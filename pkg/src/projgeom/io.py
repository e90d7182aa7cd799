"""JSON serialization shared by the library and the command line.

Matrices use ``{"dim": n, "re": [[...]], "im": [[...]]}``; ``"im"`` is
optional and defaults to zero. Rectangular matrices (angular operators)
carry ``"shape": [rows, cols]`` instead of ``"dim"``.
"""

import json
import math

import numpy as np

from .exceptions import InputError


def matrix_to_json(M):
    M = np.asarray(M)
    out = {}
    if M.ndim == 2 and M.shape[0] == M.shape[1]:
        out["dim"] = int(M.shape[0])
    else:
        out["shape"] = [int(s) for s in M.shape]
    out["re"] = np.real(M).tolist()
    if np.iscomplexobj(M) and np.any(np.imag(M) != 0):
        out["im"] = np.imag(M).tolist()
    return out


def matrix_from_json(obj):
    if not isinstance(obj, dict) or "re" not in obj:
        raise InputError("matrix JSON must be an object with an 're' field")
    try:
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj["im"], dtype=float) if obj.get("im") is not None else None
    except (TypeError, ValueError) as exc:
        raise InputError(f"matrix JSON: non-numeric entries ({exc})") from exc
    if "dim" in obj:
        n = obj["dim"]
        if not isinstance(n, int) or n < 0:
            raise InputError("matrix JSON: 'dim' must be a non-negative integer")
        shape = (n, n)
    elif "shape" in obj:
        shape = tuple(obj["shape"])
    else:
        shape = re.shape
    if re.size == 0:
        re = re.reshape(shape)
    if re.shape != shape:
        raise InputError(f"matrix JSON: 're' has shape {re.shape}, expected {shape}")
    if im is None:
        return re
    if im.size == 0:
        im = im.reshape(shape)
    if im.shape != shape:
        raise InputError(f"matrix JSON: 'im' has shape {im.shape}, expected {shape}")
    return re + 1j * im


def load_matrix(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return matrix_from_json(obj)


def save_matrix(path, M):
    with open(path, "w") as fh:
        json.dump(matrix_to_json(M), fh)


def _clean(value):
    # Non-finite floats are not valid JSON; encode them as strings.
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def dumps(obj):
    """Deterministic JSON text (sorted keys, non-finite floats as strings)."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2)
