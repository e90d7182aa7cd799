"""Input validation helpers shared by every module."""

import numpy as np

from .exceptions import DimensionMismatchError, InputError

HERMITIAN_TOL = 1e-12
# Asymmetry beyond this (relative) is treated as a caller bug, not roundoff.
GROSS_ASYMMETRY = 1e-6


def check_array(M, name="matrix", ndim=2):
    """Return ``M`` as a float64 or complex128 ndarray of the given ndim."""
    try:
        arr = np.asarray(M)
    except Exception as exc:  # pragma: no cover - numpy rarely refuses
        raise InputError(f"{name}: cannot convert to array ({exc})") from exc
    if arr.dtype == object or not np.issubdtype(arr.dtype, np.number):
        raise InputError(f"{name}: expected a numeric array, got dtype {arr.dtype}")
    if arr.ndim != ndim:
        raise InputError(f"{name}: expected {ndim}-d array, got shape {arr.shape}")
    if np.iscomplexobj(arr):
        arr = arr.astype(np.complex128, copy=False)
    else:
        arr = arr.astype(np.float64, copy=False)
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name}: contains non-finite entries")
    return arr


def check_square(M, name="matrix"):
    arr = check_array(M, name)
    if arr.shape[0] != arr.shape[1]:
        raise InputError(f"{name}: expected a square matrix, got shape {arr.shape}")
    return arr


def as_hermitian(H, name="matrix"):
    """Validate ``H`` and return its Hermitian part ``(H + H*)/2``.

    Real input stays real (a real symmetric matrix is its own complex
    embedding); asymmetry larger than roundoff raises :class:`InputError`.
    """
    arr = check_square(H, name)
    herm = arr.conj().T
    scale = 1.0 + np.abs(arr).max(initial=0.0)
    if np.abs(arr - herm).max(initial=0.0) > GROSS_ASYMMETRY * scale:
        raise InputError(f"{name}: matrix is not Hermitian")
    return (arr + herm) / 2


def is_hermitian(H, tol=HERMITIAN_TOL):
    arr = np.asarray(H)
    return arr.ndim == 2 and arr.shape[0] == arr.shape[1] and bool(
        np.abs(arr - arr.conj().T).max(initial=0.0) <= tol * (1.0 + np.abs(arr).max(initial=0.0))
    )


def check_same_dim(*mats):
    dims = {m.shape[0] for m in mats}
    if len(dims) > 1:
        raise DimensionMismatchError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def check_random_state(seed):
    """Turn ``seed`` into a :class:`numpy.random.Generator`."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
