"""Input validation helpers shared by the estimator wrappers."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import InvalidParameterError


def check_node_matrix(X, n=None):
    """Validate a batch of node systems, one per row.

    Parameters
    ----------
    X : array_like, shape (m, n) or (n,)
    n : int, optional
        Required number of nodes.

    Returns
    -------
    ndarray, shape (m, n)
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    X = check_array(X, dtype=float, ensure_2d=True)
    if n is not None and X.shape[1] != n:
        raise InvalidParameterError(f"expected {n} nodes per row, got {X.shape[1]}")
    if np.any(X < 0) or np.any(X > 1) or np.any(np.diff(X, axis=1) < 0):
        raise InvalidParameterError("every row must be ordered inside [0, 1]")
    return X


def check_target_matrix(D, n=None):
    """Validate a batch of finite target vectors, one per row."""
    D = np.asarray(D, dtype=float)
    if D.ndim == 1:
        D = D[None, :]
    D = check_array(D, dtype=float, ensure_2d=True)
    if n is not None and D.shape[1] != n:
        raise InvalidParameterError(f"expected {n} entries per row, got {D.shape[1]}")
    return D


def check_positive_vector(v, size=None, name="values"):
    """1-D array of strictly positive finite numbers."""
    v = check_array(np.asarray(v, dtype=float).reshape(1, -1), dtype=float).ravel()
    if size is not None and v.size != size:
        raise InvalidParameterError(f"{name} needs {size} entries, got {v.size}")
    if np.any(v <= 0):
        raise InvalidParameterError(f"{name} must be positive")
    return v


def check_abscissae(x):
    """Strictly increasing abscissae inside ``[0, 1]``."""
    x = check_array(np.asarray(x, dtype=float).reshape(1, -1), dtype=float).ravel()
    if x.size < 2:
        raise InvalidParameterError("need at least two abscissae")
    if np.any(np.diff(x) <= 0) or x[0] < 0 or x[-1] > 1:
        raise InvalidParameterError("abscissae must increase strictly inside [0, 1]")
    return x


def check_points(t):
    """Evaluation points in ``[0, 1]`` (any shape, returned flattened)."""
    t = np.asarray(t, dtype=float).ravel()
    t = check_array(t.reshape(1, -1), dtype=float, ensure_min_features=0).ravel() \
        if t.size else t
    if np.any(t < 0) or np.any(t > 1):
        raise InvalidParameterError("evaluation points must lie in [0, 1]")
    return t
