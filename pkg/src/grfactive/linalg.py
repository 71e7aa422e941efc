"""Small dense symmetric linear-algebra helpers used across the package."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import NumericalError

#: reciprocal-condition floor below which a factorization counts as singular;
#: an exactly singular Laplacian leaks through Cholesky with a last pivot of
#: order sqrt(eps), i.e. an estimated rcond near eps, far under this floor
RCOND_FLOOR = 1e-12


def sym(a: np.ndarray) -> np.ndarray:
    """Symmetrize a nearly-symmetric matrix."""
    return 0.5 * (a + a.T)


def spd_solve(a: np.ndarray, b: np.ndarray, *, context: str = "") -> np.ndarray:
    """Solve ``a x = b`` for symmetric positive definite ``a`` via Cholesky.

    Raises NumericalError when the factorization fails or its pivots imply
    the matrix is numerically singular (rounding can let an exactly
    singular matrix factor "successfully" with a tiny final pivot).
    """
    if a.shape[0] == 0:
        return np.zeros_like(b, dtype=float)
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"matrix is not positive definite{': ' + context if context else ''}"
        ) from exc
    pivots = np.diag(factor[0])
    if (pivots.min() / pivots.max()) ** 2 <= RCOND_FLOOR:
        raise NumericalError(
            "matrix is numerically singular"
            f"{': ' + context if context else ''}"
        )
    return scipy.linalg.cho_solve(factor, b, check_finite=False)


def spd_inverse(a: np.ndarray, *, context: str = "") -> np.ndarray:
    """Inverse of a symmetric positive definite matrix, symmetrized."""
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    return sym(spd_solve(a, np.eye(n), context=context))
