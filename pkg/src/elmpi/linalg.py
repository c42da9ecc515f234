"""Moore-Penrose pseudoinverse by singular value decomposition."""

import numpy as np

from .exceptions import NumericError

DEFAULT_RCOND = 1e-12


def pinv(m, tol=DEFAULT_RCOND):
    """Moore-Penrose pseudoinverse of a p x q matrix.

    Singular values below ``tol * sigma_max`` are treated as zero, so
    rank-deficient inputs yield the minimum-norm least-squares inverse.

    Args:
        m: array_like of shape (p, q).
        tol: relative cutoff on singular values.

    Returns:
        ndarray of shape (q, p).
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise NumericError(f"pinv expects a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise NumericError("pinv input contains non-finite entries")
    p, q = m.shape
    if m.size == 0:
        return np.zeros((q, p))
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    cutoff = tol * s[0] if s.size else 0.0
    keep = s > cutoff
    if not np.any(keep):
        return np.zeros((q, p))
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (vt.T * s_inv) @ u.T


def penrose_residuals(m, m_pinv):
    """Max-abs violation of each of the four Penrose conditions."""
    m = np.asarray(m, dtype=float)
    g = np.asarray(m_pinv, dtype=float)
    mg = m @ g
    gm = g @ m
    return (
        np.max(np.abs(mg @ m - m), initial=0.0),
        np.max(np.abs(gm @ g - g), initial=0.0),
        np.max(np.abs(mg.T - mg), initial=0.0),
        np.max(np.abs(gm.T - gm), initial=0.0),
    )
