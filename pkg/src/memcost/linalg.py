"""Small dense linear solves with partial pivoting.

Hitting times of slow chains reach 1e10 update steps, where a float64
solve cannot certify the absolute residual bound the engine promises. The
primary path runs Gaussian elimination in extended precision; tiny systems
that still miss the bound are redone in arbitrary precision.
"""

from __future__ import annotations

import mpmath
import numpy as np


class SingularMatrixError(ValueError):
    pass


def solve_partial_pivot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b by LU with partial pivoting in extended precision."""
    a = np.array(a, dtype=np.longdouble)
    x = np.array(b, dtype=np.longdouble)
    n = a.shape[0]
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if a[piv, k] == 0:
            raise SingularMatrixError(f"zero pivot at column {k}")
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            x[[k, piv]] = x[[piv, k]]
        factors = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(factors, a[k, k + 1 :])
        x[k + 1 :] -= factors * x[k]
    out = np.empty(n, dtype=np.longdouble)
    for i in range(n - 1, -1, -1):
        out[i] = (x[i] - a[i, i + 1 :] @ out[i + 1 :]) / a[i, i]
    return out


def residual_inf(a: np.ndarray, x: np.ndarray, b: np.ndarray) -> float:
    """max |a x - b| evaluated in extended precision."""
    r = a.astype(np.longdouble) @ x.astype(np.longdouble) - b.astype(np.longdouble)
    return float(np.abs(r).max())


def solve_mp(a: np.ndarray, b: np.ndarray, dps: int = 50) -> tuple[np.ndarray, float]:
    """Arbitrary-precision solve for small systems.

    Returns the solution (rounded to extended precision) and the residual
    measured at full working precision before rounding.
    """
    with mpmath.workdps(dps):
        am = mpmath.matrix([[mpmath.mpf(v) for v in row] for row in np.asarray(a)])
        bm = mpmath.matrix([mpmath.mpf(v) for v in np.asarray(b)])
        try:
            xm = mpmath.lu_solve(am, bm)
        except ZeroDivisionError as exc:
            raise SingularMatrixError(str(exc)) from exc
        residual = float(mpmath.norm(am * xm - bm, p=mpmath.inf))
    x = np.array([np.longdouble(mpmath.nstr(v, 25)) for v in xm])
    return x, residual
