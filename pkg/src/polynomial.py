"""
Characteristic polynomials, polynomial roots and polynomials from roots.

Coefficients are stored highest degree first, monic: (1, c1, ..., cn).
"""
import logging
from typing import Any, List

import numpy as np
import sympy

from .common import InvalidArgumentError, NumericFailureError, UnsupportedSizeError
from .dft_core import as_array
from .exact import is_exact_array, object_map, simplify_array, to_float_array

logger = logging.getLogger("polynomial")

MAX_ORDER = 12
ROOT_MAX_ITER = 500
ROOT_TOL = 1e-12
CLUSTER_TOL = 1e-5


def _identity(n: int, exact: bool) -> np.ndarray:
    if exact:
        return object_map(lambda v: sympy.Integer(int(v)), np.eye(n, dtype=int))
    return np.eye(n, dtype=complex)


def char_poly(matrix: Any, max_order: int = MAX_ORDER) -> np.ndarray:
    """
    det(xI - M) by the Faddeev-LeVerrier recursion. Works for float and
    exact object matrices alike.
    """
    A = as_array(matrix, ndim=2, name="matrix")
    n, cols = A.shape
    if n != cols:
        raise InvalidArgumentError(f"Matrix must be square, got shape {A.shape}")
    if n > max_order:
        raise UnsupportedSizeError(f"Characteristic polynomial limited to order {max_order}, got {n}")
    exact = is_exact_array(A)
    I = _identity(n, exact)

    coeffs = [sympy.Integer(1) if exact else 1.0 + 0j]
    Mk = np.zeros_like(A)
    c = coeffs[0]
    for k in range(1, n + 1):
        Mk = A @ Mk + c * I
        trace = np.trace(A @ Mk)
        c = -trace / (sympy.Integer(k) if exact else k)
        coeffs.append(c)

    out = np.array(coeffs, dtype=object if exact else complex)
    return simplify_array(out) if exact else out


def _monic(coefficients: Any) -> np.ndarray:
    c = to_float_array(as_array(coefficients, name="coefficients"))
    if c[0] == 0:
        raise InvalidArgumentError("Leading coefficient must be nonzero")
    return c / c[0]


def _clusters(z: np.ndarray) -> np.ndarray:
    """Replace each tight cluster of roots by its mean."""
    n = z.size
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= CLUSTER_TOL * max(1.0, abs(z[i])):
                parent[find(i)] = find(j)

    out = z.copy()
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    for members in groups.values():
        if len(members) > 1:
            out[members] = np.mean(z[members])
    return out


def poly_roots(coefficients: Any, tol: float = ROOT_TOL, max_iter: int = ROOT_MAX_ITER) -> np.ndarray:
    """
    All complex roots of a polynomial by Weierstrass (Durand-Kerner)
    simultaneous iteration, followed by one guarded Newton step per root
    and cluster averaging for repeated roots.
    """
    c = _monic(coefficients)
    degree = c.size - 1
    if degree > MAX_ORDER:
        raise UnsupportedSizeError(f"Root finding limited to degree {MAX_ORDER}, got {degree}")

    # Factor out roots at zero
    zeros = 0
    while c.size > 1 and c[-1] == 0:
        c = c[:-1]
        zeros += 1
    n = c.size - 1
    if n == 0:
        return np.zeros(zeros, dtype=complex)

    # Starting points on a rotated circle enclosing every root
    radius = 1.0 + float(np.max(np.abs(c[1:])))
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    abs_c = np.abs(c)
    eps = np.finfo(float).eps

    converged = False
    for iteration in range(max_iter):
        p = np.polyval(c, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        denom = np.prod(diff, axis=1)
        if np.any(denom == 0):
            raise NumericFailureError("Root iterates collided", partial=z)
        delta = p / denom
        z = z - delta
        if not np.all(np.isfinite(z)):
            raise NumericFailureError("Root iteration diverged", partial=z)
        if np.all(np.abs(delta) <= tol * np.maximum(1.0, np.abs(z))):
            converged = True
            break
        # Residuals at rounding level
        bound = 64 * eps * np.polyval(abs_c, np.abs(z))
        if np.all(np.abs(np.polyval(c, z)) <= bound):
            converged = True
            break
    if not converged:
        raise NumericFailureError(f"Root iteration did not converge in {max_iter} steps", partial=z)
    logger.debug(f"Degree {n} roots converged after {iteration + 1} iterations")

    # Newton step, kept only where it lowers |p|
    dc = np.polyder(c)
    p = np.polyval(c, z)
    dp = np.polyval(dc, z)
    safe = dp != 0
    newton = z.copy()
    newton[safe] = z[safe] - p[safe] / dp[safe]
    better = np.abs(np.polyval(c, newton)) < np.abs(p)
    z = np.where(better, newton, z)

    z = _clusters(z)
    return np.concatenate([z, np.zeros(zeros, dtype=complex)])


def poly_from_roots(roots: Any, exact: bool = False) -> np.ndarray:
    """Monic coefficients of prod (x - r) via Newton's identities."""
    r = as_array(roots, exact=exact, name="roots", allow_empty=True)
    exact = is_exact_array(r)
    n = r.size
    one = sympy.Integer(1) if exact else 1.0 + 0j
    power_sums = [np.sum(r ** k) for k in range(1, n + 1)]
    e: List[Any] = [one]
    for k in range(1, n + 1):
        acc = sum(((-1) ** (i - 1)) * e[k - i] * power_sums[i - 1] for i in range(1, k + 1))
        e.append(acc / (sympy.Integer(k) if exact else k))
    coeffs = np.array([((-1) ** k) * e[k] for k in range(n + 1)], dtype=object if exact else complex)
    return simplify_array(coeffs) if exact else coeffs
