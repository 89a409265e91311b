"""
Roots of unity, DFT matrices, and the forward/inverse maps between a
circulant's first row and its eigenvalue vector.

Position k of every eigenvalue vector is the eigenvalue attached to the
harmonic vector e_k; nothing in the toolkit reorders it implicitly.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
import sympy

from .common import InvalidArgumentError
from .exact import exact_array, is_exact_array, object_map, root_of_unity, simplify_array, to_float_array

logger = logging.getLogger("dft_core")


def _check_order(order: Any, name: str = "order") -> int:
    if isinstance(order, (bool, np.bool_)) or not isinstance(order, (int, np.integer)) or order < 1:
        raise InvalidArgumentError(f"{name} must be a positive integer, got {order!r}")
    return int(order)


def as_array(values: Any, exact: bool = False, ndim: int = 1,
             name: str = "input", allow_empty: bool = False) -> np.ndarray:
    """
    Coerce `values` to a complex (or exact object) array of the given rank.
    Object arrays are treated as exact data regardless of the flag.
    """
    values = getattr(values, 'entries', values)
    if is_exact_array(values):
        exact = True
    if exact:
        arr = exact_array(values)
    else:
        try:
            arr = np.asarray(values, dtype=complex)
        except (TypeError, ValueError) as e:
            raise InvalidArgumentError(f"{name} is not numeric: {e}")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError(f"{name} contains NaN or infinite values")
    if arr.ndim != ndim:
        raise InvalidArgumentError(f"{name} must have {ndim} dimension(s), got shape {arr.shape}")
    if arr.size == 0 and not allow_empty:
        raise InvalidArgumentError(f"{name} is empty")
    return arr


def primitive_root(order: int) -> complex:
    """omega = cos(2pi/order) + i sin(2pi/order)."""
    order = _check_order(order)
    angle = 2 * math.pi / order
    return complex(math.cos(angle), math.sin(angle))


def root_power(order: int, exponent: int, exact: bool = False):
    """omega^exponent, with the exponent reduced mod order before evaluation."""
    order = _check_order(order)
    if exact:
        return root_of_unity(order, exponent)
    r = exponent % order
    angle = 2 * math.pi * r / order
    return complex(math.cos(angle), math.sin(angle))


def _kernel(order: int, sign: int, exact: bool) -> np.ndarray:
    order = _check_order(order)
    k = np.arange(order)
    powers = (sign * np.outer(k, k)) % order
    if exact:
        table = [root_of_unity(order, r) for r in range(order)]
        logger.debug(f"Exact DFT kernel of order {order}, sign {sign}")
        return object_map(lambda r: table[int(r)], powers)
    angles = 2 * np.pi * powers / order
    return np.cos(angles) + 1j * np.sin(angles)


def forward_kernel(order: int, exact: bool = False) -> np.ndarray:
    """W[k][l] = omega^{kl}."""
    return _kernel(order, 1, exact)


def inverse_kernel(order: int, exact: bool = False) -> np.ndarray:
    """W[k][l] = omega^{-kl}."""
    return _kernel(order, -1, exact)


@dataclass(eq=False)
class FourierMatrix:
    """Unitary DFT matrix, entries (1/sqrt(order)) omega^{pq}."""
    order: int
    entries: np.ndarray

    def column(self, k: int) -> np.ndarray:
        return self.entries[:, k]

    def is_unitary(self, tol: float = 1e-12) -> bool:
        F = to_float_array(self.entries)
        gram = F @ F.conj().T
        return bool(np.max(np.abs(gram - np.eye(self.order))) <= tol)


def fourier_matrix(order: int, exact: bool = False) -> FourierMatrix:
    """Unitary DFT matrix of the given order."""
    order = _check_order(order)
    W = forward_kernel(order, exact)
    if exact:
        entries = simplify_array(W / sympy.sqrt(order))
    else:
        entries = W / math.sqrt(order)
    return FourierMatrix(order=order, entries=entries)


def harmonic_vector(k: int, m: int, exact: bool = False) -> np.ndarray:
    """e_k = (1, omega^k, omega^{2k}, ..., omega^{(m-1)k})."""
    m = _check_order(m, "m")
    if isinstance(k, (bool, np.bool_)) or not isinstance(k, (int, np.integer)) or not 0 <= k < m:
        raise InvalidArgumentError(f"harmonic index must satisfy 0 <= k < {m}, got {k!r}")
    if exact:
        return object_map(lambda j: root_of_unity(m, k * int(j)), np.arange(m))
    j = np.arange(m)
    angles = 2 * np.pi * ((k * j) % m) / m
    return np.cos(angles) + 1j * np.sin(angles)


def dft_eigenvalues(first_row: Any, exact: bool = False) -> np.ndarray:
    """lambda_k = sum_l a_l omega^{kl}, k = 0..m-1."""
    a = as_array(first_row, exact=exact, name="first row")
    exact = is_exact_array(a)
    lam = forward_kernel(a.size, exact) @ a
    return simplify_array(lam) if exact else lam


def idft_coefficients(spectrum: Any, exact: bool = False) -> np.ndarray:
    """a_k = (1/m) sum_l lambda_l omega^{-kl}, the inverse of dft_eigenvalues."""
    lam = as_array(spectrum, exact=exact, name="spectrum")
    exact = is_exact_array(lam)
    m = lam.size
    if exact:
        return simplify_array((inverse_kernel(m, True) @ lam) / sympy.Integer(m))
    return (inverse_kernel(m) @ lam) / m
