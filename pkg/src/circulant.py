"""
Circulant matrices: construction from a first row or a spectrum, the
nonnegativity test, and the conjugate-pair constructions with their
companion-matrix oracle.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from .common import DEFAULT_TOL, InvalidArgumentError, RESIDUE_TOL, UnsupportedParityError
from .dft_core import as_array, dft_eigenvalues, idft_coefficients
from .documents import decode_array, encode_array
from .exact import is_exact_array, to_float_array
from .polynomial import poly_from_roots
from .spectra import SpectrumList

logger = logging.getLogger("circulant")


def circulant_indices(m: int) -> np.ndarray:
    """idx[i][j] = (j - i) mod m, so circ(a)[i][j] = a[idx[i][j]]."""
    r = np.arange(m)
    return (r[None, :] - r[:, None]) % m


@dataclass(eq=False)
class Circulant:
    """m x m circulant defined by its first row."""
    first_row: np.ndarray

    def __post_init__(self):
        self.first_row = as_array(self.first_row, name="first row")

    @property
    def m(self) -> int:
        return int(self.first_row.size)

    @property
    def is_exact(self) -> bool:
        return is_exact_array(self.first_row)

    def to_matrix(self) -> np.ndarray:
        return self.first_row[circulant_indices(self.m)]

    def min_entry(self) -> float:
        return float(np.min(to_float_array(self.first_row).real))

    def to_dict(self) -> Dict[str, Any]:
        return {'first_row': encode_array(self.first_row)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], exact: bool = False) -> 'Circulant':
        return cls(first_row=decode_array(data['first_row'], ndim=1, exact=exact))


def circulant_from_row(row: Any, exact: bool = False) -> Circulant:
    return Circulant(as_array(row, exact=exact, name="first row"))


def eigenvalues(c: Circulant) -> SpectrumList:
    """Eigenvalues in DFT order: position k pairs with harmonic e_k."""
    return SpectrumList(dft_eigenvalues(c.first_row))


def circulant_from_spectrum(spectrum: Any, exact: bool = False) -> Circulant:
    """The unique circulant whose DFT-ordered eigenvalues are `spectrum`."""
    return Circulant(idft_coefficients(spectrum, exact=exact))


def is_nonnegative_entries(values: Any, tol: float = DEFAULT_TOL) -> bool:
    """All entries real (within tol) and >= -tol."""
    z = to_float_array(values)
    return bool(np.all(z.real >= -tol) and np.all(np.abs(z.imag) <= tol))


def is_nonnegative(c: Circulant, tol: float = DEFAULT_TOL) -> bool:
    return is_nonnegative_entries(c.first_row, tol)


def is_circulant_matrix(matrix: Any, tol: float = DEFAULT_TOL) -> bool:
    M = to_float_array(as_array(matrix, ndim=2, name="matrix"))
    n, cols = M.shape
    if n != cols:
        raise InvalidArgumentError(f"Matrix must be square, got shape {M.shape}")
    return bool(np.max(np.abs(M - M[0][circulant_indices(n)])) <= tol)


def circulant_first_row(matrix: Any, tol: float = DEFAULT_TOL) -> Circulant:
    """Read a square matrix as a circulant, rejecting any other pattern."""
    if not is_circulant_matrix(matrix, tol):
        raise InvalidArgumentError("Matrix is not circulant")
    return Circulant(as_array(matrix, ndim=2, name="matrix")[0])


def _check_pair_args(n: Any, a: float, b: float):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidArgumentError(f"n must be an integer >= 2, got {n!r}")
    if not (a > 0 and b > 0):
        raise InvalidArgumentError(f"a and b must be positive, got a={a}, b={b}")


def conjugate_pair_guo_bound(n: int, a: float, b: float) -> float:
    """
    Smallest lambda_1 for which lambda_1, -a +- bi, 0, ..., 0 of length n
    is realized: (n-1)a + n max(0, b/sqrt(n) - a).
    """
    _check_pair_args(n, a, b)
    return (n - 1) * a + n * max(0.0, b / math.sqrt(n) - a)


def _check_odd(n: int):
    if n % 2 == 0:
        raise UnsupportedParityError(f"Only odd n is supported, got n={n}")
    if n < 3:
        raise InvalidArgumentError(f"n must be at least 3, got {n}")


def conjugate_pair_circulant(n: int, lam1: float, a: float, b: float) -> Circulant:
    """
    Alternating first row: diagonal (lam1 - (n-1)a)/n, then entries
    (lam1 + a + sqrt(n) b)/n and (lam1 + a - sqrt(n) b)/n in turn.

    Nonnegative exactly when lam1 >= conjugate_pair_guo_bound(n, a, b).
    Its spectrum is lam1, -a +- bi only for n = 3; for larger n use
    circulant_from_spectrum(conjugate_pair_list(...)).
    """
    _check_pair_args(n, a, b)
    _check_odd(n)
    root_n = math.sqrt(n)
    row = np.empty(n, dtype=complex)
    row[0] = (lam1 - (n - 1) * a) / n
    for j in range(1, n):
        sign = 1.0 if j % 2 == 1 else -1.0
        row[j] = (lam1 + a + sign * root_n * b) / n
    return Circulant(row)


def conjugate_pair_list(n: int, lam1: float, a: float, b: float) -> SpectrumList:
    """lam1, then -a + bi on the first half of the harmonics and conjugates on the second."""
    _check_pair_args(n, a, b)
    _check_odd(n)
    h = (n - 1) // 2
    entries = [complex(lam1)] + [complex(-a, b)] * h + [complex(-a, -b)] * h
    return SpectrumList(np.array(entries))


@dataclass(eq=False)
class CompanionWitness:
    """
    Companion matrix B of the shifted list and the shift s. The candidate
    realization is B + sI, nonnegative when every coefficient past the
    leading one is <= 0.
    """
    n: int
    coefficients: np.ndarray
    shift: float
    matrix: np.ndarray
    nonnegative: bool

    def realization(self) -> np.ndarray:
        return self.matrix + self.shift * np.eye(self.n)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'coefficients': [float(c) for c in self.coefficients],
            'shift': self.shift,
            'matrix': self.matrix.tolist(),
            'nonnegative': self.nonnegative,
        }


def companion_oracle(n: int, a: float, b: float, s: float, tol: float = RESIDUE_TOL) -> CompanionWitness:
    """
    Build the companion matrix of (n-1)(a+s), -(a+s) +- bi (each h times),
    which has trace zero. B + sI realizes the list shifted back by -s.
    """
    _check_pair_args(n, a, b)
    _check_odd(n)
    if s < 0:
        raise InvalidArgumentError(f"Shift must be nonnegative, got {s}")
    c = a + s
    h = (n - 1) // 2
    roots = [complex((n - 1) * c)] + [complex(-c, b)] * h + [complex(-c, -b)] * h
    coeffs = poly_from_roots(roots)
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    if np.max(np.abs(coeffs.imag)) > tol * scale:
        raise InvalidArgumentError("Companion coefficients are not real")
    coeffs = coeffs.real

    B = np.zeros((n, n))
    for i in range(n - 1):
        B[i, i + 1] = 1.0
    B[n - 1, :] = -coeffs[n:0:-1]
    B[n - 1, n - 1] = 0.0

    rho = max((n - 1) * c, math.hypot(c, b))
    nonneg = all(coeffs[j] <= tol * max(1.0, rho ** j) for j in range(2, n + 1))
    logger.debug(f"Companion oracle n={n} a={a} b={b} s={s}: nonnegative={nonneg}")
    return CompanionWitness(n=n, coefficients=coeffs, shift=float(s), matrix=B, nonnegative=nonneg)


def laffey_smigoc_sign_check(coefficients: Any, tol: float = RESIDUE_TOL) -> bool:
    """
    Sign test on a monic trace-zero polynomial x^n + a1 x^{n-1} + ... + an:
    true when a2 > 0 (vacuous), otherwise true iff every aj, j >= 3, is <= 0.
    """
    c = to_float_array(as_array(coefficients, name="coefficients")).real
    n = c.size - 1
    if n < 3:
        return True
    if c[2] > tol:
        return True
    return bool(np.all(c[3:] <= tol))

