"""
Block circulant matrices with circulant blocks.

A CirculantBlockMatrix stores the n x n grid of block first rows a(i,j)
as an array of shape (n, n, m). The attached families S_k and L_k are
stored as arrays of shape (m, n, n):

    S_k[i][j] = sum_l a_l(i,j) omega^{kl}
    L_k       = (1/m) sum_l S_l omega^{-kl}

so that a(u,v)_k = L_k[u][v], and the spectrum of the whole matrix is
the union of the spectra of the S_k.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
import sympy

from .circulant import circulant_indices, is_circulant_matrix, is_nonnegative_entries
from .common import DEFAULT_TOL, InvalidArgumentError, UnsupportedSizeError
from .dft_core import as_array, dft_eigenvalues, forward_kernel, harmonic_vector, inverse_kernel
from .documents import decode_array, encode_array
from .exact import is_exact_array, simplify_array, to_float_array
from .polynomial import MAX_ORDER, ROOT_MAX_ITER, char_poly, poly_roots
from .spectra import SpectrumList

__all__ = [
    "CirculantBlockMatrix", "SFamily", "LFamily", "EigenPair",
    "s_matrices", "l_matrices", "assemble", "is_nonnegative_family",
    "spectrum", "family_spectrum", "eigenpair_residuals", "full_matrix_spectrum",
    "block_matrix_from_dense", "char_poly", "poly_roots",
]

logger = logging.getLogger("block_ops")


@dataclass(eq=False)
class CirculantBlockMatrix:
    """n x n grid of order-m circulant blocks; blocks[i, j] is the first row of A(i,j)."""
    blocks: np.ndarray

    def __post_init__(self):
        self.blocks = as_array(self.blocks, ndim=3, name="blocks")
        n, n2, _ = self.blocks.shape
        if n != n2:
            raise InvalidArgumentError(f"Block grid must be square, got {n}x{n2}")

    @property
    def n(self) -> int:
        return int(self.blocks.shape[0])

    @property
    def m(self) -> int:
        return int(self.blocks.shape[2])

    @property
    def is_exact(self) -> bool:
        return is_exact_array(self.blocks)

    def block(self, i: int, j: int) -> np.ndarray:
        return self.blocks[i, j]

    def to_matrix(self) -> np.ndarray:
        """The full mn x mn matrix; block (i,j) occupies rows i*m.., columns j*m..."""
        n, m = self.n, self.m
        grid = self.blocks[:, :, circulant_indices(m)]
        return grid.transpose(0, 2, 1, 3).reshape(n * m, n * m)

    def min_entry(self) -> float:
        return float(np.min(to_float_array(self.blocks).real))

    def to_dict(self) -> Dict[str, Any]:
        return {'n': self.n, 'm': self.m, 'blocks': encode_array(self.blocks)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], exact: bool = False) -> 'CirculantBlockMatrix':
        blocks = decode_array(data['blocks'], ndim=3, exact=exact)
        if blocks.shape[:2] != (data['n'], data['n']) or blocks.shape[2] != data['m']:
            raise InvalidArgumentError(
                f"Block array of shape {blocks.shape} does not match n={data['n']}, m={data['m']}"
            )
        return cls(blocks)


class _MatrixFamily:
    """m matrices of a common size n x n, stored as shape (m, n, n)."""

    def __init__(self, matrices: Any):
        if isinstance(matrices, _MatrixFamily):
            matrices = matrices.matrices
        if isinstance(matrices, (list, tuple)):
            if not matrices:
                raise InvalidArgumentError("A family needs at least one matrix")
            shapes = {np.shape(M) for M in matrices}
            if len(shapes) != 1:
                raise InvalidArgumentError(f"Family matrices differ in dimension: {sorted(shapes)}")
            if any(is_exact_array(M) for M in matrices):
                stacked = np.empty((len(matrices),) + shapes.pop(), dtype=object)
                for k, M in enumerate(matrices):
                    stacked[k] = as_array(M, exact=True, ndim=2)
                matrices = stacked
        arr = as_array(matrices, ndim=3, name="family")
        m, n, n2 = arr.shape
        if n != n2:
            raise InvalidArgumentError(f"Family matrices must be square, got {n}x{n2}")
        self.matrices = arr

    @property
    def m(self) -> int:
        return int(self.matrices.shape[0])

    @property
    def n(self) -> int:
        return int(self.matrices.shape[1])

    @property
    def is_exact(self) -> bool:
        return is_exact_array(self.matrices)

    def __len__(self) -> int:
        return self.m

    def __getitem__(self, k: int) -> np.ndarray:
        return self.matrices[k]

    def __iter__(self):
        return iter(self.matrices)

    def to_dict(self) -> Dict[str, Any]:
        return {'matrices': encode_array(self.matrices)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], exact: bool = False):
        return cls(decode_array(data['matrices'], ndim=3, exact=exact))


class SFamily(_MatrixFamily):
    """S_0, ..., S_{m-1}: one n x n matrix per harmonic."""


class LFamily(_MatrixFamily):
    """L_0, ..., L_{m-1}: the block first-row coefficients, a(u,v)_k = L_k[u][v]."""


def _tidy(arr: np.ndarray) -> np.ndarray:
    return simplify_array(arr) if is_exact_array(arr) else arr


def s_matrices(A: CirculantBlockMatrix) -> SFamily:
    """S_k[i][j] = sum_l a_l(i,j) omega^{kl}."""
    W = forward_kernel(A.m, A.is_exact)
    return SFamily(_tidy(np.tensordot(W, A.blocks, axes=([1], [2]))))


def l_matrices(S: Union[SFamily, Sequence]) -> LFamily:
    """L_k = (1/m) sum_l S_l omega^{-kl}."""
    S = S if isinstance(S, _MatrixFamily) else SFamily(S)
    m = S.m
    W = inverse_kernel(m, S.is_exact)
    total = np.tensordot(W, S.matrices, axes=([1], [0]))
    if S.is_exact:
        return LFamily(simplify_array(total / sympy.Integer(m)))
    return LFamily(total / m)


def assemble(S: Union[SFamily, Sequence]) -> CirculantBlockMatrix:
    """The block matrix whose S-family is S: block (u,v) has first row (L_0[u][v], ..., L_{m-1}[u][v])."""
    L = l_matrices(S)
    A = CirculantBlockMatrix(np.ascontiguousarray(L.matrices.transpose(1, 2, 0)))
    logger.debug(f"Assembled block matrix n={A.n}, m={A.m}")
    return A


def is_nonnegative_family(S: Union[SFamily, Sequence], tol: float = DEFAULT_TOL) -> bool:
    """Every L_k real and entrywise >= -tol, equivalently assemble(S) is nonnegative."""
    return is_nonnegative_entries(l_matrices(S).matrices, tol)


def _matrix_spectrum(M: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(M))))
    if is_circulant_matrix(M, 1e-12 * scale):
        return dft_eigenvalues(M[0])
    if M.shape[0] > MAX_ORDER:
        raise UnsupportedSizeError(
            f"Non-circulant coefficient matrix of order {M.shape[0]} exceeds the root-finder limit {MAX_ORDER}"
        )
    return poly_roots(char_poly(M))


def family_spectrum(S: Union[SFamily, Sequence]) -> SpectrumList:
    """Union of the spectra of the S_k, in order of k."""
    S = S if isinstance(S, _MatrixFamily) else SFamily(S)
    F = to_float_array(S.matrices)
    parts = [_matrix_spectrum(F[k]) for k in range(S.m)]
    return SpectrumList(np.concatenate(parts))


def spectrum(A: CirculantBlockMatrix) -> SpectrumList:
    """sigma(A) as the union of sigma(S_k)."""
    return family_spectrum(s_matrices(A))


@dataclass
class EigenPair:
    """Eigenpair (value, u) of S_k; the eigenvector of A is u kron e_k."""
    value: complex
    vector: np.ndarray
    harmonic: int


def eigenpair_residuals(A: CirculantBlockMatrix,
                        pairs: Iterable[Union[EigenPair, Tuple[complex, Any, int]]]) -> float:
    """max ||A v - beta v||_inf / max(1, ||v||_inf) over v = u kron e_k."""
    M = to_float_array(A.to_matrix())
    worst = 0.0
    for pair in pairs:
        if not isinstance(pair, EigenPair):
            pair = EigenPair(*pair)
        u = to_float_array(np.asarray(pair.vector))
        if u.shape != (A.n,):
            raise InvalidArgumentError(f"Eigenvector must have length {A.n}, got shape {u.shape}")
        v = np.kron(u, harmonic_vector(pair.harmonic, A.m))
        r = np.max(np.abs(M @ v - complex(pair.value) * v)) / max(1.0, float(np.max(np.abs(v))))
        worst = max(worst, float(r))
    return worst


def family_eigenpairs(A: CirculantBlockMatrix) -> List[EigenPair]:
    """Eigenpairs of every S_k, from numpy's dense eigensolver."""
    S = to_float_array(s_matrices(A).matrices)
    pairs = []
    for k in range(A.m):
        values, vectors = np.linalg.eig(S[k])
        for i, beta in enumerate(values):
            pairs.append(EigenPair(value=complex(beta), vector=vectors[:, i], harmonic=k))
    return pairs


def full_matrix_spectrum(M: Any, max_order: int = MAX_ORDER, max_iter: int = ROOT_MAX_ITER) -> SpectrumList:
    """Eigenvalues of a dense matrix from its characteristic polynomial."""
    return SpectrumList(poly_roots(char_poly(M, max_order=max_order), max_iter=max_iter))


def block_matrix_from_dense(M: Any, m: int, tol: float = DEFAULT_TOL) -> CirculantBlockMatrix:
    """Read a dense mn x mn matrix whose m x m blocks are circulant."""
    D = as_array(M, ndim=2, name="matrix")
    size = D.shape[0]
    if D.shape[1] != size or m < 1 or size % m != 0:
        raise InvalidArgumentError(f"Matrix of shape {D.shape} cannot be split into blocks of order {m}")
    n = size // m
    blocks = np.empty((n, n, m), dtype=D.dtype)
    for i in range(n):
        for j in range(n):
            block = D[i * m:(i + 1) * m, j * m:(j + 1) * m]
            if not is_circulant_matrix(block, tol):
                raise InvalidArgumentError(f"Block ({i}, {j}) is not circulant")
            blocks[i, j] = block[0]
    return CirculantBlockMatrix(blocks)
