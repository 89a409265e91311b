"""
Block structure induced by an S-family: diagonal, block circulant,
block permutative and real symmetric, detected either from the S_k or
directly from the block grid.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .block_ops import CirculantBlockMatrix, SFamily, _MatrixFamily
from .circulant import is_circulant_matrix
from .common import InvalidArgumentError, RESIDUE_TOL, UnsupportedSizeError
from .exact import to_float_array

logger = logging.getLogger("structure")

MAX_PERMUTATIVE_ORDER = 8


@dataclass(frozen=True)
class PermutationTuple:
    """
    Row permutations nu_0 = id, nu_1, ..., nu_{n-1} (0-based): row i of
    every matrix in the family is M[i][j] = M[0][nu_i[j]].
    """
    perms: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.perms)
        for p in self.perms:
            if sorted(p) != list(range(n)):
                raise InvalidArgumentError(f"Not a permutation of 0..{n - 1}: {p}")
        if n and self.perms[0] != tuple(range(n)):
            raise InvalidArgumentError("The first permutation must be the identity")

    def apply(self, first_row: Any) -> np.ndarray:
        """Rebuild a full matrix from its first row."""
        row = np.asarray(first_row)
        return np.stack([row[list(p)] for p in self.perms])

    def to_dict(self) -> Dict[str, Any]:
        return {'perms': [list(p) for p in self.perms]}


@dataclass
class StructureReport:
    diagonal: bool
    circulant: bool
    permutatively_equivalent: Optional[PermutationTuple]
    symmetric_real: bool

    @property
    def block_permutative(self) -> bool:
        return self.permutatively_equivalent is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'diagonal': self.diagonal,
            'circulant': self.circulant,
            'block_permutative': self.block_permutative,
            'permutatively_equivalent': (
                self.permutatively_equivalent.to_dict()['perms']
                if self.permutatively_equivalent else None
            ),
            'symmetric_real': self.symmetric_real,
        }


def _smallest_matching(compat: np.ndarray) -> Optional[Tuple[int, ...]]:
    """Lexicographically smallest perfect matching position -> column."""
    n = compat.shape[0]
    chosen: List[int] = []
    used = [False] * n

    def search(j: int) -> bool:
        if j == n:
            return True
        for c in range(n):
            if not used[c] and compat[j, c]:
                used[c] = True
                chosen.append(c)
                if search(j + 1):
                    return True
                chosen.pop()
                used[c] = False
        return False

    return tuple(chosen) if search(0) else None


def permutative_equivalence(matrices: Sequence[Any], tol: float = RESIDUE_TOL,
                            max_order: int = MAX_PERMUTATIVE_ORDER) -> Optional[PermutationTuple]:
    """
    The common tuple nu with every matrix's row i equal to row 0 permuted
    by nu_i, or None. Ties among equal entries resolve to the
    lexicographically smallest tuple.
    """
    if isinstance(matrices, _MatrixFamily):
        matrices = list(matrices.matrices)
    mats = [to_float_array(np.asarray(M)) for M in matrices]
    if not mats:
        raise InvalidArgumentError("Need at least one matrix")
    shapes = {M.shape for M in mats}
    if len(shapes) != 1:
        raise InvalidArgumentError(f"Matrices differ in shape: {sorted(shapes)}")
    shape = shapes.pop()
    if len(shape) != 2 or shape[0] != shape[1]:
        raise InvalidArgumentError(f"Matrices must be square, got shape {shape}")
    n = shape[0]
    if n > max_order:
        raise UnsupportedSizeError(f"Permutative search limited to order {max_order}, got {n}")

    stack = np.stack(mats)
    perms = [tuple(range(n))]
    for i in range(1, n):
        compat = np.all(np.abs(stack[:, i, :, None] - stack[:, 0, None, :]) <= tol, axis=0)
        nu = _smallest_matching(compat)
        if nu is None:
            return None
        perms.append(nu)
    return PermutationTuple(tuple(perms))


def cyclic_shift_tuple(n: int) -> PermutationTuple:
    """nu_i[j] = (j - i) mod n, the tuple every circulant matrix follows."""
    return PermutationTuple(tuple(tuple((j - i) % n for j in range(n)) for i in range(n)))


def _permutative(mats: List[np.ndarray], n: int, circulant: bool, tol: float) -> Optional[PermutationTuple]:
    if n <= MAX_PERMUTATIVE_ORDER:
        return permutative_equivalence(mats, tol)
    # Beyond the search limit only the cyclic tuple is known
    return cyclic_shift_tuple(n) if circulant else None


def _is_diagonal(M: np.ndarray, tol: float) -> bool:
    return bool(np.max(np.abs(M - np.diag(np.diag(M))), initial=0.0) <= tol)


def classify_family(S: Union[SFamily, Sequence], tol: float = RESIDUE_TOL) -> StructureReport:
    """Structure of the block matrix predicted from its S-family."""
    S = S if isinstance(S, _MatrixFamily) else SFamily(S)
    F = to_float_array(S.matrices)
    m = S.m
    diagonal = all(_is_diagonal(F[k], tol) for k in range(m))
    circulant = all(is_circulant_matrix(F[k], tol) for k in range(m))
    perm = _permutative(list(F), S.n, circulant, tol)
    symmetric_real = all(
        np.max(np.abs(F[k] - F[k].conj().T)) <= tol
        and np.max(np.abs(F[(m - k) % m] - F[k].conj())) <= tol
        for k in range(m)
    )
    report = StructureReport(diagonal, circulant, perm, bool(symmetric_real))
    logger.debug(f"classify_family: {report.to_dict()}")
    return report


def detect_block_structure(A: CirculantBlockMatrix, tol: float = RESIDUE_TOL) -> StructureReport:
    """Structure read directly from the block grid and the full matrix."""
    B = to_float_array(A.blocks)
    n, m = A.n, A.m
    off = ~np.eye(n, dtype=bool)
    diagonal = bool(np.max(np.abs(B[off]), initial=0.0) <= tol)
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    circulant = bool(np.max(np.abs(B - B[0][idx])) <= tol)
    perm = _permutative([B[:, :, l] for l in range(m)], n, circulant, tol)
    M = to_float_array(A.to_matrix())
    symmetric_real = bool(np.max(np.abs(M.imag)) <= tol and np.max(np.abs(M - M.T)) <= tol)
    report = StructureReport(diagonal, circulant, perm, symmetric_real)
    logger.debug(f"detect_block_structure: {report.to_dict()}")
    return report
