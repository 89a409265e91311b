"""
Tests for block structure detection from S-families and block grids.
"""
import numpy as np
import pytest

from src.block_ops import CirculantBlockMatrix, SFamily, assemble
from src.circulant import circulant_from_row
from src.common import InvalidArgumentError, UnsupportedSizeError
from src.structure import (
    PermutationTuple, classify_family, cyclic_shift_tuple, detect_block_structure,
    permutative_equivalence,
)

S0 = [[0.5, 3.5], [3.5, 0.5]]
S1 = [[0.5, -1], [1, 0.5]]
TRIALS = 100


def random_complex(rng, shape):
    return rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape)


def both_reports(S):
    return classify_family(S), detect_block_structure(assemble(S))


def random_shape(rng):
    return int(rng.integers(2, 6)), int(rng.integers(2, 5))


def perturb(S, rng, off_diagonal=False):
    """Add 0.5 to one randomly chosen entry of one S_k."""
    m, n, _ = S.shape
    k, i, j = int(rng.integers(m)), int(rng.integers(n)), int(rng.integers(n))
    if off_diagonal and i == j:
        j = (i + 1) % n
    S = S.copy()
    S[k, i, j] += 0.5
    return SFamily(S)


def test_permutative_equivalence_circulant():
    """Test that a circulant with distinct entries yields the cyclic shifts."""
    M = circulant_from_row([1.0, 2.0, 3.0]).to_matrix()
    nu = permutative_equivalence([M])
    assert nu.perms == ((0, 1, 2), (2, 0, 1), (1, 2, 0))
    assert nu == cyclic_shift_tuple(3)
    assert np.allclose(nu.apply(M[0]), M)


def test_permutative_equivalence_ties_are_smallest():
    """Test that equal entries resolve to the lexicographically smallest tuple."""
    nu = permutative_equivalence([np.ones((2, 2))])
    assert nu.perms == ((0, 1), (0, 1))


def test_permutative_equivalence_none():
    """Test a matrix whose second row is not a permutation of the first."""
    assert permutative_equivalence([[[1, 2], [3, 4]]]) is None


def test_permutative_equivalence_needs_common_tuple():
    """Test two individually permutative matrices with different tuples."""
    swap = np.array([[1, 2], [2, 1]])
    same = np.array([[1, 2], [1, 2]])
    assert permutative_equivalence([swap]) is not None
    assert permutative_equivalence([same]) is not None
    assert permutative_equivalence([swap, same]) is None


def test_permutative_equivalence_rejects():
    """Test shape mismatches and the order limit."""
    with pytest.raises(InvalidArgumentError):
        permutative_equivalence([])
    with pytest.raises(InvalidArgumentError):
        permutative_equivalence([np.eye(2), np.eye(3)])
    with pytest.raises(UnsupportedSizeError):
        permutative_equivalence([np.eye(9)])


def test_permutation_tuple_validation():
    """Test that tuples must be permutations headed by the identity."""
    with pytest.raises(InvalidArgumentError):
        PermutationTuple(((1, 0), (0, 1)))
    with pytest.raises(InvalidArgumentError):
        PermutationTuple(((0, 1), (1, 1)))
    assert PermutationTuple(((0, 1), (1, 0))).to_dict() == {'perms': [[0, 1], [1, 0]]}


def test_classify_worked_example():
    """Test the worked family: nothing beyond a real block matrix."""
    report = classify_family([S0, S1, S1])
    assert not report.diagonal
    assert not report.circulant
    assert report.permutatively_equivalent is None
    assert not report.symmetric_real
    data = report.to_dict()
    assert set(data) == {'diagonal', 'circulant', 'block_permutative',
                         'permutatively_equivalent', 'symmetric_real'}
    assert data['block_permutative'] is False


def test_detect_worked_example():
    """Test that reading the grid agrees with the family prediction."""
    report = detect_block_structure(assemble([S0, S1, S1]))
    assert not report.circulant
    assert not report.diagonal
    assert report.permutatively_equivalent is None
    assert not report.symmetric_real


def test_random_family_has_no_structure():
    """Test that a generic family shows none of the structures."""
    rng = np.random.default_rng(45)
    S = SFamily(random_complex(rng, (3, 3, 3)))
    for report in both_reports(S):
        assert not report.diagonal
        assert not report.circulant
        assert not report.block_permutative
        assert not report.symmetric_real


def test_detect_block_structure_on_explicit_grid():
    """Test a grid built directly: equal diagonal blocks and zero elsewhere."""
    blocks = np.zeros((2, 2, 3))
    blocks[0, 0] = blocks[1, 1] = [1, 2, 3]
    report = detect_block_structure(CirculantBlockMatrix(blocks))
    assert report.diagonal
    assert report.circulant
    assert report.block_permutative


def test_diagonal_iff():
    """Test that diagonal S_k give a block diagonal grid, and one off-diagonal entry breaks it."""
    rng = np.random.default_rng(41)
    for _ in range(TRIALS):
        n, m = random_shape(rng)
        S = np.stack([np.diag(random_complex(rng, n)) for _ in range(m)])
        family, grid = both_reports(SFamily(S))
        assert family.diagonal and grid.diagonal
        family, grid = both_reports(perturb(S, rng, off_diagonal=True))
        assert not family.diagonal and not grid.diagonal


def test_circulant_iff():
    """Test that circulant S_k give a block circulant grid, and one entry breaks it."""
    rng = np.random.default_rng(42)
    for _ in range(TRIALS):
        n, m = random_shape(rng)
        S = np.stack([circulant_from_row(random_complex(rng, n)).to_matrix() for _ in range(m)])
        family, grid = both_reports(SFamily(S))
        assert family.circulant and grid.circulant
        assert family.block_permutative and grid.block_permutative
        family, grid = both_reports(perturb(S, rng))
        assert not family.circulant and not grid.circulant


def test_symmetric_real_iff():
    """Test Hermitian S_k with S_{m-k} = conj(S_k), then one off-diagonal entry."""
    rng = np.random.default_rng(43)

    def real_symmetric(n):
        R = rng.uniform(-1, 1, (n, n))
        return R + R.T

    for _ in range(TRIALS):
        n, m = random_shape(rng)
        S = np.empty((m, n, n), dtype=complex)
        S[0] = real_symmetric(n)
        for k in range(1, (m - 1) // 2 + 1):
            H = random_complex(rng, (n, n))
            S[k] = H + H.conj().T
            S[m - k] = S[k].conj()
        if m % 2 == 0:
            S[m // 2] = real_symmetric(n)
        family, grid = both_reports(SFamily(S))
        assert family.symmetric_real and grid.symmetric_real
        family, grid = both_reports(perturb(S, rng, off_diagonal=True))
        assert not family.symmetric_real and not grid.symmetric_real


def test_permutative_iff():
    """Test S_k[i][j] = r_k[nu_i[j]] for a random common tuple, then one entry."""
    rng = np.random.default_rng(44)
    for _ in range(TRIALS):
        n, m = random_shape(rng)
        nu = (tuple(range(n)),) + tuple(tuple(int(v) for v in rng.permutation(n)) for _ in range(n - 1))
        S = np.empty((m, n, n), dtype=complex)
        for k in range(m):
            r = random_complex(rng, n)
            S[k] = [r[list(p)] for p in nu]
        family, grid = both_reports(SFamily(S))
        assert family.permutatively_equivalent.perms == nu
        assert grid.permutatively_equivalent.perms == nu
        family, grid = both_reports(perturb(S, rng))
        assert family.permutatively_equivalent is None
        assert grid.permutatively_equivalent is None


def test_circulant_family_beyond_search_limit():
    """Test that order 9 circulant S_k still report the cyclic tuple."""
    rng = np.random.default_rng(46)
    S = SFamily(np.stack([circulant_from_row(random_complex(rng, 9)).to_matrix() for _ in range(2)]))
    for report in both_reports(S):
        assert report.circulant
        assert report.permutatively_equivalent == cyclic_shift_tuple(9)
    M = S.matrices[0]
    assert np.allclose(cyclic_shift_tuple(9).apply(M[0]), M)


def test_generic_family_beyond_search_limit():
    """Test that a non-circulant order 9 family reports no tuple."""
    rng = np.random.default_rng(47)
    report = classify_family(SFamily(random_complex(rng, (2, 9, 9))))
    assert not report.circulant
    assert report.permutatively_equivalent is None
