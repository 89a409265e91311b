"""
Tests for circulant construction, nonnegativity and the conjugate-pair bound.
"""
import math

import numpy as np
import pytest
import sympy

from src.circulant import (
    Circulant, circulant_first_row, circulant_from_row, circulant_from_spectrum,
    companion_oracle, conjugate_pair_circulant, conjugate_pair_guo_bound,
    conjugate_pair_list, eigenvalues, is_circulant_matrix, is_nonnegative,
    laffey_smigoc_sign_check,
)
from src.common import InvalidArgumentError, UnsupportedParityError
from src.polynomial import poly_from_roots
from src.spectra import match_spectra


def _bisect_threshold(n, a, b, lo=0.0, hi=100.0):
    for _ in range(200):
        mid = (lo + hi) / 2
        if is_nonnegative(conjugate_pair_circulant(n, mid, a, b)):
            hi = mid
        else:
            lo = mid
    return hi


def test_circulant_from_row_materializes():
    """Test that each row is the previous row shifted right."""
    c = circulant_from_row([1, 2, 3])
    assert np.allclose(c.to_matrix(), [[1, 2, 3], [3, 1, 2], [2, 3, 1]])
    assert circulant_from_row([1]).to_matrix().shape == (1, 1)


def test_circulant_from_row_rejects_empty():
    """Test that an empty row is rejected."""
    with pytest.raises(InvalidArgumentError):
        circulant_from_row([])


def test_worked_example_blocks():
    """Test the blocks circ(1/2, 0, 0) and circ(11/6, 5/6, 5/6) in exact arithmetic."""
    block = circulant_from_row(["11/6", "5/6", "5/6"], exact=True)
    assert block.is_exact
    assert block.to_matrix()[1, 0] == sympy.Rational(5, 6)
    assert block.to_matrix()[2, 2] == sympy.Rational(11, 6)
    assert np.allclose(circulant_from_row([0.5, 0, 0]).to_matrix(), 0.5 * np.eye(3))


def test_eigenvalues_examples():
    """Test circulant eigenvalues in DFT order."""
    assert np.allclose(eigenvalues(circulant_from_row([0.5, 3.5])).entries, [4, -3])
    assert np.allclose(eigenvalues(circulant_from_row([2, 0, 0])).entries, [2, 2, 2])
    assert np.allclose(eigenvalues(circulant_from_row([0, 1, 0, 0])).entries, [1, 1j, -1, -1j])


def test_circulant_from_spectrum_examples():
    """Test the inverse map, including the boundary case with min entry 0."""
    assert np.allclose(circulant_from_spectrum([4, -3]).first_row, [0.5, 3.5])
    assert np.allclose(circulant_from_spectrum([0, 0, 0]).first_row, [0, 0, 0])
    c = circulant_from_spectrum([math.sqrt(3), 1j, -1j])
    assert c.min_entry() == pytest.approx(0, abs=1e-12)
    assert is_nonnegative(c)


def test_spectrum_roundtrip_random():
    """Test that spectrum and first row determine each other."""
    rng = np.random.default_rng(3)
    for _ in range(50):
        m = int(rng.integers(1, 12))
        row = rng.uniform(-3, 3, m) + 1j * rng.uniform(-3, 3, m)
        back = circulant_from_spectrum(eigenvalues(circulant_from_row(row)).entries)
        assert np.max(np.abs(back.first_row - row)) <= 1e-10


def test_trace_identity():
    """Test that the eigenvalues sum to m times the diagonal entry."""
    rng = np.random.default_rng(4)
    for _ in range(20):
        m = int(rng.integers(1, 12))
        row = rng.uniform(-3, 3, m)
        lam = eigenvalues(circulant_from_row(row)).entries
        assert abs(np.sum(lam) - m * row[0]) <= 1e-10


def test_real_row_iff_symmetric_spectrum():
    """Test that a conjugation-symmetric spectrum gives a real row and a broken one does not."""
    c = circulant_from_spectrum([5, 1 + 2j, -1, 1 - 2j])
    assert np.max(np.abs(c.first_row.imag)) <= 1e-10
    broken = circulant_from_spectrum([5, 1 + 2j, -1, 1 + 2j])
    assert np.max(np.abs(broken.first_row.imag)) > 1e-3


def test_is_nonnegative_examples():
    """Test the nonnegativity verdict, including the second worked partition."""
    assert is_nonnegative(circulant_from_row([0.5, 3.5]))
    assert not is_nonnegative(circulant_from_row([-0.1, 1]))
    assert not is_nonnegative(circulant_from_row([1, 1j]))
    S0 = circulant_from_spectrum([4, 0.5 + 1j, 0.5 - 1j])
    S1 = circulant_from_spectrum([-3, 0.5 + 1j, 0.5 - 1j])
    total = Circulant(S0.first_row + S1.first_row)
    assert np.allclose(total.first_row, [1, 2 / math.sqrt(3), -2 / math.sqrt(3)])
    assert not is_nonnegative(total)


def test_is_circulant_matrix():
    """Test circulant pattern detection and first-row extraction."""
    M = circulant_from_row([1, 2, 3]).to_matrix()
    assert is_circulant_matrix(M)
    assert np.allclose(circulant_first_row(M).first_row, [1, 2, 3])
    M[1, 0] += 0.5
    assert not is_circulant_matrix(M)
    with pytest.raises(InvalidArgumentError):
        circulant_first_row(M)


def test_circulant_dict_roundtrip():
    """Test to_dict/from_dict including the exact backend."""
    c = circulant_from_row(["1/2", "7/2"], exact=True)
    data = c.to_dict()
    assert data['first_row'] == [["1/2", "0"], ["7/2", "0"]]
    back = Circulant.from_dict(data, exact=True)
    assert list(back.first_row) == [sympy.Rational(1, 2), sympy.Rational(7, 2)]


def test_guo_bound_examples():
    """Test the conjugate-pair bound on the worked values."""
    assert conjugate_pair_guo_bound(5, 1, 2) == pytest.approx(4)
    assert conjugate_pair_guo_bound(5, 1.5, 1.5) == pytest.approx(6)
    expected = 0.2 + 3 * (1 / math.sqrt(3) - 0.1)
    assert conjugate_pair_guo_bound(3, 0.1, 1) == pytest.approx(expected)
    assert expected == pytest.approx(1.6321, abs=1e-4)


def test_guo_bound_rejects_nonpositive():
    """Test that a or b <= 0 is rejected."""
    with pytest.raises(InvalidArgumentError):
        conjugate_pair_guo_bound(3, 0, 1)
    with pytest.raises(InvalidArgumentError):
        conjugate_pair_guo_bound(3, 1, -1)


def test_conjugate_pair_circulant_boundary():
    """Test that the diagonal entry is 0 at the bound for n=3, a=b=1."""
    c = conjugate_pair_circulant(3, 2, 1, 1)
    assert c.min_entry() == pytest.approx(0, abs=1e-15)
    assert is_nonnegative(c)
    above = conjugate_pair_circulant(3, 3, 1, 1)
    assert np.all(above.first_row.real > 0)


def test_conjugate_pair_circulant_spectrum_order_three():
    """Test that the alternating circulant has spectrum lam1, -a +- bi for n = 3."""
    c = conjugate_pair_circulant(3, 2.5, 1, 0.7)
    expected = conjugate_pair_list(3, 2.5, 1, 0.7)
    assert np.allclose(eigenvalues(c).entries, expected.entries, atol=1e-9)


def test_conjugate_pair_list_realization():
    """Test that the DFT-ordered list gives a real circulant with exactly that spectrum."""
    for n in (3, 5, 7):
        a, b = 0.4, 2.0
        bound = conjugate_pair_guo_bound(n, a, b)
        lam = conjugate_pair_list(n, bound + 1e-9, a, b)
        c = circulant_from_spectrum(lam.entries)
        assert np.max(np.abs(c.first_row.imag)) <= 1e-10
        assert match_spectra(eigenvalues(c), lam) <= 1e-9


def test_conjugate_pair_circulant_rejects_even():
    """Test that even n raises an unsupported-parity error."""
    with pytest.raises(UnsupportedParityError):
        conjugate_pair_circulant(4, 5, 1, 1)
    with pytest.raises(UnsupportedParityError):
        conjugate_pair_list(6, 5, 1, 1)


def test_conjugate_pair_threshold_by_bisection():
    """Test that the nonnegativity threshold in lam1 equals the closed-form bound."""
    rng = np.random.default_rng(17)
    for _ in range(50):
        n = int(rng.choice([3, 5, 7, 9]))
        a, b = rng.uniform(0.01, 3.0), rng.uniform(0.01, 3.0)
        threshold = _bisect_threshold(n, a, b)
        assert threshold == pytest.approx(conjugate_pair_guo_bound(n, a, b), abs=1e-7)


def test_conjugate_pair_monotone_in_lam1():
    """Test that entries are nondecreasing in lam1."""
    rows = [conjugate_pair_circulant(5, lam, 1, 2).first_row.real for lam in (3, 4, 5, 6)]
    for lower, upper in zip(rows, rows[1:]):
        assert np.all(upper >= lower)


def test_companion_oracle_examples():
    """Test the oracle verdicts for odd n on both sides of the boundary."""
    n, a, b = 5, 1.0, 2.0
    boundary = b / math.sqrt(n) - a
    assert boundary < 0
    assert companion_oracle(n, a, b, 0).nonnegative
    assert not companion_oracle(5, 0.1, 2, 0).nonnegative
    assert companion_oracle(5, 0.1, 2, 2).nonnegative


def test_companion_oracle_flip():
    """Test that the verdict flips at s = b/sqrt(n) - a."""
    n, a, b = 5, 0.5, 2.0
    s_star = b / math.sqrt(n) - a
    assert companion_oracle(n, a, b, s_star + 1e-6).nonnegative
    assert not companion_oracle(n, a, b, s_star - 1e-6).nonnegative


def test_companion_oracle_matrix_form():
    """Test the companion layout and that B + sI has the shifted spectrum."""
    w = companion_oracle(3, 1.0, 1.0, 0.5)
    B = w.matrix
    assert B[0, 1] == 1 and B[1, 2] == 1
    assert B[2, 2] == 0
    assert np.allclose(B[2, :2], -w.coefficients[3:1:-1])
    expected = [2 * 1.5 + 0.5, -1 + 1j, -1 - 1j]
    assert match_spectra(np.linalg.eigvals(w.realization()), expected) <= 1e-9
    assert w.to_dict()['nonnegative'] is True


def test_companion_oracle_x_n_minus_2_coefficient():
    """Test the x^{n-2} coefficient -(n-1)[n(a+s)^2 - b^2]/2."""
    n, a, b, s = 7, 0.3, 1.1, 0.2
    w = companion_oracle(n, a, b, s)
    c = a + s
    assert w.coefficients[1] == pytest.approx(0, abs=1e-12)
    assert w.coefficients[2] == pytest.approx(-(n - 1) * (n * c ** 2 - b ** 2) / 2)


def test_companion_oracle_rejects():
    """Test the parity and shift preconditions."""
    with pytest.raises(UnsupportedParityError):
        companion_oracle(4, 1, 2, 0)
    with pytest.raises(InvalidArgumentError):
        companion_oracle(5, 1, 2, -0.1)


def test_companion_oracle_random_equivalence():
    """Test verdict <=> a + s >= b/sqrt(n) on random samples away from the boundary."""
    rng = np.random.default_rng(23)
    checked = 0
    while checked < 200:
        n = int(rng.choice([3, 5, 7, 9]))
        a, b, s = rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0), rng.uniform(0.0, 3.0)
        gap = a + s - b / math.sqrt(n)
        if abs(gap) < 1e-5:
            continue
        assert companion_oracle(n, a, b, s).nonnegative == (gap > 0)
        checked += 1


def test_companion_and_circulant_paths_agree():
    """Test that the companion path at s = 0 agrees with the circulant threshold."""
    for n in (3, 5, 7):
        for a, b in ((1.0, 1.0), (0.2, 2.0), (1.5, 0.5)):
            circulant_ok = conjugate_pair_guo_bound(n, a, b) <= (n - 1) * a + 1e-12
            assert companion_oracle(n, a, b, 0).nonnegative == circulant_ok


def test_laffey_smigoc_sign_check():
    """Test the sign propagation check on the worked polynomials."""
    assert laffey_smigoc_sign_check([1, 0, 0, 0])
    assert laffey_smigoc_sign_check([1, -2, 1, 0])
    assert laffey_smigoc_sign_check(companion_oracle(5, 1, 2, 0).coefficients)
    assert not laffey_smigoc_sign_check([1, 0, -1, 2])


def test_laffey_smigoc_on_trace_zero_lists():
    """Test that alpha_2 <= 0 forces the later coefficients nonpositive."""
    rng = np.random.default_rng(31)
    for _ in range(50):
        tail = -rng.uniform(0, 2, 2) + 1j * rng.uniform(-2, 2, 2)
        roots = [tail[0], np.conj(tail[0]), tail[1], np.conj(tail[1])]
        roots.append(-np.sum(roots).real)
        coeffs = poly_from_roots(roots).real
        assert laffey_smigoc_sign_check(coeffs, tol=1e-9)
