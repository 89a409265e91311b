"""
Guo's index for circulant realizations.

Given the tail lambda_1..lambda_{n-1} of a circulant real list, find the
least lambda_0 for which some reordering alpha in P makes
circulant_from_spectrum((lambda_0, lambda_alpha(1), ...)) nonnegative. P is
the set of permutations with alpha(0) = 0 and alpha(n-k) = n - alpha(k).
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from .circulant import Circulant, circulant_from_spectrum
from .common import InvalidArgumentError, InvalidAssignmentError, RESIDUE_TOL, UnsupportedSizeError
from .dft_core import as_array, inverse_kernel
from .documents import encode_array
from .exact import to_float_array
from .spectra import conjugate_pairing

logger = logging.getLogger("guo_circulant")

MIN_ORDER = 2
MAX_ORDER = 11


@dataclass(frozen=True)
class GuoAssignment:
    """alpha as a tuple of length n: alpha[0] = 0, alpha[n-k] = n - alpha[k]."""
    alpha: Tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(x) for x in self.alpha)
        object.__setattr__(self, 'alpha', a)
        n = len(a)
        if n < 1 or sorted(a) != list(range(n)):
            raise InvalidAssignmentError(f"Not a permutation of 0..{n - 1}: {a}")
        if a[0] != 0:
            raise InvalidAssignmentError("alpha(0) must be 0")
        for k in range(1, n):
            if a[n - k] != n - a[k]:
                raise InvalidAssignmentError(f"alpha({n - k}) must equal {n} - alpha({k})")

    @property
    def n(self) -> int:
        return len(self.alpha)

    def is_identity(self) -> bool:
        return self.alpha == tuple(range(self.n))


def _check_order(n: Any):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise InvalidArgumentError(f"n must be an integer, got {n!r}")
    if not MIN_ORDER <= n <= MAX_ORDER:
        raise UnsupportedSizeError(f"Guo index supports {MIN_ORDER} <= n <= {MAX_ORDER}, got {n}")


def enumerate_assignments(n: int) -> Iterator[GuoAssignment]:
    """Every alpha in P once, in lexicographic order. |P| = 2^h h!, h = floor((n-1)/2)."""
    _check_order(n)
    h = (n - 1) // 2
    choices = [v for v in range(1, n) if 2 * v != n]

    def extend(prefix: List[int], used: set) -> Iterator[GuoAssignment]:
        if len(prefix) == h:
            alpha = [0] * n
            for k, v in enumerate(prefix, start=1):
                alpha[k] = v
                alpha[n - k] = n - v
            if n % 2 == 0:
                alpha[n // 2] = n // 2
            yield GuoAssignment(tuple(alpha))
            return
        for v in choices:
            pair = min(v, n - v)
            if pair in used:
                continue
            used.add(pair)
            prefix.append(v)
            yield from extend(prefix, used)
            prefix.pop()
            used.remove(pair)

    yield from extend([], set())


def _tail(tail: Any) -> np.ndarray:
    t = to_float_array(as_array(tail, name="tail"))
    _check_order(t.size + 1)
    return t


def _permuted(t: np.ndarray, assignment: GuoAssignment) -> np.ndarray:
    n = t.size + 1
    if assignment.n != n:
        raise InvalidAssignmentError(f"Assignment has length {assignment.n}, tail needs {n}")
    lam = np.concatenate([[0.0], t])
    mu = lam[list(assignment.alpha)]
    mu[0] = 0.0
    return mu


def lambda0_for_assignment(tail: Any, assignment: GuoAssignment, tol: float = RESIDUE_TOL) -> float:
    """
    max_j -sum_l lambda_alpha(l) tau^{-jl}: the least lambda_0 making the
    circulant built from the reordered list nonnegative.
    """
    t = _tail(tail)
    mu = _permuted(t, assignment)
    n = mu.size
    scale = tol * max(1.0, float(np.sum(np.abs(t))))
    for k in range(1, n):
        if abs(mu[n - k] - np.conj(mu[k])) > scale:
            raise InvalidAssignmentError(
                f"Reordered tail is not conjugation-symmetric at positions {k} and {n - k}"
            )
    sums = inverse_kernel(n) @ mu
    if np.max(np.abs(sums.imag)) > scale:
        raise InvalidAssignmentError("Reordered tail leaves an imaginary residue")
    return float(np.max(-sums.real)) + 0.0


def trigonometric_lambda0(tail: Any, assignment: GuoAssignment) -> float:
    """
    The same threshold through the cosine/sine expansion:
    max_k -2 sum_{j<=h} [Re mu_j cos(2pi kj/n) + Im mu_j sin(2pi kj/n)],
    less (-1)^k mu_{n/2} when n is even.
    """
    t = _tail(tail)
    mu = _permuted(t, assignment)
    n = mu.size
    h = (n - 1) // 2
    best = -math.inf
    for k in range(n):
        total = 0.0
        for j in range(1, h + 1):
            angle = 2 * math.pi * k * j / n
            total -= 2 * (mu[j].real * math.cos(angle) + mu[j].imag * math.sin(angle))
        if n % 2 == 0:
            total -= (-1) ** k * mu[n // 2].real
        best = max(best, total)
    return best


def canonical_tail(tail: Any, tol: float = RESIDUE_TOL) -> np.ndarray:
    """
    Re-index a conjugation-closed tail so that lambda_{n-k} = conj(lambda_k).
    A tail that already has this symmetry is returned unchanged.
    """
    t = _tail(tail)
    n = t.size + 1
    scale = tol * max(1.0, float(np.max(np.abs(t))))
    if all(abs(t[n - 1 - k] - np.conj(t[k - 1])) <= scale for k in range(1, n)):
        return t.copy()

    pairing = conjugate_pairing(t, scale)
    if pairing is None:
        raise InvalidArgumentError("Tail is not closed under conjugation")
    units = [t[i] if t[i].imag > 0 else t[j] for i, j in pairing if i != j]
    reals = sorted(float(t[i].real) for i, j in pairing if i == j)

    leftovers = []
    i = 0
    while i < len(reals):
        if i + 1 < len(reals) and abs(reals[i + 1] - reals[i]) <= scale:
            units.append(complex(reals[i]))
            i += 2
        else:
            leftovers.append(reals[i])
            i += 1
    if len(leftovers) != (1 if n % 2 == 0 else 0):
        raise InvalidArgumentError(
            "Tail cannot be arranged with lambda_{n-k} = conj(lambda_k): unpaired real entries"
        )

    units.sort(key=lambda z: (z.real, z.imag))
    out = np.zeros(n - 1, dtype=complex)
    for k, z in enumerate(units, start=1):
        out[k - 1] = z
        out[n - k - 1] = np.conj(z)
    if leftovers:
        out[n // 2 - 1] = leftovers[0]
    return out


@dataclass(eq=False)
class GuoResult:
    lambda0: float
    assignment: GuoAssignment
    witness: Circulant
    tail: np.ndarray
    spectral_radius: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            'lambda0': self.lambda0,
            'assignment': list(self.assignment.alpha),
            'witness': self.witness.to_dict(),
            'tail': encode_array(self.tail),
            'spectral_radius': self.spectral_radius,
        }


def guo_index(tail: Any, n: Optional[int] = None, tol: float = RESIDUE_TOL) -> GuoResult:
    """
    Minimize lambda_0 over P; ties go to the lexicographically smallest
    alpha. The witness circulant is built at lambda_0 exactly.
    """
    t = _tail(tail)
    if n is not None and n != t.size + 1:
        raise InvalidArgumentError(f"Tail of length {t.size} does not match n={n}")
    n = t.size + 1
    canon = canonical_tail(t, tol)

    best: Optional[GuoAssignment] = None
    best_value = math.inf
    for alpha in enumerate_assignments(n):
        value = lambda0_for_assignment(canon, alpha, tol)
        if best is None or value < best_value - 1e-12 * max(1.0, abs(best_value)):
            best, best_value = alpha, value

    mu = _permuted(canon, best)
    mu[0] = best_value
    row = to_float_array(circulant_from_spectrum(mu).first_row)
    witness = Circulant(row.real.astype(complex))
    rho = float(np.max(np.abs(t)))
    logger.info(f"Guo index for n={n}: lambda0={best_value:.6g} at alpha={best.alpha}")
    return GuoResult(
        lambda0=best_value,
        assignment=best,
        witness=witness,
        tail=mu[1:].copy(),
        spectral_radius=rho,
    )
