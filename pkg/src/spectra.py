"""
Spectrum lists and the necessary conditions a realizable list must meet:
conjugate closure, a Perron entry, nonnegative power sums and the
moment inequalities s_k^m <= n^{m-1} s_{km}.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .common import DEFAULT_TOL, InvalidArgumentError, RESIDUE_TOL
from .dft_core import as_array
from .documents import decode_array, encode_array
from .exact import to_float_array

logger = logging.getLogger("spectra")


@dataclass(eq=False)
class SpectrumList:
    """Ordered list of eigenvalues; position k belongs to harmonic e_k."""
    entries: np.ndarray

    def __post_init__(self):
        self.entries = as_array(self.entries, name="spectrum", allow_empty=True)

    @property
    def n(self) -> int:
        return int(self.entries.size)

    def __len__(self) -> int:
        return self.n

    def as_complex(self) -> np.ndarray:
        return to_float_array(self.entries)

    def spectral_radius(self) -> float:
        z = self.as_complex()
        return float(np.max(np.abs(z))) if z.size else 0.0

    def is_conjugation_closed(self, tol: float = DEFAULT_TOL) -> bool:
        return is_closed_under_conjugation(self, tol)

    def to_dict(self) -> Dict[str, Any]:
        return {'entries': encode_array(self.entries)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], exact: bool = False) -> 'SpectrumList':
        return cls(entries=decode_array(data['entries'], ndim=1, exact=exact, allow_empty=True))


def _complex_entries(values: Any) -> np.ndarray:
    return to_float_array(as_array(values, name="spectrum", allow_empty=True))


def conjugate_pairing(values: Any, tol: float = DEFAULT_TOL) -> Optional[List[Tuple[int, int]]]:
    """
    Pair every entry with its conjugate partner, or return None.

    Real entries pair with themselves. Each entry with positive imaginary
    part is matched to the nearest unused entry with negative imaginary
    part whose conjugate lies within `tol`.
    """
    z = _complex_entries(values)
    pairs: List[Tuple[int, int]] = []
    upper, lower = [], []
    for i, v in enumerate(z):
        if abs(v.imag) <= tol:
            pairs.append((i, i))
        elif v.imag > 0:
            upper.append(i)
        else:
            lower.append(i)
    if len(upper) != len(lower):
        return None

    upper.sort(key=lambda i: (z[i].real, abs(z[i].imag), i))
    unused = set(lower)
    for i in upper:
        best, best_dist = None, None
        for j in sorted(unused):
            d = abs(z[i] - np.conj(z[j]))
            if d <= tol and (best_dist is None or d < best_dist):
                best, best_dist = j, d
        if best is None:
            return None
        unused.remove(best)
        pairs.append((i, best))
    return pairs


def is_closed_under_conjugation(values: Any, tol: float = DEFAULT_TOL) -> bool:
    """True when the multiset equals its entrywise conjugate."""
    return conjugate_pairing(values, tol) is not None


def moments(values: Any, kmax: int) -> np.ndarray:
    """Power sums s_1 .. s_kmax (complex; real when the list is closed)."""
    if isinstance(kmax, bool) or not isinstance(kmax, (int, np.integer)) or kmax < 1:
        raise InvalidArgumentError(f"kmax must be a positive integer, got {kmax!r}")
    z = _complex_entries(values)
    if z.size == 0:
        raise InvalidArgumentError("Cannot take moments of an empty list")
    return np.array([np.sum(z ** k) for k in range(1, kmax + 1)])


@dataclass
class NecessaryConditionsReport:
    perron_in_list: bool
    conjugation_closed: bool
    moments_nonnegative: bool
    jll: bool
    spectral_radius: float
    failing_moment: Optional[int] = None
    failing_jll: Optional[Tuple[int, int]] = None

    @property
    def passed(self) -> bool:
        return self.perron_in_list and self.conjugation_closed and self.moments_nonnegative and self.jll

    def to_dict(self) -> Dict[str, Any]:
        return {
            'perron_in_list': self.perron_in_list,
            'conjugation_closed': self.conjugation_closed,
            'moments_nonnegative': self.moments_nonnegative,
            'jll': self.jll,
            'passed': self.passed,
            'spectral_radius': self.spectral_radius,
            'failing_moment': self.failing_moment,
            'failing_jll': list(self.failing_jll) if self.failing_jll else None,
        }


def check_necessary_conditions(values: Any, kmax: int = 6, mmax: int = 3,
                               tol: float = RESIDUE_TOL) -> NecessaryConditionsReport:
    """
    Evaluate the classical necessary conditions for realizability by a
    nonnegative matrix. Moments and JLL sums get the absolute `tol` plus
    the rounding error of summing powers of the entries.
    """
    z = _complex_entries(values)
    if z.size == 0:
        raise InvalidArgumentError("Cannot check an empty list")
    if isinstance(mmax, bool) or not isinstance(mmax, (int, np.integer)) or mmax < 1:
        raise InvalidArgumentError(f"mmax must be a positive integer, got {mmax!r}")
    n = z.size
    rho = float(np.max(np.abs(z)))
    rscale = tol * max(1.0, rho)

    perron = bool(np.any((np.abs(z.imag) <= rscale) & (np.abs(z.real - rho) <= rscale)))
    closed = is_closed_under_conjugation(z, rscale)

    s = moments(z, kmax * mmax)
    abs_sums = np.array([np.sum(np.abs(z) ** k) for k in range(1, kmax * mmax + 1)])

    rounding = 64 * n * np.finfo(float).eps

    def slack(k: int) -> float:
        return tol + rounding * abs_sums[k - 1]

    failing_moment = None
    for k in range(1, kmax + 1):
        if s[k - 1].real < -slack(k) or abs(s[k - 1].imag) > slack(k):
            failing_moment = k
            break

    failing_jll = None
    for k in range(1, kmax + 1):
        for m in range(2, mmax + 1):
            sk, skm = s[k - 1], s[k * m - 1]
            if abs(sk.imag) > slack(k) or abs(skm.imag) > slack(k * m):
                failing_jll = (k, m)
                break
            lhs = sk.real ** m
            rhs = n ** (m - 1) * skm.real
            jll_slack = tol + rounding * (m * abs_sums[k - 1] ** m + n ** (m - 1) * abs_sums[k * m - 1])
            if lhs > rhs + jll_slack:
                failing_jll = (k, m)
                break
        if failing_jll:
            break

    report = NecessaryConditionsReport(
        perron_in_list=perron,
        conjugation_closed=closed,
        moments_nonnegative=failing_moment is None,
        jll=failing_jll is None,
        spectral_radius=rho,
        failing_moment=failing_moment,
        failing_jll=failing_jll,
    )
    logger.debug(f"Necessary conditions for n={n}: {report.to_dict()}")
    return report


def is_circulant_real_list(values: Any, tol: float = DEFAULT_TOL) -> bool:
    """
    True when the list, read in DFT order, can be the spectrum of a real
    circulant: lambda_0 real and dominant, lambda_{n-k} = conj(lambda_k).
    """
    z = _complex_entries(values)
    if z.size == 0:
        return False
    n = z.size
    scale = tol * max(1.0, float(np.max(np.abs(z))))
    if abs(z[0].imag) > scale or z[0].real < float(np.max(np.abs(z))) - scale:
        return False
    return all(abs(z[(n - k) % n] - np.conj(z[k])) <= scale for k in range(1, n))


def match_spectra(computed: Any, expected: Any) -> float:
    """
    Greedy global minimum-distance matching between two multisets.
    Returns the largest matched distance.
    """
    a = _complex_entries(computed)
    b = _complex_entries(expected)
    if a.size != b.size:
        raise InvalidArgumentError(f"Spectra have different sizes: {a.size} vs {b.size}")
    if a.size == 0:
        return 0.0
    dist = np.abs(a[:, None] - b[None, :])
    worst = 0.0
    for _ in range(a.size):
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        worst = max(worst, float(dist[i, j]))
        dist[i, :] = np.inf
        dist[:, j] = np.inf
    return worst
