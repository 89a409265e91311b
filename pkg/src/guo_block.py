"""
Block circulant realizations of an eigenvalue layout E.

E is an n x m matrix: column l lists, in DFT order, the eigenvalues of the
circulant S_l, and entry (0, 0) is the Perron value. The block matrix is
assembled from the S_l; it is nonnegative exactly when

    eps_00 + Theta(j, k) >= 0   for all j, k,

where Theta(j, k) = sum_{p,l} eps_pl tau^{-jp} omega^{-kl} - eps_00. Phi is
the least eps_00 meeting this. min_perron searches rearrangements of the
entries of E (E-NNSS bijections) for the smallest Phi.

Entries are addressed 0-based here; (0, 0) is the Perron entry.
"""
import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np
import sympy

from .block_ops import CirculantBlockMatrix, SFamily, assemble
from .circulant import circulant_indices, is_nonnegative_entries
from .common import (
    InvalidArgumentError, InvalidAssignmentError, NotRealizableError, RESIDUE_TOL,
    SearchIncompleteError, StructuralAsymmetryError, get_logger_name,
)
from .dft_core import as_array, idft_coefficients, inverse_kernel
from .documents import decode_array, encode_array
from .exact import is_exact_array, simplify_array, to_float_array
from .guo_circulant import MAX_ORDER as GUO_MAX_ORDER, enumerate_assignments, lambda0_for_assignment
from .spectra import conjugate_pairing, is_closed_under_conjugation

logger = logging.getLogger("guo_block")

DEFAULT_MAX_CANDIDATES = 200000
EXHAUSTIVE_LIMIT = 12
GENERATOR_DEPTH = 3


@dataclass(eq=False)
class EMatrix:
    """n x m eigenvalue layout; entries[0, 0] is the Perron value."""
    entries: np.ndarray

    def __post_init__(self):
        self.entries = as_array(self.entries, ndim=2, name="E matrix")

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    @property
    def m(self) -> int:
        return int(self.entries.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n, self.m

    @property
    def perron(self) -> complex:
        return complex(to_float_array(self.entries)[0, 0])

    def as_complex(self) -> np.ndarray:
        return to_float_array(self.entries)

    def with_perron(self, value: float) -> 'EMatrix':
        z = self.as_complex().copy()
        z[0, 0] = value
        return EMatrix(z)

    def to_dict(self) -> Dict[str, Any]:
        return {'entries': encode_array(self.entries)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any], exact: bool = False) -> 'EMatrix':
        return cls(decode_array(data['entries'], ndim=2, exact=exact))


def _scale(z: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(z))))


def _columns_conjugate(z: np.ndarray, tol: float) -> bool:
    m = z.shape[1]
    return all(np.max(np.abs(z[:, l] - np.conj(z[:, m - l]))) <= tol for l in range(1, m // 2 + 1))


def _first_column_symmetric(z: np.ndarray, tol: float) -> bool:
    n = z.shape[0]
    return abs(z[0, 0].imag) <= tol and all(
        abs(z[n - p, 0] - np.conj(z[p, 0])) <= tol for p in range(1, n)
    )


@dataclass
class EMatrixReport:
    conjugation_closed: bool
    perron_positive: bool
    perron_dominant: bool
    first_column_realizable: bool
    columns_conjugate: bool
    middle_column_real: Optional[bool] = None
    first_row_min: float = 0.0

    @property
    def valid(self) -> bool:
        return not self.failures()

    def failures(self) -> List[str]:
        checks = {
            'conjugation_closed': self.conjugation_closed,
            'perron_positive': self.perron_positive,
            'perron_dominant': self.perron_dominant,
            'first_column_realizable': self.first_column_realizable,
            'columns_conjugate': self.columns_conjugate,
            'middle_column_real': self.middle_column_real is not False,
        }
        return [name for name, ok in checks.items() if not ok]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'conjugation_closed': self.conjugation_closed,
            'perron_positive': self.perron_positive,
            'perron_dominant': self.perron_dominant,
            'first_column_realizable': self.first_column_realizable,
            'columns_conjugate': self.columns_conjugate,
            'middle_column_real': self.middle_column_real,
            'first_row_min': self.first_row_min,
            'valid': self.valid,
            'failures': self.failures(),
        }


def validate_ematrix(E: EMatrix, tol: float = RESIDUE_TOL) -> EMatrixReport:
    """Check every structural requirement on E; failures are reported, not raised."""
    z = E.as_complex()
    n, m = z.shape
    t = tol * _scale(z)
    e11 = z[0, 0]

    first_row = idft_coefficients(z[:, 0])
    middle = None
    if m % 2 == 0:
        middle = bool(np.max(np.abs(z[:, m // 2].imag)) <= t)

    report = EMatrixReport(
        conjugation_closed=is_closed_under_conjugation(z.reshape(-1), t),
        perron_positive=bool(abs(e11.imag) <= t and e11.real > t),
        perron_dominant=bool(abs(e11) >= float(np.max(np.abs(z))) - t),
        first_column_realizable=is_nonnegative_entries(first_row, t),
        columns_conjugate=_columns_conjugate(z, t),
        middle_column_real=middle,
        first_row_min=float(np.min(first_row.real)),
    )
    if not report.valid:
        logger.warning(f"E matrix {n}x{m} fails: {', '.join(report.failures())}")
    return report


def s_family_from_ematrix(E: EMatrix) -> SFamily:
    """S_l = circ(s(l)) where s(l) is the inverse DFT of column l."""
    z = E.entries
    n = E.n
    exact = is_exact_array(z)
    if exact:
        rows = simplify_array((inverse_kernel(n, True) @ z) / sympy.Integer(n))
    else:
        rows = (inverse_kernel(n) @ z) / n
    return SFamily(rows.T[:, circulant_indices(n)])


def theta(E: EMatrix) -> np.ndarray:
    """Theta[j, k] = sum_{p,l} eps_pl tau^{-jp} omega^{-kl} - eps_00."""
    z = E.as_complex()
    T = inverse_kernel(E.n) @ z @ inverse_kernel(E.m).T
    return T - z[0, 0]


def phi(E: EMatrix, tol: float = RESIDUE_TOL) -> float:
    """
    Least Perron value for which the layout assembles into a nonnegative
    matrix: max over j, k of -Re Theta(j, k).
    """
    th = theta(E)
    limit = tol * max(1.0, float(np.sum(np.abs(E.as_complex()))))
    residue = np.abs(th.imag)
    offending = np.argwhere(residue > limit)
    if offending.size:
        # First offending position in row-major order
        j, k = offending[0]
        raise StructuralAsymmetryError(
            f"Theta has imaginary residue {residue[j, k]:.3g} at (j={j}, k={k})",
            position=(int(j), int(k)),
        )
    return float(np.max(-th.real)) + 0.0


def trace_floor(E: EMatrix) -> float:
    """max(0, -sum of the real parts of the non-Perron entries): trace(A) >= 0."""
    z = E.as_complex()
    return max(0.0, -(float(np.sum(z.real)) - float(z[0, 0].real)))


def realize_ematrix(E: EMatrix, tol: float = RESIDUE_TOL) -> CirculantBlockMatrix:
    """Nonnegative block circulant matrix with circulant blocks whose spectrum is {E}."""
    threshold = phi(E, tol)
    z = E.as_complex()
    scale = tol * max(1.0, float(np.sum(np.abs(z))))
    e11 = z[0, 0].real
    if e11 < threshold - scale:
        raise NotRealizableError(
            f"Perron entry {e11:.10g} is below the threshold phi={threshold:.10g}", phi=threshold
        )
    A = assemble(s_family_from_ematrix(E))
    blocks = to_float_array(A.blocks)
    if np.max(np.abs(blocks.imag)) > scale:
        raise StructuralAsymmetryError("Assembled blocks are not real")
    logger.info(f"Realized {E.n}x{E.m} layout: perron={e11:.6g}, phi={threshold:.6g}")
    return CirculantBlockMatrix(blocks.real.astype(complex))


@dataclass(frozen=True)
class ENnssBijection:
    """
    Rearrangement of the entries of an n x m layout, row-major: position p
    of the image takes the entry at position positions[p].
    """
    positions: Tuple[int, ...]
    shape: Tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, 'positions', tuple(int(p) for p in self.positions))
        object.__setattr__(self, 'shape', (int(self.shape[0]), int(self.shape[1])))
        size = self.shape[0] * self.shape[1]
        if sorted(self.positions) != list(range(size)):
            raise InvalidArgumentError(f"Not a permutation of {size} positions")

    @classmethod
    def identity(cls, shape: Tuple[int, int]) -> 'ENnssBijection':
        return cls(tuple(range(shape[0] * shape[1])), shape)

    def is_identity(self) -> bool:
        return self.positions == tuple(range(len(self.positions)))

    def then(self, other: 'ENnssBijection') -> 'ENnssBijection':
        """Apply self, then other (other is expressed on the image of self)."""
        if other.shape != self.shape:
            raise InvalidArgumentError("Bijections act on different shapes")
        return ENnssBijection(tuple(self.positions[q] for q in other.positions), self.shape)

    def to_dict(self) -> Dict[str, Any]:
        return {'shape': list(self.shape), 'positions': list(self.positions)}


def apply_bijection(E: EMatrix, f: ENnssBijection) -> EMatrix:
    if f.shape != E.shape:
        raise InvalidArgumentError(f"Bijection shape {f.shape} does not match E {E.shape}")
    flat = E.entries.reshape(-1)[list(f.positions)]
    return EMatrix(flat.reshape(E.shape))


def is_e_nnss(E: EMatrix, f: ENnssBijection, tol: float = RESIDUE_TOL) -> bool:
    """f keeps the Perron entry and E(f) is again a valid layout."""
    image = apply_bijection(E, f)
    t = tol * _scale(E.as_complex())
    if abs(image.perron - E.perron) > t:
        return False
    return validate_ematrix(image, tol).valid


def column_swap_bijection(shape: Tuple[int, int], first: int = 1,
                          second: Optional[int] = None) -> ENnssBijection:
    """Exchange two columns; by default column `first` with column m - first."""
    n, m = shape
    second = m - first if second is None else second
    if not (0 < first < m and 0 < second < m):
        raise InvalidArgumentError(f"Columns {first}, {second} out of range for m={m}")
    positions = list(range(n * m))
    for i in range(n):
        a, b = i * m + first, i * m + second
        positions[a], positions[b] = b, a
    return ENnssBijection(tuple(positions), shape)


def _conjugate_positions(z: np.ndarray, cells: List[int], tol: float) -> Dict[int, int]:
    pairing = conjugate_pairing(z[cells], tol)
    if pairing is None:
        raise InvalidArgumentError("Entries are not closed under conjugation")
    mapping = {}
    for i, j in pairing:
        mapping[cells[i]] = cells[j]
        mapping[cells[j]] = cells[i]
    return mapping


def conjugation_bijection(E: EMatrix, tol: float = RESIDUE_TOL) -> ENnssBijection:
    """Replace every entry by its conjugate."""
    z = E.as_complex().reshape(-1)
    mapping = _conjugate_positions(z, list(range(z.size)), tol * _scale(z))
    return ENnssBijection(tuple(mapping[p] for p in range(z.size)), E.shape)


def first_column_conjugation_bijection(E: EMatrix, tol: float = RESIDUE_TOL) -> ENnssBijection:
    """Conjugate the first column only."""
    z = E.as_complex().reshape(-1)
    n, m = E.shape
    cells = [i * m for i in range(n)]
    mapping = _conjugate_positions(z, cells, tol * _scale(z))
    return ENnssBijection(tuple(mapping.get(p, p) for p in range(z.size)), E.shape)


def first_column_reordering(shape: Tuple[int, int], alpha: Tuple[int, ...]) -> ENnssBijection:
    """Row p of the first column takes the entry of row alpha[p]."""
    n, m = shape
    positions = list(range(n * m))
    for p in range(n):
        positions[p * m] = alpha[p] * m
    return ENnssBijection(tuple(positions), shape)


def column_pair_swap_bijection(shape: Tuple[int, int], first: int, second: int) -> ENnssBijection:
    """Exchange the column pair (first, m-first) with (second, m-second)."""
    n, m = shape
    positions = list(range(n * m))
    for i in range(n):
        for a, b in ((first, second), (m - first, m - second)):
            positions[i * m + a], positions[i * m + b] = i * m + b, i * m + a
    return ENnssBijection(tuple(positions), shape)


@dataclass(eq=False)
class BlockGuoResult:
    minimal_perron: float
    bijection: ENnssBijection
    witness: CirculantBlockMatrix
    layout: EMatrix
    phi: float
    trace_floor: float
    certified: bool
    exhaustive: bool
    complete: bool = True
    candidates: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'minimal_perron': self.minimal_perron,
            'bijection': self.bijection.to_dict(),
            'witness': self.witness.to_dict(),
            'layout': self.layout.to_dict(),
            'phi': self.phi,
            'trace_floor': self.trace_floor,
            'certified': self.certified,
            'exhaustive': self.exhaustive,
            'complete': self.complete,
            'candidates': self.candidates,
            'upper_bound_only': not self.exhaustive and not self.certified,
        }


class PerronMinimizer:
    """
    Searches E-NNSS rearrangements of a layout for the least Phi.

    Small layouts (n*m up to the exhaustive limit) are searched over every
    distinct structurally valid arrangement of the non-Perron entries.
    Larger ones are searched over compositions of the generator moves.
    """

    def __init__(self, E: EMatrix, max_candidates: int = DEFAULT_MAX_CANDIDATES,
                 tol: float = RESIDUE_TOL, exhaustive_limit: int = EXHAUSTIVE_LIMIT):
        if max_candidates < 1:
            raise InvalidArgumentError(f"Candidate budget must be positive, got {max_candidates}")
        self.E = EMatrix(E.as_complex())
        self.max_candidates = max_candidates
        self.tol = tol
        self.exhaustive_limit = exhaustive_limit
        self.logger = logging.getLogger(get_logger_name("guo_block.search", f"{E.n}x{E.m}"))

        self.flat = self.E.entries.reshape(-1)
        self.tol_abs = tol * _scale(self.flat)

        # Search state
        self.candidates = 0
        self.budget_hit = False
        self.best_phi = math.inf
        self.best_f: Optional[ENnssBijection] = None

    def run(self) -> BlockGuoResult:
        n, m = self.E.shape
        exhaustive = n * m <= self.exhaustive_limit
        self.logger.info(f"Searching {'exhaustively' if exhaustive else 'by generators'} "
                         f"with budget {self.max_candidates}")
        source = self._exhaustive() if exhaustive else self._generated()
        for f in source:
            if self.candidates >= self.max_candidates:
                self.budget_hit = True
                break
            self._consider(f)

        if self.best_f is None:
            if self.budget_hit:
                raise SearchIncompleteError(
                    f"Budget of {self.max_candidates} candidates exhausted without a valid layout"
                )
            raise InvalidArgumentError("No structurally valid layout of these entries exists")
        if self.budget_hit:
            self.logger.warning(f"Budget exhausted after {self.candidates} candidates; "
                                f"returning best so far")

        # A nonnegative trace needs perron >= -(sum of the other entries)
        layout = apply_bijection(self.E, self.best_f)
        floor = trace_floor(self.E)
        minimal = max(self.best_phi, floor)
        certified = self.best_phi <= floor + self.tol_abs
        witness = realize_ematrix(layout.with_perron(minimal), self.tol)
        self.logger.info(f"Minimal Perron value {minimal:.10g} (phi={self.best_phi:.10g}, "
                         f"trace floor={floor:.10g}, certified={certified}) "
                         f"after {self.candidates} candidates")
        return BlockGuoResult(
            minimal_perron=minimal,
            bijection=self.best_f,
            witness=witness,
            layout=layout.with_perron(minimal),
            phi=self.best_phi,
            trace_floor=floor,
            certified=certified,
            exhaustive=exhaustive,
            complete=not self.budget_hit,
            candidates=self.candidates,
        )

    def _consider(self, f: ENnssBijection):
        self.candidates += 1
        try:
            value = phi(apply_bijection(self.E, f), self.tol)
        except StructuralAsymmetryError as e:
            self.logger.debug(f"Skipping layout {f.positions}: {e}")
            return
        # Ties go to the lexicographically smallest positions
        margin = 1e-12 * max(1.0, abs(value))
        if (self.best_f is None or value < self.best_phi - margin
                or (abs(value - self.best_phi) <= margin and f.positions < self.best_f.positions)):
            self.best_phi, self.best_f = value, f
            self.logger.debug(f"New best phi={value:.10g} at {f.positions}")

    def _value_classes(self) -> Tuple[List[complex], List[List[int]]]:
        reps: List[complex] = []
        members: List[List[int]] = []
        for p in range(1, self.flat.size):
            z = self.flat[p]
            for r, rep in enumerate(reps):
                if abs(z - rep) <= self.tol_abs:
                    members[r].append(p)
                    break
            else:
                reps.append(complex(z))
                members.append([p])
        order = sorted(range(len(reps)), key=lambda r: (reps[r].real, reps[r].imag))
        return [reps[r] for r in order], [members[r] for r in order]

    def _slots(self) -> List[Tuple[str, int, int]]:
        n, m = self.E.shape
        slots = []
        # First column: rows p and n-p hold a conjugate pair
        for p in range(1, (n - 1) // 2 + 1):
            slots.append(('pair', p * m, (n - p) * m))
        if n % 2 == 0 and n > 1:
            slots.append(('single', (n // 2) * m, -1))
        # Columns l and m-l are conjugate row by row
        for l in range(1, (m - 1) // 2 + 1):
            for p in range(n):
                slots.append(('pair', p * m + l, p * m + (m - l)))
        if m % 2 == 0 and m > 1:
            for p in range(n):
                slots.append(('single', p * m + m // 2, -1))
        return slots

    def _exhaustive(self) -> Iterator[ENnssBijection]:
        """Every distinct layout with a symmetric first column and conjugate column pairs."""
        reps, members = self._value_classes()
        counts = [len(ms) for ms in members]
        conj_of = []
        for rep in reps:
            match = [r for r, other in enumerate(reps) if abs(other - np.conj(rep)) <= self.tol_abs]
            conj_of.append(match[0] if match else None)
        is_real = [abs(rep.imag) <= self.tol_abs for rep in reps]
        slots = self._slots()
        assign: Dict[int, int] = {}

        def fill(s: int) -> Iterator[ENnssBijection]:
            if s == len(slots):
                yield self._bijection_from(assign, members)
                return
            kind, a, b = slots[s]
            for r in range(len(reps)):
                if kind == 'single':
                    if not is_real[r] or counts[r] < 1:
                        continue
                    counts[r] -= 1
                    assign[a] = r
                    yield from fill(s + 1)
                    counts[r] += 1
                    continue
                c = conj_of[r]
                if c is None or counts[r] < (2 if c == r else 1) or counts[c] < 1:
                    continue
                counts[r] -= 1
                counts[c] -= 1
                assign[a], assign[b] = r, c
                yield from fill(s + 1)
                counts[r] += 1
                counts[c] += 1

        yield from fill(0)

    def _bijection_from(self, assign: Dict[int, int], members: List[List[int]]) -> ENnssBijection:
        cursor = [0] * len(members)
        positions = [0] * self.flat.size
        for p in range(1, self.flat.size):
            r = assign[p]
            positions[p] = members[r][cursor[r]]
            cursor[r] += 1
        return ENnssBijection(tuple(positions), self.E.shape)

    def _moves(self, layout: EMatrix) -> List[ENnssBijection]:
        n, m = layout.shape
        shape = layout.shape
        moves = []
        for build in (conjugation_bijection, first_column_conjugation_bijection):
            try:
                moves.append(build(layout, self.tol))
            except InvalidArgumentError:
                pass
        half = (m - 1) // 2
        for l in range(1, half + 1):
            moves.append(column_swap_bijection(shape, l))
            for l2 in range(l + 1, half + 1):
                moves.append(column_pair_swap_bijection(shape, l, l2))
        # Reorderings of the first column that keep S_0 nonnegative
        if 2 <= n <= GUO_MAX_ORDER:
            tail = layout.as_complex()[1:, 0]
            for alpha in enumerate_assignments(n):
                if alpha.is_identity():
                    continue
                try:
                    needed = lambda0_for_assignment(tail, alpha, self.tol)
                except InvalidAssignmentError:
                    continue
                if needed <= layout.perron.real + self.tol_abs:
                    moves.append(first_column_reordering(shape, alpha.alpha))
        return moves

    def _structurally_valid(self, layout: EMatrix) -> bool:
        z = layout.as_complex()
        m = z.shape[1]
        ok = _first_column_symmetric(z, self.tol_abs) and _columns_conjugate(z, self.tol_abs)
        if ok and m % 2 == 0:
            ok = bool(np.max(np.abs(z[:, m // 2].imag)) <= self.tol_abs)
        return ok

    def _generated(self) -> Iterator[ENnssBijection]:
        """Breadth-first compositions of the generator moves, up to a fixed depth."""
        start = ENnssBijection.identity(self.E.shape)
        seen = {start.positions}
        queue = deque([(start, 0)])
        while queue:
            f, depth = queue.popleft()
            layout = apply_bijection(self.E, f)
            if self._structurally_valid(layout):
                yield f
            if depth == GENERATOR_DEPTH:
                continue
            for g in self._moves(layout):
                h = f.then(g)
                if h.positions not in seen:
                    seen.add(h.positions)
                    queue.append((h, depth + 1))


def min_perron(E: EMatrix, budget: Optional[int] = None, tol: float = RESIDUE_TOL,
               exhaustive_limit: int = EXHAUSTIVE_LIMIT) -> BlockGuoResult:
    """Least Perron value over E-NNSS rearrangements of E, floored at the trace bound."""
    search = PerronMinimizer(
        E,
        max_candidates=DEFAULT_MAX_CANDIDATES if budget is None else budget,
        tol=tol,
        exhaustive_limit=exhaustive_limit,
    )
    return search.run()
