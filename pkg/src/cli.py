"""
Command-line front end.

Every command reads one JSON document (from --in or stdin) and writes one
document to --out or stdout. Diagnostics go to stderr.

Exit codes: 0 success, 2 input or validation error, 3 numeric failure or
incomplete search, 4 not realizable.
"""
import argparse
import logging
import sys
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from . import __version__
from .block_ops import (
    CirculantBlockMatrix, SFamily, assemble, eigenpair_residuals, family_eigenpairs,
    full_matrix_spectrum, is_nonnegative_family, l_matrices, s_matrices, spectrum,
)
from .circulant import Circulant, circulant_from_spectrum, eigenvalues, is_nonnegative
from .common import DocumentEnvelope, DocumentKind, InvalidArgumentError, NotRealizableError, ToolkitError
from .config import ToolkitConfig
from .dft_core import dft_eigenvalues, idft_coefficients
from .documents import DocumentStore, encode_array
from .exact import to_float_array
from .guo_block import EMatrix, min_perron, phi, realize_ematrix, validate_ematrix
from .guo_circulant import guo_index
from .spectra import SpectrumList, check_necessary_conditions, match_spectra
from .structure import classify_family, detect_block_structure

logger = logging.getLogger("cli")

Result = Tuple[DocumentEnvelope, int]

SELFCHECK_DFT_TOL = 1e-10
SELFCHECK_ROUNDTRIP_TOL = 1e-9


def _setup_logging(level: str):
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%H:%M:%S',
        stream=sys.stderr,
    )


class CommandContext:
    """Resolved configuration plus document I/O for one invocation."""

    def __init__(self, args: argparse.Namespace, config: ToolkitConfig):
        self.args = args
        self.config = config
        self.store = DocumentStore()

    @property
    def exact(self) -> bool:
        return self.config.exact

    def read(self, *kinds: DocumentKind, path: Optional[str] = None) -> DocumentEnvelope:
        return self.store.read(path if path is not None else self.args.input, expected=kinds)

    def document(self, kind: DocumentKind, payload: Dict) -> DocumentEnvelope:
        meta = {
            'tool_version': __version__,
            'tol': self.config.tol,
            'exact': self.config.exact,
            'command': self.args.command,
        }
        return DocumentEnvelope(kind=kind, payload=payload, meta=meta)

    def report(self, payload: Dict) -> DocumentEnvelope:
        return self.document(DocumentKind.REPORT, payload)


def _family_from(ctx: CommandContext, doc: DocumentEnvelope) -> SFamily:
    if doc.kind == DocumentKind.BLOCK_MATRIX:
        return s_matrices(CirculantBlockMatrix.from_dict(doc.payload, ctx.exact))
    return SFamily.from_dict(doc.payload, ctx.exact)


def cmd_circulant_eigs(ctx: CommandContext) -> Result:
    c = Circulant.from_dict(ctx.read(DocumentKind.CIRCULANT).payload, ctx.exact)
    return ctx.document(DocumentKind.SPECTRUM, eigenvalues(c).to_dict()), 0


def cmd_realize_circulant(ctx: CommandContext) -> Result:
    lam = SpectrumList.from_dict(ctx.read(DocumentKind.SPECTRUM).payload, ctx.exact)
    c = circulant_from_spectrum(lam.entries)
    nonneg = is_nonnegative(c, ctx.config.tol)
    payload = c.to_dict()
    payload.update({'nonnegative': nonneg, 'min_entry': c.min_entry()})
    code = 0
    if ctx.args.require_nonnegative and not nonneg:
        logger.error(f"Circulant is not nonnegative (min entry {c.min_entry():.6g})")
        code = NotRealizableError.exit_code
    return ctx.document(DocumentKind.CIRCULANT, payload), code


def cmd_guo(ctx: CommandContext) -> Result:
    if ctx.args.mode == "block":
        E = EMatrix.from_dict(ctx.read(DocumentKind.E_MATRIX).payload)
        result = min_perron(E, budget=ctx.config.max_candidates, tol=ctx.config.tol,
                            exhaustive_limit=ctx.config.exhaustive_limit)
        return ctx.report({'mode': 'block', **result.to_dict()}), 0
    tail = SpectrumList.from_dict(ctx.read(DocumentKind.SPECTRUM).payload)
    result = guo_index(tail.entries)
    return ctx.report({'mode': 'circulant', **result.to_dict()}), 0


def cmd_block(ctx: CommandContext) -> Result:
    doc = ctx.read(DocumentKind.S_FAMILY, DocumentKind.BLOCK_MATRIX)
    S = _family_from(ctx, doc)
    action = ctx.args.action
    if action == "assemble":
        return ctx.document(DocumentKind.BLOCK_MATRIX, assemble(S).to_dict()), 0
    if action == "spectrum":
        return ctx.document(DocumentKind.SPECTRUM, spectrum(assemble(S)).to_dict()), 0
    if action == "classify":
        predicted = classify_family(S, ctx.config.tol)
        detected = detect_block_structure(assemble(S), ctx.config.tol)
        return ctx.report({'family': predicted.to_dict(), 'block_matrix': detected.to_dict()}), 0
    L = l_matrices(S)
    return ctx.report({
        'nonnegative': is_nonnegative_family(S, ctx.config.tol),
        'min_entry': float(np.min(to_float_array(L.matrices).real)),
        'l_matrices': encode_array(L.matrices),
    }), 0


def cmd_ematrix(ctx: CommandContext) -> Result:
    E = EMatrix.from_dict(ctx.read(DocumentKind.E_MATRIX).payload)
    tol = ctx.config.tol
    action = ctx.args.action
    if action == "validate":
        return ctx.report(validate_ematrix(E, tol).to_dict()), 0
    if action == "phi":
        return ctx.report({'phi': phi(E, tol), 'perron': E.perron.real}), 0
    if action == "realize":
        A = realize_ematrix(E, tol)
        return ctx.document(DocumentKind.BLOCK_MATRIX, A.to_dict()), 0
    result = min_perron(E, budget=ctx.config.max_candidates, tol=tol,
                        exhaustive_limit=ctx.config.exhaustive_limit)
    return ctx.report(result.to_dict()), 0


def cmd_verify(ctx: CommandContext) -> Result:
    A = CirculantBlockMatrix.from_dict(ctx.read(DocumentKind.BLOCK_MATRIX).payload)
    if not ctx.args.against:
        raise InvalidArgumentError("verify needs --against with a spectrum document")
    expected = SpectrumList.from_dict(ctx.read(DocumentKind.SPECTRUM, path=ctx.args.against).payload)
    computed = full_matrix_spectrum(A.to_matrix(), max_iter=ctx.config.root_max_iter)
    distance = match_spectra(computed, expected)
    residual = eigenpair_residuals(A, family_eigenpairs(A))
    # Computed roots are only as good as the match tolerance
    conditions = check_necessary_conditions(computed, ctx.config.kmax, ctx.config.mmax,
                                            tol=ctx.config.match_tol)
    matched = distance <= ctx.config.match_tol
    if not matched:
        logger.warning(f"Spectra differ: max matched distance {distance:.3g}")
    return ctx.report({
        'match': matched,
        'max_distance': distance,
        'match_tol': ctx.config.match_tol,
        'max_eigenpair_residual': residual,
        'computed': encode_array(computed.entries),
        'necessary_conditions': conditions.to_dict(),
    }), 0


def cmd_selfcheck(ctx: CommandContext) -> Result:
    """Seeded randomized checks of the transform identities."""
    rng = np.random.default_rng(ctx.args.seed)
    trials = ctx.args.trials
    dft_error = 0.0
    roundtrip_error = 0.0
    disagreements = 0
    for _ in range(trials):
        m = int(rng.integers(1, 13))
        a = rng.uniform(-10, 10, m) + 1j * rng.uniform(-10, 10, m)
        dft_error = max(dft_error, float(np.max(np.abs(idft_coefficients(dft_eigenvalues(a)) - a))))

        n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        S = SFamily(rng.uniform(-5, 5, (m, n, n)) + 1j * rng.uniform(-5, 5, (m, n, n)))
        back = s_matrices(assemble(S)).matrices
        roundtrip_error = max(roundtrip_error, float(np.max(np.abs(back - S.matrices))))

        A = CirculantBlockMatrix(rng.uniform(-0.2, 1.0, (n, n, m)))
        family = s_matrices(A)
        dense_nonneg = bool(np.all(A.to_matrix().real >= -ctx.config.tol))
        if is_nonnegative_family(family, ctx.config.tol) != dense_nonneg:
            disagreements += 1
    passed = (dft_error <= SELFCHECK_DFT_TOL and roundtrip_error <= SELFCHECK_ROUNDTRIP_TOL
              and disagreements == 0)
    return ctx.report({
        'seed': ctx.args.seed,
        'trials': trials,
        'dft_roundtrip_max_error': dft_error,
        'assemble_roundtrip_max_error': roundtrip_error,
        'nonnegativity_disagreements': disagreements,
        'passed': passed,
    }), 0 if passed else 3


COMMANDS: Dict[str, Callable[[CommandContext], Result]] = {
    'circulant-eigs': cmd_circulant_eigs,
    'realize-circulant': cmd_realize_circulant,
    'guo': cmd_guo,
    'block': cmd_block,
    'ematrix': cmd_ematrix,
    'verify': cmd_verify,
    'selfcheck': cmd_selfcheck,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--in', dest='input', default=None, help='Input document (default: stdin)')
    common.add_argument('--out', dest='output', default=None, help='Output document (default: stdout)')
    common.add_argument('--tol', type=float, default=None, help='Nonnegativity tolerance')
    common.add_argument('--exact', action='store_true', default=None, help='Use exact rational arithmetic')
    common.add_argument('--seed', type=int, default=0, help='Seed for randomized commands')
    common.add_argument('--max-candidates', type=int, default=None, help='Layout search budget')
    common.add_argument('--config', default=None, help='YAML configuration file')
    common.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING or ERROR')

    parser = argparse.ArgumentParser(
        prog='circulant-niep',
        description='Circulant and block circulant spectral toolkit',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('circulant-eigs', parents=[common], help='Eigenvalues of a circulant')
    p = sub.add_parser('realize-circulant', parents=[common], help='Circulant with a given spectrum')
    p.add_argument('--require-nonnegative', action='store_true',
                   help='Exit 4 when the circulant has a negative entry')
    p = sub.add_parser('guo', parents=[common], help="Guo's index of a tail or an E matrix")
    p.add_argument('--mode', choices=['circulant', 'block'], default='circulant')
    p = sub.add_parser('block', parents=[common], help='Block circulant operations on an S-family')
    p.add_argument('action', choices=['assemble', 'spectrum', 'classify', 'check-nonneg'])
    p = sub.add_parser('ematrix', parents=[common], help='E matrix operations')
    p.add_argument('action', choices=['validate', 'phi', 'realize', 'min-perron'])
    p = sub.add_parser('verify', parents=[common], help='Check a block matrix against a spectrum')
    p.add_argument('--against', default=None, help='Spectrum document to compare with')
    p = sub.add_parser('selfcheck', parents=[common], help='Seeded randomized property checks')
    p.add_argument('--trials', type=int, default=50)
    return parser


def _resolve_config(args: argparse.Namespace) -> ToolkitConfig:
    config = ToolkitConfig.from_yaml(args.config) if args.config else ToolkitConfig()
    return config.merged({
        'tol': args.tol,
        'exact': args.exact,
        'max_candidates': args.max_candidates,
        'log_level': args.log_level,
    })


def _error_document(args: argparse.Namespace, error: ToolkitError) -> DocumentEnvelope:
    payload = {'error': error.kind.value, 'message': str(error)}
    for attr in ('phi', 'position'):
        value = getattr(error, attr, None)
        if value is not None:
            payload[attr] = list(value) if isinstance(value, tuple) else value
    return DocumentEnvelope(
        kind=DocumentKind.REPORT,
        payload=payload,
        meta={'tool_version': __version__, 'command': args.command},
    )


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    store = DocumentStore()
    try:
        config = _resolve_config(args)
    except ToolkitError as e:
        _setup_logging('WARNING')
        logger.error(str(e))
        store.write(_error_document(args, e), args.output)
        return e.exit_code
    _setup_logging(config.log_level)

    # Command errors become report documents on the same output
    ctx = CommandContext(args, config)
    try:
        doc, code = COMMANDS[args.command](ctx)
    except ToolkitError as e:
        logger.error(f"{e.kind.value}: {e}")
        doc, code = _error_document(args, e), e.exit_code
    try:
        store.write(doc, args.output)
    except ToolkitError as e:
        logger.error(str(e))
        return e.exit_code
    return code


def run():
    sys.exit(main())


if __name__ == '__main__':
    run()
