"""
Exact arithmetic backend built on sympy.

Values are sympy numbers stored in numpy object arrays, so the same
tensordot/matmul code paths serve both backends.
"""
from fractions import Fraction
from numbers import Number
from typing import Any, Callable, Iterable, Optional, Tuple

import numpy as np
import sympy

from .common import InvalidArgumentError


def to_exact(value: Any) -> sympy.Expr:
    """Convert a scalar (int, Fraction, float, complex, "p/q" string) to sympy."""
    if isinstance(value, sympy.Basic):
        return value
    if isinstance(value, str):
        try:
            return sympy.Rational(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise InvalidArgumentError(f"Not a rational literal: {value!r}")
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, (bool, np.bool_)):
        raise InvalidArgumentError("Booleans are not numeric entries")
    if isinstance(value, (complex, np.complexfloating)):
        return to_exact(float(value.real)) + sympy.I * to_exact(float(value.imag))
    if isinstance(value, (int, np.integer)):
        return sympy.Integer(int(value))
    if isinstance(value, Number):
        if not np.isfinite(float(value)):
            raise InvalidArgumentError("Non-finite entry")
        return sympy.nsimplify(float(value), rational=True)
    raise InvalidArgumentError(f"Unsupported scalar type: {type(value).__name__}")


def object_map(fn: Callable[[Any], Any], arr: np.ndarray) -> np.ndarray:
    """Apply `fn` to every entry, returning an object array of the same shape."""
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = fn(arr[idx])
    return out


def exact_array(values: Iterable) -> np.ndarray:
    """Object array of sympy numbers with the shape of `values`."""
    return object_map(to_exact, np.array(values, dtype=object))


def root_of_unity(order: int, exponent: int) -> sympy.Expr:
    """Exact omega^exponent for the primitive root of the given order."""
    r = exponent % order
    angle = 2 * sympy.pi * sympy.Rational(r, order)
    return sympy.expand(sympy.cos(angle) + sympy.I * sympy.sin(angle))


def rational_parts(value: sympy.Expr) -> Optional[Tuple[sympy.Rational, sympy.Rational]]:
    """(re, im) as sympy Rationals, or None if either part is irrational."""
    re, im = sympy.expand(value).as_real_imag()
    if re.is_rational and im.is_rational:
        return sympy.Rational(re), sympy.Rational(im)
    return None


def _tidy(value: sympy.Expr) -> sympy.Expr:
    v = sympy.expand(value)
    if rational_parts(v) is None:
        v = sympy.simplify(v)
    return v


def simplify_array(arr: np.ndarray) -> np.ndarray:
    """Expand every entry, simplifying further only where irrational terms remain."""
    return object_map(_tidy, arr)


def is_exact_array(arr: Any) -> bool:
    return isinstance(arr, np.ndarray) and arr.dtype == object


def to_float_array(arr: Any) -> np.ndarray:
    """Evaluate an exact array to complex128 (float arrays pass through)."""
    if not is_exact_array(arr):
        return np.asarray(arr, dtype=complex)
    out = np.empty(arr.shape, dtype=complex)
    for idx in np.ndindex(arr.shape):
        out[idx] = complex(sympy.N(arr[idx], 30))
    return out
