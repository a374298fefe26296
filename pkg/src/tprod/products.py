"""Fast tensor-tensor products via transform-domain slice multiplication.

Both products share one pipeline: transform the middle modes, multiply the
I1 x IN slices at every middle index, transform back.  The periodic
product uses the Fourier transform (complex intermediates, real result up
to rounding); the reflective product uses the scaled cosine matrix C and
stays real throughout.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .core import _check_slicewise_shapes, _flat3, as_tensor, frob
from . import backend
from .transforms import apply_cosine_modes, apply_fourier_modes

__all__ = [
    "ProductKind",
    "middle_modes",
    "to_transform",
    "from_transform",
    "transform_slicewise",
    "tproduct",
    "tcproduct",
    "product",
    "identity_tensor",
    "relative_error",
]

# Imaginary residue of a periodic-product result beyond this fraction of
# its norm indicates a bug rather than rounding.
_IMAG_RESIDUE_LIMIT = 1e-9


class ProductKind(Enum):
    """Which block-convolution boundary the product uses."""

    T = "t"  # periodic boundary, Fourier transform
    TC = "tc"  # reflective boundary, scaled cosine transform

    @classmethod
    def parse(cls, value) -> "ProductKind":
        if isinstance(value, cls):
            return value
        for kind in cls:
            if kind.value == value:
                return kind
        raise ValueError(f"unknown product kind {value!r} (expected 't' or 'tc')")


def middle_modes(order: int) -> list:
    """1-based transform modes 2..N-1 (empty for order 2)."""
    return list(range(2, order))


def to_transform(t: np.ndarray, kind: ProductKind) -> np.ndarray:
    """Transform-domain representation of ``t`` (cacheable, immutable).

    Complex128 for the periodic kind, float64 for the reflective kind.
    """
    kind = ProductKind.parse(kind)
    modes = middle_modes(t.ndim)
    if kind is ProductKind.T:
        return apply_fourier_modes(t, modes)
    return apply_cosine_modes(t, modes, "c")


def from_transform(tbar: np.ndarray, kind: ProductKind, real: bool = True) -> np.ndarray:
    """Invert :func:`to_transform`; with ``real`` the periodic result drops
    its (rounding-level) imaginary part after a residue check."""
    kind = ProductKind.parse(kind)
    modes = middle_modes(tbar.ndim)
    if kind is ProductKind.TC:
        return apply_cosine_modes(np.asarray(tbar, dtype=np.float64), modes, "cinv")
    out = apply_fourier_modes(tbar, modes, inverse=True)
    if not real:
        return out
    residue = float(np.linalg.norm(out.imag.ravel()))
    scale = float(np.linalg.norm(out.ravel()))
    if residue > _IMAG_RESIDUE_LIMIT * max(scale, 1.0):
        raise ArithmeticError(
            f"imaginary residue {residue:.3e} exceeds {_IMAG_RESIDUE_LIMIT:.0e} of norm"
        )
    return np.ascontiguousarray(out.real)


def transform_slicewise(abar: np.ndarray, xbar: np.ndarray) -> np.ndarray:
    """Slice-wise matrix product of two transform-domain representations."""
    _check_slicewise_shapes(abar, xbar)
    y3 = backend.slicewise_matmul(_flat3(abar), _flat3(xbar))
    return y3.reshape(abar.shape[:-1] + (xbar.shape[-1],))


def tproduct(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Periodic-boundary block-convolution product of conformable tensors."""
    a, x = as_tensor(a), as_tensor(x)
    _check_slicewise_shapes(a, x)
    ybar = transform_slicewise(to_transform(a, ProductKind.T), to_transform(x, ProductKind.T))
    return from_transform(ybar, ProductKind.T)


def tcproduct(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Reflective-boundary block-convolution product (all-real pipeline)."""
    a, x = as_tensor(a), as_tensor(x)
    _check_slicewise_shapes(a, x)
    ybar = transform_slicewise(to_transform(a, ProductKind.TC), to_transform(x, ProductKind.TC))
    return from_transform(ybar, ProductKind.TC)


def product(kind: ProductKind, a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Dispatch to :func:`tproduct` or :func:`tcproduct`."""
    return tproduct(a, x) if ProductKind.parse(kind) is ProductKind.T else tcproduct(a, x)


def identity_tensor(kind: ProductKind, n: int, middle=()) -> np.ndarray:
    """Identity element E: the (1,...,1) middle slice is I_n, the rest zero.

    The same spatial tensor is the identity for both kinds: its transform
    profile along every middle mode is the first basis column, which is
    all ones for the Fourier matrix and for the scaled cosine matrix.
    """
    ProductKind.parse(kind)
    if n < 1:
        raise ValueError("identity size must be >= 1")
    middle = tuple(int(m) for m in middle)
    e = np.zeros((n, *middle, n))
    e[(slice(None), *(0,) * len(middle), slice(None))] = np.eye(n)
    return e


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    """‖a - b‖_F / max(‖a‖_F, 1e-300); convenience for tests and the CLI."""
    return frob(np.asarray(a) - np.asarray(b)) / max(frob(np.asarray(a)), 1e-300)
