"""Dense tensor primitives: mode-n products, contraction, middle-mode slicing.

Tensors are plain C-contiguous ``numpy.ndarray`` values of dtype float64
(complex128 inside transform-domain intermediates).  The canonical memory
layout is last-index-fastest, which is exactly NumPy's C order, so file
formats and oracles can rely on ``ndarray.tobytes()`` directly.

Mode indices in the public API are 1-based.  For an order-N tensor the
"middle" modes are 2..N-1; modes 1 and N carry the matrix structure of the
slice-wise products.  Order-2 tensors are admitted everywhere with zero
middle modes.
"""

from __future__ import annotations

from itertools import product as _iter_product
from math import prod

import numpy as np

from . import backend

__all__ = [
    "as_tensor",
    "frob",
    "mode_n_product",
    "contract",
    "middle_shape",
    "middle_indices",
    "middle_slice",
    "set_middle_slice",
    "tc_transpose",
    "t_transpose",
    "slicewise_product",
]


def as_tensor(data) -> np.ndarray:
    """Validate/convert ``data`` to a canonical float64 C-contiguous tensor."""
    t = np.ascontiguousarray(data, dtype=np.float64)
    if t.ndim < 1:
        t = t.reshape(1)
    if any(n < 1 for n in t.shape):
        raise ValueError(f"every mode length must be >= 1, got shape {t.shape}")
    return t


def frob(t: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(t.ravel()))


def _check_mode(t: np.ndarray, n: int) -> None:
    if not 1 <= n <= t.ndim:
        raise ValueError(f"mode {n} out of range for order-{t.ndim} tensor")


def mode_n_product(m: np.ndarray, t: np.ndarray, n: int) -> np.ndarray:
    """Multiply every mode-``n`` fiber of ``t`` by the matrix ``m``.

    ``m`` has shape (J, I_n); the result replaces mode length I_n by J.
    """
    m = np.asarray(m)
    _check_mode(t, n)
    if m.ndim != 2:
        raise ValueError("mode_n_product expects a matrix as first argument")
    if m.shape[1] != t.shape[n - 1]:
        raise ValueError(
            f"matrix columns ({m.shape[1]}) must equal mode-{n} length ({t.shape[n - 1]})"
        )
    out = np.tensordot(m, t, axes=([1], [n - 1]))
    return np.ascontiguousarray(np.moveaxis(out, 0, n - 1))


def contract(a: np.ndarray, b: np.ndarray, modes_a, modes_b) -> np.ndarray:
    """Contractive product over the listed (1-based) modes.

    The result is indexed by the free modes of ``a`` followed by the free
    modes of ``b``; each listed mode pair is summed over.
    """
    modes_a = list(modes_a)
    modes_b = list(modes_b)
    if len(modes_a) != len(modes_b):
        raise ValueError("contraction mode lists must have equal length")
    if len(set(modes_a)) != len(modes_a) or len(set(modes_b)) != len(modes_b):
        raise ValueError("repeated mode in contraction list")
    for ma, mb in zip(modes_a, modes_b):
        _check_mode(a, ma)
        _check_mode(b, mb)
        if a.shape[ma - 1] != b.shape[mb - 1]:
            raise ValueError(
                f"contraction length mismatch: mode {ma} of A is {a.shape[ma - 1]}, "
                f"mode {mb} of B is {b.shape[mb - 1]}"
            )
    axes_a = [m - 1 for m in modes_a]
    axes_b = [m - 1 for m in modes_b]
    out = np.tensordot(a, b, axes=(axes_a, axes_b))
    if out.ndim == 0:
        out = out.reshape(1)
    return np.ascontiguousarray(out)


def middle_shape(t: np.ndarray) -> tuple:
    """Lengths of modes 2..N-1 (empty for order <= 2)."""
    return tuple(t.shape[1:-1]) if t.ndim >= 3 else ()


def middle_indices(t: np.ndarray):
    """Iterate all 1-based middle multi-indices of ``t`` in lexicographic order."""
    return _iter_product(*(range(1, n + 1) for n in middle_shape(t)))


def _middle_key(t: np.ndarray, idx) -> tuple:
    idx = tuple(idx)
    mids = middle_shape(t)
    if len(idx) != len(mids):
        raise ValueError(f"middle index has length {len(idx)}, expected {len(mids)}")
    for i, n in zip(idx, mids):
        if not 1 <= i <= n:
            raise ValueError(f"middle index {idx} out of bounds for middle shape {mids}")
    return tuple(i - 1 for i in idx)


def middle_slice(t: np.ndarray, idx) -> np.ndarray:
    """The I1 x IN matrix with the middle modes fixed at the 1-based ``idx``.

    For order 2 the only slice (``idx=()``) is the tensor itself.
    """
    if t.ndim < 2:
        raise ValueError("middle_slice requires order >= 2")
    key = _middle_key(t, idx)
    return np.ascontiguousarray(t[(slice(None), *key, slice(None))])


def set_middle_slice(t: np.ndarray, idx, value: np.ndarray) -> None:
    """Write a middle slice in place (assembly helper, inverse of middle_slice)."""
    if t.ndim < 2:
        raise ValueError("set_middle_slice requires order >= 2")
    key = _middle_key(t, idx)
    t[(slice(None), *key, slice(None))] = value


def tc_transpose(a: np.ndarray) -> np.ndarray:
    """Swap modes 1 and N, middle modes untouched.

    This is the adjoint with respect to the reflective-boundary (cosine)
    product; for matrices it is the ordinary transpose, and it is an
    involution.
    """
    if a.ndim < 2:
        raise ValueError("tc_transpose requires order >= 2")
    return np.ascontiguousarray(np.swapaxes(a, 0, -1))


def t_transpose(a: np.ndarray) -> np.ndarray:
    """Adjoint with respect to the periodic-boundary (Fourier) product.

    Swaps modes 1 and N and additionally reverses each middle mode
    cyclically (index 1 fixed, i -> n+2-i), the multi-mode extension of the
    classic frontal-slice-transpose-and-reverse rule.  For matrices it is
    the ordinary transpose.
    """
    if a.ndim < 2:
        raise ValueError("t_transpose requires order >= 2")
    out = np.swapaxes(a, 0, -1)
    for ax in range(1, a.ndim - 1):
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return np.ascontiguousarray(out)


def _flat3(t: np.ndarray) -> np.ndarray:
    """View (I1, middle..., IN) as (I1, prod(middle), IN); order 2 gets B=1."""
    if t.ndim == 2:
        return t.reshape(t.shape[0], 1, t.shape[1])
    return t.reshape(t.shape[0], prod(t.shape[1:-1]), t.shape[-1])


def _check_slicewise_shapes(a: np.ndarray, b: np.ndarray) -> None:
    if a.ndim != b.ndim:
        raise ValueError(
            f"operands must have equal order, got {a.ndim} and {b.ndim} "
            "(no implicit broadcasting)"
        )
    if a.ndim < 2:
        raise ValueError("slice-wise products require order >= 2")
    if middle_shape(a) != middle_shape(b):
        raise ValueError(
            f"middle shapes differ: {middle_shape(a)} vs {middle_shape(b)}"
        )
    if a.shape[-1] != b.shape[0]:
        raise ValueError(
            f"inner dimensions do not conform: {a.shape} x {b.shape}"
        )


def slicewise_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Middle-mode-wise matrix product: each result slice at a middle index
    is the matrix product of the two operand slices there."""
    _check_slicewise_shapes(a, b)
    y3 = backend.slicewise_matmul(_flat3(a), _flat3(b))
    return y3.reshape(a.shape[:-1] + (b.shape[-1],))
