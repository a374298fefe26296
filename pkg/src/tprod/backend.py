"""Kernel backend selection: compiled Cython core with a NumPy fallback.

The hot inner loop of every product and decomposition here is a batch of
independent matrix products over the flattened middle index.  The compiled
kernel calls BLAS gemm directly on the strided middle slices, avoiding the
operand copies the NumPy path needs to set up stacked matmul.  Which
implementation runs is decided at import (compiled if the extension built,
else NumPy) and can be forced with the ``TPROD_BACKEND`` environment
variable or :func:`set_backend`.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from . import _kernels

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on build environment
    _kernels = None
    HAVE_COMPILED = False

# BLAS integer arguments are 32-bit here; oversized strides fall back.
_MAX_BLAS_DIM = 2**31 - 1


def available_backends() -> tuple:
    return ("compiled", "numpy") if HAVE_COMPILED else ("numpy",)


def _default_backend() -> str:
    env = os.environ.get("TPROD_BACKEND", "").strip().lower()
    if env in ("compiled", "numpy"):
        if env == "compiled" and not HAVE_COMPILED:
            raise ImportError(
                "TPROD_BACKEND=compiled but the tprod._kernels extension is not built"
            )
        return env
    return "compiled" if HAVE_COMPILED else "numpy"


_ACTIVE = _default_backend()


def active_backend() -> str:
    return _ACTIVE


def set_backend(name: str) -> None:
    """Select 'compiled' or 'numpy' for subsequent kernel calls."""
    global _ACTIVE
    if name not in ("compiled", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "compiled" and not HAVE_COMPILED:
        raise ValueError("compiled backend unavailable (extension not built)")
    _ACTIVE = name


def _slicewise_matmul_numpy(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    # (m, B, k) @ (k, B, n) -> (m, B, n), batched over the middle axis.
    y = np.matmul(np.moveaxis(a, 1, 0), np.moveaxis(x, 1, 0))
    return np.ascontiguousarray(np.moveaxis(y, 0, 1))


def _fits_blas(a: np.ndarray, x: np.ndarray) -> bool:
    b = a.shape[1]
    return max(b * a.shape[2], b * x.shape[2], a.shape[0], x.shape[0]) <= _MAX_BLAS_DIM


def slicewise_matmul(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Per-slice matrix product of (m, B, k) with (k, B, n) along axis 1.

    Both operands must share dtype float64 or complex128; slices are
    independent, so the result does not depend on evaluation order.
    """
    if a.shape[1] != x.shape[1] or a.shape[2] != x.shape[0]:
        raise ValueError(f"non-conformable slice stacks: {a.shape} x {x.shape}")
    complex_in = np.iscomplexobj(a) or np.iscomplexobj(x)
    dt = np.complex128 if complex_in else np.float64
    a = np.ascontiguousarray(a, dtype=dt)
    x = np.ascontiguousarray(x, dtype=dt)
    if _ACTIVE == "compiled" and _fits_blas(a, x):
        out = np.empty((a.shape[0], a.shape[1], x.shape[2]), dtype=dt)
        if complex_in:
            _kernels.slicewise_matmul_c128(a, x, out)
        else:
            _kernels.slicewise_matmul_f64(a, x, out)
        return out
    return _slicewise_matmul_numpy(a, x)
